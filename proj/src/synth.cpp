#include "jomatch/synth.hpp"

#include <numeric>

namespace jomatch {

void CorruptionParams::validate() const {
  if (n < 2) throw ConfigError("n must be >= 2");
  if (d < 1) throw ConfigError("d must be >= 1");
  if (!(p_true >= 0 && p_true <= 1)) throw ConfigError("p_true must lie in [0,1]");
  if (!(p_obs > 0 && p_obs <= 1)) throw ConfigError("p_obs must lie in (0,1]");
}

const char* generator_name() { return "mt19937_64 seeded by splitmix64(seed,i,j)"; }

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 pair_engine(uint64_t seed, int i, int j) {
  uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<uint64_t>(i));
  h = splitmix64(h ^ (static_cast<uint64_t>(j) << 32));
  return std::mt19937_64(h);
}

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

uint64_t uniform_below(std::mt19937_64& g, uint64_t bound) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v;
  do v = g();
  while (v >= limit);
  return v % bound;
}

std::vector<int> random_permutation(std::mt19937_64& g, int d) {
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = d - 1; k > 0; --k) std::swap(perm[k], perm[uniform_below(g, static_cast<uint64_t>(k) + 1)]);
  return perm;
}

Instance generate(const CorruptionParams& params) {
  params.validate();
  Instance inst(ObjectConfig::uniform(params.n, params.d));
  for (int i = 0; i < params.n; ++i)
    for (int j = i + 1; j < params.n; ++j) {
      auto g = pair_engine(params.seed, i, j);
      double observe = uniform01(g);
      double correct = uniform01(g);
      if (observe >= params.p_obs) continue;
      BinaryBlock block = BinaryBlock::Zero(params.d, params.d);
      if (correct < params.p_true) {
        block.setIdentity();
      } else {
        auto perm = random_permutation(g, params.d);
        for (int t = 0; t < params.d; ++t) block(t, perm[t]) = 1;
      }
      inst.set_input(i, j, std::move(block));
    }
  inst.ground_truth = identity_labeling(inst.config);
  return inst;
}

}  // namespace jomatch
