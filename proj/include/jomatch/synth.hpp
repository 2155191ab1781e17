#pragma once

#include "jomatch/instance.hpp"

#include <cstdint>
#include <random>

namespace jomatch {

struct CorruptionParams {
  int n = 0;
  int d = 0;
  double p_true = 1.0;
  double p_obs = 1.0;
  uint64_t seed = 0;
  void validate() const;
};

// Name of the pseudo-random stream construction, echoed in output metadata.
const char* generator_name();

uint64_t splitmix64(uint64_t x);
// Independent engine for the pair (i,j) under `seed`.
std::mt19937_64 pair_engine(uint64_t seed, int i, int j);
// Uniform double in [0,1) with 53 random bits.
double uniform01(std::mt19937_64& g);
// Uniform integer in [0, bound) by rejection.
uint64_t uniform_below(std::mt19937_64& g, uint64_t bound);
// Uniform random permutation of [d] (Fisher-Yates).
std::vector<int> random_permutation(std::mt19937_64& g, int d);

Instance generate(const CorruptionParams& params);

}  // namespace jomatch
