#include "jomatch/instance.hpp"

#include <algorithm>
#include <limits>

namespace jomatch {

ObjectConfig::ObjectConfig(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ConfigError("need at least 2 objects");
  for (int d : sizes_)
    if (d < 1) throw ConfigError("object sizes must be >= 1");
  element_offset_.reserve(sizes_.size());
  for (int d : sizes_) {
    element_offset_.push_back(static_cast<int>(total_));
    if (total_ > std::numeric_limits<int>::max() - d) throw ConfigError("total element count overflows");
    total_ += d;
    max_size_ = std::max(max_size_, d);
  }
  const int n = this->n();
  pairs_.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      pairs_.emplace_back(i, j);
      offsets_.push_back(offsets_.back() + static_cast<int64_t>(sizes_[i]) * sizes_[j]);
    }
}

ObjectConfig ObjectConfig::uniform(int n, int d) { return ObjectConfig(std::vector<int>(std::max(n, 0), d)); }

bool ObjectConfig::uniform_size() const {
  return std::all_of(sizes_.begin(), sizes_.end(), [&](int d) { return d == sizes_.front(); });
}

std::pair<int, int> ObjectConfig::element_at(int e) const {
  auto it = std::upper_bound(element_offset_.begin(), element_offset_.end(), e);
  int i = static_cast<int>(it - element_offset_.begin()) - 1;
  return {i, e - element_offset_[i]};
}

void Instance::set_input(int i, int j, BinaryBlock block) {
  if (i == j || i < 0 || j < 0 || i >= config.n() || j >= config.n())
    throw MalformedInput("edge (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") out of range");
  if (i > j) {
    std::swap(i, j);
    block.transposeInPlace();
  }
  if (block.rows() != config.size(i) || block.cols() != config.size(j))
    throw MalformedInput("block (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") has wrong shape");
  auto check = validate_partial_map(block);
  if (!check.ok)
    throw MalformedInput("block (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not a partial map: " +
                         (check.row >= 0 ? "row " + std::to_string(check.row + 1) : "column " + std::to_string(check.col + 1)) +
                         " sums to more than 1");
  int p = config.pair_index(i, j);
  if (!input[p]) {
    auto pos = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j));
    edges.insert(pos, {i, j});
  }
  input[p] = std::move(block);
}

int64_t Instance::matched_pairs() const {
  int64_t n = 0;
  for (const auto& b : input)
    if (b) n += b->sum();
  return n;
}

bool Instance::permutation_shaped() const {
  if (!config.uniform_size()) return false;
  for (const auto& b : input) {
    if (!b) continue;
    if ((b->rowwise().sum().array() != 1).any() || (b->colwise().sum().array() != 1).any()) return false;
  }
  return true;
}

void Instance::validate() const {
  if (static_cast<int>(input.size()) != config.num_pairs()) throw MalformedInput("input block count mismatch");
  for (int p = 0; p < config.num_pairs(); ++p) {
    if (!input[p]) continue;
    auto [i, j] = config.pair_at(p);
    if (input[p]->rows() != config.size(i) || input[p]->cols() != config.size(j))
      throw MalformedInput("block shape mismatch");
    if (!validate_partial_map(*input[p]).ok) throw MalformedInput("block is not a partial map");
  }
  if (ground_truth) {
    const auto& lab = ground_truth->labels;
    if (static_cast<int>(lab.size()) != config.n()) throw MalformedInput("ground truth object count mismatch");
    for (int i = 0; i < config.n(); ++i) {
      if (static_cast<int>(lab[i].size()) != config.size(i)) throw MalformedInput("ground truth size mismatch");
      std::vector<int> seen;
      for (int v : lab[i]) {
        if (v < 0) throw MalformedInput("negative ground truth label");
        if (v > 0) seen.push_back(v);
      }
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw MalformedInput("ground truth repeats a label inside object " + std::to_string(i + 1));
    }
  }
}

bool Instance::operator==(const Instance& o) const {
  if (!(config == o.config) || edges != o.edges) return false;
  for (size_t p = 0; p < input.size(); ++p) {
    if (input[p].has_value() != o.input[p].has_value()) return false;
    if (input[p] && *input[p] != *o.input[p]) return false;
  }
  return ground_truth == o.ground_truth;
}

CostTensor::CostTensor(const Instance& inst) : config_(inst.config) {
  blocks_.reserve(config_.num_pairs());
  for (int p = 0; p < config_.num_pairs(); ++p) {
    auto [i, j] = config_.pair_at(p);
    if (inst.input[p])
      blocks_.push_back((BinaryBlock::Ones(config_.size(i), config_.size(j)) - 2 * *inst.input[p]).eval());
    else
      blocks_.push_back(BinaryBlock::Zero(config_.size(i), config_.size(j)));
  }
}

std::vector<double> CostTensor::flatten() const {
  std::vector<double> c(static_cast<size_t>(config_.num_vars()));
  for (int p = 0; p < config_.num_pairs(); ++p) {
    const auto& b = blocks_[p];
    int64_t off = config_.offset(p);
    for (int t = 0; t < b.rows(); ++t)
      for (int q = 0; q < b.cols(); ++q) c[off + static_cast<int64_t>(t) * b.cols() + q] = b(t, q);
  }
  return c;
}

ConsistencyCheck check_cycle_consistency(const BinaryMaps& s) {
  const ObjectConfig& c = s.config();
  for (int p = 0; p < c.num_pairs(); ++p) validate_partial_map(s.block_at(p));
  const int n = c.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const auto& xij = s.block(i, j);
        const auto& xjk = s.block(j, k);
        const auto& xik = s.block(i, k);
        for (int l = 0; l < c.size(i); ++l)
          for (int t = 0; t < c.size(j); ++t)
            for (int q = 0; q < c.size(k); ++q) {
              int a = xij(l, t), b = xjk(t, q), e = xik(l, q);
              int rows[3] = {-a + b + e, a - b + e, a + b - e};
              for (int r = 0; r < 3; ++r)
                if (rows[r] > 1) return {false, {i, j, k, l, t, q, r}};
            }
      }
  return {};
}

int64_t frobenius_objective(const Instance& inst, const BinaryMaps& s) {
  int64_t total = 0;
  for (int p = 0; p < inst.config.num_pairs(); ++p) {
    if (!inst.input[p]) continue;
    total += (*inst.input[p] - s.block_at(p)).cast<int64_t>().squaredNorm();
  }
  return total;
}

BinaryMaps maps_from_labeling(const ObjectConfig& config, const UniverseLabeling& lab) {
  BinaryMaps s(config);
  for (int p = 0; p < config.num_pairs(); ++p) {
    auto [i, j] = config.pair_at(p);
    auto& b = s.block_at(p);
    for (int t = 0; t < config.size(i); ++t)
      for (int q = 0; q < config.size(j); ++q)
        b(t, q) = (lab.labels[i][t] != 0 && lab.labels[i][t] == lab.labels[j][q]) ? 1 : 0;
  }
  return s;
}

UniverseLabeling identity_labeling(const ObjectConfig& config) {
  UniverseLabeling lab;
  lab.labels.resize(config.n());
  for (int i = 0; i < config.n(); ++i)
    for (int t = 0; t < config.size(i); ++t) lab.labels[i].push_back(t + 1);
  return lab;
}

}  // namespace jomatch
