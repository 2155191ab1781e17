#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jomatch {

using Rational = boost::multiprecision::cpp_rational;

template <typename Scalar>
using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using BlockMatrix = Block<double>;
using BinaryBlock = Block<int>;

constexpr double kBoxTol = 1e-6;

struct MalformedInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Object count and element counts. Pairs (i<j) are numbered lexicographically
// and variables X_tq(i,j) are laid out pair by pair, row-major inside a block.
class ObjectConfig {
 public:
  ObjectConfig() = default;
  explicit ObjectConfig(std::vector<int> sizes);
  static ObjectConfig uniform(int n, int d);

  int n() const { return static_cast<int>(sizes_.size()); }
  int size(int i) const { return sizes_[i]; }
  const std::vector<int>& sizes() const { return sizes_; }
  int64_t total_elements() const { return total_; }
  int max_size() const { return max_size_; }
  bool uniform_size() const;

  int num_pairs() const { return n() * (n() - 1) / 2; }
  int pair_index(int i, int j) const { return i * (2 * n() - i - 1) / 2 + (j - i - 1); }
  std::pair<int, int> pair_at(int p) const { return pairs_[p]; }
  int64_t num_vars() const { return offsets_.back(); }
  int64_t offset(int p) const { return offsets_[p]; }
  // Column id of X_tq(i,j) for i<j.
  int64_t var(int i, int j, int t, int q) const {
    return offsets_[pair_index(i, j)] + static_cast<int64_t>(t) * sizes_[j] + q;
  }
  // Element id of element t of object i in the global element list.
  int element(int i, int t) const { return element_offset_[i] + t; }
  std::pair<int, int> element_at(int e) const;

  bool operator==(const ObjectConfig& o) const { return sizes_ == o.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int64_t> offsets_{0};
  std::vector<int> element_offset_;
  std::vector<std::pair<int, int>> pairs_;
  int64_t total_ = 0;
  int max_size_ = 0;
};

// Per-element universe labels: 0 marks an unmatched element, equal positive
// labels mark matched elements.
struct UniverseLabeling {
  std::vector<std::vector<int>> labels;
  bool operator==(const UniverseLabeling& o) const { return labels == o.labels; }
};

// One block per unordered pair i<j. X(j,i) is read through the transpose.
template <typename Scalar>
class SolutionMaps {
 public:
  SolutionMaps() = default;
  explicit SolutionMaps(const ObjectConfig& config) : config_(config) {
    blocks_.reserve(config.num_pairs());
    for (int p = 0; p < config.num_pairs(); ++p) {
      auto [i, j] = config.pair_at(p);
      blocks_.push_back(Block<Scalar>::Zero(config.size(i), config.size(j)));
    }
  }

  const ObjectConfig& config() const { return config_; }
  int n() const { return config_.n(); }

  Block<Scalar>& block(int i, int j) { return blocks_[config_.pair_index(i, j)]; }
  const Block<Scalar>& block(int i, int j) const { return blocks_[config_.pair_index(i, j)]; }
  Block<Scalar>& block_at(int p) { return blocks_[p]; }
  const Block<Scalar>& block_at(int p) const { return blocks_[p]; }

  // X_tq(i,j) for any ordered pair i != j.
  Scalar at(int i, int j, int t, int q) const {
    return i < j ? blocks_[config_.pair_index(i, j)](t, q) : blocks_[config_.pair_index(j, i)](q, t);
  }

  std::vector<Scalar> flatten() const {
    std::vector<Scalar> v(static_cast<size_t>(config_.num_vars()));
    for (int p = 0; p < config_.num_pairs(); ++p) {
      const auto& b = blocks_[p];
      int64_t off = config_.offset(p);
      for (int t = 0; t < b.rows(); ++t)
        for (int q = 0; q < b.cols(); ++q) v[off + static_cast<int64_t>(t) * b.cols() + q] = b(t, q);
    }
    return v;
  }
  template <typename Vec>
  static SolutionMaps from_flat(const ObjectConfig& config, const Vec& v) {
    SolutionMaps s(config);
    for (int p = 0; p < config.num_pairs(); ++p) {
      auto& b = s.blocks_[p];
      int64_t off = config.offset(p);
      for (int t = 0; t < b.rows(); ++t)
        for (int q = 0; q < b.cols(); ++q) b(t, q) = static_cast<Scalar>(v[off + static_cast<int64_t>(t) * b.cols() + q]);
    }
    return s;
  }
  template <typename Other>
  SolutionMaps<Other> cast() const {
    SolutionMaps<Other> s(config_);
    for (int p = 0; p < config_.num_pairs(); ++p) s.block_at(p) = blocks_[p].template cast<Other>();
    return s;
  }

  bool operator==(const SolutionMaps& o) const {
    if (!(config_ == o.config_)) return false;
    for (size_t p = 0; p < blocks_.size(); ++p)
      if (blocks_[p] != o.blocks_[p]) return false;
    return true;
  }

 private:
  ObjectConfig config_;
  std::vector<Block<Scalar>> blocks_;
};

using BinaryMaps = SolutionMaps<int>;
using RealMaps = SolutionMaps<double>;
using RationalMaps = SolutionMaps<Rational>;

struct Instance {
  ObjectConfig config;
  std::vector<std::pair<int, int>> edges;        // sorted, i<j
  std::vector<std::optional<BinaryBlock>> input;  // per pair index
  std::optional<UniverseLabeling> ground_truth;

  Instance() = default;
  explicit Instance(ObjectConfig c) : config(std::move(c)), input(config.num_pairs()) {}

  bool observed(int i, int j) const {
    return i < j ? input[config.pair_index(i, j)].has_value() : input[config.pair_index(j, i)].has_value();
  }
  void set_input(int i, int j, BinaryBlock block);
  // Number of matched pairs in the input, N.
  int64_t matched_pairs() const;
  // Equal sizes and every observed block is a permutation matrix.
  bool permutation_shaped() const;
  bool complete() const { return static_cast<int>(edges.size()) == config.num_pairs(); }
  void validate() const;
  bool operator==(const Instance& o) const;
};

// a = 1 - 2 X^in on observed pairs, 0 elsewhere; a(j,i) = a(i,j)^T.
class CostTensor {
 public:
  explicit CostTensor(const Instance& inst);
  int operator()(int i, int j, int t, int q) const {
    return i < j ? blocks_[config_.pair_index(i, j)](t, q) : blocks_[config_.pair_index(j, i)](q, t);
  }
  const BinaryBlock& block_at(int p) const { return blocks_[p]; }
  const ObjectConfig& config() const { return config_; }
  std::vector<double> flatten() const;

 private:
  ObjectConfig config_;
  std::vector<BinaryBlock> blocks_;
};

struct PartialMapCheck {
  bool ok = true;
  int row = -1;  // first row with sum > 1, else -1
  int col = -1;  // first column with sum > 1 (checked when rows pass)
};

template <typename Derived>
PartialMapCheck validate_partial_map(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!(m(r, c) == S(0) || m(r, c) == S(1)))
        throw MalformedInput("non-binary entry at (" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")");
  PartialMapCheck out;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    if (m.row(r).sum() > S(1)) {
      out.ok = false;
      out.row = static_cast<int>(r);
      return out;
    }
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    if (m.col(c).sum() > S(1)) {
      out.ok = false;
      out.col = static_cast<int>(c);
      return out;
    }
  return out;
}

// A violated row of the triangle system: variables X_lt(i,j), X_tq(j,k),
// X_lq(i,k) with i<j<k; `row` is the index (0..2) of the violated inequality
// in the order -++, +-+, ++-.
struct ConsistencyWitness {
  int i = -1, j = -1, k = -1, l = -1, t = -1, q = -1, row = -1;
};
struct ConsistencyCheck {
  bool ok = true;
  ConsistencyWitness witness;
};

ConsistencyCheck check_cycle_consistency(const BinaryMaps& s);

template <typename Scalar>
Scalar linear_objective(const Instance& inst, const SolutionMaps<Scalar>& s) {
  if (!(s.config() == inst.config)) throw ConfigError("solution shape does not match instance");
  Scalar total(0);
  for (int p = 0; p < inst.config.num_pairs(); ++p) {
    if (!inst.input[p]) continue;
    const BinaryBlock& xin = *inst.input[p];
    const auto& x = s.block_at(p);
    for (int t = 0; t < xin.rows(); ++t)
      for (int q = 0; q < xin.cols(); ++q) total += Scalar(1 - 2 * xin(t, q)) * x(t, q);
  }
  return total;
}

// Sum over observed pairs of squared Frobenius distance to the input.
int64_t frobenius_objective(const Instance& inst, const BinaryMaps& s);

BinaryMaps maps_from_labeling(const ObjectConfig& config, const UniverseLabeling& lab);
UniverseLabeling identity_labeling(const ObjectConfig& config);

Instance read_instance(const std::string& path);
void write_instance(const Instance& inst, const std::string& path);
Instance instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const Instance& inst);

}  // namespace jomatch
