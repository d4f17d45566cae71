#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tanimoto/feature_vector.hpp"

namespace tanimoto {

/// Indicator function of a subset of the domain, paired with the measure
/// it is weighed under.
class IndicatorVector {
 public:
  IndicatorVector(std::vector<std::uint8_t> bits, Measure measure)
      : bits_(std::move(bits)), measure_(std::move(measure)) {
    if (bits_.empty()) {
      throw ValidationError("indicator vector must have at least one coordinate");
    }
    if (bits_.size() != measure_.size()) {
      throw ValidationError("indicator/measure length mismatch");
    }
    for (std::uint8_t b : bits_) {
      if (b > 1) throw ValidationError("indicator entries must be 0 or 1");
    }
  }

  static IndicatorVector from_vector(const FeatureVector& v, Measure measure) {
    std::vector<std::uint8_t> bits(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] != 0.0 && v[j] != 1.0) {
        throw ValidationError("entry " + std::to_string(j + 1) +
                              " is not binary; the explicit feature map is "
                              "defined for indicator vectors only");
      }
      bits[j] = v[j] == 1.0 ? 1 : 0;
    }
    return IndicatorVector(std::move(bits), std::move(measure));
  }

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t j) const { return bits_[j]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  const Measure& measure() const { return measure_; }

  /// mu(A)
  double set_measure() const {
    Accumulator<> acc;
    for (std::size_t j = 0; j < bits_.size(); ++j) {
      if (bits_[j]) acc.add(measure_[j]);
    }
    return acc.value();
  }

 private:
  std::vector<std::uint8_t> bits_;
  Measure measure_;
};

/// Truncation of the infinite direct sum of tensor-product blocks. Block k
/// (1-based) holds n^k entries flattened row major and equals
/// scale * I(A) (x) ((x)^{k-1} I(comp A) / sqrt(mu(D))).
struct TruncatedFeature {
  int depth = 0;
  std::vector<std::vector<double>> blocks;
  double scale = 0.0;  // 1 / sqrt(mu(D))
};

inline constexpr std::size_t kDefaultFeatureEntryBudget = std::size_t{1} << 23;

/// Total number of entries of a depth-K truncation, n + n^2 + ... + n^K.
/// Throws when the count exceeds `budget` (reported in the message).
inline std::size_t feature_entry_count(std::size_t n, int depth,
                                       std::size_t budget = kDefaultFeatureEntryBudget) {
  if (depth < 1) throw ValidationError("feature depth must be >= 1");
  std::size_t total = 0;
  std::size_t block = 1;
  for (int k = 1; k <= depth; ++k) {
    if (block > budget / n) {
      throw ValidationError("truncated feature of dimension " + std::to_string(n) +
                            " at depth " + std::to_string(depth) + " needs more than " +
                            std::to_string(budget) + " entries; lower the depth or "
                            "raise the budget");
    }
    block *= n;
    if (total > budget - block) {
      throw ValidationError("truncated feature of dimension " + std::to_string(n) +
                            " at depth " + std::to_string(depth) + " needs " +
                            std::to_string(total) + "+" + std::to_string(block) +
                            " entries, over the budget of " + std::to_string(budget));
    }
    total += block;
  }
  return total;
}

/// Depth-K explicit feature of the indicator vector A.
inline TruncatedFeature explicit_feature(const IndicatorVector& A, int depth,
                                         std::size_t budget = kDefaultFeatureEntryBudget) {
  const std::size_t n = A.size();
  feature_entry_count(n, depth, budget);
  const double total = A.measure().total();
  const double inv_sqrt = 1.0 / std::sqrt(total);

  TruncatedFeature out;
  out.depth = depth;
  out.scale = inv_sqrt;
  out.blocks.reserve(static_cast<std::size_t>(depth));

  std::vector<double> block(n);
  for (std::size_t j = 0; j < n; ++j) {
    block[j] = inv_sqrt * static_cast<double>(A[j]);
  }
  out.blocks.push_back(block);
  for (int k = 2; k <= depth; ++k) {
    std::vector<double> next(block.size() * n);
    for (std::size_t i = 0; i < block.size(); ++i) {
      for (std::size_t l = 0; l < n; ++l) {
        next[i * n + l] = block[i] * (A[l] ? 0.0 : inv_sqrt);
      }
    }
    out.blocks.push_back(next);
    block = std::move(next);
  }
  return out;
}

/// Inner product of two truncated features under the product measure
/// induced by mu: the entry at tensor index (j, l_1, ..., l_{k-1}) carries
/// weight w_j * w_{l_1} * ... * w_{l_{k-1}}. With the counting measure this
/// is the plain dot product.
inline double feature_dot(const TruncatedFeature& a, const TruncatedFeature& b,
                          const Measure& mu) {
  if (a.depth != b.depth) throw ValidationError("feature depth mismatch");
  if (a.blocks.empty() || a.blocks[0].size() != mu.size() ||
      b.blocks[0].size() != mu.size()) {
    throw ValidationError("feature/measure dimension mismatch");
  }
  const std::size_t n = mu.size();
  Accumulator<> acc;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    const auto& ba = a.blocks[k];
    const auto& bb = b.blocks[k];
    for (std::size_t i = 0; i < ba.size(); ++i) {
      const double prod = ba[i] * bb[i];
      if (prod == 0.0) continue;
      double weight = 1.0;
      std::size_t rest = i;
      for (std::size_t d = 0; d <= k; ++d) {
        weight *= mu[rest % n];
        rest /= n;
      }
      acc.add(weight * prod);
    }
  }
  return acc.value();
}

/// Depth-K partial sum of the geometric series behind the Tanimoto inner
/// product: (mu(A^B)/mu(D)) * sum_{k=1..K} (mu(~A^~B)/mu(D))^{k-1}.
/// Equals feature_dot of the two depth-K features; 0 when the union is
/// empty under mu.
inline double truncated_inner_product(const IndicatorVector& A,
                                      const IndicatorVector& B, int depth) {
  if (A.size() != B.size()) throw ValidationError("indicator length mismatch");
  if (!(A.measure() == B.measure())) {
    throw ValidationError("indicator vectors carry different measures");
  }
  if (depth < 1) throw ValidationError("feature depth must be >= 1");
  const Measure& mu = A.measure();
  Accumulator<> inter, uni, comp_inter;
  for (std::size_t j = 0; j < A.size(); ++j) {
    const double w = mu[j];
    if (A[j] && B[j]) inter.add(w);
    if (A[j] || B[j]) uni.add(w);
    if (!A[j] && !B[j]) comp_inter.add(w);
  }
  if (uni.value() == 0.0) return 0.0;
  const double total = mu.total();
  const double initial = inter.value() / total;
  const double ratio = comp_inter.value() / total;
  double series = 0.0;
  double term = 1.0;
  for (int k = 1; k <= depth; ++k) {
    series += term;
    term *= ratio;
  }
  return initial * series;
}

/// Smallest depth K with r_max^K <= tol, where r_max is the largest
/// series ratio any pair of the given rows can produce, attained by the
/// sparsest row paired with itself. Capped at `max_depth` (rows that are
/// empty under mu force the cap).
inline int suggested_depth(const std::vector<IndicatorVector>& rows,
                           double tol = 1e-9, int max_depth = 64) {
  if (rows.empty()) throw ValidationError("no rows to size the feature depth from");
  double r_max = 0.0;
  for (const auto& row : rows) {
    const double r = 1.0 - row.set_measure() / row.measure().total();
    r_max = std::max(r_max, r);
  }
  if (r_max <= 0.0) return 1;
  if (r_max >= 1.0) return max_depth;
  const int k = static_cast<int>(std::ceil(std::log(tol) / std::log(r_max)));
  return std::min(std::max(k, 1), max_depth);
}

}  // namespace tanimoto
