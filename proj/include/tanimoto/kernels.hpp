#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "tanimoto/feature_vector.hpp"

namespace tanimoto {

namespace detail {

inline void require_binary(const FeatureVector& v, const char* name) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0 && v[j] != 1.0) {
      throw ValidationError(std::string(name) + " entry " + std::to_string(j + 1) +
                            " is not binary");
    }
  }
}

inline void require_nonnegative(const FeatureVector& v, const char* name) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] < 0.0) {
      throw ValidationError(std::string(name) + " entry " + std::to_string(j + 1) +
                            " is negative");
    }
  }
}

}  // namespace detail

/// Weighted Jaccard index of two binary vectors: mu(A and B) / mu(A or B).
/// Returns 0 when the union has measure zero.
template <Summation S = Summation::plain>
double jaccard_binary(const FeatureVector& a, const FeatureVector& b,
                      const Measure& mu) {
  detail::require_same_size(a, b, mu);
  detail::require_binary(a, "first vector");
  detail::require_binary(b, "second vector");
  // AND/OR realized as min/max so the accumulation is term for term the
  // same as minmax_kernel on the same inputs.
  Accumulator<S> inter, uni;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double w = mu[j];
    inter.add(w * std::min(a[j], b[j]));
    uni.add(w * std::max(a[j], b[j]));
  }
  const double den = uni.value();
  return den == 0.0 ? 0.0 : inter.value() / den;
}

/// Intersection kernel for nonnegative vectors: sum_j w_j * min(f_j, g_j).
template <Summation S = Summation::plain>
double intersection_kernel(const FeatureVector& f, const FeatureVector& g,
                           const Measure& mu) {
  detail::require_same_size(f, g, mu);
  detail::require_nonnegative(f, "first vector");
  detail::require_nonnegative(g, "second vector");
  Accumulator<S> acc;
  for (std::size_t j = 0; j < f.size(); ++j) {
    acc.add(mu[j] * std::min(f[j], g[j]));
  }
  return acc.value();
}

/// MinMax (weighted Jaccard) kernel for nonnegative vectors:
/// sum_j w_j*min(f_j,g_j) / sum_j w_j*max(f_j,g_j); 0 when both vectors
/// vanish under the measure.
template <Summation S = Summation::plain>
double minmax_kernel(const FeatureVector& f, const FeatureVector& g,
                     const Measure& mu) {
  detail::require_same_size(f, g, mu);
  detail::require_nonnegative(f, "first vector");
  detail::require_nonnegative(g, "second vector");
  Accumulator<S> lo, hi;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = mu[j];
    lo.add(w * std::min(f[j], g[j]));
    hi.add(w * std::max(f[j], g[j]));
  }
  const double den = hi.value();
  return den == 0.0 ? 0.0 : lo.value() / den;
}

/// Generalized Tanimoto kernel for arbitrary real vectors, branchless
/// min/max-sum form:
///
///   [ sum max(min(f,g),0) - sum min(max(f,g),0) ]
///   / [ sum max(max(f,g),0) - sum min(min(f,g),0) ]
///
/// coordinate sums weighted by mu. On nonnegative inputs the negative-part
/// accumulators stay at zero and the value reduces bitwise to minmax_kernel.
template <Summation S = Summation::plain>
double general_tanimoto_minmax(const FeatureVector& f, const FeatureVector& g,
                               const Measure& mu) {
  detail::require_same_size(f, g, mu);
  Accumulator<S> pos_min, neg_max, pos_max, neg_min;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = mu[j];
    const double lo = std::min(f[j], g[j]);
    const double hi = std::max(f[j], g[j]);
    pos_min.add(w * std::max(lo, 0.0));
    neg_max.add(w * std::min(hi, 0.0));
    pos_max.add(w * std::max(hi, 0.0));
    neg_min.add(w * std::min(lo, 0.0));
  }
  const double num = pos_min.value() - neg_max.value();
  const double den = pos_max.value() - neg_min.value();
  return den == 0.0 ? 0.0 : num / den;
}

/// Generalized Tanimoto kernel in the L1-norm quotient form:
/// (|f| + |g| - |f-g|) / (|f| + |g| + |f-g|), norms weighted by mu.
/// The exact numerator is nonnegative by the triangle inequality, so
/// rounding residue from the cancellation is clamped at zero.
template <Summation S = Summation::plain>
double general_tanimoto_l1(const FeatureVector& f, const FeatureVector& g,
                           const Measure& mu) {
  detail::require_same_size(f, g, mu);
  Accumulator<S> norm_f, norm_g, norm_diff;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = mu[j];
    norm_f.add(w * std::abs(f[j]));
    norm_g.add(w * std::abs(g[j]));
    norm_diff.add(w * std::abs(f[j] - g[j]));
  }
  const double sum_norms = norm_f.value() + norm_g.value();
  const double num = std::max(0.5 * (sum_norms - norm_diff.value()), 0.0);
  const double den = 0.5 * (sum_norms + norm_diff.value());
  return den == 0.0 ? 0.0 : num / den;
}

/// Signed-area intersection measure of two arbitrary real vectors:
/// (|f| + |g| - |f-g|) / 2 with mu-weighted L1 norms. Nonnegative by the
/// triangle inequality (rounding residue clamped at zero).
template <Summation S = Summation::plain>
double general_intersection(const FeatureVector& f, const FeatureVector& g,
                            const Measure& mu) {
  detail::require_same_size(f, g, mu);
  Accumulator<S> norm_f, norm_g, norm_diff;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = mu[j];
    norm_f.add(w * std::abs(f[j]));
    norm_g.add(w * std::abs(g[j]));
    norm_diff.add(w * std::abs(f[j] - g[j]));
  }
  return std::max(0.5 * (norm_f.value() + norm_g.value() - norm_diff.value()), 0.0);
}

}  // namespace tanimoto
