#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

#include "tanimoto/feature_vector.hpp"
#include "tanimoto/kernels.hpp"

namespace tanimoto {

/// Which composite approximation the smooth kernel evaluates.
/// `standard_lse` builds each of the four branchless terms from nested
/// log-sum-exp soft min/max operators and converges to the exact kernel as
/// t -> 0. `paper_literal` evaluates the published composite formulas
/// verbatim; they mix t and 1/t across nesting levels and carry no
/// convergence guarantee, but are kept reproducible for comparison.
enum class SmoothMode { standard_lse, paper_literal };

namespace detail {

inline void require_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw ValidationError("temperature must be a positive finite real");
  }
}

// log(e^x + e^y), shifted so the larger exponent is factored out.
inline double log_sum_exp(double x, double y) {
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  if (!std::isfinite(hi)) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace detail

/// Soft maximum t*log(e^(a/t) + e^(b/t)). Tends to max(a,b) as t -> 0+ and
/// satisfies max(a,b) <= soft_max <= max(a,b) + t*log 2.
inline double soft_max(double a, double b, double t) {
  detail::require_temperature(t);
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  const double v = hi + t * std::log1p(std::exp((lo - hi) / t));
  assert(v >= hi && v <= hi + t * std::numbers::ln2);
  return v;
}

/// Soft minimum -soft_max(-a, -b, t); min(a,b) - t*log 2 <= soft_min <= min(a,b).
inline double soft_min(double a, double b, double t) {
  return -soft_max(-a, -b, t);
}

/// Smooth approximation of the generalized Tanimoto kernel. Each of the
/// four branchless coordinate terms is replaced by its soft counterpart:
///
///   sum sm(sn(a_j,b_j),0) - sum sn(sm(a_j,b_j),0)
///   over sum sm(sm(a_j,b_j),0) - sum sn(sn(a_j,b_j),0)
///
/// with sm/sn the soft max/min at temperature t and sums weighted by mu.
/// When the smooth denominator falls under 8*t*log2*mu(D) the smoothing
/// error dominates the signal; the call is flagged degenerate and the
/// exact kernel value is returned instead.
inline double smooth_tanimoto(const FeatureVector& a, const FeatureVector& b,
                              double t, const Measure& mu,
                              SmoothMode mode = SmoothMode::standard_lse,
                              bool* degenerate = nullptr) {
  detail::require_temperature(t);
  detail::require_same_size(a, b, mu);
  if (degenerate != nullptr) *degenerate = false;
  const std::size_t n = a.size();

  if (mode == SmoothMode::paper_literal) {
    Accumulator<> num_pos, num_neg, den_pos, den_neg;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = mu[j];
      const double lse_small = detail::log_sum_exp(a[j] / t, b[j] / t);
      const double lse_large = detail::log_sum_exp(t * a[j], t * b[j]);
      const double arg_small = 1.0 + t * lse_small;
      const double arg_large = 1.0 + lse_large / t;
      if (!(arg_small > 0.0) || !(arg_large > 0.0)) {
        throw NumericalError("paper-literal smooth kernel: logarithm of a "
                             "nonpositive inner term");
      }
      num_pos.add(w * std::log(arg_small) / t);
      num_neg.add(w * t * std::log(arg_large));
      den_pos.add(w * std::log(arg_large) / t);
      den_neg.add(w * t * std::log(arg_small));
    }
    const double num = num_pos.value() - num_neg.value();
    const double den = den_pos.value() - den_neg.value();
    if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num)) {
      throw NumericalError("paper-literal smooth kernel: vanishing or "
                           "non-finite denominator");
    }
    return num / den;
  }

  Accumulator<> num_pos, num_neg, den_pos, den_neg;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = mu[j];
    const double lo = soft_min(a[j], b[j], t);
    const double hi = soft_max(a[j], b[j], t);
    num_pos.add(w * soft_max(lo, 0.0, t));
    num_neg.add(w * soft_min(hi, 0.0, t));
    den_pos.add(w * soft_max(hi, 0.0, t));
    den_neg.add(w * soft_min(lo, 0.0, t));
  }
  const double num = num_pos.value() - num_neg.value();
  const double den = den_pos.value() - den_neg.value();
  if (den < 8.0 * t * std::numbers::ln2 * mu.total()) {
    if (degenerate != nullptr) *degenerate = true;
    return general_tanimoto_minmax(a, b, mu);
  }
  return num / den;
}

inline double smooth_tanimoto(const FeatureVector& a, const FeatureVector& b,
                              double t, SmoothMode mode = SmoothMode::standard_lse,
                              bool* degenerate = nullptr) {
  detail::require_same_size(a, b);
  return smooth_tanimoto(a, b, t, Measure::counting(a.size()), mode, degenerate);
}

}  // namespace tanimoto
