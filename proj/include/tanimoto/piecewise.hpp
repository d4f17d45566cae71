#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tanimoto/feature_vector.hpp"

namespace tanimoto {

/// Region of a coordinate x_j relative to the anchor a_j. The first three
/// labels apply when a_j >= 0, the last three when a_j < 0.
enum class PartitionLabel {
  pos_xneg,  // a_j >= 0, x_j < 0
  pos_mid,   // a_j >= 0, 0 <= x_j < a_j
  pos_high,  // a_j >= 0, a_j <= x_j
  neg_low,   // a_j < 0,  x_j < a_j
  neg_mid,   // a_j < 0,  a_j <= x_j < 0
  neg_xpos,  // a_j < 0,  0 <= x_j
};

/// Numerator F and denominator G of the piecewise-linear kernel quotient
/// at (a, x), together with their subgradients with respect to x.
/// Coordinates sitting exactly on a segment boundary (x_j == 0 or
/// x_j == a_j) carry the one-sided derivative of the non-strict region and
/// are flagged in `boundary`.
struct FGValue {
  double f_value = 0.0;
  double g_value = 0.0;
  std::vector<double> f_subgradient;
  std::vector<double> g_subgradient;
  std::vector<bool> boundary;
};

inline PartitionLabel classify_coordinate(double a, double x) {
  if (a >= 0.0) {
    if (x < 0.0) return PartitionLabel::pos_xneg;
    if (x < a) return PartitionLabel::pos_mid;
    return PartitionLabel::pos_high;
  }
  if (x < a) return PartitionLabel::neg_low;
  if (x < 0.0) return PartitionLabel::neg_mid;
  return PartitionLabel::neg_xpos;
}

inline std::vector<PartitionLabel> partition_indices(const FeatureVector& a,
                                                     const FeatureVector& x) {
  detail::require_same_size(a, x);
  std::vector<PartitionLabel> labels(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    labels[j] = classify_coordinate(a[j], x[j]);
  }
  return labels;
}

namespace detail {

// Per-label x_j coefficients of F and G, indexed by PartitionLabel in
// declaration order.
inline constexpr std::array<double, 6> kFSlope = {0.0, 1.0, 0.0, 0.0, -1.0, 0.0};
inline constexpr std::array<double, 6> kGSlope = {-1.0, 0.0, 1.0, -1.0, 0.0, 1.0};

inline double f_contribution(PartitionLabel label, double a, double x) {
  switch (label) {
    case PartitionLabel::pos_xneg: return 0.0;
    case PartitionLabel::pos_mid: return x;
    case PartitionLabel::pos_high: return a;
    case PartitionLabel::neg_low: return -a;
    case PartitionLabel::neg_mid: return -x;
    case PartitionLabel::neg_xpos: return 0.0;
  }
  return 0.0;
}

inline double g_contribution(PartitionLabel label, double a, double x) {
  switch (label) {
    case PartitionLabel::pos_xneg: return a - x;
    case PartitionLabel::pos_mid: return a;
    case PartitionLabel::pos_high: return x;
    case PartitionLabel::neg_low: return -x;
    case PartitionLabel::neg_mid: return -a;
    case PartitionLabel::neg_xpos: return -a + x;
  }
  return 0.0;
}

}  // namespace detail

/// Assemble F(a, x) and G(a, x) from the per-label contribution table,
/// each coordinate scaled by its measure weight (the unweighted form is
/// recovered with the counting measure).
inline FGValue evaluate_fg(const FeatureVector& a, const FeatureVector& x,
                           const Measure& mu) {
  detail::require_same_size(a, x, mu);
  const std::size_t n = a.size();
  FGValue out;
  out.f_subgradient.resize(n);
  out.g_subgradient.resize(n);
  out.boundary.resize(n);
  Accumulator<> f_sum, g_sum;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = mu[j];
    const PartitionLabel label = classify_coordinate(a[j], x[j]);
    const auto row = static_cast<std::size_t>(label);
    f_sum.add(w * detail::f_contribution(label, a[j], x[j]));
    g_sum.add(w * detail::g_contribution(label, a[j], x[j]));
    out.f_subgradient[j] = w * detail::kFSlope[row];
    out.g_subgradient[j] = w * detail::kGSlope[row];
    out.boundary[j] = (x[j] == 0.0) || (x[j] == a[j]);
  }
  out.f_value = f_sum.value();
  out.g_value = g_sum.value();
  return out;
}

inline FGValue evaluate_fg(const FeatureVector& a, const FeatureVector& x) {
  return evaluate_fg(a, x, Measure::counting(a.size()));
}

/// Generalized Tanimoto kernel as the quotient F/G; 0 when G vanishes.
inline double tanimoto_via_fg(const FeatureVector& a, const FeatureVector& x,
                              const Measure& mu) {
  const FGValue fg = evaluate_fg(a, x, mu);
  return fg.g_value == 0.0 ? 0.0 : fg.f_value / fg.g_value;
}

inline double tanimoto_via_fg(const FeatureVector& a, const FeatureVector& x) {
  return tanimoto_via_fg(a, x, Measure::counting(a.size()));
}

}  // namespace tanimoto
