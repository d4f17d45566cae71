#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tanimoto/errors.hpp"

namespace tanimoto {

/// Summation strategy for the coordinate sums inside the kernels.
/// `plain` accumulates left to right in index order; `compensated` adds
/// Neumaier error compensation on top of the same order, so the term
/// sequence is identical in both modes.
enum class Summation { plain, compensated };

template <Summation Mode = Summation::plain>
class Accumulator {
 public:
  void add(double x) { sum_ += x; }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
};

template <>
class Accumulator<Summation::compensated> {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Dense real-valued feature vector. Entries are validated to be finite
/// at construction; NaN/inf never reach the kernel evaluation paths.
class FeatureVector {
 public:
  explicit FeatureVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
      throw ValidationError("feature vector must have at least one coordinate");
    }
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (!std::isfinite(values_[j])) {
        throw ValidationError("feature vector entry " + std::to_string(j + 1) +
                              " is not finite");
      }
    }
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  const std::vector<double>& values() const { return values_; }

  bool is_nonnegative() const {
    for (double v : values_) {
      if (v < 0.0) return false;
    }
    return true;
  }

  bool is_binary() const {
    for (double v : values_) {
      if (v != 0.0 && v != 1.0) return false;
    }
    return true;
  }

 private:
  std::vector<double> values_;
};

/// Per-coordinate nonnegative weights realizing the measure; the counting
/// measure is all ones. Total mass is finite and strictly positive.
class Measure {
 public:
  explicit Measure(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) {
      throw ValidationError("measure must have at least one weight");
    }
    double total = 0.0;
    bool any_positive = false;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      const double w = weights_[j];
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError("measure weight " + std::to_string(j + 1) +
                              " must be finite and nonnegative");
      }
      if (w > 0.0) any_positive = true;
      total += w;
    }
    if (!any_positive) {
      throw ValidationError("measure must have at least one positive weight");
    }
    if (!std::isfinite(total)) {
      throw ValidationError("total measure is not finite");
    }
    total_ = total;
  }

  static Measure counting(std::size_t n) {
    return Measure(std::vector<double>(n, 1.0));
  }

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t j) const { return weights_[j]; }
  const std::vector<double>& weights() const { return weights_; }

  /// Total mass of the domain.
  double total() const { return total_; }

  friend bool operator==(const Measure& a, const Measure& b) {
    return a.weights_ == b.weights_;
  }

 private:
  std::vector<double> weights_;
  double total_ = 0.0;
};

namespace detail {

inline void require_same_size(const FeatureVector& f, const FeatureVector& g) {
  if (f.size() != g.size()) {
    throw ValidationError("vector length mismatch: " + std::to_string(f.size()) +
                          " vs " + std::to_string(g.size()));
  }
}

inline void require_same_size(const FeatureVector& f, const FeatureVector& g,
                              const Measure& mu) {
  require_same_size(f, g);
  if (mu.size() != f.size()) {
    throw ValidationError("measure length mismatch: " + std::to_string(mu.size()) +
                          " weights for " + std::to_string(f.size()) +
                          " coordinates");
  }
}

}  // namespace detail

}  // namespace tanimoto
