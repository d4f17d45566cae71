#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tanimoto/feature_vector.hpp"
#include "tanimoto/kernels.hpp"
#include "tanimoto/random.hpp"

namespace tanimoto {

/// Base kernel evaluated against basis elements before the Tanimoto
/// composition is applied on top.
struct BaseKernel {
  enum class Kind { linear, polynomial, gaussian };

  Kind kind = Kind::linear;
  int degree = 1;          // polynomial
  double offset = 0.0;     // polynomial
  double bandwidth = 1.0;  // gaussian

  static BaseKernel linear() { return BaseKernel{}; }

  static BaseKernel polynomial(int degree, double offset) {
    if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
    BaseKernel k;
    k.kind = Kind::polynomial;
    k.degree = degree;
    k.offset = offset;
    return k;
  }

  static BaseKernel gaussian(double bandwidth) {
    if (!(bandwidth > 0.0)) throw ValidationError("gaussian bandwidth must be > 0");
    BaseKernel k;
    k.kind = Kind::gaussian;
    k.bandwidth = bandwidth;
    return k;
  }
};

inline double base_kernel_value(const BaseKernel& k, const FeatureVector& u,
                                const FeatureVector& v) {
  detail::require_same_size(u, v);
  switch (k.kind) {
    case BaseKernel::Kind::linear:
    case BaseKernel::Kind::polynomial: {
      Accumulator<> dot;
      for (std::size_t j = 0; j < u.size(); ++j) dot.add(u[j] * v[j]);
      if (k.kind == BaseKernel::Kind::linear) return dot.value();
      double base = dot.value() + k.offset;
      double result = 1.0;
      for (int d = 0; d < k.degree; ++d) result *= base;
      return result;
    }
    case BaseKernel::Kind::gaussian: {
      Accumulator<> sq;
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - v[j];
        sq.add(d * d);
      }
      return std::exp(-sq.value() / (2.0 * k.bandwidth * k.bandwidth));
    }
  }
  return 0.0;
}

/// Fixed set of basis elements the relative features are taken against.
class Basis {
 public:
  explicit Basis(std::vector<FeatureVector> elements)
      : elements_(std::move(elements)) {
    if (elements_.empty()) throw ValidationError("basis must be nonempty");
    const std::size_t dim = elements_.front().size();
    for (const auto& e : elements_) {
      if (e.size() != dim) throw ValidationError("basis elements differ in dimension");
    }
  }

  /// Seeded subsample of the pool, without replacement, in ascending pool
  /// order.
  static Basis subsample(std::span<const FeatureVector> pool, std::size_t size,
                         std::uint64_t seed) {
    if (pool.empty()) throw ValidationError("cannot subsample a basis from an empty pool");
    if (size == 0) throw ValidationError("basis size must be >= 1");
    std::mt19937_64 rng(seed);
    const auto picked = sample_without_replacement(pool.size(), size, rng);
    std::vector<FeatureVector> elements;
    elements.reserve(picked.size());
    for (std::size_t idx : picked) elements.push_back(pool[idx]);
    return Basis(std::move(elements));
  }

  std::size_t size() const { return elements_.size(); }
  std::size_t dimension() const { return elements_.front().size(); }
  const std::vector<FeatureVector>& elements() const { return elements_; }

 private:
  std::vector<FeatureVector> elements_;
};

/// Basis-relative feature vector of x: (kappa_H(x, b_1), ..., kappa_H(x, b_K)).
inline FeatureVector basis_feature(const FeatureVector& x, const Basis& basis,
                                   const BaseKernel& k) {
  if (x.size() != basis.dimension()) {
    throw ValidationError("vector dimension " + std::to_string(x.size()) +
                          " does not match basis dimension " +
                          std::to_string(basis.dimension()));
  }
  std::vector<double> values;
  values.reserve(basis.size());
  for (const auto& b : basis.elements()) {
    values.push_back(base_kernel_value(k, x, b));
  }
  return FeatureVector(std::move(values));
}

/// Tanimoto kernel on top of the base kernel: the generalized (four-sum)
/// Tanimoto of the two basis-relative feature vectors under the counting
/// measure. The general form keeps the composition total when the base
/// kernel produces negative features.
inline double composed_tanimoto(const FeatureVector& u, const FeatureVector& v,
                                const Basis& basis, const BaseKernel& k) {
  const FeatureVector fu = basis_feature(u, basis, k);
  const FeatureVector fv = basis_feature(v, basis, k);
  return general_tanimoto_minmax(fu, fv, Measure::counting(basis.size()));
}

}  // namespace tanimoto
