#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "tanimoto/kernel_spec.hpp"
#include "tanimoto/kernels.hpp"
#include "tanimoto/piecewise.hpp"

namespace tanimoto {

/// Sample of feature vectors with per-row identifiers and a shared measure.
class Dataset {
 public:
  Dataset(std::vector<FeatureVector> vectors, std::vector<std::string> ids,
          Measure measure)
      : vectors_(std::move(vectors)), ids_(std::move(ids)), measure_(std::move(measure)) {
    if (vectors_.empty()) throw ValidationError("dataset must contain at least one row");
    if (ids_.size() != vectors_.size()) {
      throw ValidationError("dataset has " + std::to_string(vectors_.size()) +
                            " rows but " + std::to_string(ids_.size()) + " ids");
    }
    const std::size_t dim = vectors_.front().size();
    for (const auto& v : vectors_) {
      if (v.size() != dim) throw ValidationError("dataset rows differ in dimension");
    }
    if (measure_.size() != dim) {
      throw ValidationError("measure dimension does not match dataset dimension");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_) {
      if (!seen.insert(id).second) {
        throw ValidationError("duplicate dataset id: " + id);
      }
    }
  }

  std::size_t size() const { return vectors_.size(); }
  std::size_t dimension() const { return vectors_.front().size(); }
  const std::vector<FeatureVector>& vectors() const { return vectors_; }
  const FeatureVector& vector(std::size_t i) const { return vectors_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }
  const Measure& measure() const { return measure_; }

 private:
  std::vector<FeatureVector> vectors_;
  std::vector<std::string> ids_;
  Measure measure_;
};

namespace detail {

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline void hash_doubles(const std::vector<double>& values, std::uint64_t& h) {
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    h = fnv1a64(&bits, sizeof(bits), h);
  }
}

}  // namespace detail

/// Content hash of a dataset (dimensions, ids, values, weights), as a
/// 16-digit hex string.
inline std::string dataset_digest(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint64_t m = data.size();
  const std::uint64_t n = data.dimension();
  h = detail::fnv1a64(&m, sizeof(m), h);
  h = detail::fnv1a64(&n, sizeof(n), h);
  for (const auto& id : data.ids()) {
    const std::uint64_t len = id.size();
    h = detail::fnv1a64(&len, sizeof(len), h);
    h = detail::fnv1a64(id.data(), id.size(), h);
  }
  for (const auto& v : data.vectors()) detail::hash_doubles(v.values(), h);
  detail::hash_doubles(data.measure().weights(), h);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;
  std::string dataset_digest;
  std::vector<std::string> ids;
};

/// Pairwise kernel evaluator for one spec bound to one dataset context.
/// For composed specs the basis and the per-row basis features are
/// materialized once so every pair delegates to the same precomputed
/// feature vectors.
class KernelEvaluator {
 public:
  KernelEvaluator(KernelSpec spec, const Dataset& data,
                  Summation summation = Summation::plain)
      : spec_(std::move(spec)), data_(&data), summation_(summation) {
    if (std::holds_alternative<BinaryJaccardSpec>(spec_)) {
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (!data.vector(i).is_binary()) {
          throw ValidationError("binary-jaccard spec requires binary data; row " +
                                std::to_string(i + 1) + " (id " + data.ids()[i] +
                                ") is not binary");
        }
      }
    }
    if (std::holds_alternative<MinMaxSpec>(spec_)) {
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (!data.vector(i).is_nonnegative()) {
          throw ValidationError("minmax spec requires nonnegative data; row " +
                                std::to_string(i + 1) + " (id " + data.ids()[i] +
                                ") has a negative entry");
        }
      }
    }
    if (const auto* comp = std::get_if<ComposedSpec>(&spec_)) {
      if (comp->explicit_elements.has_value()) {
        basis_ = std::make_shared<Basis>(*comp->explicit_elements);
      } else {
        const std::size_t size = std::min(comp->basis_size, data.size());
        basis_ = std::make_shared<Basis>(
            Basis::subsample(data.vectors(), size, comp->basis_seed));
      }
      basis_features_.reserve(data.size());
      for (const auto& v : data.vectors()) {
        basis_features_.push_back(basis_feature(v, *basis_, comp->base));
      }
      ones_ = std::make_shared<Measure>(Measure::counting(basis_->size()));
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (basis_) {
      return evaluate_pair(basis_features_[i], basis_features_[j], *ones_);
    }
    return evaluate_pair(data_->vector(i), data_->vector(j), data_->measure());
  }

  /// Evaluate the spec on an ad-hoc pair (composed specs map the pair
  /// through the materialized basis first).
  double evaluate(const FeatureVector& u, const FeatureVector& v) const {
    if (basis_) {
      const auto* comp = std::get_if<ComposedSpec>(&spec_);
      return evaluate_pair(basis_feature(u, *basis_, comp->base),
                           basis_feature(v, *basis_, comp->base), *ones_);
    }
    return evaluate_pair(u, v, data_->measure());
  }

  const Basis* basis() const { return basis_.get(); }

 private:
  double evaluate_pair(const FeatureVector& u, const FeatureVector& v,
                       const Measure& mu) const {
    return summation_ == Summation::plain
               ? evaluate_pair_impl<Summation::plain>(u, v, mu)
               : evaluate_pair_impl<Summation::compensated>(u, v, mu);
  }

  template <Summation S>
  double evaluate_pair_impl(const FeatureVector& u, const FeatureVector& v,
                            const Measure& mu) const {
    struct Visitor {
      const FeatureVector& u;
      const FeatureVector& v;
      const Measure& mu;

      double operator()(const BinaryJaccardSpec&) const {
        return jaccard_binary<S>(u, v, mu);
      }
      double operator()(const MinMaxSpec&) const { return minmax_kernel<S>(u, v, mu); }
      double operator()(const GeneralSpec& s) const {
        switch (s.impl) {
          case GeneralImpl::l1: return general_tanimoto_l1<S>(u, v, mu);
          case GeneralImpl::minmax_sum: return general_tanimoto_minmax<S>(u, v, mu);
          case GeneralImpl::fg: return tanimoto_via_fg(u, v, mu);
        }
        return 0.0;
      }
      double operator()(const SmoothSpec& s) const {
        return smooth_tanimoto(u, v, s.temperature, mu, s.mode);
      }
      double operator()(const ComposedSpec&) const {
        // Pairs reach here already mapped to basis features.
        return general_tanimoto_minmax(u, v, mu);
      }
    };
    return std::visit(Visitor{u, v, mu}, spec_);
  }

  KernelSpec spec_;
  const Dataset* data_;
  Summation summation_;
  std::shared_ptr<Basis> basis_;
  std::vector<FeatureVector> basis_features_;
  std::shared_ptr<Measure> ones_;
};

/// Gram matrix of the dataset under the spec. Each unordered pair is
/// evaluated exactly once and mirrored; rows of the upper triangle are
/// distributed over `workers` threads in an interleaved pattern, so the
/// result is bitwise independent of the worker count.
inline GramMatrix compute_gram(const Dataset& data, const KernelSpec& spec,
                               int workers = 1,
                               Summation summation = Summation::plain) {
  const auto m = static_cast<Eigen::Index>(data.size());
  KernelEvaluator eval(spec, data, summation);
  GramMatrix out;
  out.values.resize(m, m);
  out.spec = spec;
  out.dataset_digest = dataset_digest(data);
  out.ids = data.ids();

  auto fill_rows = [&](int worker, int stride) {
    for (Eigen::Index i = worker; i < m; i += stride) {
      for (Eigen::Index j = i; j < m; ++j) {
        const double value = eval(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        out.values(i, j) = value;
        out.values(j, i) = value;
      }
    }
  };

  if (workers <= 1 || m < 2) {
    fill_rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(fill_rows, w, workers);
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

struct PsdReport {
  double min_eigenvalue = 0.0;
  bool pass = false;
};

/// Smallest eigenvalue of a symmetric kernel matrix via a dense
/// self-adjoint eigensolver; passes iff min eigenvalue >= -tol.
inline PsdReport check_psd(const Eigen::MatrixXd& values, double tol = 1e-8) {
  if (values.rows() != values.cols()) {
    throw ValidationError("PSD check requires a square matrix");
  }
  if (values != values.transpose()) {
    throw ValidationError("PSD check requires a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(values,
                                                        Eigen::EigenvaluesOnly);
  PsdReport report;
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.pass = report.min_eigenvalue >= -tol;
  return report;
}

inline PsdReport check_psd(const GramMatrix& gram, double tol = 1e-8) {
  return check_psd(gram.values, tol);
}

}  // namespace tanimoto
