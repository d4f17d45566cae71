#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tanimoto/gram.hpp"
#include "tanimoto/random.hpp"

namespace tanimoto::krr {

/// Fitted dual model: alpha solves (K + lambda I) alpha = y.
struct Model {
  Eigen::VectorXd dual_coefficients;
  std::vector<std::string> training_ids;
  double lambda = 0.0;
  KernelSpec spec;
};

namespace detail {

inline Eigen::VectorXd solve_regularized(const Eigen::MatrixXd& gram,
                                         const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index m = gram.rows();
  Eigen::MatrixXd system = gram;
  system.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() == Eigen::Success) {
    return llt.solve(y);
  }
  // One retry with a trace-scaled diagonal jitter.
  const double jitter = 1e-10 * system.trace() / static_cast<double>(m);
  system.diagonal().array() += jitter;
  llt.compute(system);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("KRR system factorization failed even with jitter");
  }
  return llt.solve(y);
}

}  // namespace detail

inline Model fit(const Eigen::MatrixXd& gram_train, const Eigen::VectorXd& y,
                 double lambda, std::vector<std::string> training_ids = {},
                 KernelSpec spec = GeneralSpec{}) {
  if (gram_train.rows() != gram_train.cols()) {
    throw ValidationError("training Gram matrix must be square");
  }
  if (gram_train.rows() != y.size()) {
    throw ValidationError("target length does not match Gram size");
  }
  if (!(lambda > 0.0)) {
    throw ValidationError("regularization lambda must be > 0");
  }
  Model model;
  model.dual_coefficients = detail::solve_regularized(gram_train, y, lambda);
  model.training_ids = std::move(training_ids);
  model.lambda = lambda;
  model.spec = std::move(spec);
  return model;
}

/// Predictions for rows of a test-by-train cross-kernel matrix.
inline Eigen::VectorXd predict(const Model& model, const Eigen::MatrixXd& gram_cross) {
  if (gram_cross.cols() != model.dual_coefficients.size()) {
    throw ValidationError("cross-kernel column count does not match training size");
  }
  return gram_cross * model.dual_coefficients;
}

/// The four evaluation metrics; correlations are empty when an argument
/// has zero variance (undefined, as opposed to zero correlation).
struct Metrics {
  double mse = 0.0;
  std::optional<double> r2;
  std::optional<double> pearson;
  std::optional<double> spearman;
};

namespace detail {

inline std::optional<double> pearson_correlation(const std::vector<double>& x,
                                                 const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Ranks starting at 1; ties share the average of the positions they cover.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

inline Metrics compute_metrics(const std::vector<double>& y_true,
                               const std::vector<double>& y_pred) {
  if (y_true.empty() || y_true.size() != y_pred.size()) {
    throw ValidationError("metrics require two equal-length nonempty vectors");
  }
  const std::size_t n = y_true.size();
  Metrics out;
  double sse = 0.0;
  double mean_true = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = y_true[i] - y_pred[i];
    sse += d * d;
    mean_true += y_true[i];
  }
  mean_true /= static_cast<double>(n);
  out.mse = sse / static_cast<double>(n);
  double sst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = y_true[i] - mean_true;
    sst += d * d;
  }
  if (sst > 0.0) out.r2 = 1.0 - sse / sst;
  out.pearson = detail::pearson_correlation(y_true, y_pred);
  out.spearman = detail::pearson_correlation(detail::average_ranks(y_true),
                                             detail::average_ranks(y_pred));
  return out;
}

inline std::vector<double> default_lambda_grid() {
  // 13 log-spaced values covering 1e-6 .. 1e3.
  std::vector<double> grid;
  grid.reserve(13);
  for (int i = 0; i < 13; ++i) {
    grid.push_back(std::pow(10.0, -6.0 + 0.75 * static_cast<double>(i)));
  }
  return grid;
}

struct CvConfig {
  int outer_folds = 5;
  int repeats = 3;
  int inner_folds = 5;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::uint64_t seed = 0;
};

struct FoldResult {
  int repeat = 0;
  int fold = 0;
  double lambda = 0.0;
  Metrics metrics;
  std::vector<int> test_indices;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over the folds
};

struct MetricsReport {
  std::vector<FoldResult> folds;
  std::vector<Metrics> per_repeat;  // pooled out-of-fold predictions per repeat
  Aggregate mse, r2, pearson, spearman;
};

namespace detail {

inline std::vector<std::vector<int>> chunk_folds(const std::vector<int>& order,
                                                 int k) {
  const std::size_t n = order.size();
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

inline std::vector<std::vector<int>> shuffled_folds(std::size_t m, int k,
                                                    std::uint64_t seed) {
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  deterministic_shuffle(order, rng);
  return chunk_folds(order, k);
}

inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& full,
                                 const std::vector<int>& rows,
                                 const std::vector<int>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          full(rows[i], cols[j]);
    }
  }
  return out;
}

inline Eigen::VectorXd subvector(const std::vector<double>& y,
                                 const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = y[static_cast<std::size_t>(idx[i])];
  }
  return out;
}

/// Mean inner-CV MSE minimizer over the (ascending) lambda grid; strict
/// comparison keeps the smallest lambda on ties.
inline double select_lambda(const Eigen::MatrixXd& full_gram,
                            const std::vector<double>& y,
                            const std::vector<int>& train,
                            const std::vector<double>& grid_sorted,
                            int inner_folds, std::uint64_t seed) {
  std::vector<int> order = train;
  std::mt19937_64 rng(seed);
  deterministic_shuffle(order, rng);
  const auto folds = chunk_folds(order, inner_folds);

  double best_lambda = grid_sorted.front();
  double best_mse = std::numeric_limits<double>::infinity();
  for (double lambda : grid_sorted) {
    double mse_sum = 0.0;
    int used = 0;
    for (const auto& val_fold : folds) {
      if (val_fold.empty()) continue;
      std::vector<int> inner_train;
      inner_train.reserve(order.size() - val_fold.size());
      for (const auto& other : folds) {
        if (&other == &val_fold) continue;
        inner_train.insert(inner_train.end(), other.begin(), other.end());
      }
      if (inner_train.empty()) continue;
      const Model model = fit(submatrix(full_gram, inner_train, inner_train),
                              subvector(y, inner_train), lambda);
      const Eigen::VectorXd pred =
          predict(model, submatrix(full_gram, val_fold, inner_train));
      const Eigen::VectorXd truth = subvector(y, val_fold);
      mse_sum += (pred - truth).squaredNorm() / static_cast<double>(val_fold.size());
      ++used;
    }
    if (used == 0) continue;
    const double mean_mse = mse_sum / static_cast<double>(used);
    if (mean_mse < best_mse) {
      best_mse = mean_mse;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

inline Aggregate aggregate_over_folds(const std::vector<double>& values) {
  Aggregate agg;
  if (values.empty()) return agg;
  double sum = 0.0;
  for (double v : values) sum += v;
  agg.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      const double d = v - agg.mean;
      ss += d * d;
    }
    agg.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return agg;
}

}  // namespace detail

/// Repeated nested cross-validation: per repeat a seeded shuffle into
/// `outer_folds` folds; per outer fold an inner CV over the lambda grid
/// picks the regularization (ties to the smaller lambda), the model is
/// refit on the outer-train split and evaluated on the held-out fold.
/// The aggregate mean/std of each metric is taken over the
/// repeats x outer_folds fold evaluations; pooled per-repeat metrics are
/// reported alongside.
inline MetricsReport nested_cv(const Dataset& data, const std::vector<double>& y,
                               const KernelSpec& spec, const CvConfig& cfg,
                               int workers = 1) {
  const std::size_t m = data.size();
  if (y.size() != m) {
    throw ValidationError("target count does not match dataset size");
  }
  if (cfg.outer_folds < 2 || cfg.inner_folds < 2) {
    throw ValidationError("outer and inner fold counts must be >= 2");
  }
  if (m < static_cast<std::size_t>(cfg.outer_folds)) {
    throw ValidationError("dataset smaller than the outer fold count");
  }
  if (cfg.lambda_grid.empty()) {
    throw ValidationError("lambda grid must be nonempty");
  }
  std::vector<double> grid = cfg.lambda_grid;
  std::sort(grid.begin(), grid.end());
  for (double l : grid) {
    if (!(l > 0.0)) throw ValidationError("lambda grid entries must be > 0");
  }

  const GramMatrix gram = compute_gram(data, spec, workers);

  MetricsReport report;
  for (int repeat = 0; repeat < cfg.repeats; ++repeat) {
    const auto folds = detail::shuffled_folds(
        m, cfg.outer_folds, derive_seed(cfg.seed, static_cast<std::uint64_t>(repeat)));
    std::vector<double> pooled_true, pooled_pred;
    for (int f = 0; f < cfg.outer_folds; ++f) {
      const auto& test = folds[static_cast<std::size_t>(f)];
      std::vector<int> train;
      train.reserve(m - test.size());
      for (int g = 0; g < cfg.outer_folds; ++g) {
        if (g == f) continue;
        const auto& fold = folds[static_cast<std::size_t>(g)];
        train.insert(train.end(), fold.begin(), fold.end());
      }
      const std::uint64_t inner_seed = derive_seed(
          cfg.seed, 0x10000ULL + static_cast<std::uint64_t>(repeat) * 256ULL +
                        static_cast<std::uint64_t>(f));
      const double lambda = detail::select_lambda(gram.values, y, train, grid,
                                                  cfg.inner_folds, inner_seed);
      const Model model = fit(detail::submatrix(gram.values, train, train),
                              detail::subvector(y, train), lambda, {}, spec);
      const Eigen::VectorXd pred =
          predict(model, detail::submatrix(gram.values, test, train));

      FoldResult result;
      result.repeat = repeat;
      result.fold = f;
      result.lambda = lambda;
      result.test_indices = test;
      std::vector<double> fold_true, fold_pred;
      fold_true.reserve(test.size());
      fold_pred.reserve(test.size());
      for (std::size_t i = 0; i < test.size(); ++i) {
        fold_true.push_back(y[static_cast<std::size_t>(test[i])]);
        fold_pred.push_back(pred(static_cast<Eigen::Index>(i)));
      }
      result.metrics = compute_metrics(fold_true, fold_pred);
      report.folds.push_back(std::move(result));
      pooled_true.insert(pooled_true.end(), fold_true.begin(), fold_true.end());
      pooled_pred.insert(pooled_pred.end(), fold_pred.begin(), fold_pred.end());
    }
    report.per_repeat.push_back(compute_metrics(pooled_true, pooled_pred));
  }

  std::vector<double> mses, r2s, pearsons, spearmans;
  for (const auto& fold : report.folds) {
    mses.push_back(fold.metrics.mse);
    if (fold.metrics.r2) r2s.push_back(*fold.metrics.r2);
    if (fold.metrics.pearson) pearsons.push_back(*fold.metrics.pearson);
    if (fold.metrics.spearman) spearmans.push_back(*fold.metrics.spearman);
  }
  report.mse = detail::aggregate_over_folds(mses);
  report.r2 = detail::aggregate_over_folds(r2s);
  report.pearson = detail::aggregate_over_folds(pearsons);
  report.spearman = detail::aggregate_over_folds(spearmans);
  return report;
}

}  // namespace tanimoto::krr
