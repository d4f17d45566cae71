// Command-line front end: kernel evaluation, Gram matrices, explicit
// features and the KRR cross-validation benchmark harness.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tanimoto/tanimoto.hpp"

namespace {

using tanimoto::Basis;
using tanimoto::BaseKernel;
using tanimoto::Dataset;
using tanimoto::FeatureVector;
using tanimoto::KernelSpec;
using tanimoto::Measure;
using tanimoto::Summation;
using tanimoto::ValidationError;
namespace io = tanimoto::io;

struct SpecOptions {
  std::string kernel = "general";
  std::string impl = "l1";
  double smooth_t = 0.01;
  std::string smooth_mode = "lse";
  std::string base_kernel = "rbf";
  int poly_degree = 2;
  double poly_offset = 1.0;
  double rbf_bandwidth = 1.0;
  std::size_t basis_size = 64;
  std::uint64_t basis_seed = 0;
  bool compensated_sums = false;

  CLI::Option* kernel_opt = nullptr;
  CLI::Option* smooth_t_opt = nullptr;
  CLI::Option* basis_seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    kernel_opt = cmd->add_option("--kernel", kernel,
                                 "Kernel variant (default: general)")
                     ->check(CLI::IsMember(
                         {"jaccard", "minmax", "general", "smooth", "composed"}));
    cmd->add_option("--impl", impl,
                    "Formulation of the general kernel: l1, minmax or fg")
        ->check(CLI::IsMember({"l1", "minmax", "fg"}));
    smooth_t_opt = cmd->add_option("--smooth-t", smooth_t,
                                   "Smoothing temperature (implies --kernel smooth)");
    cmd->add_option("--smooth-mode", smooth_mode, "Smooth composition: lse or paper")
        ->check(CLI::IsMember({"lse", "paper"}));
    cmd->add_option("--base-kernel", base_kernel,
                    "Base kernel of the composed variant: linear, poly or rbf")
        ->check(CLI::IsMember({"linear", "poly", "rbf"}));
    cmd->add_option("--poly-degree", poly_degree, "Polynomial base kernel degree");
    cmd->add_option("--poly-offset", poly_offset, "Polynomial base kernel offset");
    cmd->add_option("--rbf-bandwidth", rbf_bandwidth, "Gaussian base kernel bandwidth");
    cmd->add_option("--basis-size", basis_size,
                    "Basis size for the composed kernel (capped at the pool size)");
    basis_seed_opt = cmd->add_option("--basis-seed", basis_seed,
                                     "Basis subsample seed (default: --seed)");
    cmd->add_flag("--compensated-sums", compensated_sums,
                  "Compensated accumulation in the kernel sums");
  }

  std::string resolved_kind() const {
    if (kernel_opt->count() == 0 && smooth_t_opt->count() > 0) return "smooth";
    return kernel;
  }

  KernelSpec build(std::uint64_t seed) const {
    const std::string kind = resolved_kind();
    if (kind == "jaccard") return tanimoto::BinaryJaccardSpec{};
    if (kind == "minmax") return tanimoto::MinMaxSpec{};
    if (kind == "general") {
      tanimoto::GeneralSpec spec;
      spec.impl = impl == "l1"       ? tanimoto::GeneralImpl::l1
                  : impl == "minmax" ? tanimoto::GeneralImpl::minmax_sum
                                     : tanimoto::GeneralImpl::fg;
      return spec;
    }
    if (kind == "smooth") {
      tanimoto::SmoothSpec spec;
      spec.temperature = smooth_t;
      spec.mode = smooth_mode == "paper" ? tanimoto::SmoothMode::paper_literal
                                         : tanimoto::SmoothMode::standard_lse;
      return spec;
    }
    tanimoto::ComposedSpec spec;
    spec.base = base_kernel == "linear" ? BaseKernel::linear()
                : base_kernel == "poly"
                    ? BaseKernel::polynomial(poly_degree, poly_offset)
                    : BaseKernel::gaussian(rbf_bandwidth);
    spec.basis_size = basis_size;
    spec.basis_seed = basis_seed_opt->count() > 0 ? basis_seed : seed;
    return spec;
  }

  Summation summation() const {
    return compensated_sums ? Summation::compensated : Summation::plain;
  }
};

struct DataOptions {
  std::string features_path;
  std::string weights_path;
  std::string representation = "real";

  void attach(CLI::App* cmd, bool features_required) {
    auto* features = cmd->add_option("--features", features_path,
                                     "Feature CSV (header: id,f1,...,fn)");
    if (features_required) features->required();
    cmd->add_option("--weights", weights_path,
                    "Per-coordinate weight CSV (header: index,weight)");
    cmd->add_option("--representation", representation,
                    "Coerce values to a fingerprint level: binary, count or real")
        ->check(CLI::IsMember({"binary", "count", "real"}));
  }

  Dataset load() const {
    Dataset data = io::load_features_csv(features_path);
    data = io::coerce_representation(data, io::parse_representation(representation));
    if (!weights_path.empty()) {
      Measure mu = io::load_weights_csv(weights_path, data.dimension());
      data = Dataset(data.vectors(), data.ids(), std::move(mu));
    }
    return data;
  }
};

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

FeatureVector parse_vector_literal(const std::string& token) {
  std::vector<double> values;
  std::string field;
  std::istringstream stream(token);
  while (std::getline(stream, field, ',')) {
    const auto value = io::parse_double(field);
    if (!value) {
      throw ValidationError("malformed vector literal: '" + token + "'");
    }
    values.push_back(*value);
  }
  if (values.empty()) throw ValidationError("malformed vector literal: '" + token + "'");
  return FeatureVector(std::move(values));
}

FeatureVector resolve_vector(const std::string& token,
                             const std::optional<Dataset>& data) {
  if (data) {
    for (std::size_t i = 0; i < data->size(); ++i) {
      if (data->ids()[i] == token) return data->vector(i);
    }
    if (token.find(',') == std::string::npos) {
      throw ValidationError("unknown id: '" + token + "'");
    }
  }
  return parse_vector_literal(token);
}

template <Summation S>
double evaluate_direct(const KernelSpec& spec, const FeatureVector& a,
                       const FeatureVector& b, const Measure& mu) {
  if (std::holds_alternative<tanimoto::BinaryJaccardSpec>(spec)) {
    return tanimoto::jaccard_binary<S>(a, b, mu);
  }
  if (std::holds_alternative<tanimoto::MinMaxSpec>(spec)) {
    return tanimoto::minmax_kernel<S>(a, b, mu);
  }
  if (const auto* general = std::get_if<tanimoto::GeneralSpec>(&spec)) {
    switch (general->impl) {
      case tanimoto::GeneralImpl::l1: return tanimoto::general_tanimoto_l1<S>(a, b, mu);
      case tanimoto::GeneralImpl::minmax_sum:
        return tanimoto::general_tanimoto_minmax<S>(a, b, mu);
      case tanimoto::GeneralImpl::fg: return tanimoto::tanimoto_via_fg(a, b, mu);
    }
  }
  const auto& smooth = std::get<tanimoto::SmoothSpec>(spec);
  return tanimoto::smooth_tanimoto(a, b, smooth.temperature, mu, smooth.mode);
}

int run_kernel(const std::vector<std::string>& operands, const SpecOptions& spec_opts,
               const DataOptions& data_opts, std::uint64_t seed) {
  std::optional<Dataset> data;
  if (!data_opts.features_path.empty()) data = data_opts.load();

  const FeatureVector a = resolve_vector(operands[0], data);
  const FeatureVector b = resolve_vector(operands[1], data);
  if (a.size() != b.size()) {
    throw ValidationError("operand dimensions differ: " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
  }
  Measure mu = data && data->dimension() == a.size()
                   ? data->measure()
                   : Measure::counting(a.size());
  if (!data && !data_opts.weights_path.empty()) {
    mu = io::load_weights_csv(data_opts.weights_path, a.size());
  }

  const KernelSpec spec = spec_opts.build(seed);
  double value = 0.0;
  if (const auto* composed = std::get_if<tanimoto::ComposedSpec>(&spec)) {
    std::vector<FeatureVector> pool;
    if (data) {
      pool = data->vectors();
    } else {
      pool = {a, b};
    }
    const std::size_t size = std::min(composed->basis_size, pool.size());
    const Basis basis = Basis::subsample(pool, size, composed->basis_seed);
    value = tanimoto::composed_tanimoto(a, b, basis, composed->base);
  } else if (spec_opts.summation() == Summation::compensated) {
    value = evaluate_direct<Summation::compensated>(spec, a, b, mu);
  } else {
    value = evaluate_direct<Summation::plain>(spec, a, b, mu);
  }
  std::printf("%.17g\n", value);
  return 0;
}

int run_gram(const SpecOptions& spec_opts, const DataOptions& data_opts,
             const std::string& out_prefix, bool with_psd, double psd_tol,
             std::uint64_t seed, int workers) {
  const Dataset data = data_opts.load();
  const KernelSpec spec = spec_opts.build(seed);
  const auto gram = tanimoto::compute_gram(data, spec, resolve_workers(workers),
                                           spec_opts.summation());

  const std::string csv_path = out_prefix + ".csv";
  const std::string bin_path = out_prefix + ".bin";
  const std::string sidecar_path = out_prefix + ".json";
  io::write_gram_csv(csv_path, gram);
  io::write_gram_binary(bin_path, sidecar_path, gram);

  if (with_psd) {
    const auto report = tanimoto::check_psd(gram, psd_tol);
    std::printf("psd: min_eigenvalue=%.17g pass=%s\n", report.min_eigenvalue,
                report.pass ? "true" : "false");
    std::ifstream side_in(sidecar_path);
    auto sidecar = io::json::parse(side_in);
    side_in.close();
    sidecar["psd"] = {{"min_eigenvalue", report.min_eigenvalue},
                      {"pass", report.pass},
                      {"tolerance", psd_tol}};
    std::ofstream side_out(sidecar_path);
    side_out << sidecar.dump(2) << "\n";
  }
  std::printf("wrote %s %s %s (m=%lld, spec=%s)\n", csv_path.c_str(),
              bin_path.c_str(), sidecar_path.c_str(),
              static_cast<long long>(gram.values.rows()),
              tanimoto::spec_name(spec).c_str());
  return 0;
}

int run_krr_cv(const SpecOptions& spec_opts, const DataOptions& data_opts,
               const std::string& targets_path, const std::string& out_path,
               tanimoto::krr::CvConfig cfg, std::uint64_t seed, int workers) {
  const Dataset full = data_opts.load();
  const auto targets = io::load_targets_csv(targets_path);
  auto [data, y] = io::align_targets(full, targets);
  cfg.seed = seed;

  const KernelSpec spec = spec_opts.build(seed);
  const auto report =
      tanimoto::krr::nested_cv(data, y, spec, cfg, resolve_workers(workers));

  const auto j = io::report_to_json(report);
  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot open file for writing: " + out_path);
  out << j.dump(2) << "\n";

  std::string label = "KRR + " + data_opts.representation;
  std::fputs(io::table_summary(label, report).c_str(), stdout);
  std::printf("report written to %s\n", out_path.c_str());
  return 0;
}

int run_features(const DataOptions& data_opts, int depth, std::size_t max_entries,
                 const std::string& out_path) {
  const Dataset data = data_opts.load();
  std::vector<tanimoto::IndicatorVector> rows;
  rows.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      rows.push_back(
          tanimoto::IndicatorVector::from_vector(data.vector(i), data.measure()));
    } catch (const ValidationError& e) {
      throw ValidationError("row " + std::to_string(i + 1) + " (id " +
                            data.ids()[i] + "): " + e.what());
    }
  }
  if (depth < 1) {
    depth = tanimoto::suggested_depth(rows);
    std::fprintf(stderr, "using suggested depth %d\n", depth);
  }
  tanimoto::feature_entry_count(data.dimension(), depth, max_entries);

  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot open file for writing: " + out_path);
  out << "id";
  const std::size_t n = data.dimension();
  std::size_t block_size = 1;
  for (int k = 1; k <= depth; ++k) {
    block_size *= n;
    for (std::size_t i = 0; i < block_size; ++i) {
      out << ",block" << k << "_" << i;
    }
  }
  out << "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto feature = tanimoto::explicit_feature(rows[r], depth, max_entries);
    out << data.ids()[r];
    for (const auto& block : feature.blocks) {
      for (double v : block) out << "," << io::format_double(v);
    }
    out << "\n";
  }
  std::printf("wrote %s (depth=%d)\n", out_path.c_str(), depth);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Tanimoto kernels: evaluation, Gram matrices, explicit "
               "features and a KRR cross-validation harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Options file in key=value format (flags win)");

  std::uint64_t seed = 0;
  int workers = 0;
  app.add_option("--seed", seed, "Master seed; all randomness derives from it")
      ->capture_default_str();
  app.add_option("--workers", workers,
                 "Worker threads for Gram computation (0 = hardware)")
      ->envname("TANIMOTO_WORKERS");

  // kernel
  auto* kernel_cmd =
      app.add_subcommand("kernel", "Evaluate the kernel on two vectors or ids");
  kernel_cmd->fallthrough();
  std::vector<std::string> operands;
  kernel_cmd->add_option("operands", operands, "Two ids or inline vectors like \"1,-1\"")
      ->expected(2);
  SpecOptions kernel_spec;
  kernel_spec.attach(kernel_cmd);
  DataOptions kernel_data;
  kernel_data.attach(kernel_cmd, /*features_required=*/false);

  // gram
  auto* gram_cmd = app.add_subcommand("gram", "Compute and store a Gram matrix");
  gram_cmd->fallthrough();
  SpecOptions gram_spec;
  gram_spec.attach(gram_cmd);
  DataOptions gram_data;
  gram_data.attach(gram_cmd, /*features_required=*/true);
  std::string gram_out = "gram";
  bool check_psd_flag = false;
  double psd_tol = 1e-8;
  gram_cmd->add_option("--out", gram_out, "Output prefix (.csv/.bin/.json)")
      ->capture_default_str();
  gram_cmd->add_flag("--check-psd", check_psd_flag,
                     "Append a positive-semidefiniteness report");
  gram_cmd->add_option("--psd-tol", psd_tol, "Eigenvalue tolerance of the PSD check")
      ->capture_default_str();

  // krr-cv
  auto* krr_cmd = app.add_subcommand(
      "krr-cv", "Repeated nested cross-validation of kernel ridge regression");
  krr_cmd->fallthrough();
  SpecOptions krr_spec;
  krr_spec.attach(krr_cmd);
  DataOptions krr_data;
  krr_data.attach(krr_cmd, /*features_required=*/true);
  std::string targets_path;
  std::string report_path = "krr_report.json";
  tanimoto::krr::CvConfig cv_cfg;
  std::vector<double> lambda_grid;
  krr_cmd->add_option("--targets", targets_path, "Target CSV (header: id,target)")
      ->required();
  krr_cmd->add_option("--out", report_path, "Report JSON path")->capture_default_str();
  krr_cmd->add_option("--folds", cv_cfg.outer_folds, "Outer folds")
      ->capture_default_str();
  krr_cmd->add_option("--repeats", cv_cfg.repeats, "Shuffle repeats")
      ->capture_default_str();
  krr_cmd->add_option("--inner-folds", cv_cfg.inner_folds, "Inner CV folds")
      ->capture_default_str();
  krr_cmd->add_option("--lambda-grid", lambda_grid,
                      "Regularization grid (comma separated)")
      ->delimiter(',');

  // features
  auto* features_cmd = app.add_subcommand(
      "features", "Write truncated explicit feature vectors for binary data");
  features_cmd->fallthrough();
  DataOptions features_data;
  features_data.attach(features_cmd, /*features_required=*/true);
  int depth = 0;
  std::size_t max_entries = tanimoto::kDefaultFeatureEntryBudget;
  std::string features_out = "features_out.csv";
  features_cmd->add_option("--depth", depth,
                           "Series truncation depth (0 = pick from the data)");
  features_cmd->add_option("--max-entries", max_entries,
                           "Refuse feature blocks beyond this entry budget")
      ->capture_default_str();
  features_cmd->add_option("--out", features_out, "Output CSV path")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (kernel_cmd->parsed()) {
      return run_kernel(operands, kernel_spec, kernel_data, seed);
    }
    if (gram_cmd->parsed()) {
      return run_gram(gram_spec, gram_data, gram_out, check_psd_flag, psd_tol, seed,
                      workers);
    }
    if (krr_cmd->parsed()) {
      if (!lambda_grid.empty()) cv_cfg.lambda_grid = lambda_grid;
      return run_krr_cv(krr_spec, krr_data, targets_path, report_path, cv_cfg, seed,
                        workers);
    }
    if (features_cmd->parsed()) {
      return run_features(features_data, depth, max_entries, features_out);
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const tanimoto::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
  return 1;
}
