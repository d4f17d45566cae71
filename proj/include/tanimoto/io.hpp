#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tanimoto/gram.hpp"
#include "tanimoto/krr.hpp"

namespace tanimoto::io {

using json = nlohmann::json;

/// Shortest decimal representation that round-trips the double exactly.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// Locale-independent double parser; the full token must be consumed.
inline std::optional<double> parse_double(std::string_view token) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) return std::nullopt;
  return value;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open file for writing: " + path);
  return out;
}

}  // namespace detail

/// Feature table `id,f1,...,fn`, one record per object. Values must be
/// finite; errors name the offending row and column. The returned dataset
/// carries the counting measure until reweighted.
inline Dataset load_features_csv(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  const auto header = detail::split_csv_line(detail::strip_cr(line));
  if (header.size() < 2 || header[0] != "id") {
    throw ValidationError(path + ": header must be 'id,f1,...,fn'");
  }
  const std::size_t n = header.size() - 1;

  std::vector<FeatureVector> vectors;
  std::vector<std::string> ids;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != n + 1) {
      throw ValidationError(path + ": row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(n + 1));
    }
    std::vector<double> values(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto value = parse_double(fields[j + 1]);
      if (!value || !std::isfinite(*value)) {
        throw ValidationError(path + ": row " + std::to_string(row) + " column " +
                              std::to_string(j + 2) + " ('" + header[j + 1] +
                              "'): not a finite number: '" + fields[j + 1] + "'");
      }
      values[j] = *value;
    }
    ids.push_back(fields[0]);
    vectors.emplace_back(std::move(values));
  }
  if (vectors.empty()) throw ValidationError(path + ": no data rows");
  const std::size_t dim = vectors.front().size();
  return Dataset(std::move(vectors), std::move(ids), Measure::counting(dim));
}

/// Weight table `index,weight` with 1-based indices covering 1..n exactly.
inline Measure load_weights_csv(const std::string& path, std::size_t n) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  const auto header = detail::split_csv_line(detail::strip_cr(line));
  if (header.size() != 2 || header[0] != "index" || header[1] != "weight") {
    throw ValidationError(path + ": header must be 'index,weight'");
  }
  std::vector<double> weights(n, -1.0);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw ValidationError(path + ": row " + std::to_string(row) +
                            " must have exactly two fields");
    }
    const auto index = parse_double(fields[0]);
    const auto weight = parse_double(fields[1]);
    if (!index || *index < 1 || *index > static_cast<double>(n) ||
        *index != std::floor(*index)) {
      throw ValidationError(path + ": row " + std::to_string(row) +
                            ": index must be an integer in 1.." + std::to_string(n));
    }
    if (!weight) {
      throw ValidationError(path + ": row " + std::to_string(row) +
                            ": malformed weight '" + fields[1] + "'");
    }
    const auto j = static_cast<std::size_t>(*index) - 1;
    if (weights[j] >= 0.0) {
      throw ValidationError(path + ": duplicate weight for index " + fields[0]);
    }
    weights[j] = *weight;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (weights[j] < 0.0) {
      throw ValidationError(path + ": missing weight for index " +
                            std::to_string(j + 1));
    }
  }
  return Measure(std::move(weights));
}

/// Target table `id,target`.
inline std::vector<std::pair<std::string, double>> load_targets_csv(
    const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  const auto header = detail::split_csv_line(detail::strip_cr(line));
  if (header.size() != 2 || header[0] != "id") {
    throw ValidationError(path + ": header must be 'id,target'");
  }
  std::vector<std::pair<std::string, double>> targets;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw ValidationError(path + ": row " + std::to_string(row) +
                            " must have exactly two fields");
    }
    const auto value = parse_double(fields[1]);
    if (!value || !std::isfinite(*value)) {
      throw ValidationError(path + ": row " + std::to_string(row) +
                            ": not a finite target: '" + fields[1] + "'");
    }
    targets.emplace_back(fields[0], *value);
  }
  if (targets.empty()) throw ValidationError(path + ": no data rows");
  return targets;
}

/// Restrict the dataset to the target ids (kept in dataset order) and
/// return the aligned target vector. Every target id must exist in the
/// dataset, at most once in the target file.
inline std::pair<Dataset, std::vector<double>> align_targets(
    const Dataset& data, const std::vector<std::pair<std::string, double>>& targets) {
  std::unordered_map<std::string, double> by_id;
  for (const auto& [id, value] : targets) {
    if (!by_id.emplace(id, value).second) {
      throw ValidationError("duplicate target id: " + id);
    }
  }
  for (const auto& [id, value] : targets) {
    if (std::find(data.ids().begin(), data.ids().end(), id) == data.ids().end()) {
      throw ValidationError("target id not present in features: " + id);
    }
  }
  std::vector<FeatureVector> vectors;
  std::vector<std::string> ids;
  std::vector<double> y;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto it = by_id.find(data.ids()[i]);
    if (it == by_id.end()) continue;
    vectors.push_back(data.vector(i));
    ids.push_back(data.ids()[i]);
    y.push_back(it->second);
  }
  return {Dataset(std::move(vectors), std::move(ids), data.measure()), std::move(y)};
}

enum class Representation { binary, count, real };

inline Representation parse_representation(const std::string& name) {
  if (name == "binary") return Representation::binary;
  if (name == "count") return Representation::count;
  if (name == "real") return Representation::real;
  throw ValidationError("unknown representation: " + name);
}

/// Emulate the three fingerprint information levels from one value table:
/// binary = nonzero indicator, count = values as-is validated as
/// nonnegative integers, real = values as-is.
inline Dataset coerce_representation(const Dataset& data, Representation rep) {
  if (rep == Representation::real) return data;
  std::vector<FeatureVector> vectors;
  vectors.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& v = data.vector(i);
    std::vector<double> values(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (rep == Representation::binary) {
        values[j] = v[j] != 0.0 ? 1.0 : 0.0;
      } else {
        if (v[j] < 0.0 || v[j] != std::floor(v[j])) {
          throw ValidationError("count representation requires nonnegative "
                                "integer values; row " + std::to_string(i + 1) +
                                " column " + std::to_string(j + 2) + " is " +
                                format_double(v[j]));
        }
        values[j] = v[j];
      }
    }
    vectors.emplace_back(std::move(values));
  }
  return Dataset(std::move(vectors), data.ids(), data.measure());
}

inline json spec_to_json(const KernelSpec& spec) {
  struct Visitor {
    json operator()(const BinaryJaccardSpec&) const {
      return json{{"kind", "binary-jaccard"}};
    }
    json operator()(const MinMaxSpec&) const { return json{{"kind", "minmax"}}; }
    json operator()(const GeneralSpec& s) const {
      const char* impl = s.impl == GeneralImpl::l1          ? "l1"
                         : s.impl == GeneralImpl::minmax_sum ? "minmax"
                                                             : "fg";
      return json{{"kind", "general"}, {"impl", impl}};
    }
    json operator()(const SmoothSpec& s) const {
      return json{{"kind", "smooth"},
                  {"temperature", s.temperature},
                  {"mode", s.mode == SmoothMode::standard_lse ? "lse" : "paper"}};
    }
    json operator()(const ComposedSpec& s) const {
      json base;
      switch (s.base.kind) {
        case BaseKernel::Kind::linear:
          base = json{{"kind", "linear"}};
          break;
        case BaseKernel::Kind::polynomial:
          base = json{{"kind", "poly"}, {"degree", s.base.degree},
                      {"offset", s.base.offset}};
          break;
        case BaseKernel::Kind::gaussian:
          base = json{{"kind", "rbf"}, {"bandwidth", s.base.bandwidth}};
          break;
      }
      return json{{"kind", "composed"},
                  {"base", base},
                  {"basis_size", s.basis_size},
                  {"basis_seed", s.basis_seed}};
    }
  };
  return std::visit(Visitor{}, spec);
}

/// CSV writer: header row of ids, then one row of values per dataset row,
/// shortest round-trip formatting.
inline void write_gram_csv(const std::string& path, const GramMatrix& gram) {
  auto out = detail::open_output(path);
  for (std::size_t i = 0; i < gram.ids.size(); ++i) {
    out << (i == 0 ? "" : ",") << gram.ids[i];
  }
  out << "\n";
  for (Eigen::Index i = 0; i < gram.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.values.cols(); ++j) {
      out << (j == 0 ? "" : ",") << format_double(gram.values(i, j));
    }
    out << "\n";
  }
}

inline Eigen::MatrixXd read_gram_csv(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  const auto header = detail::split_csv_line(detail::strip_cr(line));
  const auto m = static_cast<Eigen::Index>(header.size());
  Eigen::MatrixXd values(m, m);
  Eigen::Index i = 0;
  while (std::getline(in, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    if (i >= m) throw ValidationError(path + ": more rows than header columns");
    const auto fields = detail::split_csv_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != m) {
      throw ValidationError(path + ": ragged row " + std::to_string(i + 2));
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto value = parse_double(fields[static_cast<std::size_t>(j)]);
      if (!value) throw ValidationError(path + ": malformed number in row " +
                                        std::to_string(i + 2));
      values(i, j) = *value;
    }
    ++i;
  }
  if (i != m) throw ValidationError(path + ": expected " + std::to_string(m) + " rows");
  return values;
}

/// Raw little-endian float64 matrix (row major) plus a JSON sidecar with
/// {m, ids, spec, digest}.
inline void write_gram_binary(const std::string& bin_path,
                              const std::string& sidecar_path,
                              const GramMatrix& gram) {
  std::ofstream out(bin_path, std::ios::binary);
  if (!out) throw ValidationError("cannot open file for writing: " + bin_path);
  for (Eigen::Index i = 0; i < gram.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.values.cols(); ++j) {
      auto bits = std::bit_cast<std::uint64_t>(gram.values(i, j));
      char bytes[8];
      for (int b = 0; b < 8; ++b) {
        bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
      }
      out.write(bytes, 8);
    }
  }
  json sidecar{{"m", gram.values.rows()},
               {"ids", gram.ids},
               {"spec", spec_to_json(gram.spec)},
               {"digest", gram.dataset_digest}};
  auto side = detail::open_output(sidecar_path);
  side << sidecar.dump(2) << "\n";
}

inline Eigen::MatrixXd read_gram_binary(const std::string& bin_path, Eigen::Index m) {
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + bin_path);
  Eigen::MatrixXd values(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      char bytes[8];
      if (!in.read(bytes, 8)) {
        throw ValidationError(bin_path + ": truncated matrix payload");
      }
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b]))
                << (8 * b);
      }
      values(i, j) = std::bit_cast<double>(bits);
    }
  }
  return values;
}

namespace detail {

inline json metrics_to_json(const krr::Metrics& m) {
  json out{{"mse", m.mse}};
  out["r2"] = m.r2 ? json(*m.r2) : json(nullptr);
  out["pearson"] = m.pearson ? json(*m.pearson) : json(nullptr);
  out["spearman"] = m.spearman ? json(*m.spearman) : json(nullptr);
  return out;
}

}  // namespace detail

inline json report_to_json(const krr::MetricsReport& report) {
  json folds = json::array();
  for (const auto& fold : report.folds) {
    folds.push_back(json{{"repeat", fold.repeat},
                         {"fold", fold.fold},
                         {"lambda", fold.lambda},
                         {"test_indices", fold.test_indices},
                         {"metrics", detail::metrics_to_json(fold.metrics)}});
  }
  json per_repeat = json::array();
  for (const auto& m : report.per_repeat) {
    per_repeat.push_back(detail::metrics_to_json(m));
  }
  auto agg = [](const krr::Aggregate& a) {
    return json{{"mean", a.mean}, {"stddev", a.stddev}};
  };
  return json{{"folds", folds},
              {"per_repeat", per_repeat},
              {"aggregate", json{{"mse", agg(report.mse)},
                                 {"r2", agg(report.r2)},
                                 {"pearson", agg(report.pearson)},
                                 {"spearman", agg(report.spearman)}}}};
}

/// One table row in the layout of the paper's results table:
/// label, then "mean (std)" for MSE, R2, Pearson, Spearman.
inline std::string table_summary(const std::string& label,
                                 const krr::MetricsReport& report) {
  auto cell = [](const krr::Aggregate& a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", a.mean, a.stddev);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "Model | MSE | R2 | Pearson | Spearman\n";
  out << label << " | " << cell(report.mse) << " | " << cell(report.r2) << " | "
      << cell(report.pearson) << " | " << cell(report.spearman) << "\n";
  return out.str();
}

}  // namespace tanimoto::io
