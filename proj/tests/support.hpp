#pragma once

// Shared test fixtures: independent oracles and seeded input generators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tanimoto/feature_map.hpp"
#include "tanimoto/feature_vector.hpp"

namespace testsupport {

struct AreaOracle {
  double intersection = 0.0;
  double union_ = 0.0;
  double kernel = 0.0;
};

// Independent route to the generalized Tanimoto kernel: each coordinate j
// contributes the signed-area interval between 0 and the value, so the
// intersection is the overlap length of [min(0,f_j), max(0,f_j)] and
// [min(0,g_j), max(0,g_j)], weighted by w_j. No min/max-sum, L1 or F/G
// arithmetic is shared with the implementations under test.
inline AreaOracle area_oracle(const std::vector<double>& f,
                              const std::vector<double>& g,
                              const std::vector<double>& w) {
  AreaOracle out;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double lo_f = std::min(0.0, f[j]);
    const double hi_f = std::max(0.0, f[j]);
    const double lo_g = std::min(0.0, g[j]);
    const double hi_g = std::max(0.0, g[j]);
    const double overlap =
        std::max(0.0, std::min(hi_f, hi_g) - std::max(lo_f, lo_g));
    const double len_f = hi_f - lo_f;
    const double len_g = hi_g - lo_g;
    out.intersection += w[j] * overlap;
    out.union_ += w[j] * (len_f + len_g - overlap);
  }
  out.kernel = out.union_ > 0.0 ? out.intersection / out.union_ : 0.0;
  return out;
}

inline AreaOracle area_oracle(const tanimoto::FeatureVector& f,
                              const tanimoto::FeatureVector& g,
                              const tanimoto::Measure& mu) {
  return area_oracle(f.values(), g.values(), mu.weights());
}

// Literal construction of the tensor-product feature blocks by odometer
// enumeration of every index tuple (j, l_1, ..., l_{k-1}).
inline std::vector<std::vector<double>> naive_feature_blocks(
    const std::vector<std::uint8_t>& bits, double total_measure, int depth) {
  const std::size_t n = bits.size();
  const double inv_sqrt = 1.0 / std::sqrt(total_measure);
  std::vector<std::vector<double>> blocks;
  for (int k = 1; k <= depth; ++k) {
    std::size_t size = 1;
    for (int d = 0; d < k; ++d) size *= n;
    std::vector<double> block(size);
    std::vector<std::size_t> tuple(static_cast<std::size_t>(k), 0);
    for (std::size_t flat = 0; flat < size; ++flat) {
      double value = inv_sqrt * static_cast<double>(bits[tuple[0]]);
      for (int d = 1; d < k; ++d) {
        value *= static_cast<double>(1 - bits[tuple[static_cast<std::size_t>(d)]]) *
                 inv_sqrt;
      }
      block[flat] = value;
      for (int d = k - 1; d >= 0; --d) {
        auto& digit = tuple[static_cast<std::size_t>(d)];
        if (++digit < n) break;
        digit = 0;
      }
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n,
                                         double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> values(n);
  for (auto& v : values) v = dist(rng);
  return values;
}

inline tanimoto::FeatureVector random_vector(std::mt19937_64& rng, std::size_t n,
                                             double lo = -10.0, double hi = 10.0) {
  return tanimoto::FeatureVector(random_values(rng, n, lo, hi));
}

inline tanimoto::FeatureVector random_nonnegative(std::mt19937_64& rng, std::size_t n,
                                                  double hi = 10.0) {
  return tanimoto::FeatureVector(random_values(rng, n, 0.0, hi));
}

inline tanimoto::FeatureVector random_binary(std::mt19937_64& rng, std::size_t n,
                                             double p_one = 0.5) {
  std::bernoulli_distribution coin(p_one);
  std::vector<double> values(n);
  for (auto& v : values) v = coin(rng) ? 1.0 : 0.0;
  return tanimoto::FeatureVector(std::move(values));
}

inline tanimoto::Measure random_measure(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(0.05, 2.0);
  std::vector<double> weights(n);
  for (auto& w : weights) w = dist(rng);
  return tanimoto::Measure(std::move(weights));
}

inline std::size_t random_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> dist(lo, hi);
  return dist(rng);
}

}  // namespace testsupport
