#include "tanimoto/piecewise.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "tanimoto/kernels.hpp"

using tanimoto::FeatureVector;
using tanimoto::Measure;
using tanimoto::PartitionLabel;
using tanimoto::ValidationError;

namespace {

FeatureVector vec(std::initializer_list<double> values) {
  return FeatureVector(std::vector<double>(values));
}

TEST(PartitionTest, TableLookups) {
  EXPECT_EQ(tanimoto::partition_indices(vec({1}), vec({2}))[0],
            PartitionLabel::pos_high);
  EXPECT_EQ(tanimoto::partition_indices(vec({-1}), vec({-0.5}))[0],
            PartitionLabel::neg_mid);
  // Boundary points fall on the non-strict side.
  EXPECT_EQ(tanimoto::partition_indices(vec({1}), vec({1}))[0],
            PartitionLabel::pos_high);
  EXPECT_EQ(tanimoto::partition_indices(vec({0}), vec({0}))[0],
            PartitionLabel::pos_high);
  EXPECT_EQ(tanimoto::partition_indices(vec({-1}), vec({-1}))[0],
            PartitionLabel::neg_mid);
  EXPECT_EQ(tanimoto::partition_indices(vec({-1}), vec({0}))[0],
            PartitionLabel::neg_xpos);

  const auto labels = tanimoto::partition_indices(
      vec({2, 2, 2, -2, -2, -2}), vec({-1, 1, 3, -3, -1, 1}));
  EXPECT_EQ(labels[0], PartitionLabel::pos_xneg);
  EXPECT_EQ(labels[1], PartitionLabel::pos_mid);
  EXPECT_EQ(labels[2], PartitionLabel::pos_high);
  EXPECT_EQ(labels[3], PartitionLabel::neg_low);
  EXPECT_EQ(labels[4], PartitionLabel::neg_mid);
  EXPECT_EQ(labels[5], PartitionLabel::neg_xpos);

  EXPECT_THROW(tanimoto::partition_indices(vec({1}), vec({1, 2})), ValidationError);
}

TEST(PartitionTest, ExhaustiveProperty) {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = testsupport::random_size(rng, 1, 32);
    const auto a = testsupport::random_vector(rng, n);
    const auto x = testsupport::random_vector(rng, n);
    const auto labels = tanimoto::partition_indices(a, x);
    ASSERT_EQ(labels.size(), n);
    for (std::size_t j = 0; j < n; ++j) {
      const bool positive_anchor = a[j] >= 0.0;
      switch (labels[j]) {
        case PartitionLabel::pos_xneg:
          ASSERT_TRUE(positive_anchor && x[j] < 0.0);
          break;
        case PartitionLabel::pos_mid:
          ASSERT_TRUE(positive_anchor && 0.0 <= x[j] && x[j] < a[j]);
          break;
        case PartitionLabel::pos_high:
          ASSERT_TRUE(positive_anchor && a[j] <= x[j]);
          break;
        case PartitionLabel::neg_low:
          ASSERT_TRUE(!positive_anchor && x[j] < a[j]);
          break;
        case PartitionLabel::neg_mid:
          ASSERT_TRUE(!positive_anchor && a[j] <= x[j] && x[j] < 0.0);
          break;
        case PartitionLabel::neg_xpos:
          ASSERT_TRUE(!positive_anchor && 0.0 <= x[j]);
          break;
      }
    }
  }
}

TEST(EvaluateFgTest, Examples) {
  const auto fg = tanimoto::evaluate_fg(vec({1, -1}), vec({2, -3}));
  EXPECT_EQ(fg.f_value, 2.0);
  EXPECT_EQ(fg.g_value, 5.0);

  const auto diag = tanimoto::evaluate_fg(vec({1.5, -2.5}), vec({1.5, -2.5}));
  EXPECT_EQ(diag.f_value, 4.0);
  EXPECT_EQ(diag.g_value, 4.0);
  EXPECT_TRUE(diag.boundary[0]);
  EXPECT_TRUE(diag.boundary[1]);

  const auto single = tanimoto::evaluate_fg(vec({1}), vec({2}));
  EXPECT_EQ(single.f_subgradient[0], 0.0);
  EXPECT_EQ(single.g_subgradient[0], 1.0);
  EXPECT_FALSE(single.boundary[0]);
}

TEST(EvaluateFgTest, FNonnegativeAndBoundedByG) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = testsupport::random_size(rng, 1, 16);
    const auto a = testsupport::random_vector(rng, n);
    const auto x = testsupport::random_vector(rng, n);
    const Measure mu = testsupport::random_measure(rng, n);
    const auto fg = tanimoto::evaluate_fg(a, x, mu);
    ASSERT_GE(fg.f_value, 0.0);
    ASSERT_GE(fg.g_value, fg.f_value);
  }
}

TEST(TanimotoViaFgTest, Examples) {
  EXPECT_EQ(tanimoto::tanimoto_via_fg(vec({1, -1}), vec({2, -3})), 2.0 / 5.0);
  EXPECT_EQ(tanimoto::tanimoto_via_fg(vec({0.7, -0.3}), vec({0.7, -0.3})), 1.0);
  EXPECT_EQ(tanimoto::tanimoto_via_fg(vec({0}), vec({0})), 0.0);
}

TEST(TanimotoViaFgTest, ThreeWayAgreementProperty) {
  std::mt19937_64 rng(90210);
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = testsupport::random_size(rng, 1, 32);
    const auto a = testsupport::random_vector(rng, n);
    const auto x = testsupport::random_vector(rng, n);
    const Measure ones = Measure::counting(n);
    const double fg = tanimoto::tanimoto_via_fg(a, x);
    const double l1 = tanimoto::general_tanimoto_l1(a, x, ones);
    const double mm = tanimoto::general_tanimoto_minmax(a, x, ones);
    ASSERT_LE(std::abs(fg - l1), 1e-12 * (1.0 + std::abs(l1)));
    ASSERT_LE(std::abs(fg - mm), 1e-12 * (1.0 + std::abs(mm)));
  }
}

TEST(TanimotoViaFgTest, WeightedAgreesWithL1) {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = testsupport::random_size(rng, 1, 16);
    const auto a = testsupport::random_vector(rng, n);
    const auto x = testsupport::random_vector(rng, n);
    const Measure mu = testsupport::random_measure(rng, n);
    const double fg = tanimoto::tanimoto_via_fg(a, x, mu);
    const double l1 = tanimoto::general_tanimoto_l1(a, x, mu);
    ASSERT_LE(std::abs(fg - l1), 1e-12 * (1.0 + std::abs(l1)));
  }
}

// Central finite differences around strictly interior points must match
// the stored subgradients.
TEST(EvaluateFgTest, SubgradientFiniteDifferenceProperty) {
  std::mt19937_64 rng(8080);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = testsupport::random_size(rng, 1, 8);
    const auto a = testsupport::random_vector(rng, n);
    const auto x = testsupport::random_vector(rng, n);
    const Measure mu =
        (trial % 2 == 0) ? Measure::counting(n) : testsupport::random_measure(rng, n);

    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      scale = std::max({scale, std::abs(a[j]), std::abs(x[j])});
    }
    const double eps = 1e-6 * scale;

    bool interior = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(x[j]) <= eps || std::abs(x[j] - a[j]) <= eps) {
        interior = false;
        break;
      }
    }
    if (!interior) continue;
    ++checked;

    const auto fg = tanimoto::evaluate_fg(a, x, mu);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> hi = x.values();
      std::vector<double> lo = x.values();
      hi[j] += eps;
      lo[j] -= eps;
      const auto fg_hi = tanimoto::evaluate_fg(a, FeatureVector(hi), mu);
      const auto fg_lo = tanimoto::evaluate_fg(a, FeatureVector(lo), mu);
      const double df = (fg_hi.f_value - fg_lo.f_value) / (2.0 * eps);
      const double dg = (fg_hi.g_value - fg_lo.g_value) / (2.0 * eps);
      ASSERT_LE(std::abs(df - fg.f_subgradient[j]),
                1e-4 * (1.0 + std::abs(fg.f_subgradient[j])));
      ASSERT_LE(std::abs(dg - fg.g_subgradient[j]),
                1e-4 * (1.0 + std::abs(fg.g_subgradient[j])));
    }
  }
  ASSERT_GT(checked, 100);
}

}  // namespace
