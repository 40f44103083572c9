#include <gtest/gtest.h>

#include <algorithm>

#include "rpci/error.hpp"
#include "rpci/random.hpp"
#include "rpci/statistics.hpp"

namespace rpci {
namespace {

TEST(Statistics, MeanAndSampleStd) {
  const std::vector<double> v = {0.8, 0.9, 1.0};
  const auto row = summarize(std::span<const double>(v));
  ASSERT_TRUE(row);
  EXPECT_NEAR(row->mean, 0.9, 1e-12);
  EXPECT_NEAR(row->std, 0.1, 1e-12);
  EXPECT_NEAR(row->median, 0.9, 1e-12);
  EXPECT_EQ(row->n, 3u);
}

TEST(Statistics, TukeyFencesAndOutliers) {
  const std::vector<double> v = {1, 2, 3, 4, 100};
  const auto row = summarize(std::span<const double>(v));
  ASSERT_TRUE(row);
  EXPECT_DOUBLE_EQ(row->q1, 2.0);
  EXPECT_DOUBLE_EQ(row->median, 3.0);
  EXPECT_DOUBLE_EQ(row->q3, 4.0);
  EXPECT_DOUBLE_EQ(row->iqr(), 2.0);
  EXPECT_DOUBLE_EQ(row->upper_fence(), 7.0);
  EXPECT_DOUBLE_EQ(row->lower_fence(), -1.0);
  EXPECT_EQ(row->outlier_count, 1u);
  EXPECT_DOUBLE_EQ(row->whisker_lo, 1.0);
  EXPECT_DOUBLE_EQ(row->whisker_hi, 4.0);
}

TEST(Statistics, SingleSample) {
  const std::vector<double> v = {0.42};
  const auto row = summarize(std::span<const double>(v));
  ASSERT_TRUE(row);
  EXPECT_EQ(row->std, 0.0);
  EXPECT_EQ(row->q1, 0.42);
  EXPECT_EQ(row->q3, 0.42);
  EXPECT_EQ(row->whisker_lo, 0.42);
  EXPECT_EQ(row->whisker_hi, 0.42);
  EXPECT_EQ(row->outlier_count, 0u);
}

TEST(Statistics, UndefinedSamplesAreCountedNotUsed) {
  const std::vector<std::optional<double>> v = {1.0, std::nullopt, 3.0, std::nullopt};
  const auto row = summarize(std::span<const std::optional<double>>(v));
  ASSERT_TRUE(row);
  EXPECT_EQ(row->n, 2u);
  EXPECT_EQ(row->undefined_count, 2u);
  EXPECT_DOUBLE_EQ(row->mean, 2.0);
  const std::vector<std::optional<double>> none = {std::nullopt};
  EXPECT_FALSE(summarize(std::span<const std::optional<double>>(none)));
  EXPECT_FALSE(summarize(std::span<const double>()));
}

// Reference type-7 quantile written from the textbook definition:
// Q(p) = x[j] + g (x[j+1] - x[j]) with h = (n - 1) p + 1 (1-based), j = floor(h).
double reference_quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p + 1.0;
  const auto j = static_cast<std::size_t>(std::floor(h));
  const double g = h - static_cast<double>(j);
  if (j >= x.size()) return x.back();
  return x[j - 1] + g * (x[j] - x[j - 1]);
}

TEST(Statistics, QuantileMatchesReference) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(1 + rng.index(40));
    for (auto& v : x) v = rng.uniform(-50.0, 50.0);
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    for (const double p : {0.0, 0.25, 0.5, 0.75, 0.95, 1.0, rng.uniform01()}) {
      ASSERT_NEAR(quantile(sorted, p), reference_quantile(x, p), 1e-12);
    }
  }
}

TEST(Statistics, WhiskersAreExtremeInFenceSamples) {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(2 + rng.index(30));
    for (auto& v : x) v = rng.uniform01() < 0.1 ? rng.uniform(-500, 500) : rng.normal();
    const auto row = summarize(std::span<const double>(x));
    ASSERT_TRUE(row);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t outliers = 0;
    for (const double v : x) {
      if (v < row->lower_fence() || v > row->upper_fence()) {
        ++outliers;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    EXPECT_EQ(row->outlier_count, outliers);
    EXPECT_EQ(row->whisker_lo, lo);
    EXPECT_EQ(row->whisker_hi, hi);
  }
}

TEST(Statistics, QuantileRejectsBadInput) {
  const std::vector<double> x = {1.0};
  EXPECT_THROW(quantile(x, 1.5), ValidationError);
  EXPECT_THROW(quantile(std::span<const double>(), 0.5), ValidationError);
}

}  // namespace
}  // namespace rpci
