#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rpci {

/// Location, spread and boxplot summary of one group of samples.
/// std is the sample standard deviation (n - 1; 0 when n == 1). Quartiles
/// interpolate linearly between order statistics (type 7). Whiskers reach the
/// most extreme samples inside the Tukey fences [q1 - 1.5 IQR, q3 + 1.5 IQR];
/// samples beyond the fences are outliers.
struct AggregateRow {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::size_t outlier_count = 0;
  std::size_t undefined_count = 0;

  double iqr() const { return q3 - q1; }
  double lower_fence() const { return q1 - 1.5 * iqr(); }
  double upper_fence() const { return q3 + 1.5 * iqr(); }
  bool operator==(const AggregateRow&) const = default;
};

/// Type-7 quantile of ascending `sorted`, q in [0, 1].
double quantile(std::span<const double> sorted, double q);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1); 0 for a single value.
double sample_std(std::span<const double> values);

/// Summary of the defined samples; nullopt when none is defined.
std::optional<AggregateRow> summarize(std::span<const std::optional<double>> samples);
std::optional<AggregateRow> summarize(std::span<const double> samples);

}  // namespace rpci
