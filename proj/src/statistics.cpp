#include "rpci/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpci/error.hpp"

namespace rpci {

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level must be within [0, 1]");
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::optional<AggregateRow> summarize(std::span<const double> samples) {
  if (samples.empty()) return std::nullopt;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  AggregateRow row;
  row.n = samples.size();
  // Moments follow the input order; the caller fixes that order.
  row.mean = mean(samples);
  row.std = sample_std(samples);
  row.q1 = quantile(sorted, 0.25);
  row.median = quantile(sorted, 0.5);
  row.q3 = quantile(sorted, 0.75);
  const double lo_fence = row.lower_fence();
  const double hi_fence = row.upper_fence();
  bool seen = false;
  for (const double v : sorted) {
    if (v < lo_fence || v > hi_fence) {
      ++row.outlier_count;
    } else {
      if (!seen) row.whisker_lo = v;
      row.whisker_hi = v;
      seen = true;
    }
  }
  return row;
}

std::optional<AggregateRow> summarize(std::span<const std::optional<double>> samples) {
  std::vector<double> defined;
  defined.reserve(samples.size());
  std::size_t undefined = 0;
  for (const auto& s : samples) {
    if (s) {
      defined.push_back(*s);
    } else {
      ++undefined;
    }
  }
  auto row = summarize(std::span<const double>(defined));
  if (row) row->undefined_count = undefined;
  return row;
}

}  // namespace rpci
