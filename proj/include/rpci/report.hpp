#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpci/statistics.hpp"
#include "rpci/volume.hpp"

namespace rpci {

enum class ReportFormat { kCsv, kJson };

ReportFormat parse_report_format(std::string_view name);

/// One table row: a region (0..12) or the pooled "Overall" row.
struct ReportRow {
  std::optional<int> region;  // nullopt for Overall
  std::optional<double> voxel_percent;
  std::vector<std::optional<AggregateRow>> cells;  // one per report column

  std::string label() const { return region ? std::to_string(*region) : std::string("Overall"); }
  bool operator==(const ReportRow&) const = default;
};

/// A per-region metric table: 13 region rows in order, then Overall.
///
/// Column ids are "dice", "hd95_mm", "asd_mm" for model evaluation, and
/// "dice_h", "dice_m", "hd95_h", "hd95_m", "asd_h", "asd_m" for agreement.
struct MetricReport {
  std::string kind;  // "evaluation" or "agreement"
  std::vector<std::string> columns;
  bool has_voxel_percent = false;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;

  bool operator==(const MetricReport&) const = default;
};

/// Display header for a column id, e.g. "HD95_H (mm)".
std::string column_title(std::string_view column);

/// CSV (RFC 4180, CRLF line ends): cells are "mean ± std" with two decimals,
/// "n/a" when no sample was defined. JSON carries every statistic at full
/// (round-trip) double precision.
std::string render_report(const MetricReport& report, ReportFormat format);

/// Inverse of render_report. CSV input yields mean/std only, rounded as
/// printed; rendering the result again reproduces the same bytes.
MetricReport parse_report(std::string_view text, ReportFormat format);

}  // namespace rpci
