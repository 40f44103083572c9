#include "rpci/report.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"
#include "rpci/error.hpp"

namespace rpci {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kLabelMapping = "stored label = region index + 1; 0 = background";

const std::vector<std::pair<std::string_view, std::string_view>>& titles() {
  static const std::vector<std::pair<std::string_view, std::string_view>> t = {
      {"dice", "Dice"},           {"hd95_mm", "HD95 (mm)"},     {"asd_mm", "ASD (mm)"},
      {"dice_h", "Dice_H"},       {"dice_m", "Dice_M"},         {"hd95_h", "HD95_H (mm)"},
      {"hd95_m", "HD95_M (mm)"},  {"asd_h", "ASD_H (mm)"},      {"asd_m", "ASD_M (mm)"},
  };
  return t;
}

std::string column_from_title(std::string_view title) {
  for (const auto& [id, t] : titles()) {
    if (t == title) return std::string(id);
  }
  throw ValidationError("unknown report column \"" + std::string(title) + "\"");
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

Json stats_to_json(const std::optional<AggregateRow>& row) {
  if (!row) return nullptr;
  return Json{{"n", row->n},
              {"mean", row->mean},
              {"std", row->std},
              {"q1", row->q1},
              {"median", row->median},
              {"q3", row->q3},
              {"whisker_lo", row->whisker_lo},
              {"whisker_hi", row->whisker_hi},
              {"outlier_count", row->outlier_count},
              {"undefined_count", row->undefined_count}};
}

std::optional<AggregateRow> stats_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  AggregateRow r;
  r.n = j.at("n").get<std::size_t>();
  r.mean = j.at("mean").get<double>();
  r.std = j.at("std").get<double>();
  r.q1 = j.at("q1").get<double>();
  r.median = j.at("median").get<double>();
  r.q3 = j.at("q3").get<double>();
  r.whisker_lo = j.at("whisker_lo").get<double>();
  r.whisker_hi = j.at("whisker_hi").get<double>();
  r.outlier_count = j.at("outlier_count").get<std::size_t>();
  r.undefined_count = j.at("undefined_count").get<std::size_t>();
  return r;
}

std::string render_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "Region,Name,Stored label";
  if (report.has_voxel_percent) out << ",Total voxel %";
  for (const auto& c : report.columns) out << ',' << csv_field(column_title(c));
  out << "\r\n";
  for (const auto& row : report.rows) {
    out << row.label() << ',';
    if (row.region) {
      const RegionId r(*row.region);
      out << csv_field(std::string(region_name(r))) << ',' << static_cast<int>(r.stored_label());
    } else {
      out << ',';
    }
    if (report.has_voxel_percent) out << ',' << (row.voxel_percent ? fixed2(*row.voxel_percent) : "-");
    for (const auto& cell : row.cells) {
      out << ',' << (cell ? fixed2(cell->mean) + " ± " + fixed2(cell->std) : "n/a");
    }
    out << "\r\n";
  }
  return out.str();
}

std::string render_json(const MetricReport& report) {
  Json j;
  j["format"] = "rpci-metric-report";
  j["version"] = 1;
  j["kind"] = report.kind;
  j["label_mapping"] = kLabelMapping;
  j["float_encoding"] = "IEEE-754 binary64, shortest round-trip decimal";
  j["columns"] = report.columns;
  j["has_voxel_percent"] = report.has_voxel_percent;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r;
    r["region"] = row.region ? Json(*row.region) : Json("Overall");
    if (row.region) {
      const RegionId id(*row.region);
      r["name"] = region_name(id);
      r["stored_label"] = id.stored_label();
    }
    if (report.has_voxel_percent) r["voxel_percent"] = row.voxel_percent ? Json(*row.voxel_percent) : Json(nullptr);
    Json metrics = Json::object();
    for (std::size_t c = 0; c < report.columns.size(); ++c) metrics[report.columns[c]] = stats_to_json(row.cells[c]);
    r["metrics"] = std::move(metrics);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::pair<double, double> parse_mean_std(const std::string& cell) {
  const std::string sep = " ± ";
  const auto pos = cell.find(sep);
  if (pos == std::string::npos) throw ValidationError("malformed report cell \"" + cell + "\"");
  return {std::stod(cell.substr(0, pos)), std::stod(cell.substr(pos + sep.size()))};
}

MetricReport parse_csv_report(std::string_view text) {
  const auto records = parse_csv(text);
  if (records.empty()) throw ValidationError("empty CSV report");
  const auto& header = records.front();
  if (header.size() < 3 || header[0] != "Region" || header[1] != "Name" || header[2] != "Stored label") {
    throw ValidationError("CSV report header not recognised");
  }
  MetricReport report;
  std::size_t first_metric = 3;
  if (header.size() > 3 && header[3] == "Total voxel %") {
    report.has_voxel_percent = true;
    first_metric = 4;
  }
  for (std::size_t i = first_metric; i < header.size(); ++i) report.columns.push_back(column_from_title(header[i]));
  report.kind = !report.columns.empty() && report.columns.front() == "dice_h" ? "agreement" : "evaluation";
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) throw ValidationError("CSV report row has the wrong field count");
    ReportRow row;
    if (rec[0] != "Overall") row.region = RegionId(std::stoi(rec[0])).index();
    if (report.has_voxel_percent && rec[3] != "-") row.voxel_percent = std::stod(rec[3]);
    for (std::size_t i = first_metric; i < rec.size(); ++i) {
      if (rec[i] == "n/a") {
        row.cells.emplace_back();
        continue;
      }
      AggregateRow cell;
      std::tie(cell.mean, cell.std) = parse_mean_std(rec[i]);
      row.cells.emplace_back(cell);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

MetricReport parse_json_report(std::string_view text) {
  const Json j = Json::parse(text);
  if (j.at("format") != "rpci-metric-report") throw ValidationError("not an rpci metric report");
  MetricReport report;
  report.kind = j.at("kind").get<std::string>();
  report.columns = j.at("columns").get<std::vector<std::string>>();
  report.has_voxel_percent = j.at("has_voxel_percent").get<bool>();
  for (const auto& r : j.at("rows")) {
    ReportRow row;
    if (r.at("region").is_number_integer()) row.region = RegionId(r.at("region").get<int>()).index();
    if (report.has_voxel_percent && !r.at("voxel_percent").is_null()) {
      row.voxel_percent = r.at("voxel_percent").get<double>();
    }
    for (const auto& c : report.columns) row.cells.push_back(stats_from_json(r.at("metrics").at(c)));
    report.rows.push_back(std::move(row));
  }
  report.warnings = j.at("warnings").get<std::vector<std::string>>();
  return report;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw ValidationError("unknown report format \"" + std::string(name) + "\" (expected csv or json)");
}

std::string column_title(std::string_view column) {
  for (const auto& [id, t] : titles()) {
    if (id == column) return std::string(t);
  }
  throw ValidationError("unknown report column id \"" + std::string(column) + "\"");
}

std::string render_report(const MetricReport& report, ReportFormat format) {
  if (report.rows.empty()) throw ValidationError("report has no rows");
  for (const auto& row : report.rows) {
    if (row.cells.size() != report.columns.size()) throw ValidationError("report row width does not match columns");
  }
  return format == ReportFormat::kCsv ? render_csv(report) : render_json(report);
}

MetricReport parse_report(std::string_view text, ReportFormat format) {
  try {
    return format == ReportFormat::kCsv ? parse_csv_report(text) : parse_json_report(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed JSON report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ValidationError*>(&e)) throw;
    throw ValidationError(std::string("malformed report number: ") + e.what());
  }
}

}  // namespace rpci
