#include "rpci/study.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rpci/error.hpp"
#include "rpci/fileio.hpp"
#include "rpci/random.hpp"

namespace rpci {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

fs::path resolve(const fs::path& base, const Json& value, const std::string& what) {
  if (!value.is_string()) throw ValidationError(what + " must be a path string");
  fs::path p = value.get<std::string>();
  if (p.is_relative()) p = base / p;
  if (!fs::is_regular_file(p)) throw ValidationError("dangling path for " + what + ": " + p.string());
  return p;
}

std::map<std::string, fs::path> resolve_map(const fs::path& base, const Json& obj, const std::string& what) {
  std::map<std::string, fs::path> out;
  if (!obj.is_object()) throw ValidationError(what + " must be an object");
  for (const auto& [key, value] : obj.items()) out.emplace(key, resolve(base, value, what + "." + key));
  return out;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

StudyManifest load_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("manifest not found: " + path.string());
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest is not valid JSON: " + std::string(e.what()));
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  StudyManifest m;
  if (j.contains("notes")) m.notes = j.at("notes").get<std::string>();
  if (!j.contains("patients") || !j.at("patients").is_array()) {
    throw ValidationError("manifest needs a \"patients\" array");
  }
  std::set<std::string> seen;
  for (const auto& p : j.at("patients")) {
    PatientEntry e;
    if (!p.contains("id") || !p.at("id").is_string() || p.at("id").get<std::string>().empty()) {
      throw ValidationError("every manifest patient needs a non-empty string \"id\"");
    }
    e.id = p.at("id").get<std::string>();
    if (!seen.insert(e.id).second) throw ValidationError("duplicate patient id \"" + e.id + "\"");
    if (p.contains("ct")) e.ct = resolve(base, p.at("ct"), e.id + ".ct");
    if (p.contains("gt")) e.gt = resolve(base, p.at("gt"), e.id + ".gt");
    if (p.contains("predictions")) e.predictions = resolve_map(base, p.at("predictions"), e.id + ".predictions");
    if (p.contains("observers")) e.observers = resolve_map(base, p.at("observers"), e.id + ".observers");
    m.patients.push_back(std::move(e));
  }
  return m;
}

std::vector<std::vector<std::string>> FoldAssignment::folds() const {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(k));
  for (const auto& [id, fold] : fold_of) out[static_cast<std::size_t>(fold)].push_back(id);
  return out;
}

FoldAssignment make_folds(std::vector<std::string> ids, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("fold count k must be >= 2");
  if (static_cast<std::size_t>(k) > ids.size()) {
    throw ValidationError("fold count k = " + std::to_string(k) + " exceeds the " + std::to_string(ids.size()) +
                          " patient ids");
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw ValidationError("duplicate patient id");
  Rng rng(seed);
  for (std::size_t i = ids.size() - 1; i > 0; --i) std::swap(ids[i], ids[rng.index(i + 1)]);
  FoldAssignment out;
  out.k = k;
  for (std::size_t i = 0; i < ids.size(); ++i) out.fold_of[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return out;
}

std::string render_folds_csv(const FoldAssignment& folds) {
  std::ostringstream out;
  out << "patient_id,fold\r\n";
  for (const auto& [id, fold] : folds.fold_of) out << id << ',' << fold << "\r\n";
  return out.str();
}

PatientRecord make_record(const LabelVolume& gt, const LabelVolume& pred, std::string patient_id) {
  PatientRecord r;
  r.metrics = evaluate_pair(gt, pred, std::move(patient_id));
  const auto hist = label_histogram(gt);
  std::array<std::size_t, kRegionCount> counts{};
  for (int i = 0; i < kRegionCount; ++i) counts[static_cast<std::size_t>(i)] = hist[static_cast<std::size_t>(i + 1)];
  r.gt_voxel_counts = counts;
  return r;
}

std::string render_records(const std::vector<PatientRecord>& records) {
  Json j;
  j["format"] = "rpci-patient-metrics";
  j["version"] = 1;
  j["label_mapping"] = "stored label = region index + 1; 0 = background";
  Json patients = Json::array();
  for (const auto& rec : records) {
    Json p;
    p["patient_id"] = rec.metrics.patient_id;
    if (rec.gt_voxel_counts) p["gt_voxel_counts"] = *rec.gt_voxel_counts;
    Json regions = Json::array();
    for (const auto& r : rec.metrics.regions) {
      regions.push_back(Json{{"region", r.region.index()},
                             {"stored_label", r.region.stored_label()},
                             {"dice", optional_number(r.dice)},
                             {"hd95_mm", optional_number(r.hd95_mm)},
                             {"asd_mm", optional_number(r.asd_mm)}});
    }
    p["regions"] = std::move(regions);
    p["overall"] = Json{{"dice", optional_number(rec.metrics.overall.dice)},
                        {"hd95_mm", optional_number(rec.metrics.overall.hd95_mm)},
                        {"asd_mm", optional_number(rec.metrics.overall.asd_mm)}};
    patients.push_back(std::move(p));
  }
  j["patients"] = std::move(patients);
  return j.dump(2) + "\n";
}

std::vector<PatientRecord> parse_records(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("format") != "rpci-patient-metrics") throw ValidationError("not an rpci patient-metrics file");
    std::vector<PatientRecord> out;
    for (const auto& p : j.at("patients")) {
      PatientRecord rec;
      rec.metrics.patient_id = p.at("patient_id").get<std::string>();
      if (p.contains("gt_voxel_counts")) rec.gt_voxel_counts = p.at("gt_voxel_counts").get<std::array<std::size_t, kRegionCount>>();
      const auto& regions = p.at("regions");
      if (regions.size() != kRegionCount) throw ValidationError("patient record needs exactly 13 regions");
      std::set<int> seen;
      for (const auto& r : regions) {
        const RegionId id(r.at("region").get<int>());
        if (!seen.insert(id.index()).second) throw ValidationError("duplicate region in patient record");
        auto& m = rec.metrics.regions[static_cast<std::size_t>(id.index())];
        m.region = id;
        m.dice = read_optional(r, "dice");
        m.hd95_mm = read_optional(r, "hd95_mm");
        m.asd_mm = read_optional(r, "asd_mm");
      }
      summarize_overall(rec.metrics);
      out.push_back(std::move(rec));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed patient-metrics JSON: ") + e.what());
  }
}

std::array<double, kRegionCount> voxel_distribution(const std::vector<std::array<std::size_t, kRegionCount>>& counts) {
  if (counts.empty()) throw ValidationError("voxel distribution needs at least one volume");
  std::array<std::size_t, kRegionCount> total{};
  std::size_t all = 0;
  for (const auto& c : counts) {
    for (std::size_t r = 0; r < total.size(); ++r) {
      total[r] += c[r];
      all += c[r];
    }
  }
  if (all == 0) throw ValidationError("voxel distribution of an all-background cohort");
  std::array<double, kRegionCount> out{};
  for (std::size_t r = 0; r < total.size(); ++r) out[r] = 100.0 * static_cast<double>(total[r]) / static_cast<double>(all);
  return out;
}

std::array<double, kRegionCount> voxel_distribution(const std::vector<LabelVolume>& gt_volumes) {
  std::vector<std::array<std::size_t, kRegionCount>> counts;
  for (const auto& v : gt_volumes) {
    const auto h = label_histogram(v);
    std::array<std::size_t, kRegionCount> c{};
    std::copy(h.begin() + 1, h.end(), c.begin());
    counts.push_back(c);
  }
  return voxel_distribution(counts);
}

MetricReport aggregate(std::vector<PatientRecord> records) {
  if (records.empty()) throw ValidationError("aggregate needs at least one patient record");
  std::stable_sort(records.begin(), records.end(),
                   [](const PatientRecord& a, const PatientRecord& b) { return a.metrics.patient_id < b.metrics.patient_id; });

  MetricReport report;
  report.kind = "evaluation";
  report.columns = {"dice", "hd95_mm", "asd_mm"};
  const std::array<std::optional<double> RegionMetrics::*, 3> fields = {&RegionMetrics::dice, &RegionMetrics::hd95_mm,
                                                                         &RegionMetrics::asd_mm};

  std::optional<std::array<double, kRegionCount>> percent;
  if (std::all_of(records.begin(), records.end(), [](const PatientRecord& r) { return r.gt_voxel_counts.has_value(); })) {
    std::vector<std::array<std::size_t, kRegionCount>> counts;
    for (const auto& r : records) counts.push_back(*r.gt_voxel_counts);
    try {
      percent = voxel_distribution(counts);
    } catch (const ValidationError&) {
      report.warnings.push_back("voxel distribution unavailable: cohort has no foreground");
    }
  }
  report.has_voxel_percent = percent.has_value();

  std::array<std::vector<std::optional<double>>, 3> pooled;
  for (int r = 0; r < kRegionCount; ++r) {
    ReportRow row;
    row.region = r;
    if (percent) row.voxel_percent = (*percent)[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < fields.size(); ++c) {
      std::vector<std::optional<double>> samples;
      for (const auto& rec : records) samples.push_back(rec.metrics.regions[static_cast<std::size_t>(r)].*fields[c]);
      auto cell = summarize(std::span<const std::optional<double>>(samples));
      if (!cell) {
        report.warnings.push_back("region " + std::to_string(r) + " " + report.columns[c] +
                                  ": no defined samples, row omitted");
      }
      row.cells.push_back(cell);
    }
    report.rows.push_back(std::move(row));
  }
  // Overall pools patient-major, region-minor.
  for (const auto& rec : records) {
    for (const auto& m : rec.metrics.regions) {
      for (std::size_t c = 0; c < fields.size(); ++c) pooled[c].push_back(m.*fields[c]);
    }
  }
  ReportRow overall;
  for (std::size_t c = 0; c < fields.size(); ++c) {
    auto cell = summarize(std::span<const std::optional<double>>(pooled[c]));
    if (!cell) report.warnings.push_back("Overall " + report.columns[c] + ": no defined samples, row omitted");
    overall.cells.push_back(cell);
  }
  report.rows.push_back(std::move(overall));
  return report;
}

}  // namespace rpci
