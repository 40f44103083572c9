#include "rpci/agreement.hpp"

#include <algorithm>

#include "rpci/error.hpp"
#include "rpci/parallel.hpp"

namespace rpci {

void ObserverSet::validate() const {
  if (observers.size() < 2) throw ValidationError("interobserver comparison needs at least 2 observers");
  const Grid& first = observers.begin()->second.grid();
  for (const auto& [id, v] : observers) {
    if (v.dims() != first.dims) throw ValidationError("dims mismatch for observer " + id);
    if (!same_geometry(v.grid(), first)) throw ValidationError("geometry mismatch for observer " + id);
  }
}

Mask region_union(const std::vector<const LabelVolume*>& volumes, RegionId r) {
  if (volumes.empty()) throw ValidationError("region union of an empty list");
  const LabelVolume& first = *volumes.front();
  Mask out(first.grid());
  const Label want = r.stored_label();
  auto dst = out.data();
  for (const LabelVolume* v : volumes) {
    if (v->dims() != first.dims()) throw ValidationError("dims mismatch in region union");
    const auto src = v->data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] |= src[i] == want ? 1 : 0;
  }
  return out;
}

Mask region_union(std::span<const LabelVolume> volumes, RegionId r) {
  std::vector<const LabelVolume*> ptrs;
  for (const auto& v : volumes) ptrs.push_back(&v);
  return region_union(ptrs, r);
}

std::vector<PatientMetrics> observer_vs_rest(const ObserverSet& obs) {
  obs.validate();
  std::vector<std::pair<const std::string*, const LabelVolume*>> list;
  for (const auto& [id, v] : obs.observers) list.emplace_back(&id, &v);

  std::vector<PatientMetrics> out(list.size());
  for (std::size_t o = 0; o < list.size(); ++o) {
    std::vector<const LabelVolume*> others;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (k != o) others.push_back(list[k].second);
    }
    PatientMetrics& m = out[o];
    m.patient_id = obs.patient_id + "/" + *list[o].first;
    parallel_for(kRegionCount, [&](std::size_t i) {
      const RegionId r(static_cast<int>(i));
      m.regions[i] = evaluate_masks(extract_region_mask(*list[o].second, r), region_union(others, r), r);
    });
    summarize_overall(m);
  }
  return out;
}

PatientMetrics model_vs_observers(const LabelVolume& pred, const ObserverSet& obs) {
  obs.validate();
  const Grid& g = obs.observers.begin()->second.grid();
  if (pred.dims() != g.dims) throw ValidationError("dims mismatch between prediction and observers");
  if (!same_geometry(pred.grid(), g)) throw ValidationError("geometry mismatch between prediction and observers");

  std::vector<PatientMetrics> per_observer;
  for (const auto& [id, v] : obs.observers) per_observer.push_back(evaluate_pair(v, pred, id));

  PatientMetrics out;
  out.patient_id = obs.patient_id;
  for (std::size_t i = 0; i < out.regions.size(); ++i) {
    auto mean_over = [&](std::optional<double> RegionMetrics::*field) -> std::optional<double> {
      double sum = 0.0;
      int n = 0;
      for (const auto& m : per_observer) {
        if (const auto v = m.regions[i].*field) {
          sum += *v;
          ++n;
        }
      }
      if (n == 0) return std::nullopt;
      return sum / n;
    };
    RegionMetrics& r = out.regions[i];
    r.region = RegionId(static_cast<int>(i));
    r.dice = mean_over(&RegionMetrics::dice);
    r.hd95_mm = mean_over(&RegionMetrics::hd95_mm);
    r.asd_mm = mean_over(&RegionMetrics::asd_mm);
  }
  summarize_overall(out);
  return out;
}

MetricReport aggregate_agreement(const std::vector<PatientMetrics>& human, const std::vector<PatientMetrics>& model) {
  if (human.empty()) throw ValidationError("agreement aggregation needs at least one observer result");
  auto sorted = [](std::vector<PatientMetrics> v) {
    std::stable_sort(v.begin(), v.end(),
                     [](const PatientMetrics& a, const PatientMetrics& b) { return a.patient_id < b.patient_id; });
    return v;
  };
  const auto h = sorted(human);
  const auto m = sorted(model);

  MetricReport report;
  report.kind = "agreement";
  report.columns = {"dice_h", "dice_m", "hd95_h", "hd95_m", "asd_h", "asd_m"};
  using Field = std::optional<double> RegionMetrics::*;
  const std::array<Field, 3> fields = {&RegionMetrics::dice, &RegionMetrics::hd95_mm, &RegionMetrics::asd_mm};

  auto cell = [&](const std::vector<PatientMetrics>& group, Field f, std::optional<int> region, const std::string& col,
                  const std::string& row_name) -> std::optional<AggregateRow> {
    if (group.empty()) return std::nullopt;
    std::vector<std::optional<double>> samples;
    for (const auto& pm : group) {
      if (region) {
        samples.push_back(pm.regions[static_cast<std::size_t>(*region)].*f);
      } else {
        for (const auto& r : pm.regions) samples.push_back(r.*f);
      }
    }
    auto row = summarize(std::span<const std::optional<double>>(samples));
    if (!row) report.warnings.push_back(row_name + " " + col + ": no defined samples, row omitted");
    return row;
  };

  for (int r = 0; r <= kRegionCount; ++r) {
    ReportRow row;
    std::optional<int> region;
    if (r < kRegionCount) region = r;
    row.region = region;
    const std::string row_name = region ? "region " + std::to_string(r) : std::string("Overall");
    for (std::size_t f = 0; f < fields.size(); ++f) {
      row.cells.push_back(cell(h, fields[f], region, report.columns[2 * f], row_name));
      row.cells.push_back(cell(m, fields[f], region, report.columns[2 * f + 1], row_name));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace rpci
