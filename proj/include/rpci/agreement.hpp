#pragma once

#include <map>
#include <string>
#include <vector>

#include "rpci/metrics.hpp"
#include "rpci/report.hpp"

namespace rpci {

/// Independent annotations of one scan, keyed by observer id. All volumes
/// share one grid.
struct ObserverSet {
  std::string patient_id;
  std::map<std::string, LabelVolume> observers;

  void validate() const;
};

/// Voxelwise OR of region `r` over the volumes.
Mask region_union(const std::vector<const LabelVolume*>& volumes, RegionId r);
Mask region_union(std::span<const LabelVolume> volumes, RegionId r);

/// For each observer (in id order), every region compared against the union
/// of the other observers' masks for that region. patient_id of each result
/// is "<patient>/<observer>".
std::vector<PatientMetrics> observer_vs_rest(const ObserverSet& obs);

/// Model prediction compared with each observer separately (observer as
/// reference), then averaged per region over observers with a defined value.
PatientMetrics model_vs_observers(const LabelVolume& pred, const ObserverSet& obs);

/// Table with columns dice_h, dice_m, hd95_h, hd95_m, asd_h, asd_m. Human
/// columns pool every (patient, observer) result, model columns every patient
/// result; Overall additionally pools over regions. `model` may be empty.
MetricReport aggregate_agreement(const std::vector<PatientMetrics>& human, const std::vector<PatientMetrics>& model);

}  // namespace rpci
