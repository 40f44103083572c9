#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpci/metrics.hpp"
#include "rpci/report.hpp"

namespace rpci {

struct PatientEntry {
  std::string id;
  std::optional<std::filesystem::path> ct;
  std::optional<std::filesystem::path> gt;
  std::map<std::string, std::filesystem::path> predictions;  // by model name
  std::map<std::string, std::filesystem::path> observers;    // by observer id
};

/// JSON cohort index. Relative paths resolve against the manifest's folder.
///
///   {
///     "notes": "free text, e.g. spacing policy",
///     "patients": [
///       {"id": "p01", "ct": "p01/ct.nii.gz", "gt": "p01/labels.nii.gz",
///        "predictions": {"nnunet": "p01/pred.nii.gz"},
///        "observers": {"A": "p01/a.nii.gz", "B": "p01/b.nii.gz"}}
///     ]
///   }
struct StudyManifest {
  std::vector<PatientEntry> patients;
  std::string notes;
};

/// Throws IoError for a missing manifest, ValidationError for malformed
/// content, duplicate ids or paths that do not resolve to files.
StudyManifest load_manifest(const std::filesystem::path& path);

struct FoldAssignment {
  int k = 5;
  std::map<std::string, int> fold_of;

  /// Patient ids per fold, each sorted.
  std::vector<std::vector<std::string>> folds() const;
};

/// Sorts the ids, shuffles them with mt19937_64(seed) (Fisher-Yates, unbiased
/// rejection sampling of indices) and deals them round-robin into k folds.
FoldAssignment make_folds(std::vector<std::string> ids, int k, std::uint64_t seed);

/// "patient_id,fold" lines in id order, CRLF terminated.
std::string render_folds_csv(const FoldAssignment& folds);

/// One patient's metrics with the ground-truth voxel count per region.
struct PatientRecord {
  PatientMetrics metrics;
  std::optional<std::array<std::size_t, kRegionCount>> gt_voxel_counts;
};

PatientRecord make_record(const LabelVolume& gt, const LabelVolume& pred, std::string patient_id);

std::string render_records(const std::vector<PatientRecord>& records);
std::vector<PatientRecord> parse_records(std::string_view json);

/// Percentage of the cohort's foreground voxels falling in each region.
/// Throws ValidationError when there is no foreground at all.
std::array<double, kRegionCount> voxel_distribution(
    const std::vector<std::array<std::size_t, kRegionCount>>& counts);
std::array<double, kRegionCount> voxel_distribution(const std::vector<LabelVolume>& gt_volumes);

/// Per-region summaries across patients of Dice, HD95 and ASD, plus an
/// Overall row pooling every (patient, region) sample. Records are reduced
/// in patient-id order. The voxel-% column is filled when every record has
/// ground-truth counts.
MetricReport aggregate(std::vector<PatientRecord> records);

}  // namespace rpci
