#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rpci/volume.hpp"

namespace rpci {

/// Directed boundary-to-boundary distances (mm), both directions. Samples are
/// ordered by the x-fastest linear index of their source boundary voxel.
struct SurfaceDistanceSet {
  std::vector<double> a_to_b;
  std::vector<double> b_to_a;

  std::size_t size() const { return a_to_b.size() + b_to_a.size(); }
  /// a_to_b followed by b_to_a.
  std::vector<double> pooled() const;
};

struct RegionMetrics {
  RegionId region{0};
  std::optional<double> dice;
  std::optional<double> hd95_mm;
  std::optional<double> asd_mm;
};

/// Means over the defined per-region values.
struct OverallMetrics {
  std::optional<double> dice;
  std::optional<double> hd95_mm;
  std::optional<double> asd_mm;
};

struct PatientMetrics {
  std::string patient_id;
  std::array<RegionMetrics, kRegionCount> regions;
  OverallMetrics overall;
};

/// 2|a & b| / (|a| + |b|); 1 when both are empty, 0 when exactly one is.
double dice(const Mask& a, const Mask& b);

/// Foreground voxels with at least one 6-neighbour in the background (voxels
/// beyond the grid count as background), as ascending linear offsets.
std::vector<std::size_t> boundary_voxels(const Mask& mask);

/// Exact surface distances through the distance transform of each boundary.
/// Both masks must be non-empty and share a grid.
SurfaceDistanceSet surface_distances(const Mask& a, const Mask& b);

/// All-pairs reference for surface_distances. Quadratic in boundary size.
SurfaceDistanceSet brute_force_surface_distances(const Mask& a, const Mask& b);

/// Linearly interpolated percentile of the pooled samples, rank q * (n - 1).
double surface_percentile(const SurfaceDistanceSet& s, double q);

/// 95th percentile of the pooled distances.
double hd95(const SurfaceDistanceSet& s);

/// Mean of the pooled distances.
double asd(const SurfaceDistanceSet& s);

/// Largest pooled distance (the full Hausdorff distance).
double hd100(const SurfaceDistanceSet& s);

/// Dice, HD95 and ASD for one region of two label volumes. Every metric is
/// undefined when the region is absent from both; distances are undefined
/// when it is absent from either.
RegionMetrics evaluate_region(const LabelVolume& gt, const LabelVolume& pred, RegionId r);

/// evaluate_region for two binary masks, reported under region `r`.
RegionMetrics evaluate_masks(const Mask& a, const Mask& b, RegionId r);

/// Per-region metrics for all thirteen regions plus their overall means.
PatientMetrics evaluate_pair(const LabelVolume& gt, const LabelVolume& pred, std::string patient_id = {});

/// Fills `overall` from the regions.
void summarize_overall(PatientMetrics& m);

/// Ground-truth labels the prediction failed to reproduce; 0 elsewhere.
LabelVolume false_negative_mask(const LabelVolume& gt, const LabelVolume& pred);

}  // namespace rpci
