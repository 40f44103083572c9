#pragma once

#include <array>
#include <vector>

#include "rpci/volume.hpp"

namespace rpci {

/// Plane in which fan angles are measured, given by two orthonormal world
/// directions. The default is the coronal plane of RAS world coordinates:
/// `up` is superior (+z) and `left` is patient-left (-x), so the separating
/// planes contain the anteroposterior axis.
struct FanPlane {
  Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d left = -Eigen::Vector3d::UnitX();
};

/// Angles closer than this (radians) count as equal, so voxels on one ray
/// stay together whatever rounding the world transform introduces.
inline constexpr double kFanAngleTolerance = 1e-12;

struct FanConfig {
  Point3 root_world = Point3::Zero();  // mesenteric root, mm
  FanPlane plane;
  /// Where the first sector begins, radians from `up` towards `left`.
  double start_angle = 0.0;
  /// +1 sweeps from up towards left (clockwise in a radiological coronal
  /// view), -1 the other way.
  int sweep = +1;
  /// Region assigned to each successive sector.
  std::array<int, 4> region_order = {9, 10, 11, 12};

  void validate() const;
};

struct FanPartition {
  FanConfig config;
  std::array<double, 3> cut_angles{};          // strictly increasing, in [0, 2 pi)
  std::array<double, 4> achieved_fractions{};  // volume share of each sector
};

/// Angle of a world point about the root, in [0, 2 pi): the projection onto
/// the fan plane measured from start_angle along the sweep. A point that
/// projects onto the root gets 0.
double fan_angle(const Point3& world, const FanConfig& cfg);

/// fan_angle of a voxel center.
double voxel_fan_angle(const Index3& idx, const Grid& grid, const FanConfig& cfg);

/// Cuts at the 25/50/75 % points of the volume-weighted angle distribution.
/// Voxels are grouped into runs of equal angle (within kFanAngleTolerance of
/// the run's first angle). Each cut is the first angle of a run; the sector
/// below it holds every voxel of earlier runs, and among candidate voxels the cut minimising
/// |volume below - target| wins (ties go to the smaller angle). Throws on an
/// empty mask, or "degenerate fan" when three distinct cuts do not exist.
FanPartition balance_fan(const Mask& small_bowel, const FanConfig& cfg);

/// Sector of an angle under half-open intervals [cut_i, cut_i+1); an angle
/// within kFanAngleTolerance below a cut already belongs to the upper sector.
int fan_sector(double angle, const std::array<double, 3>& cuts);

/// Labels each bowel voxel with the stored label of its sector's region;
/// everything else is 0.
LabelVolume apply_fan(const Mask& small_bowel, const FanPartition& partition);

}  // namespace rpci
