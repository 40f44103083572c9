#include "rpci/priors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "rpci/error.hpp"

namespace rpci {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

void FanConfig::validate() const {
  if (!root_world.allFinite()) throw ValidationError("fan root must be finite");
  if (sweep != 1 && sweep != -1) throw ValidationError("fan sweep must be +1 or -1");
  if (!std::isfinite(start_angle)) throw ValidationError("fan start angle must be finite");
  if (std::abs(plane.up.norm() - 1.0) > 1e-9 || std::abs(plane.left.norm() - 1.0) > 1e-9 ||
      std::abs(plane.up.dot(plane.left)) > 1e-9) {
    throw ValidationError("fan plane axes must be orthonormal");
  }
  auto order = region_order;
  std::sort(order.begin(), order.end());
  if (order != std::array<int, 4>{9, 10, 11, 12}) throw ValidationError("fan region order must permute 9..12");
}

double fan_angle(const Point3& world, const FanConfig& cfg) {
  const Eigen::Vector3d v = world - cfg.root_world;
  const double u = v.dot(cfg.plane.up);
  const double l = v.dot(cfg.plane.left);
  if (u == 0.0 && l == 0.0) return 0.0;
  double a = cfg.sweep * (std::atan2(l, u) - cfg.start_angle);
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double voxel_fan_angle(const Index3& idx, const Grid& grid, const FanConfig& cfg) {
  return fan_angle(voxel_to_world(grid, idx), cfg);
}

FanPartition balance_fan(const Mask& small_bowel, const FanConfig& cfg) {
  cfg.validate();
  const Grid& g = small_bowel.grid();
  std::vector<double> angles;
  for (std::size_t i = 0; i < small_bowel.size(); ++i) {
    if (small_bowel[i]) angles.push_back(voxel_fan_angle(g.index(i), g, cfg));
  }
  if (angles.empty()) throw ValidationError("empty mask: no small-bowel voxels to partition");
  std::sort(angles.begin(), angles.end());

  // All voxels share one volume, so volumes compare exactly as voxel counts:
  // |below - k/4 total| is ordered like |4 below - k total|.
  const auto total = static_cast<long long>(angles.size());
  std::array<long long, 3> best_gap;
  best_gap.fill(std::numeric_limits<long long>::max());
  std::array<double, 3> cuts{};
  long long below = 0;
  for (std::size_t i = 0; i < angles.size();) {
    const double angle = angles[i];
    for (int k = 0; k < 3; ++k) {
      const long long gap = std::llabs(4 * below - (k + 1) * total);
      if (gap < best_gap[k]) {
        best_gap[k] = gap;
        cuts[k] = angle;
      }
    }
    while (i < angles.size() && angles[i] - angle <= kFanAngleTolerance) {
      ++below;
      ++i;
    }
  }
  if (!(cuts[0] < cuts[1] && cuts[1] < cuts[2])) {
    throw ValidationError("degenerate fan: bowel voxels do not spread over enough distinct angles");
  }

  FanPartition p;
  p.config = cfg;
  p.cut_angles = cuts;
  std::array<long long, 4> count{};
  for (const double a : angles) ++count[static_cast<std::size_t>(fan_sector(a, cuts))];
  for (std::size_t k = 0; k < 4; ++k) p.achieved_fractions[k] = static_cast<double>(count[k]) / static_cast<double>(total);
  return p;
}

int fan_sector(double angle, const std::array<double, 3>& cuts) {
  int sector = 0;
  for (const double c : cuts) sector += angle + kFanAngleTolerance >= c ? 1 : 0;
  return sector;
}

LabelVolume apply_fan(const Mask& small_bowel, const FanPartition& partition) {
  partition.config.validate();
  const Grid& g = small_bowel.grid();
  LabelVolume out(g);
  for (std::size_t i = 0; i < small_bowel.size(); ++i) {
    if (!small_bowel[i]) continue;
    const int sector = fan_sector(voxel_fan_angle(g.index(i), g, partition.config), partition.cut_angles);
    out[i] = RegionId(partition.config.region_order[static_cast<std::size_t>(sector)]).stored_label();
  }
  return out;
}

}  // namespace rpci
