#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rpci/volume.hpp"

namespace rpci {

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Squared world distance between two voxel centers whose index offset is
/// `delta`, accumulated as ((x^2 + y^2) + z^2). Every distance in the library
/// is evaluated in exactly this order so that fast and brute-force paths
/// agree bit-for-bit.
inline double squared_distance_mm(const Index3& delta, const Spacing& spacing) {
  const double tx = static_cast<double>(delta.x()) * spacing.dx();
  const double ty = static_cast<double>(delta.y()) * spacing.dy();
  const double tz = static_cast<double>(delta.z()) * spacing.dz();
  return (tx * tx + ty * ty) + tz * tz;
}

/// Exact squared Euclidean distance transform with anisotropic spacing.
///
/// For every voxel returns the squared mm distance to the nearest voxel with
/// sites[i] != 0, or +inf when there is no site. Runs one lower-envelope
/// pass per axis (x, then y, then z), so the cost is linear in the voxel
/// count.
std::vector<double> squared_distance_transform(std::span<const std::uint8_t> sites, const Index3& dims,
                                               const Spacing& spacing);

/// Per-voxel mm distance to the nearest foreground voxel center of `mask`.
/// Throws ValidationError on an empty mask.
Volume<double> distance_field(const Mask& mask);

}  // namespace rpci
