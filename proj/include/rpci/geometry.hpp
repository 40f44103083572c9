#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace rpci {

using Index3 = Eigen::Vector3i;
using Point3 = Eigen::Vector3d;

/// Voxel edge lengths in mm along x, y, z.
class Spacing {
 public:
  Spacing() : mm_(1.0, 1.0, 1.0) {}
  Spacing(double dx, double dy, double dz);
  explicit Spacing(const Eigen::Vector3d& mm) : Spacing(mm.x(), mm.y(), mm.z()) {}

  double operator[](int axis) const { return mm_[axis]; }
  double dx() const { return mm_.x(); }
  double dy() const { return mm_.y(); }
  double dz() const { return mm_.z(); }
  const Eigen::Vector3d& mm() const { return mm_; }
  double voxel_volume() const { return mm_.prod(); }
  double diagonal() const { return mm_.norm(); }

  bool operator==(const Spacing& other) const { return mm_ == other.mm_; }

 private:
  Eigen::Vector3d mm_;
};

/// Rigid placement of the voxel grid in world (scanner, mm) coordinates.
/// The direction columns are the world directions of the x, y, z voxel axes.
struct WorldTransform {
  Point3 origin = Point3::Zero();
  Eigen::Matrix3d direction = Eigen::Matrix3d::Identity();

  /// Throws ValidationError unless |det(direction)| is 1 within 1e-6 and the
  /// columns are orthonormal.
  void validate() const;
};

/// Shape and placement shared by every volume type.
struct Grid {
  Index3 dims = Index3::Ones();
  Spacing spacing;
  WorldTransform transform;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims.x()) * static_cast<std::size_t>(dims.y()) *
           static_cast<std::size_t>(dims.z());
  }
  /// x-fastest linear offset.
  std::size_t offset(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims.x()) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims.y()) * static_cast<std::size_t>(z));
  }
  std::size_t offset(const Index3& idx) const { return offset(idx.x(), idx.y(), idx.z()); }
  Index3 index(std::size_t offset) const;
  bool contains(const Index3& idx) const {
    return (idx.array() >= 0).all() && (idx.array() < dims.array()).all();
  }

  void validate() const;
};

/// Same dims and spacing, and transforms equal within `tol`.
bool same_geometry(const Grid& a, const Grid& b, double tol = 1e-6);

/// world = origin + direction * (idx .* spacing). Throws ValidationError for
/// indices outside the grid.
Point3 voxel_to_world(const Grid& grid, const Index3& idx);

/// Continuous voxel coordinates of a world point (inverse of voxel_to_world).
Eigen::Vector3d world_to_voxel(const Grid& grid, const Point3& world);

}  // namespace rpci
