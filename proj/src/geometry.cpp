#include "rpci/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "rpci/error.hpp"

namespace rpci {

Spacing::Spacing(double dx, double dy, double dz) : mm_(dx, dy, dz) {
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(mm_[a]) || mm_[a] <= 0.0) {
      throw ValidationError("spacing must be finite and positive");
    }
  }
}

void WorldTransform::validate() const {
  if (!origin.allFinite() || !direction.allFinite()) {
    throw ValidationError("world transform has non-finite entries");
  }
  if (std::abs(std::abs(direction.determinant()) - 1.0) > 1e-6) {
    throw ValidationError("direction matrix determinant is not +-1");
  }
  const Eigen::Matrix3d gram = direction.transpose() * direction;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
    throw ValidationError("direction columns are not orthonormal");
  }
}

Index3 Grid::index(std::size_t offset) const {
  const auto nx = static_cast<std::size_t>(dims.x());
  const auto ny = static_cast<std::size_t>(dims.y());
  const auto x = static_cast<int>(offset % nx);
  offset /= nx;
  return {x, static_cast<int>(offset % ny), static_cast<int>(offset / ny)};
}

void Grid::validate() const {
  if ((dims.array() <= 0).any()) {
    throw ValidationError("dims must be positive");
  }
  transform.validate();
}

bool same_geometry(const Grid& a, const Grid& b, double tol) {
  return a.dims == b.dims && (a.spacing.mm() - b.spacing.mm()).cwiseAbs().maxCoeff() <= tol &&
         (a.transform.origin - b.transform.origin).cwiseAbs().maxCoeff() <= tol &&
         (a.transform.direction - b.transform.direction).cwiseAbs().maxCoeff() <= tol;
}

Point3 voxel_to_world(const Grid& grid, const Index3& idx) {
  if (!grid.contains(idx)) {
    throw ValidationError("voxel index outside the grid");
  }
  const Eigen::Vector3d scaled = idx.cast<double>().cwiseProduct(grid.spacing.mm());
  return grid.transform.origin + grid.transform.direction * scaled;
}

Eigen::Vector3d world_to_voxel(const Grid& grid, const Point3& world) {
  const Eigen::Vector3d local = grid.transform.direction.inverse() * (world - grid.transform.origin);
  return local.cwiseQuotient(grid.spacing.mm());
}

}  // namespace rpci
