#include "rpci/phantom.hpp"

#include <cmath>
#include <vector>

#include "rpci/error.hpp"
#include "rpci/random.hpp"

namespace rpci {

namespace {

constexpr double kControlSpacingMm = 16.0;

// Stored labels of the 3 x 3 coronal grid: [superior..inferior][right..left].
constexpr std::array<std::array<int, 3>, 3> kCoronalGrid = {{
    {1, 2, 3},
    {8, 0, 4},
    {7, 6, 5},
}};

Grid centred_grid(const PhantomSpec& spec) {
  Grid g;
  g.dims = spec.dims;
  g.spacing = spec.spacing;
  g.transform.origin = -((spec.dims.cast<double>() - Eigen::Vector3d::Ones()) * 0.5).cwiseProduct(spec.spacing.mm());
  return g;
}

}  // namespace

void PhantomSpec::validate() const {
  if ((dims.array() < 32).any()) throw ValidationError("phantom dims must be >= 32 per axis to host 13 regions");
  if (!(bowel_fraction > 0.0 && bowel_fraction < 1.0)) throw ValidationError("bowel_fraction must be in (0, 1)");
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Grid g = centred_grid(spec);
  const Eigen::Vector3d half = (spec.dims.cast<double>() - Eigen::Vector3d::Ones()) * 0.5;
  const Eigen::Vector3d torso = Eigen::Vector3d(0.9, 0.8, 0.9).cwiseProduct(half).cwiseProduct(spec.spacing.mm());
  const Eigen::Vector3d bowel = torso * std::cbrt(spec.bowel_fraction);

  Phantom ph;
  ph.labels = LabelVolume(g);
  Mask bowel_mask(g);
  std::vector<std::uint8_t> inside(g.voxel_count(), 0);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    const Eigen::Vector3d p = voxel_to_world(g, g.index(i));
    if (p.cwiseQuotient(torso).squaredNorm() > 1.0) continue;
    inside[i] = 1;
    if (p.cwiseQuotient(bowel).squaredNorm() <= 1.0) {
      bowel_mask[i] = 1;
      continue;
    }
    // RAS world: +x is patient right, +z superior.
    const int col = p.x() > torso.x() / 3.0 ? 0 : (p.x() < -torso.x() / 3.0 ? 2 : 1);
    const int row = p.z() > torso.z() / 3.0 ? 0 : (p.z() < -torso.z() / 3.0 ? 2 : 1);
    ph.labels[i] = RegionId(kCoronalGrid[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]).stored_label();
  }

  // Root off the lattice so that distinct coronal columns get distinct angles.
  ph.fan.root_world = Eigen::Vector3d(0.37 * spec.spacing.dx(), 0.0, 0.21 * spec.spacing.dz());
  ph.partition = balance_fan(bowel_mask, ph.fan);
  const LabelVolume fan_labels = apply_fan(bowel_mask, ph.partition);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    if (bowel_mask[i]) ph.labels[i] = fan_labels[i];
  }

  Rng rng(spec.seed);
  ph.ct = ScalarVolume(g);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    const double noise = rng.normal();
    if (!inside[i]) {
      ph.ct[i] = static_cast<float>(-1000.0 + 5.0 * noise);
      continue;
    }
    const Eigen::Vector3d p = voxel_to_world(g, g.index(i));
    const double field = 40.0 + 15.0 * std::sin(p.x() / 25.0) * std::cos(p.z() / 30.0) + (bowel_mask[i] ? 10.0 : 0.0);
    ph.ct[i] = static_cast<float>(field + 8.0 * noise);
  }
  return ph;
}

LabelVolume perturb_labels(const LabelVolume& labels, double magnitude_mm, std::uint64_t seed) {
  if (!std::isfinite(magnitude_mm) || magnitude_mm < 0.0) throw ValidationError("perturbation magnitude must be >= 0");
  validate_labels(labels);
  if (magnitude_mm == 0.0) return labels;

  const Grid& g = labels.grid();
  const Eigen::Vector3d extent = (g.dims.cast<double>() - Eigen::Vector3d::Ones()).cwiseProduct(g.spacing.mm());
  Index3 n;
  for (int a = 0; a < 3; ++a) n[a] = static_cast<int>(std::ceil(extent[a] / kControlSpacingMm)) + 2;

  Rng rng(seed);
  std::vector<Eigen::Vector3d> control(static_cast<std::size_t>(n.prod()));
  for (auto& v : control) {
    Eigen::Vector3d u;
    do {
      u = Eigen::Vector3d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    } while (u.squaredNorm() > 1.0);
    v = magnitude_mm * u;
  }
  auto at = [&](int x, int y, int z) -> const Eigen::Vector3d& {
    return control[static_cast<std::size_t>(x + n.x() * (y + n.y() * z))];
  };

  LabelVolume out(g);
  std::size_t i = 0;
  for (int z = 0; z < g.dims.z(); ++z) {
    for (int y = 0; y < g.dims.y(); ++y) {
      for (int x = 0; x < g.dims.x(); ++x, ++i) {
        const Index3 idx(x, y, z);
        const Eigen::Vector3d t = idx.cast<double>().cwiseProduct(g.spacing.mm()) / kControlSpacingMm;
        const Index3 c0 = t.array().floor().cast<int>();
        const Eigen::Vector3d f = t - c0.cast<double>();
        Eigen::Vector3d d = Eigen::Vector3d::Zero();
        for (int corner = 0; corner < 8; ++corner) {
          const int ox = corner & 1;
          const int oy = (corner >> 1) & 1;
          const int oz = (corner >> 2) & 1;
          const double w = (ox ? f.x() : 1.0 - f.x()) * (oy ? f.y() : 1.0 - f.y()) * (oz ? f.z() : 1.0 - f.z());
          d += w * at(c0.x() + ox, c0.y() + oy, c0.z() + oz);
        }
        Index3 src;
        for (int a = 0; a < 3; ++a) {
          const double q = idx[a] + d[a] / g.spacing[a];
          src[a] = std::clamp(static_cast<int>(std::lround(q)), 0, g.dims[a] - 1);
        }
        out[i] = labels(src.x(), src.y(), src.z());
      }
    }
  }
  return out;
}

}  // namespace rpci
