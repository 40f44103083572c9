#pragma once

#include <cstdint>

#include "rpci/priors.hpp"
#include "rpci/volume.hpp"

namespace rpci {

struct PhantomSpec {
  Index3 dims = Index3::Constant(64);
  Spacing spacing;
  std::uint64_t seed = 0;
  /// Share of the torso volume given to the small-bowel fan (regions 9-12).
  double bowel_fraction = 0.2;

  void validate() const;
};

struct Phantom {
  ScalarVolume ct;
  LabelVolume labels;
  FanConfig fan;           // ground-truth fan geometry
  FanPartition partition;  // cuts that produced regions 9-12
};

/// Synthetic abdomen centred in the grid (identity direction, origin chosen
/// so the grid center sits at world 0).
///
/// An ellipsoidal torso is split into a 3 x 3 coronal grid: superior row
/// right upper (1) / epigastrium (2) / left upper (3), middle row right flank
/// (8) / central (0) / left flank (4), inferior row right lower (7) / pelvis
/// (6) / left lower (5), with patient-right towards +x. A concentric
/// ellipsoid holding bowel_fraction of the torso replaces the middle of that
/// grid and is cut into regions 9-12 by balance_fan about its center. CT
/// values are -1000 HU outside the torso and a smooth soft-tissue field plus
/// seeded Gaussian noise inside.
Phantom generate_phantom(const PhantomSpec& spec);

/// Moves region boundaries by a smooth random displacement field no longer
/// than magnitude_mm anywhere: vectors drawn uniformly in the ball of that
/// radius on a 16 mm control lattice, trilinearly interpolated, and each
/// voxel takes the label found at its displaced position (nearest voxel,
/// clamped to the grid). Magnitude 0 returns the input unchanged.
LabelVolume perturb_labels(const LabelVolume& labels, double magnitude_mm, std::uint64_t seed);

}  // namespace rpci
