#include "rpci/volume.hpp"

#include <string>

namespace rpci {

namespace {

constexpr std::array<std::string_view, kRegionCount> kRegionNames = {
    "central",     "right upper", "epigastrium",   "left upper", "left flank",
    "left lower",  "pelvis",      "right lower",   "right flank", "upper jejunum",
    "lower jejunum", "upper ileum", "lower ileum",
};

}  // namespace

RegionId::RegionId(int index) : index_(index) {
  if (index < 0 || index >= kRegionCount) {
    throw ValidationError("region index must be in [0, 12], got " + std::to_string(index));
  }
}

RegionId RegionId::from_stored(Label stored) {
  if (stored == 0 || stored > kMaxStoredLabel) {
    throw ValidationError("stored label " + std::to_string(stored) + " is not a region");
  }
  return RegionId(stored - 1);
}

std::string_view region_name(RegionId r) { return kRegionNames[static_cast<std::size_t>(r.index())]; }

void validate_labels(const LabelVolume& labels) {
  for (const Label l : labels.data()) {
    if (l > kMaxStoredLabel) {
      throw ValidationError("label out of range: " + std::to_string(l) + " > " + std::to_string(kMaxStoredLabel));
    }
  }
}

Mask extract_region_mask(const LabelVolume& labels, RegionId r) {
  Mask out(labels.grid());
  const Label want = r.stored_label();
  const auto in = labels.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = in[i] == want ? 1 : 0;
  return out;
}

BoundingBox label_bounding_box(const LabelVolume& labels) {
  auto box = nonzero_bounding_box(labels);
  if (!box) throw ValidationError("empty mask: label volume has no foreground");
  return *box;
}

std::array<std::optional<BoundingBox>, kRegionCount + 1> label_bounding_boxes(const LabelVolume& labels) {
  std::array<Index3, kRegionCount + 1> lo;
  std::array<Index3, kRegionCount + 1> hi;
  lo.fill(labels.dims());
  hi.fill(Index3::Constant(-1));
  const Index3& d = labels.dims();
  std::size_t i = 0;
  for (int z = 0; z < d.z(); ++z) {
    for (int y = 0; y < d.y(); ++y) {
      for (int x = 0; x < d.x(); ++x, ++i) {
        const Label l = labels[i];
        if (l == 0) continue;
        if (l > kMaxStoredLabel) throw ValidationError("label out of range");
        const Index3 p(x, y, z);
        lo[l] = lo[l].cwiseMin(p);
        hi[l] = hi[l].cwiseMax(p);
      }
    }
  }
  std::array<std::optional<BoundingBox>, kRegionCount + 1> out;
  for (int l = 1; l <= kRegionCount; ++l) {
    if (hi[l].x() >= 0) out[l] = BoundingBox{lo[l], hi[l]};
  }
  return out;
}

std::array<std::size_t, kRegionCount + 1> label_histogram(const LabelVolume& labels) {
  std::array<std::size_t, kRegionCount + 1> counts{};
  for (const Label l : labels.data()) {
    if (l > kMaxStoredLabel) throw ValidationError("label out of range");
    ++counts[l];
  }
  return counts;
}

Grid sub_grid(const Grid& grid, const BoundingBox& box) {
  Grid out = grid;
  out.dims = box.extent();
  out.transform.origin = voxel_to_world(grid, box.lo);
  return out;
}

}  // namespace rpci
