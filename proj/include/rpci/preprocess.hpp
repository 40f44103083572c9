#pragma once

#include <utility>

#include "rpci/volume.hpp"

namespace rpci {

struct CropSpec {
  double margin_mm = 15.0;
  void validate() const;
};

struct DilationSpec {
  double radius_mm = 2.0;
  void validate() const;
};

/// Label bounding box grown by ceil(margin_mm / spacing) voxels per axis and
/// clamped to the grid.
BoundingBox crop_box(const LabelVolume& labels, const CropSpec& spec);

/// Crops the CT and its labels to the same box; world coordinates of retained
/// voxels are unchanged. Throws on grid mismatch or an all-background label
/// volume.
std::pair<ScalarVolume, LabelVolume> crop_with_margin(const ScalarVolume& ct, const LabelVolume& labels,
                                                      const CropSpec& spec = {});

/// Grows every label into background voxels whose voxel-center distance (mm)
/// to the nearest labelled voxel is at most radius_mm. A grown voxel takes
/// the label of its nearest labelled voxel; exact distance ties go to the
/// smaller label. Existing labels are never changed.
LabelVolume dilate_labels(const LabelVolume& labels, const DilationSpec& spec = {});

}  // namespace rpci
