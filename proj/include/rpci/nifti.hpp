#pragma once

#include <filesystem>

#include "rpci/volume.hpp"

namespace rpci {

// Single-file NIfTI-1 (.nii, optionally gzip-compressed as .nii.gz).
//
// Reading accepts uint8, int16, uint16 and float32 voxel data in either byte
// order. The transform comes from the sform when sform_code > 0, else the
// qform quaternion when qform_code > 0, else from pixdim alone. Writing
// always emits little-endian data, both sform and qform (code 1), and
// compresses when the path ends in ".gz".

/// Intensities are returned as float; scl_slope/scl_inter are applied when
/// the slope is nonzero.
ScalarVolume read_scalar_volume(const std::filesystem::path& path);

/// Integer datatypes only; every voxel must be in 0..13.
LabelVolume read_label_volume(const std::filesystem::path& path);

/// Writes float32 data. The file appears atomically (temp file + rename).
void write_volume(const ScalarVolume& volume, const std::filesystem::path& path);

/// Writes uint8 data. The file appears atomically (temp file + rename).
void write_volume(const LabelVolume& volume, const std::filesystem::path& path);

}  // namespace rpci
