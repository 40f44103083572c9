#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rpci/error.hpp"
#include "rpci/geometry.hpp"

namespace rpci {

/// Dense 3D voxel array on a Grid, stored x-fastest. Templated on the voxel
/// scalar; the label, mask and intensity volumes below are instantiations.
template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() = default;
  explicit Volume(Grid grid, T fill = T{}) : grid_(std::move(grid)) {
    grid_.validate();
    data_.assign(grid_.voxel_count(), fill);
  }
  Volume(Grid grid, std::vector<T> data) : grid_(std::move(grid)), data_(std::move(data)) {
    grid_.validate();
    if (data_.size() != grid_.voxel_count()) {
      throw ValidationError("volume data length does not match dims");
    }
  }

  const Grid& grid() const { return grid_; }
  const Index3& dims() const { return grid_.dims; }
  const Spacing& spacing() const { return grid_.spacing; }
  const WorldTransform& transform() const { return grid_.transform; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int x, int y, int z) { return data_[grid_.offset(x, y, z)]; }
  const T& operator()(int x, int y, int z) const { return data_[grid_.offset(x, y, z)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool operator==(const Volume& other) const {
    return grid_.dims == other.grid_.dims && grid_.spacing == other.grid_.spacing &&
           grid_.transform.origin == other.grid_.transform.origin &&
           grid_.transform.direction == other.grid_.transform.direction && data_ == other.data_;
  }

 private:
  Grid grid_;
  std::vector<T> data_;
};

/// CT intensities (Hounsfield units).
using ScalarVolume = Volume<float>;

/// Stored label L > 0 encodes region L - 1; 0 is background.
using Label = std::uint8_t;
using LabelVolume = Volume<Label>;

/// Binary mask, 0 or 1 per voxel.
using Mask = Volume<std::uint8_t>;

inline constexpr int kRegionCount = 13;
inline constexpr Label kMaxStoredLabel = kRegionCount;

/// One of the thirteen abdominal regions, 0..12.
class RegionId {
 public:
  explicit RegionId(int index);
  int index() const { return index_; }
  Label stored_label() const { return static_cast<Label>(index_ + 1); }
  static RegionId from_stored(Label stored);
  bool operator==(const RegionId&) const = default;

 private:
  int index_;
};

std::string_view region_name(RegionId r);

/// Inclusive voxel index box.
struct BoundingBox {
  Index3 lo;
  Index3 hi;

  Index3 extent() const { return hi - lo + Index3::Ones(); }
  bool contains(const Index3& idx) const {
    return (idx.array() >= lo.array()).all() && (idx.array() <= hi.array()).all();
  }
  BoundingBox united(const BoundingBox& other) const {
    return {lo.cwiseMin(other.lo), hi.cwiseMax(other.hi)};
  }
  bool operator==(const BoundingBox& other) const { return lo == other.lo && hi == other.hi; }
};

/// Throws ValidationError("label out of range") if any voxel exceeds 13.
void validate_labels(const LabelVolume& labels);

Mask extract_region_mask(const LabelVolume& labels, RegionId r);

/// Tightest box around every label > 0. Throws ValidationError on an
/// all-background volume.
BoundingBox label_bounding_box(const LabelVolume& labels);

/// Tightest box around nonzero voxels, or nullopt when there are none.
template <typename T>
std::optional<BoundingBox> nonzero_bounding_box(const Volume<T>& v) {
  const Index3& d = v.dims();
  Index3 lo = d;
  Index3 hi = Index3::Constant(-1);
  std::size_t i = 0;
  for (int z = 0; z < d.z(); ++z) {
    for (int y = 0; y < d.y(); ++y) {
      for (int x = 0; x < d.x(); ++x, ++i) {
        if (v[i] != T{}) {
          lo = lo.cwiseMin(Index3(x, y, z));
          hi = hi.cwiseMax(Index3(x, y, z));
        }
      }
    }
  }
  if (hi.x() < 0) return std::nullopt;
  return BoundingBox{lo, hi};
}

/// Per stored label 1..13, the tightest box of its voxels (index 0 unused).
std::array<std::optional<BoundingBox>, kRegionCount + 1> label_bounding_boxes(const LabelVolume& labels);

/// Voxel count per stored label 0..13.
std::array<std::size_t, kRegionCount + 1> label_histogram(const LabelVolume& labels);

/// Grid of the sub-box, with the origin moved so retained voxels keep their
/// world coordinates.
Grid sub_grid(const Grid& grid, const BoundingBox& box);

template <typename T>
Volume<T> crop(const Volume<T>& v, const BoundingBox& box) {
  const Grid& g = v.grid();
  if (!g.contains(box.lo) || !g.contains(box.hi) || (box.lo.array() > box.hi.array()).any()) {
    throw ValidationError("crop box outside the grid");
  }
  Volume<T> out(sub_grid(g, box));
  std::size_t o = 0;
  for (int z = box.lo.z(); z <= box.hi.z(); ++z) {
    for (int y = box.lo.y(); y <= box.hi.y(); ++y) {
      const std::size_t row = g.offset(box.lo.x(), y, z);
      for (int x = 0; x < out.dims().x(); ++x) out[o++] = v[row + static_cast<std::size_t>(x)];
    }
  }
  return out;
}

}  // namespace rpci
