#include "rpci/preprocess.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rpci/distance.hpp"
#include "rpci/error.hpp"

namespace rpci {

void CropSpec::validate() const {
  if (!std::isfinite(margin_mm) || margin_mm < 0.0) throw ValidationError("margin_mm must be finite and >= 0");
}

void DilationSpec::validate() const {
  if (!std::isfinite(radius_mm) || radius_mm < 0.0) throw ValidationError("radius_mm must be finite and >= 0");
}

BoundingBox crop_box(const LabelVolume& labels, const CropSpec& spec) {
  spec.validate();
  BoundingBox box = label_bounding_box(labels);
  for (int a = 0; a < 3; ++a) {
    const auto grow = static_cast<int>(std::ceil(spec.margin_mm / labels.spacing()[a]));
    box.lo[a] = std::max(0, box.lo[a] - grow);
    box.hi[a] = std::min(labels.dims()[a] - 1, box.hi[a] + grow);
  }
  return box;
}

std::pair<ScalarVolume, LabelVolume> crop_with_margin(const ScalarVolume& ct, const LabelVolume& labels,
                                                      const CropSpec& spec) {
  if (ct.dims() != labels.dims()) throw ValidationError("dims mismatch between CT and labels");
  if (!same_geometry(ct.grid(), labels.grid())) throw ValidationError("CT and labels have different geometry");
  const BoundingBox box = crop_box(labels, spec);
  return {crop(ct, box), crop(labels, box)};
}

LabelVolume dilate_labels(const LabelVolume& labels, const DilationSpec& spec) {
  spec.validate();
  validate_labels(labels);
  LabelVolume out = labels;
  if (spec.radius_mm == 0.0) return out;

  const Grid& g = labels.grid();
  const auto boxes = label_bounding_boxes(labels);
  std::vector<double> best(labels.size(), kInfiniteDistance);

  for (int l = 1; l <= kRegionCount; ++l) {
    if (!boxes[l]) continue;
    BoundingBox box = *boxes[l];
    for (int a = 0; a < 3; ++a) {
      const auto reach = static_cast<int>(std::floor(spec.radius_mm / g.spacing[a])) + 1;
      box.lo[a] = std::max(0, box.lo[a] - reach);
      box.hi[a] = std::min(g.dims[a] - 1, box.hi[a] + reach);
    }
    const Index3 ext = box.extent();
    std::vector<std::uint8_t> sites(static_cast<std::size_t>(ext.x()) * ext.y() * ext.z());
    std::size_t o = 0;
    for (int z = box.lo.z(); z <= box.hi.z(); ++z) {
      for (int y = box.lo.y(); y <= box.hi.y(); ++y) {
        for (int x = box.lo.x(); x <= box.hi.x(); ++x) sites[o++] = labels(x, y, z) == l;
      }
    }
    const auto d2 = squared_distance_transform(sites, ext, g.spacing);
    o = 0;
    for (int z = box.lo.z(); z <= box.hi.z(); ++z) {
      for (int y = box.lo.y(); y <= box.hi.y(); ++y) {
        for (int x = box.lo.x(); x <= box.hi.x(); ++x, ++o) {
          const std::size_t i = g.offset(x, y, z);
          if (labels[i] != 0) continue;
          const double d = std::sqrt(d2[o]);
          // Labels are visited in ascending order, so strict < keeps the
          // smaller label on ties.
          if (d <= spec.radius_mm && d < best[i]) {
            best[i] = d;
            out[i] = static_cast<Label>(l);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace rpci
