#include "rpci/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpci/distance.hpp"
#include "rpci/error.hpp"
#include "rpci/parallel.hpp"

namespace rpci {

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
  if (a.dims != b.dims) throw ValidationError("dims mismatch between volumes");
  if (!same_geometry(a, b)) throw ValidationError("spacing/transform mismatch between volumes");
}

// Two binary masks cut out of a larger grid; every foreground voxel of either
// lies inside the box, so boundaries and distances are unchanged by the cut.
struct MaskPair {
  Index3 dims;
  Spacing spacing;
  std::vector<std::uint8_t> a;
  std::vector<std::uint8_t> b;
};

template <typename Pred>
std::vector<std::uint8_t> cut(std::span<const std::uint8_t> src, const Grid& g, const BoundingBox& box, Pred pred) {
  const Index3 ext = box.extent();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(ext.x()) * ext.y() * ext.z());
  std::size_t o = 0;
  for (int z = box.lo.z(); z <= box.hi.z(); ++z) {
    for (int y = box.lo.y(); y <= box.hi.y(); ++y) {
      const std::uint8_t* row = src.data() + g.offset(box.lo.x(), y, z);
      for (int x = 0; x < ext.x(); ++x) out[o++] = pred(row[x]) ? 1 : 0;
    }
  }
  return out;
}

std::vector<std::uint8_t> boundary_flags(const std::vector<std::uint8_t>& m, const Index3& dims,
                                         std::vector<std::size_t>* offsets) {
  const int nx = dims.x();
  const int ny = dims.y();
  const int nz = dims.z();
  const std::size_t sy = static_cast<std::size_t>(nx);
  const std::size_t sz = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  std::vector<std::uint8_t> out(m.size(), 0);
  std::size_t i = 0;
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x, ++i) {
        if (!m[i]) continue;
        const bool edge = x == 0 || x == nx - 1 || y == 0 || y == ny - 1 || z == 0 || z == nz - 1;
        if (edge || !m[i - 1] || !m[i + 1] || !m[i - sy] || !m[i + sy] || !m[i - sz] || !m[i + sz]) {
          out[i] = 1;
          if (offsets) offsets->push_back(i);
        }
      }
    }
  }
  return out;
}

void sample(const std::vector<double>& squared, const std::vector<std::size_t>& at, std::vector<double>& out) {
  out.reserve(at.size());
  for (const std::size_t i : at) out.push_back(std::sqrt(squared[i]));
}

SurfaceDistanceSet surface_distances_of(const MaskPair& p) {
  std::vector<std::size_t> a_offsets;
  std::vector<std::size_t> b_offsets;
  const auto a_boundary = boundary_flags(p.a, p.dims, &a_offsets);
  const auto b_boundary = boundary_flags(p.b, p.dims, &b_offsets);
  SurfaceDistanceSet s;
  sample(squared_distance_transform(b_boundary, p.dims, p.spacing), a_offsets, s.a_to_b);
  sample(squared_distance_transform(a_boundary, p.dims, p.spacing), b_offsets, s.b_to_a);
  return s;
}

bool any(const Mask& m) {
  return std::any_of(m.data().begin(), m.data().end(), [](std::uint8_t v) { return v != 0; });
}

std::vector<double> sorted_pool(const SurfaceDistanceSet& s) {
  if (s.a_to_b.empty() || s.b_to_a.empty()) throw ValidationError("surface distance set is empty");
  auto pool = s.pooled();
  std::sort(pool.begin(), pool.end());
  return pool;
}

RegionMetrics evaluate_cut(const MaskPair& p, RegionId r) {
  RegionMetrics m;
  m.region = r;
  std::size_t na = 0;
  std::size_t nb = 0;
  std::size_t both = 0;
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    na += p.a[i];
    nb += p.b[i];
    both += p.a[i] & p.b[i];
  }
  m.dice = 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
  const SurfaceDistanceSet s = surface_distances_of(p);
  m.hd95_mm = hd95(s);
  m.asd_mm = asd(s);
  return m;
}

// Shared empty-mask policy: nothing defined when both are empty, Dice 0 and
// undefined distances when exactly one is.
std::optional<RegionMetrics> degenerate(RegionId r, bool a_present, bool b_present) {
  if (a_present && b_present) return std::nullopt;
  RegionMetrics m;
  m.region = r;
  if (a_present || b_present) m.dice = 0.0;
  return m;
}

RegionMetrics evaluate_in_box(const LabelVolume& gt, const LabelVolume& pred, RegionId r,
                              const std::optional<BoundingBox>& gt_box, const std::optional<BoundingBox>& pred_box) {
  if (auto d = degenerate(r, gt_box.has_value(), pred_box.has_value())) return *d;
  const Label want = r.stored_label();
  const auto is_region = [want](std::uint8_t v) { return v == want; };
  const BoundingBox box = gt_box->united(*pred_box);
  return evaluate_cut({box.extent(), gt.spacing(), cut(gt.data(), gt.grid(), box, is_region),
                       cut(pred.data(), pred.grid(), box, is_region)},
                      r);
}

}  // namespace

std::vector<double> SurfaceDistanceSet::pooled() const {
  std::vector<double> out;
  out.reserve(size());
  out.insert(out.end(), a_to_b.begin(), a_to_b.end());
  out.insert(out.end(), b_to_a.begin(), b_to_a.end());
  return out;
}

double dice(const Mask& a, const Mask& b) {
  if (a.dims() != b.dims()) throw ValidationError("dims mismatch between masks");
  std::size_t na = 0;
  std::size_t nb = 0;
  std::size_t both = 0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const bool x = da[i] != 0;
    const bool y = db[i] != 0;
    na += x;
    nb += y;
    both += x && y;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

std::vector<std::size_t> boundary_voxels(const Mask& mask) {
  std::vector<std::uint8_t> m(mask.data().begin(), mask.data().end());
  for (auto& v : m) v = v != 0;
  std::vector<std::size_t> offsets;
  boundary_flags(m, mask.dims(), &offsets);
  return offsets;
}

SurfaceDistanceSet surface_distances(const Mask& a, const Mask& b) {
  require_same_grid(a.grid(), b.grid());
  const auto box_a = nonzero_bounding_box(a);
  const auto box_b = nonzero_bounding_box(b);
  if (!box_a || !box_b) throw ValidationError("empty mask: surface distances are undefined");
  const BoundingBox box = box_a->united(*box_b);
  const auto nonzero = [](std::uint8_t v) { return v != 0; };
  const MaskPair p{box.extent(), a.spacing(), cut(a.data(), a.grid(), box, nonzero),
                   cut(b.data(), b.grid(), box, nonzero)};
  return surface_distances_of(p);
}

SurfaceDistanceSet brute_force_surface_distances(const Mask& a, const Mask& b) {
  require_same_grid(a.grid(), b.grid());
  if (!any(a) || !any(b)) throw ValidationError("empty mask: surface distances are undefined");
  const auto ba = boundary_voxels(a);
  const auto bb = boundary_voxels(b);
  const Grid& g = a.grid();
  auto directed = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
    std::vector<double> out;
    out.reserve(from.size());
    for (const std::size_t i : from) {
      const Index3 p = g.index(i);
      double best = kInfiniteDistance;
      for (const std::size_t j : to) best = std::min(best, squared_distance_mm(g.index(j) - p, g.spacing));
      out.push_back(std::sqrt(best));
    }
    return out;
  };
  return {directed(ba, bb), directed(bb, ba)};
}

double surface_percentile(const SurfaceDistanceSet& s, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile must be within [0, 1]");
  const auto pool = sorted_pool(s);
  const double rank = q * static_cast<double>(pool.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, pool.size() - 1);
  return pool[lo] + (rank - static_cast<double>(lo)) * (pool[hi] - pool[lo]);
}

double hd95(const SurfaceDistanceSet& s) { return surface_percentile(s, 0.95); }

double asd(const SurfaceDistanceSet& s) {
  // Summed in sorted order so the value does not depend on which mask is a.
  const auto pool = sorted_pool(s);
  return std::accumulate(pool.begin(), pool.end(), 0.0) / static_cast<double>(pool.size());
}

double hd100(const SurfaceDistanceSet& s) { return sorted_pool(s).back(); }

RegionMetrics evaluate_region(const LabelVolume& gt, const LabelVolume& pred, RegionId r) {
  require_same_grid(gt.grid(), pred.grid());
  return evaluate_in_box(gt, pred, r, nonzero_bounding_box(extract_region_mask(gt, r)),
                         nonzero_bounding_box(extract_region_mask(pred, r)));
}

RegionMetrics evaluate_masks(const Mask& a, const Mask& b, RegionId r) {
  require_same_grid(a.grid(), b.grid());
  const auto box_a = nonzero_bounding_box(a);
  const auto box_b = nonzero_bounding_box(b);
  if (auto d = degenerate(r, box_a.has_value(), box_b.has_value())) return *d;
  const BoundingBox box = box_a->united(*box_b);
  const auto nonzero = [](std::uint8_t v) { return v != 0; };
  return evaluate_cut({box.extent(), a.spacing(), cut(a.data(), a.grid(), box, nonzero),
                       cut(b.data(), b.grid(), box, nonzero)},
                      r);
}

void summarize_overall(PatientMetrics& m) {
  auto mean_of = [&](auto field) -> std::optional<double> {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : m.regions) {
      if (const auto v = r.*field) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  };
  m.overall.dice = mean_of(&RegionMetrics::dice);
  m.overall.hd95_mm = mean_of(&RegionMetrics::hd95_mm);
  m.overall.asd_mm = mean_of(&RegionMetrics::asd_mm);
}

PatientMetrics evaluate_pair(const LabelVolume& gt, const LabelVolume& pred, std::string patient_id) {
  require_same_grid(gt.grid(), pred.grid());
  const auto gt_boxes = label_bounding_boxes(gt);
  const auto pred_boxes = label_bounding_boxes(pred);
  PatientMetrics out;
  out.patient_id = std::move(patient_id);
  parallel_for(kRegionCount, [&](std::size_t i) {
    const RegionId r(static_cast<int>(i));
    out.regions[i] = evaluate_in_box(gt, pred, r, gt_boxes[r.stored_label()], pred_boxes[r.stored_label()]);
  });
  summarize_overall(out);
  return out;
}

LabelVolume false_negative_mask(const LabelVolume& gt, const LabelVolume& pred) {
  if (gt.dims() != pred.dims()) throw ValidationError("dims mismatch between volumes");
  LabelVolume out(gt.grid());
  const auto g = gt.data();
  const auto p = pred.data();
  auto o = out.data();
  for (std::size_t i = 0; i < g.size(); ++i) o[i] = (g[i] > 0 && p[i] != g[i]) ? g[i] : 0;
  return out;
}

}  // namespace rpci
