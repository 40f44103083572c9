#include "rpci/distance.hpp"

#include <algorithm>
#include <cmath>

#include "rpci/error.hpp"

namespace rpci {

namespace {

// Lower envelope of parabolas f[q] + ((x - q) * step)^2 over one line.
// Scratch buffers are sized by the caller to at least n (+1 for bounds).
class EnvelopePass {
 public:
  explicit EnvelopePass(int max_len) : vertex_(max_len), bound_(max_len + 1) {}

  // Returns false when the line holds no finite value (output left untouched).
  bool run(const double* f, double* out, int n, double step) {
    const double w = step * step;
    int k = -1;
    for (int q = 0; q < n; ++q) {
      if (f[q] == kInfiniteDistance) continue;
      const double fq = f[q] + w * static_cast<double>(q) * q;
      double s = 0.0;
      while (k >= 0) {
        const int p = vertex_[k];
        const double fp = f[p] + w * static_cast<double>(p) * p;
        s = (fq - fp) / (2.0 * w * static_cast<double>(q - p));
        if (s > bound_[k]) break;
        --k;
      }
      ++k;
      vertex_[k] = q;
      bound_[k] = k == 0 ? -kInfiniteDistance : s;
      bound_[k + 1] = kInfiniteDistance;
    }
    if (k < 0) return false;

    const int last = k;
    k = 0;
    for (int x = 0; x < n; ++x) {
      while (k < last && bound_[k + 1] < x) ++k;
      double best = value(f, vertex_[k], x, step);
      // The intersection abscissae are rounded; re-check the neighbours so the
      // minimum over computed values is exact.
      if (k > 0) best = std::min(best, value(f, vertex_[k - 1], x, step));
      if (k < last) best = std::min(best, value(f, vertex_[k + 1], x, step));
      out[x] = best;
    }
    return true;
  }

 private:
  static double value(const double* f, int q, int x, double step) {
    const double t = static_cast<double>(x - q) * step;
    return f[q] + t * t;
  }

  std::vector<int> vertex_;
  std::vector<double> bound_;
};

}  // namespace

std::vector<double> squared_distance_transform(std::span<const std::uint8_t> sites, const Index3& dims,
                                               const Spacing& spacing) {
  const std::size_t nx = static_cast<std::size_t>(dims.x());
  const std::size_t ny = static_cast<std::size_t>(dims.y());
  const std::size_t nz = static_cast<std::size_t>(dims.z());
  if (sites.size() != nx * ny * nz) throw ValidationError("site buffer does not match dims");

  std::vector<double> d(sites.size(), kInfiniteDistance);
  const int max_len = static_cast<int>(std::max({nx, ny, nz}));
  EnvelopePass pass(max_len);
  std::vector<double> line_in(static_cast<std::size_t>(max_len));
  std::vector<double> line_out(static_cast<std::size_t>(max_len));

  // x: nearest site along the row, by two sweeps.
  const double sx = spacing.dx();
  std::vector<long> nearest(nx);
  for (std::size_t row = 0; row < ny * nz; ++row) {
    const std::uint8_t* s = sites.data() + row * nx;
    double* out = d.data() + row * nx;
    long last = -1;
    for (std::size_t x = 0; x < nx; ++x) {
      if (s[x]) last = static_cast<long>(x);
      nearest[x] = last;
    }
    last = -1;
    for (std::size_t xi = nx; xi-- > 0;) {
      if (s[xi]) last = static_cast<long>(xi);
      long best = nearest[xi];
      if (last >= 0 && (best < 0 || last - static_cast<long>(xi) < static_cast<long>(xi) - best)) best = last;
      if (best >= 0) {
        const double t = static_cast<double>(static_cast<long>(xi) - best) * sx;
        out[xi] = 0.0 + t * t;
      }
    }
  }

  // y: lines of stride nx.
  if (ny > 1) {
    for (std::size_t z = 0; z < nz; ++z) {
      for (std::size_t x = 0; x < nx; ++x) {
        double* base = d.data() + z * nx * ny + x;
        for (std::size_t y = 0; y < ny; ++y) line_in[y] = base[y * nx];
        if (pass.run(line_in.data(), line_out.data(), static_cast<int>(ny), spacing.dy())) {
          for (std::size_t y = 0; y < ny; ++y) base[y * nx] = line_out[y];
        }
      }
    }
  }

  // z: lines of stride nx * ny.
  if (nz > 1) {
    const std::size_t plane = nx * ny;
    for (std::size_t i = 0; i < plane; ++i) {
      double* base = d.data() + i;
      for (std::size_t z = 0; z < nz; ++z) line_in[z] = base[z * plane];
      if (pass.run(line_in.data(), line_out.data(), static_cast<int>(nz), spacing.dz())) {
        for (std::size_t z = 0; z < nz; ++z) base[z * plane] = line_out[z];
      }
    }
  }
  return d;
}

Volume<double> distance_field(const Mask& mask) {
  if (std::none_of(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; })) {
    throw ValidationError("empty mask: distance field needs at least one foreground voxel");
  }
  auto d = squared_distance_transform(mask.data(), mask.dims(), mask.spacing());
  for (double& v : d) v = std::sqrt(v);
  return Volume<double>(mask.grid(), std::move(d));
}

}  // namespace rpci
