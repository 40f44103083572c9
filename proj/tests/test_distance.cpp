#include <gtest/gtest.h>

#include "rpci/distance.hpp"
#include "rpci/error.hpp"
#include "test_support.hpp"

namespace rpci {
namespace {

using testing::cube_grid;
using testing::make_grid;

// Brute-force nearest-site field: the definition of the transform.
std::vector<double> brute_force_field(const Mask& m) {
  std::vector<Index3> sites;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) sites.push_back(m.grid().index(i));
  std::vector<double> out(m.size(), kInfiniteDistance);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Index3 p = m.grid().index(i);
    for (const auto& s : sites) out[i] = std::min(out[i], testing::oracle_squared_distance(p, s, m.spacing()));
    out[i] = std::sqrt(out[i]);
  }
  return out;
}

TEST(DistanceField, ForegroundIsZero) {
  Mask m(cube_grid(8));
  m(3, 3, 3) = 1;
  m(5, 1, 2) = 1;
  const auto d = distance_field(m);
  EXPECT_EQ(d(3, 3, 3), 0.0);
  EXPECT_EQ(d(5, 1, 2), 0.0);
}

TEST(DistanceField, PythagoreanTriple) {
  Mask m(cube_grid(8));
  m(0, 0, 0) = 1;
  const auto d = distance_field(m);
  EXPECT_EQ(d(3, 4, 0), 5.0);
  EXPECT_EQ(d(0, 3, 4), 5.0);
}

TEST(DistanceField, AnisotropicSpacing) {
  Mask m(make_grid(4, 4, 4, Spacing(1.0, 1.0, 5.0)));
  m(0, 0, 0) = 1;
  const auto d = distance_field(m);
  EXPECT_EQ(d(0, 0, 1), 5.0);
  EXPECT_EQ(d(3, 0, 0), 3.0);
  EXPECT_DOUBLE_EQ(d(3, 0, 1), std::sqrt(34.0));
}

TEST(DistanceField, EmptyMaskThrows) {
  Mask m(cube_grid(4));
  EXPECT_THROW(distance_field(m), ValidationError);
}

TEST(DistanceField, NoSitesGivesInfinity) {
  const std::vector<std::uint8_t> sites(27, 0);
  const auto d = squared_distance_transform(sites, Index3(3, 3, 3), Spacing());
  for (const double v : d) EXPECT_EQ(v, kInfiniteDistance);
}

TEST(DistanceField, MatchesBruteForceOnRandomMasks) {
  Rng rng(20240611);
  for (int trial = 0; trial < 40; ++trial) {
    const Spacing s = testing::random_spacing(rng);
    const int nx = 4 + static_cast<int>(rng.index(13));
    const int ny = 4 + static_cast<int>(rng.index(13));
    const int nz = 4 + static_cast<int>(rng.index(13));
    const Mask m = testing::random_mask(make_grid(nx, ny, nz, s), rng);
    const auto fast = distance_field(m);
    const auto ref = brute_force_field(m);
    for (std::size_t i = 0; i < m.size(); ++i) ASSERT_EQ(fast[i], ref[i]) << "trial " << trial << " voxel " << i;
  }
}

TEST(DistanceField, MatchesBruteForceOnSparseSites) {
  // Few sites make long, nearly tied parabola envelopes.
  Rng rng(99);
  for (int trial = 0; trial < 150; ++trial) {
    const Spacing s = testing::random_spacing(rng);
    Mask m(make_grid(16, 16, 16, s));
    const int sites = 1 + static_cast<int>(rng.index(6));
    for (int k = 0; k < sites; ++k) m[rng.index(m.size())] = 1;
    const auto fast = distance_field(m);
    const auto ref = brute_force_field(m);
    for (std::size_t i = 0; i < m.size(); ++i) ASSERT_EQ(fast[i], ref[i]) << "trial " << trial << " voxel " << i;
  }
}

TEST(DistanceField, SingleSliceAndLineGrids) {
  Mask line(make_grid(9, 1, 1, Spacing(0.7, 1.0, 1.0)));
  line(2, 0, 0) = 1;
  const auto d = distance_field(line);
  EXPECT_EQ(d(8, 0, 0), 6 * 0.7);
  Mask slice(make_grid(5, 5, 1));
  slice(0, 0, 0) = 1;
  EXPECT_EQ(distance_field(slice)(3, 4, 0), 5.0);
}

}  // namespace
}  // namespace rpci
