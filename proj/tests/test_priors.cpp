#include <gtest/gtest.h>

#include <numbers>

#include <Eigen/Geometry>

#include "rpci/error.hpp"
#include "rpci/priors.hpp"
#include "test_support.hpp"

namespace rpci {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(FanAngle, Cases) {
  FanConfig cfg;
  EXPECT_DOUBLE_EQ(fan_angle(Point3(0, 0, 5), cfg), 0.0);
  EXPECT_DOUBLE_EQ(fan_angle(Point3(-5, 0, 0), cfg), kPi / 2);  // patient left
  EXPECT_DOUBLE_EQ(fan_angle(Point3(0, 0, -5), cfg), kPi);
  EXPECT_DOUBLE_EQ(fan_angle(Point3(5, 0, 0), cfg), 3 * kPi / 2);
  EXPECT_DOUBLE_EQ(fan_angle(Point3(0, 7, 0), cfg), 0.0);  // projects onto the root
  EXPECT_DOUBLE_EQ(fan_angle(Point3(-5, 9, 5), cfg), kPi / 4);  // y is ignored
  cfg.sweep = -1;
  EXPECT_DOUBLE_EQ(fan_angle(Point3(-5, 0, 0), cfg), 3 * kPi / 2);
  cfg.sweep = 1;
  cfg.start_angle = kPi / 2;
  EXPECT_DOUBLE_EQ(fan_angle(Point3(-5, 0, 0), cfg), 0.0);
  EXPECT_DOUBLE_EQ(fan_angle(Point3(0, 0, 5), cfg), 3 * kPi / 2);
  cfg.root_world = Point3(1, 0, 1);
  EXPECT_DOUBLE_EQ(fan_angle(Point3(-4, 0, 1), cfg), 0.0);
}

TEST(FanAngle, InRange) {
  Rng rng(1);
  FanConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    cfg.start_angle = rng.uniform(-10, 10);
    cfg.sweep = rng.uniform01() < 0.5 ? 1 : -1;
    const double a = fan_angle(Point3(rng.uniform(-1, 1), 0, rng.uniform(-1, 1)), cfg);
    ASSERT_GE(a, 0.0);
    ASSERT_LT(a, 2 * kPi);
  }
}

TEST(FanSector, CutBelongsToHigherSector) {
  const std::array<double, 3> cuts = {1.0, 2.0, 3.0};
  EXPECT_EQ(fan_sector(0.0, cuts), 0);
  EXPECT_EQ(fan_sector(1.0, cuts), 1);
  EXPECT_EQ(fan_sector(1.0 - 1e-9, cuts), 0);
  EXPECT_EQ(fan_sector(std::nextafter(1.0, 0.0), cuts), 1);  // within tolerance
  EXPECT_EQ(fan_sector(2.0, cuts), 2);
  EXPECT_EQ(fan_sector(3.0, cuts), 3);
  EXPECT_EQ(fan_sector(6.0, cuts), 3);
}

// Coronal disc of radius r voxels on a single slab, with the root half a
// voxel off the lattice so no voxel lies on the root.
struct Disc {
  Mask mask;
  FanConfig cfg;
};

Disc make_disc(int r, bool left_half_only) {
  const int n = 2 * r + 3;
  Grid g = testing::make_grid(n, 2, n);
  Disc d{Mask(g), FanConfig{}};
  const Point3 centre = voxel_to_world(g, Index3(r + 1, 0, r + 1)) + Point3(0.5, 0, 0.5);
  d.cfg.root_world = centre;
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < n; ++x) {
        const Point3 p = voxel_to_world(g, Index3(x, y, z)) - centre;
        if (p.x() * p.x() + p.z() * p.z() > double(r) * r) continue;
        if (left_half_only && p.x() >= 0) continue;
        d.mask(x, y, z) = 1;
      }
  return d;
}

TEST(BalanceFan, HalfDisc) {
  const Disc d = make_disc(150, true);
  const auto p = balance_fan(d.mask, d.cfg);
  EXPECT_NEAR(p.cut_angles[0], kPi / 4, 0.01);
  EXPECT_NEAR(p.cut_angles[1], kPi / 2, 0.01);
  EXPECT_NEAR(p.cut_angles[2], 3 * kPi / 4, 0.01);
  for (const double f : p.achieved_fractions) EXPECT_NEAR(f, 0.25, 0.01);
}

TEST(BalanceFan, FullDisc) {
  const Disc d = make_disc(150, false);
  const auto p = balance_fan(d.mask, d.cfg);
  EXPECT_NEAR(p.cut_angles[0], kPi / 2, 0.01);
  EXPECT_NEAR(p.cut_angles[1], kPi, 0.01);
  EXPECT_NEAR(p.cut_angles[2], 3 * kPi / 2, 0.01);
  double sum = 0;
  for (const double f : p.achieved_fractions) {
    EXPECT_NEAR(f, 0.25, 0.01);
    sum += f;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

// O(N^2) reference: for every voxel angle, count by a full scan the volume of
// voxels with a strictly smaller angle; keep the closest per target, first
// (smallest) angle on ties.
std::array<double, 3> oracle_cuts(const Mask& m, const FanConfig& cfg) {
  std::vector<double> angles;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) angles.push_back(voxel_fan_angle(m.grid().index(i), m.grid(), cfg));
  }
  // Equal voxel volumes: compare exact rational gaps below / N - k / 4.
  const auto n = static_cast<long long>(angles.size());
  std::array<double, 3> best{};
  std::array<long long, 3> gap;
  gap.fill(std::numeric_limits<long long>::max());
  for (const double a : angles) {
    long long below = 0;
    for (const double b : angles) below += b < a ? 1 : 0;
    for (int k = 0; k < 3; ++k) {
      const long long gk = std::llabs(4 * below - (k + 1) * n);
      if (gk < gap[k] || (gk == gap[k] && a < best[k])) {
        gap[k] = gk;
        best[k] = a;
      }
    }
  }
  return best;
}

TEST(BalanceFan, MatchesScanOracle) {
  Rng rng(21);
  for (int t = 0; t < 30; ++t) {
    const Grid g = testing::make_grid(12, 10, 11, testing::random_spacing(rng));
    const Mask m = testing::random_mask(g, rng);
    FanConfig cfg;
    cfg.root_world = voxel_to_world(g, Index3(6, 5, 5)) + Point3(rng.uniform(-3, 3), 0, rng.uniform(-3, 3));
    cfg.start_angle = rng.uniform(0, 2 * kPi);
    cfg.sweep = t % 2 ? 1 : -1;
    FanPartition p;
    try {
      p = balance_fan(m, cfg);
    } catch (const ValidationError&) {
      continue;
    }
    EXPECT_EQ(p.cut_angles, oracle_cuts(m, cfg));
  }
}

TEST(BalanceFan, RotationCovariance) {
  Rng rng(4);
  const Grid g = testing::make_grid(16, 12, 16);
  const Mask m = testing::random_mask(g, rng);
  FanConfig cfg;
  cfg.root_world = Point3(7.31, 0, 6.77);
  const auto base = apply_fan(m, balance_fan(m, cfg));

  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.9, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  Grid rg = g;
  rg.transform.direction = R;
  rg.transform.origin = Point3(10, -20, 30);
  Mask rm(rg, std::vector<std::uint8_t>(m.data().begin(), m.data().end()));
  FanConfig rcfg = cfg;
  rcfg.root_world = rg.transform.origin + R * cfg.root_world;
  rcfg.plane.up = R * cfg.plane.up;
  rcfg.plane.left = R * cfg.plane.left;
  const auto rotated = balance_fan(rm, rcfg);
  const auto direct = balance_fan(m, cfg);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(rotated.cut_angles[k], direct.cut_angles[k], 1e-9);
  EXPECT_EQ(apply_fan(rm, rotated).values(), base.values());
}

TEST(BalanceFan, RegionOrderAndLabels) {
  const Disc d = make_disc(20, false);
  FanConfig cfg = d.cfg;
  cfg.region_order = {12, 11, 10, 9};
  const auto p = balance_fan(d.mask, cfg);
  const auto labels = apply_fan(d.mask, p);
  const auto hist = label_histogram(labels);
  EXPECT_EQ(hist[0], d.mask.size() - static_cast<std::size_t>(std::count(d.mask.data().begin(), d.mask.data().end(), 1)));
  for (int l = 10; l <= 13; ++l) EXPECT_GT(hist[static_cast<std::size_t>(l)], 0u);
  // The first sector (just past "up" towards left) carries region 12 (label 13).
  const Index3 probe(18, 0, 38);  // upper-left of the root
  ASSERT_TRUE(d.mask(probe.x(), probe.y(), probe.z()));
  EXPECT_EQ(labels(probe.x(), probe.y(), probe.z()), 13);
}

TEST(BalanceFan, Errors) {
  Mask m(testing::cube_grid(8));
  EXPECT_THROW(balance_fan(m, FanConfig{}), ValidationError);
  m(2, 2, 2) = 1;
  m(2, 3, 2) = 1;  // same coronal angle
  try {
    balance_fan(m, FanConfig{});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate fan"), std::string::npos);
  }
  FanConfig bad;
  bad.sweep = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = FanConfig{};
  bad.region_order = {9, 9, 10, 11};
  EXPECT_THROW(bad.validate(), ValidationError);
}

}  // namespace
}  // namespace rpci
