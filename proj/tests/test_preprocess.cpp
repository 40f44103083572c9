#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include "rpci/error.hpp"
#include "rpci/preprocess.hpp"
#include "test_support.hpp"

namespace rpci {
namespace {

using testing::cube_grid;
using testing::fill_box;
using testing::make_grid;
using testing::oracle_dilate;

std::size_t foreground(const LabelVolume& v) {
  return static_cast<std::size_t>(std::count_if(v.data().begin(), v.data().end(), [](Label l) { return l != 0; }));
}

TEST(CropWithMargin, ClampedBox) {
  LabelVolume labels(cube_grid(64));
  fill_box<Label>(labels, Index3(10, 10, 10), Index3(20, 20, 20), 3);
  const BoundingBox box = crop_box(labels, CropSpec{15.0});
  EXPECT_EQ(box.lo, Index3(0, 0, 0));
  EXPECT_EQ(box.hi, Index3(35, 35, 35));
}

TEST(CropWithMargin, ZeroMarginIsTightBox) {
  LabelVolume labels(cube_grid(32));
  fill_box<Label>(labels, Index3(4, 5, 6), Index3(10, 11, 12), 1);
  EXPECT_EQ(crop_box(labels, CropSpec{0.0}), label_bounding_box(labels));
}

TEST(CropWithMargin, AnisotropicExpansion) {
  LabelVolume labels(make_grid(80, 80, 40, Spacing(1.0, 1.0, 5.0)));
  fill_box<Label>(labels, Index3(30, 30, 15), Index3(40, 40, 20), 2);
  const BoundingBox box = crop_box(labels, CropSpec{15.0});
  EXPECT_EQ(box.lo, Index3(15, 15, 12));
  EXPECT_EQ(box.hi, Index3(55, 55, 23));
}

TEST(CropWithMargin, NonIntegerRatioRoundsUp) {
  LabelVolume labels(make_grid(100, 100, 100, Spacing(0.7, 0.7, 0.7)));
  labels(50, 50, 50) = 1;
  const BoundingBox box = crop_box(labels, CropSpec{15.0});
  EXPECT_EQ(box.lo, Index3::Constant(50 - 22));  // ceil(15 / 0.7) = 22
}

TEST(CropWithMargin, KeepsWorldCoordinatesAndForeground) {
  Grid g = make_grid(40, 36, 30, Spacing(0.8, 1.1, 2.5));
  g.transform.origin = Point3(-12.5, 30.25, 7.0);
  g.transform.direction = Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  LabelVolume labels(g);
  fill_box<Label>(labels, Index3(12, 8, 9), Index3(20, 22, 14), 4);
  labels(25, 10, 11) = 9;
  ScalarVolume ct(g);
  for (std::size_t i = 0; i < ct.size(); ++i) ct[i] = static_cast<float>(i);

  const auto [ct_c, lab_c] = crop_with_margin(ct, labels, CropSpec{6.0});
  const BoundingBox box = crop_box(labels, CropSpec{6.0});
  EXPECT_EQ(foreground(lab_c), foreground(labels));
  for (int z = 0; z < lab_c.dims().z(); ++z)
    for (int y = 0; y < lab_c.dims().y(); ++y)
      for (int x = 0; x < lab_c.dims().x(); ++x) {
        const Index3 local(x, y, z);
        const Index3 global = local + box.lo;
        ASSERT_LE((voxel_to_world(lab_c.grid(), local) - voxel_to_world(g, global)).cwiseAbs().maxCoeff(), 1e-9);
        ASSERT_EQ(lab_c(x, y, z), labels(global.x(), global.y(), global.z()));
        ASSERT_EQ(ct_c(x, y, z), ct(global.x(), global.y(), global.z()));
      }
}

TEST(CropWithMargin, Errors) {
  LabelVolume labels(cube_grid(8));
  ScalarVolume ct(cube_grid(8));
  EXPECT_THROW(crop_with_margin(ct, labels), ValidationError);  // empty labels
  labels(1, 1, 1) = 1;
  EXPECT_THROW(crop_with_margin(ScalarVolume(cube_grid(9)), labels), ValidationError);
  EXPECT_THROW(crop_box(labels, CropSpec{-1.0}), ValidationError);
}

TEST(DilateLabels, SingleVoxelRadiusTwo) {
  LabelVolume labels(cube_grid(11));
  labels(5, 5, 5) = 1;
  const auto out = dilate_labels(labels, DilationSpec{2.0});
  EXPECT_EQ(foreground(out), 33u);
}

TEST(DilateLabels, RadiusZeroIsIdentity) {
  LabelVolume labels(cube_grid(8));
  fill_box<Label>(labels, Index3(2, 2, 2), Index3(4, 3, 5), 7);
  EXPECT_EQ(dilate_labels(labels, DilationSpec{0.0}), labels);
}

TEST(DilateLabels, TieGoesToSmallerLabel) {
  LabelVolume labels(make_grid(9, 3, 3));
  labels(2, 1, 1) = 2;
  labels(6, 1, 1) = 1;
  const auto out = dilate_labels(labels, DilationSpec{2.0});
  EXPECT_EQ(out(4, 1, 1), 1);  // midpoint, 2 mm from both
  EXPECT_EQ(out(3, 1, 1), 2);
  EXPECT_EQ(out(5, 1, 1), 1);
  // Reverse the labels: the smaller label still wins the midpoint.
  std::swap(labels(2, 1, 1), labels(6, 1, 1));
  EXPECT_EQ(dilate_labels(labels, DilationSpec{2.0})(4, 1, 1), 1);
}

TEST(DilateLabels, MatchesOracleOnRandomMasks) {
  Rng rng(424242);
  for (int trial = 0; trial < 12; ++trial) {
    const Spacing s(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 4.0));
    LabelVolume labels(make_grid(20, 18, 16, s));
    const int seeds = 1 + static_cast<int>(rng.index(8));
    for (int k = 0; k < seeds; ++k) labels[rng.index(labels.size())] = static_cast<Label>(1 + rng.index(13));
    const double radius = rng.uniform(0.0, 5.0);
    const auto out = dilate_labels(labels, DilationSpec{radius});
    ASSERT_EQ(out, oracle_dilate(labels, radius)) << trial;
    // Monotone: inputs kept.
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i]) ASSERT_EQ(out[i], labels[i]);
  }
}

TEST(DilateLabels, Deterministic) {
  LabelVolume labels(cube_grid(12));
  fill_box<Label>(labels, Index3(2, 2, 2), Index3(4, 4, 4), 3);
  fill_box<Label>(labels, Index3(7, 6, 5), Index3(9, 9, 9), 8);
  EXPECT_EQ(dilate_labels(labels), dilate_labels(labels));
}

TEST(DilateLabels, RejectsBadRadius) {
  LabelVolume labels(cube_grid(4));
  EXPECT_THROW(dilate_labels(labels, DilationSpec{-1.0}), ValidationError);
  EXPECT_THROW(dilate_labels(labels, DilationSpec{std::nan("")}), ValidationError);
}

}  // namespace
}  // namespace rpci
