#include "idem/baselines.hpp"
#include "support/oracle.hpp"
#include "support/support.hpp"

#include <gtest/gtest.h>

using namespace idem;

TEST(Baselines, IdenticalCloudsAreZero) {
  const auto& b = test::bunny();
  EXPECT_EQ(rmse_directed(b, b), 0.0);
  EXPECT_EQ(chamfer(b, b), 0.0);
  EXPECT_EQ(hausdorff(b, b), 0.0);
}

TEST(Baselines, SinglePointRmse) {
  EXPECT_DOUBLE_EQ(rmse_directed(PointCloud({Vec3::Zero()}), PointCloud({Vec3(3, 4, 0)})), 5.0);
}

TEST(Baselines, HausdorffOutlier) {
  EXPECT_DOUBLE_EQ(hausdorff(PointCloud({Vec3::Zero()}), PointCloud({Vec3::Zero(), Vec3(10, 0, 0)})), 10.0);
}

TEST(Baselines, ChamferUsesFirstPowerDistances) {
  // a→b: 0; b→a: mean(0, 10) = 5; chamfer = 2.5.
  EXPECT_DOUBLE_EQ(chamfer(PointCloud({Vec3::Zero()}), PointCloud({Vec3::Zero(), Vec3(10, 0, 0)})), 2.5);
}

TEST(Baselines, RandomPairsMatchBruteForce) {
  RandomSource rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = test::random_cloud(rng, 30);
    const auto b = test::random_cloud(rng, 30 + rng.index(10));
    const auto pa = oracle::points_of(a), pb = oracle::points_of(b);
    EXPECT_NEAR(rmse_directed(a, b), oracle::rmse(pa, pb), 1e-12 * oracle::rmse(pa, pb));
    EXPECT_NEAR(rmse_directed(b, a), oracle::rmse(pb, pa), 1e-12 * oracle::rmse(pb, pa));
    EXPECT_NEAR(chamfer(a, b), oracle::chamfer(pa, pb), 1e-12 * oracle::chamfer(pa, pb));
    EXPECT_NEAR(hausdorff(a, b), oracle::hausdorff(pa, pb), 1e-12 * oracle::hausdorff(pa, pb));
  }
}

TEST(Baselines, SymmetryAndDirectedAsymmetry) {
  // A dense row and a sparse subset: every sparse point has an exact match,
  // most dense points do not.
  std::vector<Vec3> dense, sparse;
  for (int i = 0; i <= 10; ++i) dense.emplace_back(i, 0, 0);
  sparse = {Vec3(0, 0, 0), Vec3(10, 0, 0)};
  const PointCloud a(dense), b(sparse);
  EXPECT_EQ(rmse_directed(b, a), 0.0);
  EXPECT_GT(rmse_directed(a, b), 0.0);
  EXPECT_EQ(chamfer(a, b), chamfer(b, a));
  EXPECT_EQ(hausdorff(a, b), hausdorff(b, a));
}

TEST(Baselines, RigidInvariance) {
  RandomSource rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = test::random_cloud(rng, 40);
    const auto b = test::random_cloud(rng, 35);
    const auto t = test::random_rigid(rng);
    const auto ta = apply_transform(a, t), tb = apply_transform(b, t);
    EXPECT_NEAR(rmse_directed(ta, tb), rmse_directed(a, b), 1e-9 * rmse_directed(a, b));
    EXPECT_NEAR(chamfer(ta, tb), chamfer(a, b), 1e-9 * chamfer(a, b));
    EXPECT_NEAR(hausdorff(ta, tb), hausdorff(a, b), 1e-9 * hausdorff(a, b));
  }
}

TEST(MetricReport, PosedMetrics) {
  RandomSource rng(43);
  const auto a = test::random_cloud(rng, 40, 5);
  const auto b = test::random_cloud(rng, 40, 5);
  const auto pose = RigidTransform::translation(Vec3(0.5, 0, 0));
  const auto report = metric_report(a, b, 1.0, pose);
  const auto moved = apply_transform(b, pose);
  EXPECT_EQ(report.rmse_1to2, rmse_directed(a, moved));
  EXPECT_EQ(report.rmse_2to1, rmse_directed(moved, a));
  EXPECT_EQ(report.chamfer, chamfer(a, moved));
  EXPECT_EQ(report.hausdorff, hausdorff(a, moved));
  EXPECT_DOUBLE_EQ(report.radius, weighted_r4th(a, b));
  EXPECT_EQ(report.q_tot, q_tot(a, moved, EntropyParams{1.0, report.radius}));
}
