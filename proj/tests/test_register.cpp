#include "idem/cloud_io.hpp"
#include "idem/degrade.hpp"
#include "idem/errors.hpp"
#include "idem/register.hpp"
#include "idem/sweep.hpp"
#include "support/support.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>

using namespace idem;

namespace {

// q_tot has sub-nat dips within micrometres of alignment (neighbourhood
// membership flips), so exact-zero expectations use an improvement
// tolerance above that noise floor.
constexpr double kNoiseFloorTolQ = 1.0;

double translation_error(const RegistrationResult& r) { return (r.transform(r.center) - r.center).norm(); }

Pose pose_of(const RigidTransform& t, const Vec3& center) {
  const Vec3 shift = t(center) - center;
  const Mat3& m = t.rotation();
  const double ry = std::asin(std::clamp(m(0, 2), -1.0, 1.0));
  const double rx = std::atan2(-m(1, 2), m(2, 2));
  const double rz = std::atan2(-m(0, 1), m(0, 0));
  const double deg = 180.0 / M_PI;
  return {shift.x(), shift.y(), shift.z(), rx * deg, ry * deg, rz * deg};
}

const PointCloud& partial_fixed() {
  static const PointCloud c = partial_crop(test::bunny(), Vec3::UnitX(), 5.9, KeepSide::below);
  return c;
}

const PointCloud& partial_moving() {
  static const PointCloud c =
      partial_crop(load_cloud(test::data_dir() / "bunny_b0r.ply"), Vec3::UnitX(), -19.58, KeepSide::above);
  return c;
}

}  // namespace

TEST(PoseTransform, TranslationAndRotationAboutCenter) {
  const Vec3 c(1, 2, 3);
  const auto t = pose_transform({1, 0, 0, 0, 0, 0}, c);
  EXPECT_EQ(t(c), Vec3(2, 2, 3));
  const auto r = pose_transform({0, 0, 0, 10, -20, 30}, c);
  EXPECT_LT((r(c) - c).norm(), 1e-12);
  EXPECT_TRUE(r.rotation().isApprox(euler_xyz_rotation(10, -20, 30), 1e-14));
  const auto back = pose_of(pose_transform({0.5, -1, 2, 3, -4, 5}, c), c);
  const Pose want = {0.5, -1, 2, 3, -4, 5};
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(back[k], want[k], 1e-9);
}

TEST(RegistrationConfig, Validation) {
  RegistrationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.tol_step = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.tol_q = -1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.a = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.roi = PoseBounds{{1, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}};
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(RegistrationConfig, OptimizerNames) {
  EXPECT_EQ(parse_optimizer("pattern-search"), OptimizerKind::pattern_search);
  EXPECT_EQ(parse_optimizer("nelder-mead-6d"), OptimizerKind::nelder_mead);
  EXPECT_EQ(parse_optimizer(to_string(OptimizerKind::nelder_mead)), OptimizerKind::nelder_mead);
  EXPECT_THROW(parse_optimizer("icp"), ValidationError);
}

TEST(Register, AlreadyAlignedIsZeroIterations) {
  RegistrationConfig cfg;
  cfg.tol_q = kNoiseFloorTolQ;
  const auto r = register_pair(test::bunny(), test::bunny(), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.q_idem, 0.0);
  EXPECT_TRUE(r.transform.is_close(RigidTransform::identity(), 0));
}

TEST(Register, IdenticalCloudsFromPlanarOffset) {
  RegistrationConfig cfg;
  cfg.tol_q = kNoiseFloorTolQ;
  cfg.initial = {2, 1, 0, 0, 0, 0};
  const auto r = register_pair(test::bunny(), test::bunny(), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(translation_error(r), cfg.tol_step);
  EXPECT_LE(r.transform.rotation_angle_deg(), cfg.tol_step);
  EXPECT_LE(std::abs(r.q_idem), cfg.tol_q);
  EXPECT_GT(r.q_start, 1000.0);
}

TEST(Register, DefaultToleranceStillLandsOnTruth) {
  RegistrationConfig cfg;
  cfg.initial = {2, 1, 0, 0, 0, 0};
  const auto r = register_pair(test::bunny(), test::bunny(), cfg);
  EXPECT_LT(translation_error(r), 0.01);
  EXPECT_LT(r.transform.rotation_angle_deg(), 0.01);
  EXPECT_LT(r.q_idem, r.q_start);
  EXPECT_LT(std::abs(r.q_idem), kNoiseFloorTolQ);
}

TEST(Register, ResultInvariants) {
  RegistrationConfig cfg;
  cfg.initial = {1, -1, 0.5, 2, -1, 1};
  const auto& b = test::bunny();
  const auto r = register_pair(b, b, cfg);
  // q_idem is q_tot at the returned transform.
  const QtotEvaluator ev(b, r.radius);
  EXPECT_NEAR(ev(apply_transform(b, r.transform)), r.q_idem, 1e-9);
  EXPECT_EQ(r.radius, weighted_r4th(b, b));
  // Trace starts at the initial pose and strictly decreases.
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().value, r.q_start);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LT(r.trace[i].value, r.trace[i - 1].value);
  EXPECT_EQ(r.trace.back().value, r.q_idem);
  // Rotation stays orthonormal.
  const Mat3& m = r.transform.rotation();
  EXPECT_LT((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(m.determinant(), 1.0, 1e-12);
  EXPECT_TRUE(r.roi.contains(r.pose));
  EXPECT_TRUE(r.roi.contains(cfg.initial));
}

TEST(Register, StartOutsideSuppliedRoi) {
  RegistrationConfig cfg;
  cfg.roi = PoseBounds{{-3, -3, -3, -5, -5, -5}, {3, 3, 3, 5, 5, 5}};
  cfg.initial = {4, 0, 0, 0, 0, 0};
  EXPECT_THROW(register_pair(test::bunny(), test::bunny(), cfg), PreAlignmentRequiredError);
}

TEST(Register, StartBeyondCrestNeedsPreAlignment) {
  RegistrationConfig cfg;
  cfg.initial = {8, 0, 0, 0, 0, 0};
  EXPECT_THROW(register_pair(test::bunny(), test::bunny(), cfg), PreAlignmentRequiredError);
  // Separated clouds have a flat zero profile: no ROI either.
  cfg.initial = {400, 0, 0, 0, 0, 0};
  EXPECT_THROW(register_pair(test::bunny(), test::bunny(), cfg), PreAlignmentRequiredError);
}

TEST(Register, IterationCapLeavesNotConverged) {
  RegistrationConfig cfg;
  cfg.initial = {2, 1, 0, 0, 0, 0};
  cfg.max_iters = 2;
  const auto r = register_pair(test::bunny(), test::bunny(), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.iterations, 2u);
  EXPECT_LT(r.q_idem, r.q_start);
}

TEST(Register, NelderMeadImproves) {
  RegistrationConfig cfg;
  cfg.optimizer = OptimizerKind::nelder_mead;
  cfg.initial = {1.5, 0.5, 0, 0, 0, 0};
  const auto r = register_pair(test::bunny(), test::bunny(), cfg);
  EXPECT_LT(r.q_idem, r.q_start);
  EXPECT_LT(translation_error(r), 0.1);
}

TEST(Register, SwappedCloudsGiveInverseTransforms) {
  // The objective is the same up to a rigid motion, but the optimiser paths
  // differ and q_tot is rugged below ~0.01 units, so agreement is checked at
  // the registration accuracy target rather than at the step tolerance.
  const auto& a = test::bunny();
  const auto b = downsample(a, 0.5, 3);
  RegistrationConfig ab_cfg;
  ab_cfg.initial = {1, -0.5, 0.5, 1, 0, -1};
  const auto ab = register_pair(a, b, ab_cfg);
  RegistrationConfig ba_cfg;
  ba_cfg.initial = pose_of(pose_transform(ab_cfg.initial, centroid(b)).inverse(), centroid(a));
  const auto ba = register_pair(b, a, ba_cfg);
  const auto loop = ab.transform * ba.transform;
  EXPECT_LT((loop(centroid(a)) - centroid(a)).norm(), 0.1);
  EXPECT_LT(loop.rotation_angle_deg(), 0.1);
  EXPECT_NEAR(ab.q_start, ba.q_start, 1e-6 * ab.q_start);
}

TEST(Register, PartialRemeshedPairFromThreeMillimetres) {
  const auto& fixed = partial_fixed();
  const auto& moving = partial_moving();
  ASSERT_EQ(fixed.size(), 1087u);
  RegistrationConfig cfg;
  cfg.initial = {-3, 0, 0, 0, 0, 0};
  const auto r = register_pair(fixed, moving, cfg);
  EXPECT_LT(translation_error(r), 1.0);
  EXPECT_LT(r.transform.rotation_angle_deg(), 0.25);

  // Exhaustive oracle: the best cell of a fine translation lattice around the
  // truth lies within one lattice step of the optimiser's translation.
  SweepSpec fine;
  fine.axes = {0, 1, 2};
  fine.range = 1.0;
  fine.step = 0.25;
  fine.metrics = {Metric::qtot};
  const auto grid = run_sweep(fixed, moving, fine);
  const auto best = argmin(grid, Metric::qtot);
  const Vec3 t = r.transform(r.center) - r.center;
  for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(best.position[static_cast<std::size_t>(k)] - t[k]), fine.step + 1e-9);
}
