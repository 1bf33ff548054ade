#include "idem/baselines.hpp"
#include "idem/degrade.hpp"
#include "idem/entropy.hpp"
#include "idem/errors.hpp"
#include "idem/sweep.hpp"
#include "support/support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace idem;

namespace {

SweepSpec translate_x(double range, double step, std::vector<Metric> metrics = {Metric::qtot}) {
  SweepSpec s;
  s.axes = {0};
  s.range = range;
  s.step = step;
  s.metrics = std::move(metrics);
  return s;
}

SweepGrid synthetic_grid(std::size_t dims, std::vector<double> values) {
  SweepGrid g;
  g.spec.axes.clear();
  for (std::size_t d = 0; d < dims; ++d) g.spec.axes.push_back(static_cast<int>(d));
  g.spec.metrics = {Metric::qtot};
  g.spec.range = 1;
  g.spec.step = 1;
  g.coordinates = g.spec.coordinates();
  g.layers = {std::move(values)};
  return g;
}

}  // namespace

TEST(SweepSpec, Validation) {
  SweepSpec s;
  EXPECT_NO_THROW(s.validate());
  s.axes = {};
  EXPECT_THROW(s.validate(), ValidationError);
  s.axes = {0, 1, 2, 2};
  EXPECT_THROW(s.validate(), ValidationError);
  s.axes = {1, 0};
  EXPECT_THROW(s.validate(), ValidationError);
  s.axes = {3};
  EXPECT_THROW(s.validate(), ValidationError);
  s.axes = {0};
  s.range = 0.5;
  EXPECT_THROW(s.validate(), ValidationError);
  s.range = 5;
  s.step = -1;
  EXPECT_THROW(s.validate(), ValidationError);
  s.step = 1;
  s.metrics.clear();
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(SweepSpec, Coordinates) {
  const auto c = translate_x(5, 1).coordinates();
  ASSERT_EQ(c.size(), 11u);
  EXPECT_EQ(c.front(), -5.0);
  EXPECT_EQ(c[5], 0.0);
  EXPECT_EQ(c.back(), 5.0);
  const auto d = translate_x(1, 0.3).coordinates();
  ASSERT_EQ(d.size(), 7u);
  EXPECT_DOUBLE_EQ(d.back(), 0.9);
  // Range an exact multiple of a non-representable step keeps the end cell.
  EXPECT_EQ(translate_x(0.3, 0.1).cells_per_axis(), 7u);
  SweepSpec plane;
  EXPECT_EQ(plane.cell_count(), 121u);
}

TEST(SweepSpec, ModeNames) {
  SweepKind kind{};
  std::size_t n = 0;
  parse_sweep_mode("rotate-volume", kind, n);
  EXPECT_EQ(kind, SweepKind::rotate);
  EXPECT_EQ(n, 3u);
  parse_sweep_mode("translate-axis", kind, n);
  EXPECT_EQ(kind, SweepKind::translate);
  EXPECT_EQ(n, 1u);
  EXPECT_THROW(parse_sweep_mode("shear-plane", kind, n), ValidationError);
  EXPECT_EQ(SweepSpec{}.mode(), "translate-plane");
  EXPECT_EQ(parse_axes("YX"), (std::vector<int>{0, 1}));
  EXPECT_EQ(parse_axes("xyz"), (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(parse_axes("XW"), ValidationError);
  const std::vector<int> xz = {0, 2};
  EXPECT_EQ(axes_name(xz), "XZ");
}

TEST(SweepSpec, MetricNames) {
  EXPECT_EQ(parse_metric_list("all").size(), 5u);
  EXPECT_EQ(parse_metric_list("qtot,hausdorff"), (std::vector<Metric>{Metric::qtot, Metric::hausdorff}));
  for (Metric m : kAllMetrics) EXPECT_EQ(parse_metric(to_string(m)), m);
  EXPECT_THROW(parse_metric("icp"), ValidationError);
}

TEST(SweepGrid, IndexRoundTrip) {
  SweepGrid g = synthetic_grid(3, std::vector<double>(27, 0.0));
  for (std::size_t f = 0; f < g.cell_count(); ++f) EXPECT_EQ(g.flat_index(g.cell_indices(f)), f);
  EXPECT_EQ(g.zero_cell(), 13u);
  EXPECT_EQ(g.cell_indices(1), (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_EQ(g.cell_position(0), (std::vector<double>{-1, -1, -1}));
}

TEST(RunSweep, ToyPairMatchesDirectCalls) {
  RandomSource rng(51);
  const auto fixed = test::random_cloud(rng, 20, 4);
  const auto moving = test::random_cloud(rng, 20, 4);
  SweepSpec spec;
  spec.range = 2;
  spec.step = 1;
  const auto grid = run_sweep(fixed, moving, spec);
  ASSERT_EQ(grid.cell_count(), 25u);
  const double r = weighted_r4th(fixed, moving);
  EXPECT_EQ(grid.radius, r);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const auto pos = grid.cell_position(cell);
    const auto moved = apply_transform(moving, RigidTransform::translation(Vec3(pos[0], pos[1], 0)));
    EXPECT_EQ(grid.layer(Metric::qtot)[cell], q_tot(fixed, moved, EntropyParams{1.0, r}));
    EXPECT_EQ(grid.layer(Metric::rmse_12)[cell], rmse_directed(fixed, moved));
    EXPECT_EQ(grid.layer(Metric::rmse_21)[cell], rmse_directed(moved, fixed));
    EXPECT_EQ(grid.layer(Metric::chamfer)[cell], chamfer(fixed, moved));
    EXPECT_EQ(grid.layer(Metric::hausdorff)[cell], hausdorff(fixed, moved));
  }
}

TEST(RunSweep, RotationCellsRotateAboutCentroid) {
  RandomSource rng(52);
  const auto fixed = test::random_cloud(rng, 20, 4);
  const auto moving = test::random_cloud(rng, 20, 4);
  SweepSpec spec;
  spec.kind = SweepKind::rotate;
  spec.axes = {2};
  spec.range = 10;
  spec.step = 5;
  spec.metrics = {Metric::hausdorff};
  const auto grid = run_sweep(fixed, moving, spec);
  const Vec3 c = centroid(moving);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const double angle = grid.cell_position(cell)[0];
    const auto t = rotation_about_point(c, euler_xyz_rotation(0, 0, angle));
    EXPECT_EQ(grid.layer(Metric::hausdorff)[cell], hausdorff(fixed, apply_transform(moving, t)));
  }
}

TEST(RunSweep, IdenticalCloudsZeroCellAndSymmetry) {
  const auto& b = test::bunny();
  const auto grid = run_sweep(b, b, translate_x(8, 1));
  const auto& q = grid.layer(Metric::qtot);
  EXPECT_EQ(q[grid.zero_cell()], 0.0);
  const std::size_t n = q.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    EXPECT_LT(std::abs(q[i] - q[n - 1 - i]), 1e-6 * std::max(std::abs(q[i]), 1.0)) << i;
  }
  const auto roi = locate_roi(grid);
  EXPECT_EQ(roi.bounds[0].lower, -3.0);
  EXPECT_EQ(roi.bounds[0].upper, 3.0);
  EXPECT_EQ(argmin_error(grid, Metric::qtot), 0.0);
}

TEST(RunSweep, ZeroCellOfAnySpecIsZeroForIdenticalClouds) {
  const auto& b = test::bunny();
  SweepSpec rot;
  rot.kind = SweepKind::rotate;
  rot.axes = {0, 2};
  rot.range = 2;
  rot.step = 2;
  const auto grid = run_sweep(b, b, rot);
  for (Metric m : kAllMetrics) EXPECT_EQ(grid.layer(m)[grid.zero_cell()], 0.0);
}

TEST(RunSweep, SwapMirrorsQtotLayer) {
  // q(A, B + d) is q(B, A − d) up to a common translation, so swapping the
  // clouds mirrors the lattice rather than leaving it unchanged cell by cell.
  const auto& b = test::bunny();
  const auto sparse = downsample(b, 0.5, 3);
  SweepSpec spec;
  spec.range = 3;
  spec.metrics = {Metric::qtot, Metric::rmse_12};
  const auto ab = run_sweep(b, sparse, spec);
  const auto ba = run_sweep(sparse, b, spec);
  const auto& qa = ab.layer(Metric::qtot);
  const auto& qb = ba.layer(Metric::qtot);
  const std::size_t n = qa.size();
  EXPECT_EQ(qa[ab.zero_cell()], qb[ba.zero_cell()]);
  for (std::size_t i = 0; i < n; ++i) EXPECT_LT(std::abs(qa[i] - qb[n - 1 - i]), 1e-6 * std::max(std::abs(qa[i]), 1.0));
  EXPECT_NE(ab.layer(Metric::rmse_12), ba.layer(Metric::rmse_12));
}

TEST(RunSweep, SeparatedCellsAreExactlyZero) {
  const auto& b = test::bunny();
  const double r = weighted_r4th(b, b);
  const double span = diameter(b.points());
  const auto grid = run_sweep(b, b, translate_x(400, 100));
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    if (std::abs(grid.cell_position(cell)[0]) > 2 * span + 2 * r) {
      EXPECT_EQ(grid.layer(Metric::qtot)[cell], 0.0);
    }
  }
}

TEST(RunSweep, RejectsInvalidSpec) {
  EXPECT_THROW(run_sweep(test::bunny(), test::bunny(), translate_x(0.5, 1)), ValidationError);
}

TEST(Argmin, TiesPreferZeroCellThenLexicographic) {
  auto flat = synthetic_grid(2, std::vector<double>(9, 1.0));
  EXPECT_EQ(argmin(flat, Metric::qtot).cell, flat.zero_cell());
  EXPECT_EQ(argmin_error(flat, Metric::qtot), 0.0);

  std::vector<double> v(9, 5.0);
  // Minima at (i0, i1) = (2, 0) and (0, 2); the first axis is most significant.
  v[flat.flat_index(std::vector<std::size_t>{2, 0})] = 1.0;
  v[flat.flat_index(std::vector<std::size_t>{0, 2})] = 1.0;
  auto g = synthetic_grid(2, v);
  const auto a = argmin(g, Metric::qtot);
  EXPECT_EQ(g.cell_indices(a.cell), (std::vector<std::size_t>{0, 2}));
  EXPECT_DOUBLE_EQ(a.error, std::sqrt(2.0));
}

TEST(Argmin, MissingLayerRejected) {
  auto g = synthetic_grid(1, {1, 0, 1});
  EXPECT_THROW(g.layer(Metric::chamfer), ValidationError);
}

TEST(LocatePeaks, SymmetricDoubleGaussian) {
  std::vector<double> coords, values;
  for (int k = -40; k <= 40; ++k) {
    const double x = k * 0.25;
    coords.push_back(x);
    values.push_back(std::exp(-(x - 3) * (x - 3)) + std::exp(-(x + 3) * (x + 3)));
  }
  const auto b = locate_peaks_1d(coords, values, 40);
  EXPECT_EQ(b.lower, -3.0);
  EXPECT_EQ(b.upper, 3.0);
}

TEST(LocatePeaks, AsymmetricTakesLargestPerSide) {
  const std::vector<double> coords = {-4, -3, -2, -1, 0, 1, 2, 3, 4};
  const std::vector<double> values = {0, 2, 1, 3, 0, 1, 0, 5, 4};
  const auto b = locate_peaks_1d(coords, values, 4);
  EXPECT_EQ(b.lower, -1.0);
  EXPECT_EQ(b.upper, 3.0);
}

TEST(LocatePeaks, MonotoneProfileHasNoRoi) {
  const std::vector<double> coords = {-2, -1, 0, 1, 2};
  EXPECT_THROW(locate_peaks_1d(coords, std::vector<double>{5, 4, 3, 2, 1}, 2), NoRoiError);
  EXPECT_THROW(locate_peaks_1d(coords, std::vector<double>{1, 2, 0, 1, 2}, 2), NoRoiError);
}

TEST(LocatePeaks, PlateauNearestZero) {
  const std::vector<double> values = {0, 1, 3, 3, 3, 1, 0};
  EXPECT_EQ(local_maxima_1d(values, 0), std::vector<std::size_t>{2});
  EXPECT_EQ(local_maxima_1d(values, 6), std::vector<std::size_t>{4});
  // A plateau running into the edge is not bounded by lower values.
  EXPECT_TRUE(local_maxima_1d(std::vector<double>{0, 1, 2, 2}, 0).empty());
}

TEST(LocateRoi, AxisProfileThroughZeroCell) {
  std::vector<double> v(25, 0.0);
  auto g = synthetic_grid(2, v);
  g.spec.range = 2;
  g.coordinates = g.spec.coordinates();
  for (std::size_t i = 0; i < 5; ++i) g.layers[0][g.flat_index(std::vector<std::size_t>{i, 2})] = static_cast<double>(10 + i);
  const auto p = axis_profile(g, Metric::qtot, 0);
  EXPECT_EQ(p, (std::vector<double>{10, 11, 12, 13, 14}));
}

TEST(RoiBounds, Contains) {
  RoiBounds roi{{0, 1}, {{-1, 2}, {-3, 3}}};
  EXPECT_TRUE(roi.contains(std::vector<double>{0, 0}));
  EXPECT_TRUE(roi.contains(std::vector<double>{2, -3}));
  EXPECT_FALSE(roi.contains(std::vector<double>{2.1, 0}));
}
