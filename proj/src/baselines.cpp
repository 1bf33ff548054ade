#include "idem/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace idem {

namespace {

std::vector<double> nearest_squared(const SpatialIndex& source, const SpatialIndex& target) {
  std::vector<double> d2(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    d2[i] = target.nearest(source.point(i)).squared_distance;
  }
  return d2;
}

double mean_sqrt(const std::vector<double>& d2) {
  std::vector<double> d(d2.size());
  std::transform(d2.begin(), d2.end(), d.begin(), [](double v) { return std::sqrt(v); });
  return compensated_sum(d) / static_cast<double>(d.size());
}

}  // namespace

double rmse_directed(const SpatialIndex& source, const SpatialIndex& target) {
  const auto d2 = nearest_squared(source, target);
  return std::sqrt(compensated_sum(d2) / static_cast<double>(d2.size()));
}

double rmse_directed(const PointCloud& source, const PointCloud& target) {
  return rmse_directed(SpatialIndex(source), SpatialIndex(target));
}

double chamfer(const SpatialIndex& c1, const SpatialIndex& c2) {
  // a + b == b + a in floating point, so swapping the clouds is exact.
  const double a = mean_sqrt(nearest_squared(c1, c2));
  const double b = mean_sqrt(nearest_squared(c2, c1));
  return 0.5 * (a + b);
}

double chamfer(const PointCloud& c1, const PointCloud& c2) {
  return chamfer(SpatialIndex(c1), SpatialIndex(c2));
}

double hausdorff(const SpatialIndex& c1, const SpatialIndex& c2) {
  const auto a = nearest_squared(c1, c2);
  const auto b = nearest_squared(c2, c1);
  return std::sqrt(std::max(*std::max_element(a.begin(), a.end()),
                            *std::max_element(b.begin(), b.end())));
}

double hausdorff(const PointCloud& c1, const PointCloud& c2) {
  return hausdorff(SpatialIndex(c1), SpatialIndex(c2));
}

MetricReport metric_report(const PointCloud& c1, const PointCloud& c2, double a,
                           const RigidTransform& pose) {
  const EntropyParams params = EntropyParams::for_pair(c1, c2, a);
  const SpatialIndex i1(c1);
  const SpatialIndex i2(apply_transform(c2, pose));
  MetricReport report;
  report.q_tot = q_vector(i1, i2, params.radius).total();
  report.rmse_1to2 = rmse_directed(i1, i2);
  report.rmse_2to1 = rmse_directed(i2, i1);
  report.chamfer = chamfer(i1, i2);
  report.hausdorff = hausdorff(i1, i2);
  report.radius = params.radius;
  report.a = a;
  report.pose = pose;
  return report;
}

}  // namespace idem
