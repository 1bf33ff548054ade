#pragma once

#include "idem/entropy.hpp"
#include "idem/geometry.hpp"
#include "idem/spatial.hpp"

namespace idem {

/// sqrt(mean over source points of the squared distance to the nearest target
/// point). Not symmetric: the average runs over `source`.
double rmse_directed(const PointCloud& source, const PointCloud& target);
double rmse_directed(const SpatialIndex& source, const SpatialIndex& target);

/// ½ (mean nearest distance c1→c2 + mean nearest distance c2→c1), first-power distances.
double chamfer(const PointCloud& c1, const PointCloud& c2);
double chamfer(const SpatialIndex& c1, const SpatialIndex& c2);

/// max of the two directed max-min distances.
double hausdorff(const PointCloud& c1, const PointCloud& c2);
double hausdorff(const SpatialIndex& c1, const SpatialIndex& c2);

/// All alignment metrics for one pair at one pose of the second cloud.
struct MetricReport {
  double q_tot = 0.0;
  double rmse_1to2 = 0.0;
  double rmse_2to1 = 0.0;
  double chamfer = 0.0;
  double hausdorff = 0.0;
  double radius = 0.0;
  double a = 1.0;
  RigidTransform pose;
};

/// Evaluates every metric with `c2` moved by `pose`; the radius comes from the
/// un-moved pair (r_4th is pose invariant).
MetricReport metric_report(const PointCloud& c1, const PointCloud& c2, double a = 1.0,
                           const RigidTransform& pose = RigidTransform::identity());

}  // namespace idem
