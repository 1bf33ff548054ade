#pragma once

#include "idem/geometry.hpp"
#include "idem/spatial.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace idem {

/// Number of spatial dimensions in the entropy formula.
inline constexpr int kEntropyDimension = 3;

enum class CovarianceNormalization {
  population,  // divide by k (library default)
  sample,      // divide by k − 1; k == 1 yields the zero matrix
};

/// Covariance of a point set (two-pass). The single-point covariance is zero.
Mat3 covariance(std::span<const Vec3> points,
                CovarianceNormalization normalization = CovarianceNormalization::population);

/// Modified differential entropy of one neighbourhood, in nats:
///
///   h = ½ ln((2πe)³ det Σ + 1)
///
/// with Σ the population covariance of the points. Always >= 0. Neighbourhoods
/// with at most three distinct points return exactly 0.
///
/// The result depends only on the multiset of coordinates: points are sorted
/// and exact duplicates merged into weights before accumulation. Duplicating
/// every point therefore reproduces the same value bit for bit.
double point_entropy(std::span<const Vec3> neighborhood);

/// Radius multiplier `a` and the resulting search radius r = a · r_4th.
struct EntropyParams {
  double a = 1.0;
  double radius = 0.0;

  /// r = a · weighted_r4th(c1, c2).
  static EntropyParams for_pair(const PointCloud& c1, const PointCloud& c2, double a = 1.0);
  /// Throws ValidationError unless a > 0 and radius > 0 (both finite).
  void validate() const;
};

struct EntropyProfile {
  std::vector<double> h;  // aligned with cloud point order
  double total = 0.0;     // H(P) = Σ h_i
  double radius = 0.0;
};

/// Per-point entropies of `cloud` with radius-r neighbourhoods taken within the cloud.
EntropyProfile cloud_entropy(const PointCloud& cloud, const SpatialIndex& index, double r);

/// Mean over all points of the distance to the 4th nearest other point.
/// Requires at least 5 points (ValidationError otherwise).
double r4th_mean(const PointCloud& cloud);
double r4th_mean(const SpatialIndex& index);

/// r_4th of each cloud weighted by the other cloud's share of the points:
///   r1 · n2/(n1+n2) + r2 · n1/(n1+n2)
double weighted_r4th(double r4th_1, std::size_t n1, double r4th_2, std::size_t n2);
double weighted_r4th(const PointCloud& c1, const PointCloud& c2);

/// Per-point joint-minus-own entropy differences over the joint cloud [P1; P2].
struct QVector {
  std::vector<double> q;  // |P1| + |P2| entries, P1 first
  std::size_t split = 0;  // == |P1|
  double total_first = 0.0;   // compensated sum over the P1 entries
  double total_second = 0.0;  // compensated sum over the P2 entries

  /// q_tot; total_first + total_second, so swapping the clouds gives the same bits.
  double total() const noexcept { return total_first + total_second; }
};

/// q_i = h(joint radius-r neighbourhood) − h(radius-r neighbourhood within the
/// point's own cloud). Entries are exactly 0 for points whose joint
/// neighbourhood holds no point of the other cloud.
QVector q_vector(const PointCloud& c1, const PointCloud& c2, double r);
QVector q_vector(const SpatialIndex& index1, const SpatialIndex& index2, double r);

/// q_tot = Σ q_i. Commutative in its two clouds.
double q_tot(const PointCloud& c1, const PointCloud& c2, const EntropyParams& params);

/// Neumaier-compensated summation in the given order.
double compensated_sum(std::span<const double> values);

/// Evaluates q_tot against a fixed cloud for many poses of a moving cloud.
/// Caches the fixed cloud's index and own-cloud entropies; results are
/// identical to q_vector(fixed, moving, r).
class QtotEvaluator {
 public:
  QtotEvaluator(const PointCloud& fixed, double radius);

  double radius() const noexcept { return radius_; }
  const SpatialIndex& fixed_index() const noexcept { return fixed_index_; }

  QVector q_vector(const SpatialIndex& moving_index) const;
  double operator()(const SpatialIndex& moving_index) const { return q_vector(moving_index).total(); }
  double operator()(const PointCloud& moving) const { return (*this)(SpatialIndex(moving)); }

 private:
  SpatialIndex fixed_index_;
  double radius_;
  std::vector<double> fixed_own_h_;
};

}  // namespace idem
