#include "idem/entropy.hpp"

#include "idem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace idem {

namespace {

const double kGaussianScale = std::pow(2.0 * std::numbers::pi * std::numbers::e, kEntropyDimension);

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

double det3(double a00, double a01, double a02, double a11, double a12, double a22) {
  // Symmetric 3×3, cofactor expansion along the first row.
  return a00 * (a11 * a22 - a12 * a12) - a01 * (a01 * a22 - a12 * a02) +
         a02 * (a01 * a12 - a11 * a02);
}

struct Scratch {
  std::vector<Vec3> points;
  std::vector<double> weights;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

// Entropy of the union of members of two neighbourhoods (either may be empty).
double union_entropy(const SpatialIndex& a, const std::vector<std::size_t>& ia,
                     const SpatialIndex* b, const std::vector<std::size_t>* ib) {
  thread_local std::vector<Vec3> gathered;
  gathered.clear();
  for (std::size_t i : ia) gathered.push_back(a.point(i));
  if (b != nullptr) {
    for (std::size_t i : *ib) gathered.push_back(b->point(i));
  }
  return point_entropy(gathered);
}

// q values for the points of `own` against `other`. `own_h` supplies cached
// own-cloud entropies when non-null.
void q_for_cloud(const SpatialIndex& own, const SpatialIndex& other, double r,
                 const std::vector<double>* own_h, std::span<double> out) {
  std::vector<std::size_t> own_members;
  std::vector<std::size_t> other_members;
  for (std::size_t i = 0; i < own.size(); ++i) {
    const Vec3& p = own.point(i);
    other.radius_search(p, r, other_members);
    if (other_members.empty()) {
      out[i] = 0.0;
      continue;
    }
    own.radius_search(p, r, own_members);
    const double joint = union_entropy(own, own_members, &other, &other_members);
    const double alone =
        own_h != nullptr ? (*own_h)[i] : union_entropy(own, own_members, nullptr, nullptr);
    out[i] = joint - alone;
  }
}

}  // namespace

Mat3 covariance(std::span<const Vec3> points, CovarianceNormalization normalization) {
  if (points.empty()) throw ValidationError("covariance of an empty point set");
  const auto n = static_cast<double>(points.size());
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= n;
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    cov.noalias() += d * d.transpose();
  }
  const double denom = normalization == CovarianceNormalization::population ? n : n - 1.0;
  if (denom <= 0.0) return Mat3::Zero();
  return cov / denom;
}

double point_entropy(std::span<const Vec3> neighborhood) {
  if (neighborhood.size() <= 3) return 0.0;

  Scratch& s = scratch();
  s.points.assign(neighborhood.begin(), neighborhood.end());
  std::sort(s.points.begin(), s.points.end(), lex_less);
  s.weights.clear();
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (distinct > 0 && s.points[i] == s.points[distinct - 1]) {
      s.weights[distinct - 1] += 1.0;
    } else {
      s.points[distinct++] = s.points[i];
      s.weights.push_back(1.0);
    }
  }
  if (distinct <= 3) return 0.0;

  double total = 0.0, sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::size_t i = 0; i < distinct; ++i) {
    const double w = s.weights[i];
    total += w;
    sx += w * s.points[i].x();
    sy += w * s.points[i].y();
    sz += w * s.points[i].z();
  }
  const double mx = sx / total, my = sy / total, mz = sz / total;
  double cxx = 0.0, cxy = 0.0, cxz = 0.0, cyy = 0.0, cyz = 0.0, czz = 0.0;
  for (std::size_t i = 0; i < distinct; ++i) {
    const double w = s.weights[i];
    const double dx = s.points[i].x() - mx;
    const double dy = s.points[i].y() - my;
    const double dz = s.points[i].z() - mz;
    cxx += w * dx * dx;
    cxy += w * dx * dy;
    cxz += w * dx * dz;
    cyy += w * dy * dy;
    cyz += w * dy * dz;
    czz += w * dz * dz;
  }
  const double det =
      det3(cxx / total, cxy / total, cxz / total, cyy / total, cyz / total, czz / total);
  // Roundoff can push the determinant of a flat neighbourhood slightly negative.
  if (!(det > 0.0)) return 0.0;
  return 0.5 * std::log1p(kGaussianScale * det);
}

EntropyParams EntropyParams::for_pair(const PointCloud& c1, const PointCloud& c2, double a) {
  EntropyParams params{a, a * weighted_r4th(c1, c2)};
  params.validate();
  return params;
}

void EntropyParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("radius multiplier a must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ValidationError("search radius must be positive");
  }
}

EntropyProfile cloud_entropy(const PointCloud& cloud, const SpatialIndex& index, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("search radius must be positive");
  if (index.size() != cloud.size()) throw ValidationError("index does not match cloud");
  EntropyProfile profile;
  profile.radius = r;
  profile.h.resize(cloud.size());
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    index.radius_search(cloud[i], r, members);
    profile.h[i] = union_entropy(index, members, nullptr, nullptr);
  }
  profile.total = compensated_sum(profile.h);
  return profile;
}

double r4th_mean(const SpatialIndex& index) {
  constexpr std::size_t kNeighbor = 4;
  if (index.size() < kNeighbor + 1) {
    throw ValidationError("r_4th needs at least 5 points, cloud has " + std::to_string(index.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) sum += index.kth_neighbor_distance(i, kNeighbor);
  return sum / static_cast<double>(index.size());
}

double r4th_mean(const PointCloud& cloud) {
  if (cloud.size() < 5) {
    throw ValidationError("r_4th needs at least 5 points, cloud has " + std::to_string(cloud.size()));
  }
  return r4th_mean(SpatialIndex(cloud));
}

double weighted_r4th(double r4th_1, std::size_t n1, double r4th_2, std::size_t n2) {
  const auto total = static_cast<double>(n1 + n2);
  return r4th_1 * (static_cast<double>(n2) / total) + r4th_2 * (static_cast<double>(n1) / total);
}

double weighted_r4th(const PointCloud& c1, const PointCloud& c2) {
  return weighted_r4th(r4th_mean(c1), c1.size(), r4th_mean(c2), c2.size());
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

QVector q_vector(const SpatialIndex& index1, const SpatialIndex& index2, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("search radius must be positive");
  QVector out;
  out.split = index1.size();
  out.q.resize(index1.size() + index2.size());
  std::span<double> q(out.q);
  q_for_cloud(index1, index2, r, nullptr, q.first(out.split));
  q_for_cloud(index2, index1, r, nullptr, q.subspan(out.split));
  out.total_first = compensated_sum(q.first(out.split));
  out.total_second = compensated_sum(q.subspan(out.split));
  return out;
}

QVector q_vector(const PointCloud& c1, const PointCloud& c2, double r) {
  return q_vector(SpatialIndex(c1), SpatialIndex(c2), r);
}

double q_tot(const PointCloud& c1, const PointCloud& c2, const EntropyParams& params) {
  params.validate();
  return q_vector(c1, c2, params.radius).total();
}

QtotEvaluator::QtotEvaluator(const PointCloud& fixed, double radius)
    : fixed_index_(fixed), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ValidationError("search radius must be positive");
  }
  fixed_own_h_ = cloud_entropy(fixed, fixed_index_, radius).h;
}

QVector QtotEvaluator::q_vector(const SpatialIndex& moving_index) const {
  QVector out;
  out.split = fixed_index_.size();
  out.q.resize(fixed_index_.size() + moving_index.size());
  std::span<double> q(out.q);
  q_for_cloud(fixed_index_, moving_index, radius_, &fixed_own_h_, q.first(out.split));
  q_for_cloud(moving_index, fixed_index_, radius_, nullptr, q.subspan(out.split));
  out.total_first = compensated_sum(q.first(out.split));
  out.total_second = compensated_sum(q.subspan(out.split));
  return out;
}

}  // namespace idem
