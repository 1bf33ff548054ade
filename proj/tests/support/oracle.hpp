#pragma once

// Brute-force reference implementations. No spatial index, no shared code
// with the library beyond the point type: O(n²) scans, long double
// accumulation, covariance by explicit two-pass sums and determinant by
// cofactor expansion.

#include "idem/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <set>
#include <tuple>
#include <vector>

namespace idem::oracle {

using Points = std::vector<Vec3>;
using Matrix = std::array<std::array<long double, 3>, 3>;

inline Points points_of(const PointCloud& c) { return {c.points().begin(), c.points().end()}; }

// Same membership expression as the library contract: dx² + dy² + dz² <= r².
inline bool within(const Vec3& a, const Vec3& b, double r) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz <= r * r;
}

inline long double distance(const Vec3& a, const Vec3& b) {
  const long double dx = static_cast<long double>(a.x()) - b.x();
  const long double dy = static_cast<long double>(a.y()) - b.y();
  const long double dz = static_cast<long double>(a.z()) - b.z();
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline std::vector<std::size_t> radius_scan(const Points& cloud, const Vec3& q, double r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (within(cloud[i], q, r)) out.push_back(i);
  }
  return out;
}

inline Matrix covariance(const Points& pts, bool sample = false) {
  Matrix c{};
  const std::size_t k = pts.size();
  if (k == 0) return c;
  long double mean[3] = {0, 0, 0};
  for (const auto& p : pts) {
    for (int d = 0; d < 3; ++d) mean[d] += p[d];
  }
  for (auto& m : mean) m /= static_cast<long double>(k);
  for (const auto& p : pts) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) c[i][j] += (p[i] - mean[i]) * (p[j] - mean[j]);
    }
  }
  const long double denom = sample ? static_cast<long double>(k) - 1 : static_cast<long double>(k);
  if (denom <= 0) return Matrix{};
  for (auto& row : c) {
    for (auto& v : row) v /= denom;
  }
  return c;
}

inline long double determinant(const Matrix& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline std::size_t distinct_count(const Points& pts) {
  std::set<std::tuple<double, double, double>> s;
  for (const auto& p : pts) s.emplace(p.x(), p.y(), p.z());
  return s.size();
}

// ½ ln(1 + (2πe)³ det Σ); zero for three or fewer distinct points.
inline double entropy(const Points& pts) {
  if (distinct_count(pts) <= 3) return 0.0;
  const long double det = determinant(covariance(pts));
  if (!(det > 0)) return 0.0;
  const long double scale = std::pow(2.0L * std::numbers::pi_v<long double> * std::numbers::e_v<long double>, 3);
  return static_cast<double>(0.5L * std::log1p(scale * det));
}

inline Points gather(const Points& cloud, const std::vector<std::size_t>& idx) {
  Points out;
  for (auto i : idx) out.push_back(cloud[i]);
  return out;
}

inline std::vector<double> cloud_entropy(const Points& cloud, double r) {
  std::vector<double> h;
  for (const auto& p : cloud) h.push_back(entropy(gather(cloud, radius_scan(cloud, p, r))));
  return h;
}

// q_i = h(joint neighbourhood) − h(own-cloud neighbourhood), P1 entries first.
inline std::vector<double> q_vector(const Points& p1, const Points& p2, double r) {
  Points joint = p1;
  joint.insert(joint.end(), p2.begin(), p2.end());
  std::vector<double> q;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    const Points& own = i < p1.size() ? p1 : p2;
    const double hj = entropy(gather(joint, radius_scan(joint, joint[i], r)));
    const double ho = entropy(gather(own, radius_scan(own, joint[i], r)));
    q.push_back(hj - ho);
  }
  return q;
}

inline double q_tot(const Points& p1, const Points& p2, double r) {
  long double s = 0;
  for (double v : q_vector(p1, p2, r)) s += v;
  return static_cast<double>(s);
}

inline double kth_distance(const Points& cloud, std::size_t i, std::size_t k) {
  std::vector<long double> d;
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    if (j != i) d.push_back(distance(cloud[i], cloud[j]));
  }
  std::sort(d.begin(), d.end());
  return static_cast<double>(d[k - 1]);
}

inline double r4th(const Points& cloud) {
  long double s = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) s += kth_distance(cloud, i, 4);
  return static_cast<double>(s / cloud.size());
}

inline long double nearest(const Vec3& p, const Points& target) {
  long double best = std::numeric_limits<long double>::infinity();
  for (const auto& t : target) best = std::min(best, distance(p, t));
  return best;
}

inline double rmse(const Points& source, const Points& target) {
  long double s = 0;
  for (const auto& p : source) {
    const long double d = nearest(p, target);
    s += d * d;
  }
  return static_cast<double>(std::sqrt(s / source.size()));
}

inline double chamfer(const Points& a, const Points& b) {
  long double sa = 0, sb = 0;
  for (const auto& p : a) sa += nearest(p, b);
  for (const auto& p : b) sb += nearest(p, a);
  return static_cast<double>(0.5L * (sa / a.size() + sb / b.size()));
}

inline double hausdorff(const Points& a, const Points& b) {
  long double h = 0;
  for (const auto& p : a) h = std::max(h, nearest(p, b));
  for (const auto& p : b) h = std::max(h, nearest(p, a));
  return static_cast<double>(h);
}

}  // namespace idem::oracle
