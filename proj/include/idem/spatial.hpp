#pragma once

#include "idem/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace idem {

/// dx² + dy² + dz² in that order. Every membership test in the library uses it.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Members of a fixed-radius neighbourhood. Indices refer to the indexed cloud.
struct Neighborhood {
  Vec3 query;
  std::optional<std::size_t> center;  // set when the query is one of the cloud's own points
  std::vector<std::size_t> members;   // ascending

  std::size_t k() const noexcept { return members.size(); }
};

struct NeighborHit {
  std::size_t index;
  double squared_distance;
};

/// Exact kd-tree over an immutable copy of a point set.
///
/// Membership is decided with the same floating-point expression everywhere:
/// a point p is within r of q iff squared_distance(p, q) <= r*r. Pruning uses lower bounds that are monotone under
/// rounding, so results equal a brute-force scan with that predicate bit for bit.
/// Concurrent queries on one index are safe.
class SpatialIndex {
 public:
  explicit SpatialIndex(std::span<const Vec3> points, std::size_t leaf_size = 8);
  explicit SpatialIndex(const PointCloud& cloud) : SpatialIndex(cloud.points()) {}

  std::size_t size() const noexcept { return points_.size(); }
  const Vec3& point(std::size_t i) const noexcept { return points_[i]; }
  std::span<const Vec3> points() const noexcept { return points_; }

  /// All points with |p − query| <= r (inclusive), ascending indices.
  /// Throws ValidationError for r <= 0.
  Neighborhood radius_query(const Vec3& query, double r) const;
  /// Neighbourhood of the cloud's own point `center`; the point itself is a member.
  Neighborhood radius_query_at(std::size_t center, double r) const;

  /// Allocation-free variant for hot loops: replaces `out` with the member
  /// indices in tree order (unsorted). No argument checks.
  void radius_search(const Vec3& query, double r, std::vector<std::size_t>& out) const;

  NeighborHit nearest(const Vec3& query) const;

  /// The k nearest points sorted by distance. `exclude` drops one index from
  /// consideration (used to skip the query point itself).
  std::vector<NeighborHit> k_nearest(const Vec3& query, std::size_t k,
                                     std::optional<std::size_t> exclude = std::nullopt) const;

  /// Distance from point `point_index` to its k-th nearest *other* point.
  /// Requires 1 <= k < size(); throws ValidationError otherwise.
  double kth_neighbor_distance(std::size_t point_index, std::size_t k) const;

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;  // -1 for leaves
    std::int32_t right = -1;
    std::uint8_t dim = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void radius_recurse(std::int32_t node, const Vec3& q, double rr,
                      std::vector<std::size_t>& out) const;

  std::vector<Vec3> points_;
  std::vector<Vec3> ordered_;            // points_ permuted into tree order
  std::vector<std::uint32_t> order_;     // ordered_[i] == points_[order_[i]]
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

}  // namespace idem
