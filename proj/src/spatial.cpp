#include "idem/spatial.hpp"

#include "idem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

namespace idem {

namespace {

struct HitLess {
  bool operator()(const NeighborHit& a, const NeighborHit& b) const {
    return a.squared_distance < b.squared_distance ||
           (a.squared_distance == b.squared_distance && a.index < b.index);
  }
};

}  // namespace

SpatialIndex::SpatialIndex(std::span<const Vec3> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (points_.empty()) throw ValidationError("cannot index an empty point set");
  if (points_.size() > std::numeric_limits<std::int32_t>::max()) {
    throw ValidationError("point set too large for the spatial index");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
  build(0, static_cast<std::uint32_t>(points_.size()));
  ordered_.reserve(points_.size());
  for (std::uint32_t i : order_) ordered_.push_back(points_[i]);
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return id;

  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int dim = 0;
  (hi - lo).maxCoeff(&dim);
  if (hi[dim] == lo[dim]) return id;  // all coincident: keep as a leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return points_[a][dim] < points_[b][dim]; });
  const double split = points_[order_[mid]][dim];

  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.left = left;
  node.right = right;
  node.dim = static_cast<std::uint8_t>(dim);
  node.split = split;
  return id;
}

void SpatialIndex::radius_recurse(std::int32_t node_id, const Vec3& q, double rr,
                                  std::vector<std::size_t>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      if (squared_distance(ordered_[i], q) <= rr) out.push_back(order_[i]);
    }
    return;
  }
  const double diff = q[node.dim] - node.split;
  const std::int32_t near = diff <= 0.0 ? node.left : node.right;
  const std::int32_t far = diff <= 0.0 ? node.right : node.left;
  radius_recurse(near, q, rr, out);
  if (diff * diff <= rr) radius_recurse(far, q, rr, out);
}

void SpatialIndex::radius_search(const Vec3& query, double r, std::vector<std::size_t>& out) const {
  out.clear();
  radius_recurse(0, query, r * r, out);
}

Neighborhood SpatialIndex::radius_query(const Vec3& query, double r) const {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("search radius must be positive");
  Neighborhood nb{query, std::nullopt, {}};
  radius_search(query, r, nb.members);
  std::sort(nb.members.begin(), nb.members.end());
  return nb;
}

Neighborhood SpatialIndex::radius_query_at(std::size_t center, double r) const {
  if (center >= size()) throw ValidationError("point index out of range");
  Neighborhood nb = radius_query(points_[center], r);
  nb.center = center;
  return nb;
}

NeighborHit SpatialIndex::nearest(const Vec3& query) const {
  return k_nearest(query, 1).front();
}

std::vector<NeighborHit> SpatialIndex::k_nearest(const Vec3& query, std::size_t k,
                                                 std::optional<std::size_t> exclude) const {
  const std::size_t available = size() - (exclude && *exclude < size() ? 1 : 0);
  if (k == 0 || k > available) throw ValidationError("k out of range for k-nearest query");

  std::priority_queue<NeighborHit, std::vector<NeighborHit>, HitLess> heap;
  auto worst = [&]() {
    return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.top().squared_distance;
  };
  // Iterative descent with an explicit stack, nearest side first.
  std::vector<std::int32_t> stack{0};
  std::vector<double> bound{0.0};
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    const double lower = bound.back();
    stack.pop_back();
    bound.pop_back();
    if (lower > worst()) continue;
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        if (exclude && order_[i] == *exclude) continue;
        const NeighborHit hit{order_[i], squared_distance(ordered_[i], query)};
        if (heap.size() < k) {
          heap.push(hit);
        } else if (HitLess{}(hit, heap.top())) {
          heap.pop();
          heap.push(hit);
        }
      }
      continue;
    }
    const double diff = query[node.dim] - node.split;
    const std::int32_t near = diff <= 0.0 ? node.left : node.right;
    const std::int32_t far = diff <= 0.0 ? node.right : node.left;
    stack.push_back(far);
    bound.push_back(std::max(lower, diff * diff));
    stack.push_back(near);
    bound.push_back(lower);
  }
  std::vector<NeighborHit> hits;
  hits.reserve(heap.size());
  while (!heap.empty()) {
    hits.push_back(heap.top());
    heap.pop();
  }
  std::reverse(hits.begin(), hits.end());
  return hits;
}

double SpatialIndex::kth_neighbor_distance(std::size_t point_index, std::size_t k) const {
  if (point_index >= size()) throw ValidationError("point index out of range");
  if (k == 0 || k >= size()) {
    throw ValidationError("k = " + std::to_string(k) + " needs at least " + std::to_string(k + 1) +
                          " points, cloud has " + std::to_string(size()));
  }
  return std::sqrt(k_nearest(points_[point_index], k, point_index).back().squared_distance);
}

}  // namespace idem
