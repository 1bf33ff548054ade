#include "idem/degrade.hpp"

#include "idem/errors.hpp"
#include "idem/random.hpp"
#include "idem/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace idem {

namespace {

std::string suffix(const PointCloud& cloud, const std::string& tag) {
  return cloud.label().empty() ? tag : cloud.label() + "_" + tag;
}

Vec3 unit_normal(const Vec3& normal) {
  const double n = normal.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("crop plane normal must be non-zero");
  return normal / n;
}

}  // namespace

PointCloud downsample(const PointCloud& cloud, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValidationError("downsample fraction must lie in (0, 1]");
  }
  const auto count =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cloud.size())));
  if (count < 5) {
    throw ValidationError("downsampling leaves " + std::to_string(count) +
                          " points; at least 5 are required");
  }
  if (count == cloud.size()) return cloud;
  RandomSource rng(seed);
  const auto keep = rng.sample_without_replacement(cloud.size(), count);
  std::vector<Vec3> out;
  out.reserve(count);
  for (std::size_t i : keep) out.push_back(cloud[i]);
  return PointCloud(std::move(out), suffix(cloud, "ds"));
}

PointCloud add_bbox_noise(const PointCloud& cloud, double noise_fraction, std::uint64_t seed) {
  if (!(noise_fraction >= 0.0) || !std::isfinite(noise_fraction)) {
    throw ValidationError("noise fraction must be non-negative");
  }
  const auto extra =
      static_cast<std::size_t>(std::llround(noise_fraction * static_cast<double>(cloud.size())));
  if (extra == 0) return cloud;
  const BoundingBox box = bounding_box(cloud.points());
  RandomSource rng(seed);
  std::vector<Vec3> out(cloud.points().begin(), cloud.points().end());
  out.reserve(cloud.size() + extra);
  for (std::size_t i = 0; i < extra; ++i) {
    const double x = rng.uniform(box.min.x(), box.max.x());
    const double y = rng.uniform(box.min.y(), box.max.y());
    const double z = rng.uniform(box.min.z(), box.max.z());
    out.emplace_back(x, y, z);
  }
  return PointCloud(std::move(out), suffix(cloud, "noise"));
}

PointCloud punch_holes(const PointCloud& cloud, std::size_t n_seeds, std::size_t neighbors_per_seed,
                       std::uint64_t seed) {
  if (n_seeds == 0 || neighbors_per_seed == 0) {
    throw ValidationError("holes need at least one seed and one point per seed");
  }
  const std::size_t n = cloud.size();
  if (n_seeds > n || n_seeds * neighbors_per_seed >= n) {
    throw ValidationError("holes would remove " + std::to_string(n_seeds * neighbors_per_seed) +
                          " of " + std::to_string(n) + " points");
  }
  RandomSource rng(seed);
  const auto seeds = rng.sample_without_replacement(n, n_seeds);
  const SpatialIndex index(cloud);
  std::vector<bool> removed(n, false);
  std::size_t removed_count = 0;
  for (std::size_t s : seeds) {
    std::size_t taken = 0;
    // Widen the k-NN query until enough survivors are found.
    std::size_t k = std::min(n, neighbors_per_seed + 1);
    while (taken < neighbors_per_seed) {
      const auto hits = index.k_nearest(cloud[s], k);
      taken = 0;
      std::vector<std::size_t> victims;
      for (const auto& hit : hits) {
        if (!removed[hit.index]) {
          victims.push_back(hit.index);
          if (++taken == neighbors_per_seed) break;
        }
      }
      if (taken == neighbors_per_seed) {
        for (std::size_t v : victims) removed[v] = true;
        removed_count += taken;
        break;
      }
      k = std::min(n, k * 2);
    }
  }
  std::vector<Vec3> out;
  out.reserve(n - removed_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.push_back(cloud[i]);
  }
  return PointCloud(std::move(out), suffix(cloud, "holes"));
}

PointCloud partial_crop(const PointCloud& cloud, const Vec3& normal, double offset, KeepSide side) {
  const Vec3 n = unit_normal(normal);
  if (!std::isfinite(offset)) throw ValidationError("crop offset must be finite");
  std::vector<Vec3> out;
  for (const Vec3& p : cloud.points()) {
    const double s = n.dot(p);
    if (side == KeepSide::below ? s <= offset : s >= offset) out.push_back(p);
  }
  if (out.empty()) throw ValidationError("crop plane leaves no points");
  return PointCloud(std::move(out), suffix(cloud, "crop"));
}

double crop_offset_for_count(const PointCloud& cloud, const Vec3& normal, std::size_t count,
                             KeepSide side) {
  if (count == 0 || count > cloud.size()) throw ValidationError("crop count out of range");
  const Vec3 n = unit_normal(normal);
  std::vector<double> s;
  s.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) s.push_back(n.dot(p));
  std::sort(s.begin(), s.end());
  return side == KeepSide::below ? s[count - 1] : s[s.size() - count];
}

PointCloud gaussian_perturb(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be non-negative");
  if (sigma == 0.0) return cloud;
  RandomSource rng(seed);
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) {
    const double dx = rng.normal();
    const double dy = rng.normal();
    const double dz = rng.normal();
    out.push_back(p + sigma * Vec3(dx, dy, dz));
  }
  return PointCloud(std::move(out), suffix(cloud, "perturbed"));
}

DegradationKind parse_degradation_kind(std::string_view name) {
  if (name == "downsample") return DegradationKind::downsample;
  if (name == "bbox-noise" || name == "noise") return DegradationKind::bbox_noise;
  if (name == "holes") return DegradationKind::holes;
  if (name == "partial-crop" || name == "crop") return DegradationKind::partial_crop;
  if (name == "gaussian-perturb" || name == "perturb") return DegradationKind::gaussian_perturb;
  throw ValidationError("unknown degradation kind '" + std::string(name) + "'");
}

std::string_view to_string(DegradationKind kind) {
  switch (kind) {
    case DegradationKind::downsample: return "downsample";
    case DegradationKind::bbox_noise: return "bbox-noise";
    case DegradationKind::holes: return "holes";
    case DegradationKind::partial_crop: return "partial-crop";
    case DegradationKind::gaussian_perturb: return "gaussian-perturb";
  }
  return "unknown";
}

KeepSide parse_keep_side(std::string_view name) {
  if (name == "below" || name == "-") return KeepSide::below;
  if (name == "above" || name == "+") return KeepSide::above;
  throw ValidationError("keep side must be 'below' or 'above'");
}

void DegradationSpec::validate() const {
  switch (kind) {
    case DegradationKind::downsample:
      if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("fraction must lie in (0, 1]");
      break;
    case DegradationKind::bbox_noise:
      if (!(fraction >= 0.0) || !std::isfinite(fraction)) {
        throw ValidationError("noise fraction must be non-negative");
      }
      break;
    case DegradationKind::holes:
      if (n_seeds < 1 || neighbors < 1) throw ValidationError("seeds and neighbors must be >= 1");
      break;
    case DegradationKind::partial_crop:
      unit_normal(normal);
      if (!std::isfinite(offset)) throw ValidationError("crop offset must be finite");
      break;
    case DegradationKind::gaussian_perturb:
      if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be >= 0");
      break;
  }
}

PointCloud DegradationSpec::apply(const PointCloud& cloud) const {
  validate();
  switch (kind) {
    case DegradationKind::downsample: return downsample(cloud, fraction, seed);
    case DegradationKind::bbox_noise: return add_bbox_noise(cloud, fraction, seed);
    case DegradationKind::holes: return punch_holes(cloud, n_seeds, neighbors, seed);
    case DegradationKind::partial_crop: return partial_crop(cloud, normal, offset, side);
    case DegradationKind::gaussian_perturb: return gaussian_perturb(cloud, sigma, seed);
  }
  throw ValidationError("unknown degradation kind");
}

}  // namespace idem
