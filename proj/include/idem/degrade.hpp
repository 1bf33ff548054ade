#pragma once

#include "idem/geometry.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace idem {

/// Uniform random subset of round(fraction · n) points without replacement, in
/// original order. 0 < fraction <= 1; fewer than 5 surviving points is a
/// ValidationError (r_4th would be undefined).
PointCloud downsample(const PointCloud& cloud, double fraction, std::uint64_t seed);

/// Appends round(noise_fraction · n) points drawn uniformly in the axis-aligned
/// bounding box. The original points come first, unchanged.
PointCloud add_bbox_noise(const PointCloud& cloud, double noise_fraction, std::uint64_t seed);

/// Removes n_seeds · neighbors_per_seed points: for each randomly chosen seed
/// point, the `neighbors_per_seed` surviving points nearest to it (the seed
/// itself first while it survives). Overlapping holes keep eating the nearest
/// survivors, so the removed count is always exact.
PointCloud punch_holes(const PointCloud& cloud, std::size_t n_seeds, std::size_t neighbors_per_seed,
                       std::uint64_t seed);

enum class KeepSide {
  below,  // normal · p <= offset
  above,  // normal · p >= offset
};

/// Keeps the points on one side of the plane normal · p = offset, boundary
/// included. `normal` is normalised internally. Empty result is a ValidationError.
PointCloud partial_crop(const PointCloud& cloud, const Vec3& normal, double offset, KeepSide side);

/// Plane offset along `normal` that keeps exactly `count` points on `side`
/// (ties at the cut value may keep more). Used to derive crop parameters.
double crop_offset_for_count(const PointCloud& cloud, const Vec3& normal, std::size_t count,
                             KeepSide side);

/// Adds independent N(0, sigma²) offsets to every coordinate.
PointCloud gaussian_perturb(const PointCloud& cloud, double sigma, std::uint64_t seed);

enum class DegradationKind { downsample, bbox_noise, holes, partial_crop, gaussian_perturb };

DegradationKind parse_degradation_kind(std::string_view name);
std::string_view to_string(DegradationKind kind);
KeepSide parse_keep_side(std::string_view name);

/// One degradation step with its parameters; only the fields of `kind` matter.
struct DegradationSpec {
  DegradationKind kind = DegradationKind::downsample;
  double fraction = 1.0;            // downsample: kept fraction; bbox-noise: added fraction
  std::size_t n_seeds = 1;          // holes
  std::size_t neighbors = 1;        // holes
  Vec3 normal = Vec3::UnitX();      // partial-crop
  double offset = 0.0;              // partial-crop
  KeepSide side = KeepSide::below;  // partial-crop
  double sigma = 0.0;               // gaussian-perturb
  std::uint64_t seed = 0;

  void validate() const;
  PointCloud apply(const PointCloud& cloud) const;
};

}  // namespace idem
