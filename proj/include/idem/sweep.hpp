#pragma once

#include "idem/geometry.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace idem {

enum class Metric { qtot, rmse_12, rmse_21, chamfer, hausdorff };

inline constexpr std::array<Metric, 5> kAllMetrics = {Metric::qtot, Metric::rmse_12, Metric::rmse_21,
                                                      Metric::chamfer, Metric::hausdorff};

/// "qtot", "rmse-12", "rmse-21", "chamfer", "hausdorff".
std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);
/// Comma-separated list; "all" expands to every metric.
std::vector<Metric> parse_metric_list(std::string_view list);

enum class SweepKind { translate, rotate };

/// A lattice of poses of the moving cloud. Every swept axis uses the same
/// coordinates: k · step for k = −m..m with m = floor(range / step), so the
/// zero cell always exists. Translations are in cloud units, rotations in
/// degrees about the moving cloud's centroid (R = Rx · Ry · Rz).
struct SweepSpec {
  SweepKind kind = SweepKind::translate;
  std::vector<int> axes = {0, 1};  // 0 = X, 1 = Y, 2 = Z; one to three, distinct, ascending
  double range = 5.0;
  double step = 1.0;
  std::vector<Metric> metrics = {kAllMetrics.begin(), kAllMetrics.end()};
  double a = 1.0;

  /// Throws ValidationError on bad axes, non-positive range/step, range < step
  /// or an empty metric list.
  void validate() const;
  /// Lattice coordinates along one axis, ascending.
  std::vector<double> coordinates() const;
  std::size_t cells_per_axis() const;
  std::size_t cell_count() const;
  /// "translate-axis", "rotate-plane", ...
  std::string mode() const;
  bool has_metric(Metric metric) const;
};

/// Parses "translate-axis" .. "rotate-volume" into kind and the expected axis count.
void parse_sweep_mode(std::string_view mode, SweepKind& kind, std::size_t& axis_count);
/// "XY" → {0, 1}; order is normalised to ascending.
std::vector<int> parse_axes(std::string_view axes);
std::string axes_name(std::span<const int> axes);

/// Metric values over a sweep lattice.
///
/// Cells are stored flat with the first swept axis varying fastest:
/// flat = i0 + n·(i1 + n·i2).
struct SweepGrid {
  SweepSpec spec;
  std::vector<double> coordinates;          // per-axis lattice coordinates
  std::vector<std::vector<double>> layers;  // aligned with spec.metrics
  double radius = 0.0;                      // q_tot search radius used
  double r4th_fixed = 0.0;
  double r4th_moving = 0.0;
  double r4th_weighted = 0.0;
  std::size_t fixed_points = 0;
  std::size_t moving_points = 0;

  std::size_t dimensions() const noexcept { return spec.axes.size(); }
  std::size_t cells_per_axis() const noexcept { return coordinates.size(); }
  std::size_t cell_count() const noexcept;
  std::size_t zero_cell() const;
  /// Lattice indices (one per swept axis) of a flat cell.
  std::vector<std::size_t> cell_indices(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> indices) const;
  /// Pose coordinates of a cell, one per swept axis.
  std::vector<double> cell_position(std::size_t flat) const;
  /// Throws ValidationError if the metric was not evaluated.
  const std::vector<double>& layer(Metric metric) const;
};

/// Pose of the moving cloud for one cell. `center` is the rotation centre
/// (the moving cloud's centroid at ground truth).
RigidTransform cell_transform(const SweepSpec& spec, std::span<const double> position,
                              const Vec3& center);

/// Evaluates every requested metric at every cell with `moving` transformed by
/// the cell pose. q_tot uses r = a · weighted_r4th(fixed, moving), computed once.
/// Throws ValidationError if a value comes out NaN.
SweepGrid run_sweep(const PointCloud& fixed, const PointCloud& moving, const SweepSpec& spec);

struct ArgminResult {
  std::size_t cell = 0;
  std::vector<double> position;
  double value = 0.0;
  double error = 0.0;  // Euclidean distance from the zero cell, in sweep units
};

/// Smallest value of a layer. Ties go to the zero cell, then to the
/// lexicographically smallest lattice index tuple (first axis most significant).
ArgminResult argmin(const SweepGrid& grid, Metric metric);
double argmin_error(const SweepGrid& grid, Metric metric);

struct AxisBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Per swept axis, the q_tot peaks bracketing the zero cell.
struct RoiBounds {
  std::vector<int> axes;
  std::vector<AxisBounds> bounds;

  bool contains(std::span<const double> position) const;
};

/// Peak positions on either side of `zero_index` of a sampled 1D profile.
///
/// A peak is a strict local maximum in a 3-cell window; a plateau of equal
/// values counts as one peak, located at its cell nearest the zero index, and
/// must be bounded by lower values on both sides. On each side the largest
/// peak is taken (ties go to the one nearer zero). If the zero cell is itself
/// a peak and exactly one side has none, the zero cell bounds that side.
/// Throws NoRoiError when a side is left without a bound.
AxisBounds locate_peaks_1d(std::span<const double> coordinates, std::span<const double> values,
                           std::size_t zero_index);

/// All peaks of a 1D profile under the same rule, ascending. Plateaus are
/// reported at their cell nearest `reference`.
std::vector<std::size_t> local_maxima_1d(std::span<const double> values, std::size_t reference);

/// ROI of a grid's q_tot layer: locate_peaks_1d on the line through the zero
/// cell along each swept axis.
RoiBounds locate_roi(const SweepGrid& grid, Metric metric = Metric::qtot);

/// The values along one swept axis through the zero cell.
std::vector<double> axis_profile(const SweepGrid& grid, Metric metric, std::size_t axis_position);

}  // namespace idem
