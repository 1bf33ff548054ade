#include "idem/sweep.hpp"

#include "idem/baselines.hpp"
#include "idem/entropy.hpp"
#include "idem/errors.hpp"
#include "idem/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <string>

namespace idem {

namespace {

constexpr std::size_t kMaxCells = 50'000'000;

std::size_t half_width(double range, double step) {
  // The epsilon keeps ranges that are exact multiples of the step (5 / 0.25)
  // from losing their last cell to rounding.
  return static_cast<std::size_t>(std::floor(range / step + 1e-9));
}

double evaluate(Metric metric, const SpatialIndex& fixed, const SpatialIndex& moving,
                const std::optional<QtotEvaluator>& qtot) {
  switch (metric) {
    case Metric::qtot: return (*qtot)(moving);
    case Metric::rmse_12: return rmse_directed(fixed, moving);
    case Metric::rmse_21: return rmse_directed(moving, fixed);
    case Metric::chamfer: return chamfer(fixed, moving);
    case Metric::hausdorff: return hausdorff(fixed, moving);
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::qtot: return "qtot";
    case Metric::rmse_12: return "rmse-12";
    case Metric::rmse_21: return "rmse-21";
    case Metric::chamfer: return "chamfer";
    case Metric::hausdorff: return "hausdorff";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

std::vector<Metric> parse_metric_list(std::string_view list) {
  if (list == "all") return {kAllMetrics.begin(), kAllMetrics.end()};
  std::vector<Metric> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const std::string_view item = list.substr(pos, comma - pos);
    if (!item.empty()) {
      const Metric m = parse_metric(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw ValidationError("metric list is empty");
  return out;
}

void SweepSpec::validate() const {
  if (axes.empty() || axes.size() > 3) throw ValidationError("a sweep needs one to three axes");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] < 0 || axes[i] > 2) throw ValidationError("sweep axis must be X, Y or Z");
    if (i > 0 && axes[i] <= axes[i - 1]) {
      throw ValidationError("sweep axes must be distinct and ascending");
    }
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("sweep step must be positive");
  if (!(range > 0.0) || !std::isfinite(range)) throw ValidationError("sweep range must be positive");
  if (half_width(range, step) == 0) throw ValidationError("sweep range must be at least one step");
  if (metrics.empty()) throw ValidationError("sweep needs at least one metric");
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("radius multiplier a must be positive");
  double cells = 1.0;
  for (std::size_t i = 0; i < axes.size(); ++i) cells *= static_cast<double>(cells_per_axis());
  if (cells > static_cast<double>(kMaxCells)) {
    throw ValidationError("sweep lattice has too many cells (" + std::to_string(cells) + ")");
  }
}

std::vector<double> SweepSpec::coordinates() const {
  const std::size_t m = half_width(range, step);
  std::vector<double> c(2 * m + 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = (static_cast<double>(i) - static_cast<double>(m)) * step;
  }
  return c;
}

std::size_t SweepSpec::cells_per_axis() const { return 2 * half_width(range, step) + 1; }

std::size_t SweepSpec::cell_count() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < axes.size(); ++i) n *= cells_per_axis();
  return n;
}

std::string SweepSpec::mode() const {
  static constexpr const char* kShape[] = {"axis", "plane", "volume"};
  const std::string base = kind == SweepKind::translate ? "translate-" : "rotate-";
  return base + kShape[std::clamp<std::size_t>(axes.size(), 1, 3) - 1];
}

bool SweepSpec::has_metric(Metric metric) const {
  return std::find(metrics.begin(), metrics.end(), metric) != metrics.end();
}

void parse_sweep_mode(std::string_view mode, SweepKind& kind, std::size_t& axis_count) {
  std::string_view shape;
  if (mode.starts_with("translate-")) {
    kind = SweepKind::translate;
    shape = mode.substr(10);
  } else if (mode.starts_with("rotate-")) {
    kind = SweepKind::rotate;
    shape = mode.substr(7);
  } else {
    throw ValidationError("unknown sweep mode '" + std::string(mode) + "'");
  }
  if (shape == "axis") {
    axis_count = 1;
  } else if (shape == "plane") {
    axis_count = 2;
  } else if (shape == "volume") {
    axis_count = 3;
  } else {
    throw ValidationError("unknown sweep mode '" + std::string(mode) + "'");
  }
}

std::vector<int> parse_axes(std::string_view axes) {
  std::vector<int> out;
  for (char c : axes) {
    int axis = -1;
    if (c == 'x' || c == 'X') axis = 0;
    if (c == 'y' || c == 'Y') axis = 1;
    if (c == 'z' || c == 'Z') axis = 2;
    if (axis < 0) throw ValidationError("unknown axis '" + std::string(1, c) + "'");
    if (std::find(out.begin(), out.end(), axis) != out.end()) {
      throw ValidationError("axis '" + std::string(1, c) + "' given twice");
    }
    out.push_back(axis);
  }
  if (out.empty()) throw ValidationError("no axes given");
  std::sort(out.begin(), out.end());
  return out;
}

std::string axes_name(std::span<const int> axes) {
  std::string out;
  for (int a : axes) out.push_back("XYZ"[a]);
  return out;
}

std::size_t SweepGrid::cell_count() const noexcept {
  std::size_t n = 1;
  for (std::size_t i = 0; i < dimensions(); ++i) n *= cells_per_axis();
  return n;
}

std::size_t SweepGrid::zero_cell() const {
  const std::vector<std::size_t> mid(dimensions(), cells_per_axis() / 2);
  return flat_index(mid);
}

std::vector<std::size_t> SweepGrid::cell_indices(std::size_t flat) const {
  std::vector<std::size_t> idx(dimensions());
  for (auto& i : idx) {
    i = flat % cells_per_axis();
    flat /= cells_per_axis();
  }
  return idx;
}

std::size_t SweepGrid::flat_index(std::span<const std::size_t> indices) const {
  std::size_t flat = 0;
  for (std::size_t k = indices.size(); k-- > 0;) flat = flat * cells_per_axis() + indices[k];
  return flat;
}

std::vector<double> SweepGrid::cell_position(std::size_t flat) const {
  const auto idx = cell_indices(flat);
  std::vector<double> pos(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) pos[k] = coordinates[idx[k]];
  return pos;
}

const std::vector<double>& SweepGrid::layer(Metric metric) const {
  for (std::size_t i = 0; i < spec.metrics.size(); ++i) {
    if (spec.metrics[i] == metric) return layers[i];
  }
  throw ValidationError("metric '" + std::string(to_string(metric)) + "' was not swept");
}

RigidTransform cell_transform(const SweepSpec& spec, std::span<const double> position,
                              const Vec3& center) {
  Vec3 v = Vec3::Zero();
  for (std::size_t k = 0; k < spec.axes.size(); ++k) v[spec.axes[k]] = position[k];
  if (spec.kind == SweepKind::translate) return RigidTransform::translation(v);
  return rotation_about_point(center, euler_xyz_rotation(v.x(), v.y(), v.z()));
}

SweepGrid run_sweep(const PointCloud& fixed, const PointCloud& moving, const SweepSpec& spec) {
  spec.validate();
  SweepGrid grid;
  grid.spec = spec;
  grid.coordinates = spec.coordinates();
  grid.fixed_points = fixed.size();
  grid.moving_points = moving.size();

  const SpatialIndex fixed_index(fixed);
  grid.r4th_fixed = r4th_mean(fixed_index);
  grid.r4th_moving = r4th_mean(SpatialIndex(moving));
  grid.r4th_weighted = weighted_r4th(grid.r4th_fixed, fixed.size(), grid.r4th_moving, moving.size());
  grid.radius = spec.a * grid.r4th_weighted;

  std::optional<QtotEvaluator> qtot;
  if (spec.has_metric(Metric::qtot)) qtot.emplace(fixed, grid.radius);

  const std::size_t cells = grid.cell_count();
  grid.layers.assign(spec.metrics.size(), std::vector<double>(cells, 0.0));
  const Vec3 center = centroid(moving);

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n_cells = static_cast<long long>(cells);
#pragma omp parallel for schedule(dynamic)
  for (long long c = 0; c < n_cells; ++c) {
    try {
      const auto cell = static_cast<std::size_t>(c);
      const auto pos = grid.cell_position(cell);
      const SpatialIndex moved(apply_transform(moving, cell_transform(spec, pos, center)));
      for (std::size_t m = 0; m < spec.metrics.size(); ++m) {
        grid.layers[m][cell] = evaluate(spec.metrics[m], fixed_index, moved, qtot);
      }
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t m = 0; m < spec.metrics.size(); ++m) {
    for (double v : grid.layers[m]) {
      if (std::isnan(v)) {
        throw ValidationError("metric '" + std::string(to_string(spec.metrics[m])) +
                              "' produced NaN");
      }
    }
  }
  return grid;
}

ArgminResult argmin(const SweepGrid& grid, Metric metric) {
  const auto& values = grid.layer(metric);
  const double best = *std::min_element(values.begin(), values.end());
  std::size_t chosen = grid.zero_cell();
  if (values[chosen] != best) {
    std::optional<std::vector<std::size_t>> chosen_idx;
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (values[c] != best) continue;
      auto idx = grid.cell_indices(c);
      if (!chosen_idx || idx < *chosen_idx) {
        chosen_idx = std::move(idx);
        chosen = c;
      }
    }
  }
  ArgminResult out;
  out.cell = chosen;
  out.position = grid.cell_position(chosen);
  out.value = values[chosen];
  double sq = 0.0;
  for (double p : out.position) sq += p * p;
  out.error = std::sqrt(sq);
  return out;
}

double argmin_error(const SweepGrid& grid, Metric metric) { return argmin(grid, metric).error; }

bool RoiBounds::contains(std::span<const double> position) const {
  if (position.size() != bounds.size()) return false;
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (position[k] < bounds[k].lower || position[k] > bounds[k].upper) return false;
  }
  return true;
}

std::vector<std::size_t> local_maxima_1d(std::span<const double> values, std::size_t reference) {
  std::vector<std::size_t> peaks;
  const std::size_t n = values.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(values[i] > values[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    if (j + 1 < n && values[j + 1] < values[i]) {
      std::size_t pick = i;
      if (reference > j) {
        pick = j;
      } else if (reference >= i) {
        pick = reference;
      }
      peaks.push_back(pick);
    }
    i = j + 1;
  }
  return peaks;
}

AxisBounds locate_peaks_1d(std::span<const double> coordinates, std::span<const double> values,
                           std::size_t zero_index) {
  if (coordinates.size() != values.size() || zero_index >= values.size()) {
    throw ValidationError("profile coordinates and values do not match");
  }
  for (double v : values) {
    if (std::isnan(v)) throw ValidationError("profile contains NaN");
  }
  std::optional<std::size_t> lower;
  std::optional<std::size_t> upper;
  bool reference_is_peak = false;
  for (std::size_t p : local_maxima_1d(values, zero_index)) {
    if (p < zero_index) {
      // Scanning upwards, ">=" lets the tie go to the peak nearer zero.
      if (!lower || values[p] >= values[*lower]) lower = p;
    } else if (p > zero_index) {
      if (!upper || values[p] > values[*upper]) upper = p;
    } else {
      reference_is_peak = true;
    }
  }
  // A reference sitting on one crest bounds that side itself.
  if (reference_is_peak && lower.has_value() != upper.has_value()) {
    (lower ? upper : lower) = zero_index;
  }
  if (!lower || !upper) {
    throw NoRoiError(std::string("no q_tot peak on the ") + (!lower ? "negative" : "positive") +
                     " side of the reference pose; the clouds may be too dissimilar or the sweep "
                     "range too small");
  }
  return {coordinates[*lower], coordinates[*upper]};
}

std::vector<double> axis_profile(const SweepGrid& grid, Metric metric, std::size_t axis_position) {
  if (axis_position >= grid.dimensions()) throw ValidationError("axis position out of range");
  const auto& values = grid.layer(metric);
  std::vector<std::size_t> idx(grid.dimensions(), grid.cells_per_axis() / 2);
  std::vector<double> out(grid.cells_per_axis());
  for (std::size_t i = 0; i < out.size(); ++i) {
    idx[axis_position] = i;
    out[i] = values[grid.flat_index(idx)];
  }
  return out;
}

RoiBounds locate_roi(const SweepGrid& grid, Metric metric) {
  RoiBounds roi;
  roi.axes = grid.spec.axes;
  for (std::size_t k = 0; k < grid.dimensions(); ++k) {
    const auto profile = axis_profile(grid, metric, k);
    roi.bounds.push_back(locate_peaks_1d(grid.coordinates, profile, grid.cells_per_axis() / 2));
  }
  return roi;
}

}  // namespace idem
