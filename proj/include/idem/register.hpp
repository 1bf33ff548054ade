#pragma once

#include "idem/entropy.hpp"
#include "idem/geometry.hpp"
#include "idem/pattern_search.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace idem {

/// (tx, ty, tz, rx, ry, rz): translation in cloud units, rotation angles in degrees.
using Pose = std::array<double, 6>;

/// x ↦ R(rx, ry, rz) (x − center) + center + t, with R = Rx · Ry · Rz.
RigidTransform pose_transform(const Pose& pose, const Vec3& center);

/// Axis-aligned region in pose space.
struct PoseBounds {
  Pose lower{};
  Pose upper{};

  bool contains(const Pose& pose) const;
};

enum class OptimizerKind { pattern_search, nelder_mead };
OptimizerKind parse_optimizer(std::string_view name);
std::string_view to_string(OptimizerKind kind);

/// Lattices of the 1D q_tot profiles used to find the ROI automatically.
struct AutoRoiOptions {
  double translation_range = 15.0;
  double translation_step = 1.0;
  double rotation_range = 45.0;
  double rotation_step = 1.0;
};

struct RegistrationConfig {
  double a = 1.0;
  std::optional<PoseBounds> roi;  // empty: found automatically
  AutoRoiOptions auto_roi;
  OptimizerKind optimizer = OptimizerKind::pattern_search;
  std::size_t max_iters = 1000;    // optimizer polls
  double tol_q = 1e-12;            // q_tot gains at or below this are not improvements
  double tol_step = 1e-3;          // converged when every step is below this
  double translation_step = 0.25;  // initial optimizer steps
  double rotation_step = 0.5;      // degrees
  Pose initial{};

  void validate() const;
};

struct RegistrationResult {
  RigidTransform transform;  // maps the moving cloud onto the fixed one
  Pose pose{};
  double q_idem = 0.0;
  double q_start = 0.0;
  std::size_t iterations = 0;  // accepted optimizer moves
  std::size_t evaluations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;  // pose parameters and q_tot per accepted move
  PoseBounds roi;
  Vec3 center = Vec3::Zero();  // rotation centre: centroid of the moving cloud
  double radius = 0.0;
};

/// ROI around `start`: for each pose coordinate, a 1D q_tot profile through
/// `start` and locate_peaks_1d on it. Throws NoRoiError if any profile lacks a
/// peak on either side.
PoseBounds auto_roi(const QtotEvaluator& evaluator, const PointCloud& moving, const Pose& start,
                    const Vec3& center, const AutoRoiOptions& options);

/// Minimises q_tot over the six pose parameters inside the ROI, starting from
/// config.initial. r = a · weighted_r4th(fixed, moving) is computed once.
///
/// Throws PreAlignmentRequiredError when the start lies outside a supplied ROI
/// or no ROI can be found around it. Running out of iterations is not an
/// error: the result then has converged == false.
RegistrationResult register_pair(const PointCloud& fixed, const PointCloud& moving,
                                 const RegistrationConfig& config);

}  // namespace idem
