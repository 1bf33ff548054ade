#include "idem/register.hpp"

#include "idem/errors.hpp"
#include "idem/spatial.hpp"
#include "idem/sweep.hpp"

#include <cmath>
#include <string>

namespace idem {

namespace {

constexpr const char* kPoseNames[] = {"tx", "ty", "tz", "rx", "ry", "rz"};

std::vector<double> to_vector(const Pose& p) { return {p.begin(), p.end()}; }

Pose to_pose(const std::vector<double>& v) {
  Pose p{};
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = v[i];
  return p;
}

double qtot_at(const QtotEvaluator& evaluator, const PointCloud& moving, const Pose& pose,
               const Vec3& center) {
  return evaluator(apply_transform(moving, pose_transform(pose, center)));
}

}  // namespace

RigidTransform pose_transform(const Pose& pose, const Vec3& center) {
  const RigidTransform rotation =
      rotation_about_point(center, euler_xyz_rotation(pose[3], pose[4], pose[5]));
  return RigidTransform::translation(Vec3(pose[0], pose[1], pose[2])) * rotation;
}

bool PoseBounds::contains(const Pose& pose) const {
  for (std::size_t i = 0; i < pose.size(); ++i) {
    if (pose[i] < lower[i] || pose[i] > upper[i]) return false;
  }
  return true;
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "pattern-search") return OptimizerKind::pattern_search;
  if (name == "nelder-mead" || name == "nelder-mead-6d") return OptimizerKind::nelder_mead;
  throw ValidationError("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::pattern_search ? "pattern-search" : "nelder-mead";
}

void RegistrationConfig::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("radius multiplier a must be positive");
  if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (!(tol_q > 0.0) || !(tol_step > 0.0)) throw ValidationError("tolerances must be positive");
  if (!(translation_step > 0.0) || !(rotation_step > 0.0)) {
    throw ValidationError("initial optimizer steps must be positive");
  }
  for (double v : initial) {
    if (!std::isfinite(v)) throw ValidationError("initial pose must be finite");
  }
  if (roi) {
    for (std::size_t i = 0; i < 6; ++i) {
      if (!(roi->lower[i] <= roi->upper[i])) throw ValidationError("ROI lower bound above upper");
    }
  }
  const auto& r = auto_roi;
  if (!(r.translation_range > 0.0) || !(r.translation_step > 0.0) || !(r.rotation_range > 0.0) ||
      !(r.rotation_step > 0.0)) {
    throw ValidationError("automatic ROI ranges and steps must be positive");
  }
}

PoseBounds auto_roi(const QtotEvaluator& evaluator, const PointCloud& moving, const Pose& start,
                    const Vec3& center, const AutoRoiOptions& options) {
  PoseBounds roi;
  for (std::size_t k = 0; k < 6; ++k) {
    SweepSpec lattice;
    lattice.axes = {0};
    lattice.range = k < 3 ? options.translation_range : options.rotation_range;
    lattice.step = k < 3 ? options.translation_step : options.rotation_step;
    lattice.validate();
    const auto offsets = lattice.coordinates();
    std::vector<double> profile(offsets.size());
    const auto n = static_cast<long long>(offsets.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
      Pose p = start;
      p[k] += offsets[static_cast<std::size_t>(i)];
      profile[static_cast<std::size_t>(i)] = qtot_at(evaluator, moving, p, center);
    }
    AxisBounds b;
    try {
      b = locate_peaks_1d(offsets, profile, offsets.size() / 2);
    } catch (const NoRoiError& e) {
      throw NoRoiError(std::string(kPoseNames[k]) + ": " + e.what());
    }
    roi.lower[k] = start[k] + b.lower;
    roi.upper[k] = start[k] + b.upper;
  }
  return roi;
}

RegistrationResult register_pair(const PointCloud& fixed, const PointCloud& moving,
                                 const RegistrationConfig& config) {
  config.validate();
  RegistrationResult result;
  result.center = centroid(moving);
  result.radius = config.a * weighted_r4th(fixed, moving);
  const QtotEvaluator evaluator(fixed, result.radius);

  if (config.roi) {
    result.roi = *config.roi;
    if (!result.roi.contains(config.initial)) {
      throw PreAlignmentRequiredError("initial pose lies outside the region of interest");
    }
  } else {
    try {
      result.roi = auto_roi(evaluator, moving, config.initial, result.center, config.auto_roi);
    } catch (const NoRoiError& e) {
      throw PreAlignmentRequiredError(std::string("no region of interest around the initial pose (") +
                                      e.what() + ")");
    }
  }

  OptimizerOptions options;
  options.initial_step = {config.translation_step, config.translation_step, config.translation_step,
                          config.rotation_step,    config.rotation_step,    config.rotation_step};
  options.step_tolerance = config.tol_step;
  options.improvement_tolerance = config.tol_q;
  options.max_iterations = config.max_iters;
  options.bounds.lower = to_vector(result.roi.lower);
  options.bounds.upper = to_vector(result.roi.upper);

  const Objective f = [&](const std::vector<double>& x) {
    return qtot_at(evaluator, moving, to_pose(x), result.center);
  };
  const OptimizerResult opt = config.optimizer == OptimizerKind::pattern_search
                                  ? pattern_search(f, to_vector(config.initial), options)
                                  : nelder_mead(f, to_vector(config.initial), options);

  result.pose = to_pose(opt.x);
  result.transform = pose_transform(result.pose, result.center);
  result.q_idem = opt.value;
  result.q_start = opt.trace.front().value;
  result.iterations = opt.iterations;
  result.evaluations = opt.evaluations;
  result.converged = opt.converged;
  result.trace = opt.trace;
  return result;
}

}  // namespace idem
