#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace idem {

using Objective = std::function<double(const std::vector<double>&)>;

/// Box constraints; empty vectors mean unbounded.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  bool empty() const noexcept { return lower.empty(); }
  bool contains(const std::vector<double>& x) const;
  std::vector<double> clamp(std::vector<double> x) const;
};

struct OptimizerOptions {
  std::vector<double> initial_step;  // one per coordinate, all > 0
  double step_tolerance = 1e-3;      // converged once every step is below this
  double improvement_tolerance = 1e-12;  // gains at or below this do not count
  std::size_t max_iterations = 1000;
  Box bounds;

  void validate(std::size_t dimension) const;
};

struct TracePoint {
  std::size_t iteration = 0;
  std::vector<double> x;
  double value = 0.0;
};

struct OptimizerResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;   // accepted moves
  std::size_t polls = 0;        // iterations of the main loop (moves + shrinks)
  std::size_t evaluations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;  // start point, then every accepted move
};

enum class PollOutcome { accepted, shrunk };

/// One compass-search poll: tries x ± step_k along each coordinate in order
/// (+ before −), clamped to the box, and moves to the first point that
/// improves `fx` by more than the improvement tolerance. Without an
/// improvement every step is halved.
PollOutcome pattern_search_step(std::vector<double>& x, double& fx, std::vector<double>& step,
                                const Objective& f, const OptimizerOptions& options,
                                std::size_t& evaluations);

/// Repeats pattern_search_step until every step is below the step tolerance
/// (converged) or max_iterations polls have run.
OptimizerResult pattern_search(const Objective& f, std::vector<double> x0,
                               const OptimizerOptions& options);

/// Nelder–Mead simplex with the standard coefficients (1, 2, ½, ½). The initial
/// simplex offsets x0 by initial_step along each coordinate; vertices are
/// clamped to the box. Converged once the simplex extent along every
/// coordinate is below the step tolerance.
OptimizerResult nelder_mead(const Objective& f, std::vector<double> x0,
                            const OptimizerOptions& options);

}  // namespace idem
