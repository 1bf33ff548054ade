#include "idem/pattern_search.hpp"

#include "idem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace idem {

namespace {

bool all_below(const std::vector<double>& step, double tol) {
  return std::all_of(step.begin(), step.end(), [tol](double s) { return s < tol; });
}

}  // namespace

bool Box::contains(const std::vector<double>& x) const {
  if (empty()) return true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

std::vector<double> Box::clamp(std::vector<double> x) const {
  if (empty()) return x;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  return x;
}

void OptimizerOptions::validate(std::size_t dimension) const {
  if (dimension == 0) throw ValidationError("optimizer needs at least one coordinate");
  if (initial_step.size() != dimension) throw ValidationError("one initial step per coordinate");
  for (double s : initial_step) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("initial steps must be positive");
  }
  if (!(step_tolerance > 0.0)) throw ValidationError("step tolerance must be positive");
  if (!(improvement_tolerance >= 0.0)) throw ValidationError("improvement tolerance must be >= 0");
  if (max_iterations < 1) throw ValidationError("max iterations must be >= 1");
  if (!bounds.empty()) {
    if (bounds.lower.size() != dimension || bounds.upper.size() != dimension) {
      throw ValidationError("bounds must have one entry per coordinate");
    }
    for (std::size_t i = 0; i < dimension; ++i) {
      if (!(bounds.lower[i] <= bounds.upper[i])) throw ValidationError("empty bound interval");
    }
  }
}

PollOutcome pattern_search_step(std::vector<double>& x, double& fx, std::vector<double>& step,
                                const Objective& f, const OptimizerOptions& options,
                                std::size_t& evaluations) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> trial = x;
      trial[k] += sign * step[k];
      trial = options.bounds.clamp(std::move(trial));
      if (trial[k] == x[k]) continue;  // pinned against a bound
      const double ft = f(trial);
      ++evaluations;
      if (ft < fx - options.improvement_tolerance) {
        x = std::move(trial);
        fx = ft;
        return PollOutcome::accepted;
      }
    }
  }
  for (double& s : step) s *= 0.5;
  return PollOutcome::shrunk;
}

OptimizerResult pattern_search(const Objective& f, std::vector<double> x0,
                               const OptimizerOptions& options) {
  options.validate(x0.size());
  OptimizerResult result;
  result.x = options.bounds.clamp(std::move(x0));
  result.value = f(result.x);
  result.evaluations = 1;
  result.trace.push_back({0, result.x, result.value});
  std::vector<double> step = options.initial_step;
  while (result.polls < options.max_iterations) {
    if (all_below(step, options.step_tolerance)) {
      result.converged = true;
      break;
    }
    ++result.polls;
    if (pattern_search_step(result.x, result.value, step, f, options, result.evaluations) ==
        PollOutcome::accepted) {
      ++result.iterations;
      result.trace.push_back({result.iterations, result.x, result.value});
    }
  }
  if (!result.converged) result.converged = all_below(step, options.step_tolerance);
  return result;
}

OptimizerResult nelder_mead(const Objective& f, std::vector<double> x0,
                            const OptimizerOptions& options) {
  const std::size_t n = x0.size();
  options.validate(n);
  OptimizerResult result;
  std::size_t evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    return f(x);
  };

  std::vector<std::vector<double>> simplex(n + 1, options.bounds.clamp(std::move(x0)));
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += options.initial_step[i];
    simplex[i + 1] = options.bounds.clamp(simplex[i + 1]);
    if (simplex[i + 1][i] == simplex[0][i]) {
      simplex[i + 1][i] -= options.initial_step[i];
      simplex[i + 1] = options.bounds.clamp(simplex[i + 1]);
    }
  }
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s(n + 1);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = simplex[order[i]];
      v[i] = values[order[i]];
    }
    simplex = std::move(s);
    values = std::move(v);
  };
  auto extent_small = [&] {
    for (std::size_t k = 0; k < n; ++k) {
      double lo = simplex[0][k], hi = simplex[0][k];
      for (const auto& p : simplex) {
        lo = std::min(lo, p[k]);
        hi = std::max(hi, p[k]);
      }
      if (hi - lo >= options.step_tolerance) return false;
    }
    return true;
  };
  auto along = [&](const std::vector<double>& c, const std::vector<double>& p, double t) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = c[k] + t * (p[k] - c[k]);
    return options.bounds.clamp(std::move(out));
  };

  sort_simplex();
  double best = values[0];
  result.trace.push_back({0, simplex[0], best});
  while (result.polls < options.max_iterations) {
    if (extent_small()) {
      result.converged = true;
      break;
    }
    ++result.polls;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    const auto reflected = along(centroid, simplex[n], -1.0);
    const double fr = eval(reflected);
    if (fr < values[0]) {
      const auto expanded = along(centroid, simplex[n], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
    } else {
      const bool outside = fr < values[n];
      const auto contracted = outside ? along(centroid, reflected, 0.5) : along(centroid, simplex[n], 0.5);
      const double fc = eval(contracted);
      if (fc < std::min(fr, values[n])) {
        simplex[n] = contracted;
        values[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          simplex[i] = along(simplex[0], simplex[i], 0.5);
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
    if (values[0] < best - options.improvement_tolerance) {
      best = values[0];
      ++result.iterations;
      result.trace.push_back({result.iterations, simplex[0], best});
    }
  }
  if (!result.converged) result.converged = extent_small();
  result.x = simplex[0];
  result.value = values[0];
  result.evaluations = evaluations;
  return result;
}

}  // namespace idem
