#include "idem/experiment/reproduce.hpp"

#include "idem/errors.hpp"
#include "idem/grid_io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace idem {

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string error_cell(const ScenarioOutcome& s, Metric m) {
  const auto it = s.errors.find(m);
  return it == s.errors.end() ? "-" : number(it->second);
}

std::string status(const ScenarioOutcome& s) {
  if (s.skipped) return "SKIP";
  if (!s.error.empty()) return "ERROR";
  return s.passed() ? "PASS" : "FAIL";
}

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

bool ScenarioOutcome::passed() const {
  if (skipped) return true;
  if (!error.empty()) return false;
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

bool ReproduceReport::all_passed() const {
  for (const auto& s : scenarios) {
    if (!s.passed()) return false;
  }
  return true;
}

ScenarioOutcome run_scenario(const Scenario& scenario,
                             const std::optional<std::filesystem::path>& grid_dir) {
  ScenarioOutcome out;
  out.id = scenario.id;
  out.description = scenario.description;
  const auto start = std::chrono::steady_clock::now();
  if (scenario.external && (!std::filesystem::exists(scenario.fixed.file) ||
                            !std::filesystem::exists(scenario.moving.file))) {
    out.skipped = true;
    return out;
  }
  try {
    const PointCloud fixed = materialize(scenario.fixed);
    const PointCloud moving = materialize(scenario.moving);
    out.fixed_points = fixed.size();
    out.moving_points = moving.size();

    const SweepGrid grid = run_sweep(fixed, moving, scenario.sweep);
    out.r4th = grid.r4th_weighted;
    for (Metric m : scenario.sweep.metrics) out.errors[m] = argmin_error(grid, m);
    if (grid_dir) export_grid(grid, *grid_dir / scenario.id / "sweep");
    if (scenario.baseline_sweep) {
      const SweepGrid baseline = run_sweep(fixed, moving, *scenario.baseline_sweep);
      for (Metric m : scenario.baseline_sweep->metrics) out.errors[m] = argmin_error(baseline, m);
      if (grid_dir) export_grid(baseline, *grid_dir / scenario.id / "baseline");
    }

    for (const auto& e : scenario.expect) {
      double actual = 0.0;
      if (e.key == "fixed-points") {
        actual = static_cast<double>(out.fixed_points);
      } else if (e.key == "moving-points") {
        actual = static_cast<double>(out.moving_points);
      } else if (e.key == "r4th") {
        actual = out.r4th;
      } else {
        actual = out.errors.at(parse_metric(e.key));
      }
      out.checks.push_back({e, actual, e.check(actual)});
    }
  } catch (const std::exception& ex) {
    out.error = ex.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ReproduceReport run_manifest(const ExperimentManifest& manifest, const ReproduceOptions& options) {
  ReproduceReport report;
  report.scenarios.resize(manifest.scenarios.size());
  const auto n = static_cast<long long>(manifest.scenarios.size());
  const int jobs = options.jobs < 1 ? 1 : options.jobs;
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    report.scenarios[k] = run_scenario(manifest.scenarios[k], options.grid_dir);
    if (options.on_scenario) {
#pragma omp critical(idem_reproduce_progress)
      options.on_scenario(report.scenarios[k]);
    }
  }
  return report;
}

void write_table_markdown(const ReproduceReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "| Comparison | Description | No. points | r_4th | q_tot error | RMSE error 1→2, 2→1 "
         "| Chamfer error | Hausdorff error | Status |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : report.scenarios) {
    out << "| " << s.id << " | " << s.description << " | ";
    if (s.skipped) {
      out << "- | - | - | - | - | - | SKIP (external data required) |\n";
      continue;
    }
    out << s.fixed_points << " – " << s.moving_points << " | " << number(s.r4th) << " | "
        << error_cell(s, Metric::qtot) << " | " << error_cell(s, Metric::rmse_12) << ", "
        << error_cell(s, Metric::rmse_21) << " | " << error_cell(s, Metric::chamfer) << " | "
        << error_cell(s, Metric::hausdorff) << " | " << status(s);
    if (!s.error.empty()) out << ": " << s.error;
    for (const auto& c : s.checks) {
      if (!c.passed) {
        out << "; " << c.expectation.key << " = " << number(c.actual) << " (expected "
            << c.expectation.describe() << ")";
      }
    }
    out << " |\n";
  }
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void write_table_csv(const ReproduceReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "id,description,fixed_points,moving_points,r4th,qtot_error,rmse_12_error,rmse_21_error,"
         "chamfer_error,hausdorff_error,status,seconds,detail\n";
  for (const auto& s : report.scenarios) {
    std::ostringstream detail;
    if (!s.error.empty()) detail << s.error;
    for (const auto& c : s.checks) {
      if (!c.passed) {
        detail << (detail.tellp() > 0 ? "; " : "") << c.expectation.key << " = " << c.actual
               << " expected " << c.expectation.describe();
      }
    }
    auto cell = [&](Metric m) {
      const auto it = s.errors.find(m);
      return it == s.errors.end() ? std::string() : number(it->second);
    };
    out << csv_quote(s.id) << ',' << csv_quote(s.description) << ',';
    if (s.skipped) {
      out << ",,,,,,,," << status(s) << ",0,external data required\n";
      continue;
    }
    out << s.fixed_points << ',' << s.moving_points << ',' << number(s.r4th) << ','
        << cell(Metric::qtot) << ',' << cell(Metric::rmse_12) << ',' << cell(Metric::rmse_21) << ','
        << cell(Metric::chamfer) << ',' << cell(Metric::hausdorff) << ',' << status(s) << ','
        << number(s.seconds) << ',' << csv_quote(detail.str()) << '\n';
  }
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace idem
