#pragma once

#include "idem/experiment/manifest.hpp"
#include "idem/sweep.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace idem {

struct CheckResult {
  Expectation expectation;
  double actual = 0.0;
  bool passed = false;
};

struct ScenarioOutcome {
  std::string id;
  std::string description;
  bool skipped = false;
  std::string error;  // set when the scenario threw; counts as a failure
  std::size_t fixed_points = 0;
  std::size_t moving_points = 0;
  double r4th = 0.0;                  // weighted r_4th of the pair
  std::map<Metric, double> errors;    // argmin error per evaluated metric
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const;
};

struct ReproduceOptions {
  std::optional<std::filesystem::path> grid_dir;  // export every grid under <grid_dir>/<id>/
  int jobs = 1;                                   // scenarios run concurrently
  std::function<void(const ScenarioOutcome&)> on_scenario;  // progress callback
};

struct ReproduceReport {
  std::vector<ScenarioOutcome> scenarios;  // manifest order

  bool all_passed() const;
};

/// Runs one scenario: builds both clouds, runs its sweep(s), takes the argmin
/// error of every metric and checks the expectations. Exceptions are caught
/// and reported in `error`. External scenarios with missing inputs are skipped.
ScenarioOutcome run_scenario(const Scenario& scenario,
                             const std::optional<std::filesystem::path>& grid_dir = std::nullopt);

ReproduceReport run_manifest(const ExperimentManifest& manifest, const ReproduceOptions& options = {});

/// Summary table with the columns Comparison, Description, No. points, r_4th,
/// the argmin errors of q_tot, RMSE (1→2, 2→1), Chamfer and Hausdorff, and Status.
void write_table_markdown(const ReproduceReport& report, const std::filesystem::path& path);
void write_table_csv(const ReproduceReport& report, const std::filesystem::path& path);

}  // namespace idem
