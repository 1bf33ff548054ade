#pragma once

#include "idem/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace idem {

struct SensitivityConfig {
  std::vector<double> sigmas = {0.01, 0.02, 0.05, 0.1};
  std::size_t trials = 200;
  std::uint64_t seed = 42;
  double a = 1.0;

  /// trials >= 2, every sigma > 0 and finite, a > 0.
  void validate() const;
};

struct SensitivityRow {
  double sigma = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n − 1)
  double cv = 0.0;      // stddev / mean
  double min = 0.0;
  double max = 0.0;
  std::size_t negative = 0;  // samples with q_tot < 0
  std::size_t trials = 0;
};

struct SensitivityReport {
  std::vector<SensitivityRow> rows;
  std::vector<std::vector<double>> samples;  // samples[level][trial]
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double radius = 0.0;
};

/// For each sigma, q_tot(cloud, gaussian_perturb(cloud, sigma, seed + t)) for
/// t = 0..trials−1. The radius a · r_4th(cloud) is fixed from the clean cloud.
/// Trial t uses the same seed at every level, so levels differ only in scale.
SensitivityReport run_sensitivity(const PointCloud& cloud, const SensitivityConfig& config);

/// Columns: sigma,trials,mean,stddev,cv,min,max,negative.
void write_sensitivity_csv(const SensitivityReport& report, const std::filesystem::path& path);

}  // namespace idem
