#include "idem/sensitivity.hpp"

#include "idem/degrade.hpp"
#include "idem/entropy.hpp"
#include "idem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace idem {

void SensitivityConfig::validate() const {
  if (trials < 2) throw ValidationError("sensitivity needs at least 2 trials");
  if (sigmas.empty()) throw ValidationError("no sigma levels given");
  for (double s : sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("sigma levels must be positive");
  }
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("radius multiplier a must be positive");
}

SensitivityReport run_sensitivity(const PointCloud& cloud, const SensitivityConfig& config) {
  config.validate();
  SensitivityReport report;
  report.seed = config.seed;
  report.trials = config.trials;
  report.radius = config.a * r4th_mean(cloud);
  const QtotEvaluator evaluator(cloud, report.radius);

  for (double sigma : config.sigmas) {
    std::vector<double> q(config.trials);
    const auto n = static_cast<long long>(config.trials);
#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < n; ++t) {
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(t);
      q[static_cast<std::size_t>(t)] = evaluator(gaussian_perturb(cloud, sigma, seed));
    }

    SensitivityRow row;
    row.sigma = sigma;
    row.trials = q.size();
    const double count = static_cast<double>(q.size());
    row.mean = compensated_sum(q) / count;
    std::vector<double> sq(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) sq[i] = (q[i] - row.mean) * (q[i] - row.mean);
    row.stddev = std::sqrt(compensated_sum(sq) / (count - 1.0));
    row.cv = row.stddev / row.mean;
    row.min = *std::min_element(q.begin(), q.end());
    row.max = *std::max_element(q.begin(), q.end());
    row.negative = static_cast<std::size_t>(std::count_if(q.begin(), q.end(), [](double v) { return v < 0.0; }));
    report.rows.push_back(row);
    report.samples.push_back(std::move(q));
  }
  return report;
}

void write_sensitivity_csv(const SensitivityReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "sigma,trials,mean,stddev,cv,min,max,negative\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n", r.sigma, r.trials,
                  r.mean, r.stddev, r.cv, r.min, r.max, r.negative);
    out << buf;
  }
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace idem
