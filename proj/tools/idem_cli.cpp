#include "idem/baselines.hpp"
#include "idem/cloud_io.hpp"
#include "idem/degrade.hpp"
#include "idem/errors.hpp"
#include "idem/experiment/manifest.hpp"
#include "idem/experiment/reproduce.hpp"
#include "idem/grid_io.hpp"
#include "idem/random.hpp"
#include "idem/register.hpp"
#include "idem/sensitivity.hpp"
#include "idem/sweep.hpp"
#include "idem/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;

struct Global {
  std::uint64_t seed = 42;
  bool seed_given = false;
  int jobs = 1;
  bool quiet = false;
  std::string out_dir = "idem-out";
  bool out_dir_given = false;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw idem::ValidationError(std::string(what) + ": bad number '" + item + "'");
    }
    pos = comma + 1;
  }
  if (expected > 0 && out.size() != expected) {
    throw idem::ValidationError(std::string(what) + ": expected " + std::to_string(expected) +
                                " comma-separated numbers, got " + std::to_string(out.size()));
  }
  return out;
}

fs::path prepare_out_dir(const Global& g) {
  const fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw idem::IoError("cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_run_metadata(const Global& g, const fs::path& dir, const std::string& command,
                        const json& parameters) {
  idem::write_json({{"tool", "idem"},
                    {"version", idem::kVersion},
                    {"command", command},
                    {"seed", g.seed},
                    {"rng", std::string(idem::RandomSource::kAlgorithm)},
                    {"jobs", g.jobs},
                    {"parameters", parameters}},
                   dir / "run.json");
}

void say(const Global& g, const std::string& text) {
  if (!g.quiet) std::cerr << text << '\n';
}

json transform_json(const idem::RigidTransform& t) {
  const idem::Mat4 m = t.matrix();
  json rows = json::array();
  for (int i = 0; i < 4; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
  return rows;
}

// --- metric ----------------------------------------------------------------

struct MetricArgs {
  std::string fixed, moving;
  double a = 1.0;
};

int run_metric(const Global& g, const MetricArgs& args) {
  const auto fixed = idem::load_cloud(args.fixed);
  const auto moving = idem::load_cloud(args.moving);
  const auto r = idem::metric_report(fixed, moving, args.a);
  const json report = {{"fixed", args.fixed},
                       {"moving", args.moving},
                       {"fixed_points", fixed.size()},
                       {"moving_points", moving.size()},
                       {"a", r.a},
                       {"radius", r.radius},
                       {"q_tot", r.q_tot},
                       {"rmse_1to2", r.rmse_1to2},
                       {"rmse_2to1", r.rmse_2to1},
                       {"chamfer", r.chamfer},
                       {"hausdorff", r.hausdorff}};
  std::cout << report.dump(2) << '\n';
  if (g.out_dir_given) {
    const auto dir = prepare_out_dir(g);
    idem::write_json(report, dir / "metric.json");
    write_run_metadata(g, dir, "metric", {{"fixed", args.fixed}, {"moving", args.moving}, {"a", args.a}});
  }
  return kExitOk;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string fixed, moving;
  std::string mode = "translate-plane";
  std::string axes;
  double range = 5.0;
  double step = 1.0;
  std::string metrics = "all";
  double a = 1.0;
};

int run_sweep_cmd(const Global& g, const SweepArgs& args) {
  idem::SweepSpec spec;
  std::size_t axis_count = 0;
  idem::parse_sweep_mode(args.mode, spec.kind, axis_count);
  const std::string axes = !args.axes.empty() ? args.axes : std::string("XYZ").substr(0, axis_count);
  spec.axes = idem::parse_axes(axes);
  if (spec.axes.size() != axis_count) {
    throw idem::ValidationError("mode " + args.mode + " needs " + std::to_string(axis_count) +
                                " axes, got '" + axes + "'");
  }
  spec.range = args.range;
  spec.step = args.step;
  spec.metrics = idem::parse_metric_list(args.metrics);
  spec.a = args.a;
  spec.validate();

  const auto fixed = idem::load_cloud(args.fixed);
  const auto moving = idem::load_cloud(args.moving);
  say(g, "sweeping " + std::to_string(spec.cell_count()) + " cells (" + spec.mode() + " " + axes + ")");
  const auto grid = idem::run_sweep(fixed, moving, spec);
  const auto dir = prepare_out_dir(g);
  idem::export_grid(grid, dir);
  write_run_metadata(g, dir, "sweep",
                     {{"fixed", args.fixed},
                      {"moving", args.moving},
                      {"mode", spec.mode()},
                      {"axes", idem::axes_name(spec.axes)},
                      {"range", spec.range},
                      {"step", spec.step},
                      {"metrics", args.metrics},
                      {"a", spec.a}});
  if (!g.quiet) {
    for (idem::Metric m : spec.metrics) {
      const auto best = idem::argmin(grid, m);
      std::fprintf(stderr, "%-10s argmin error %.6g\n", std::string(idem::to_string(m)).c_str(), best.error);
    }
  }
  return kExitOk;
}

// --- register --------------------------------------------------------------

struct RegisterArgs {
  std::string fixed, moving;
  double a = 1.0;
  std::string roi = "auto";
  std::string optimizer = "pattern-search";
  double tol = 1e-3;
  double tol_q = 1e-12;
  std::size_t max_iters = 1000;
  std::string initial = "0,0,0,0,0,0";
  std::string out = "transform.json";
};

int run_register(const Global& g, const RegisterArgs& args) {
  idem::RegistrationConfig config;
  config.a = args.a;
  config.optimizer = idem::parse_optimizer(args.optimizer);
  config.tol_step = args.tol;
  config.tol_q = args.tol_q;
  config.max_iters = args.max_iters;
  const auto init = parse_numbers(args.initial, 6, "--initial");
  for (std::size_t i = 0; i < 6; ++i) config.initial[i] = init[i];
  if (args.roi != "auto") {
    const auto b = parse_numbers(args.roi, 12, "--roi");
    idem::PoseBounds roi;
    for (std::size_t i = 0; i < 6; ++i) {
      roi.lower[i] = b[2 * i];
      roi.upper[i] = b[2 * i + 1];
    }
    config.roi = roi;
  }
  config.validate();

  const auto fixed = idem::load_cloud(args.fixed);
  const auto moving = idem::load_cloud(args.moving);
  const auto result = idem::register_pair(fixed, moving, config);

  const auto dir = prepare_out_dir(g);
  const fs::path out = fs::path(args.out).is_absolute() ? fs::path(args.out) : dir / args.out;
  json roi = json::array();
  for (std::size_t i = 0; i < 6; ++i) roi.push_back({result.roi.lower[i], result.roi.upper[i]});
  idem::write_json({{"matrix", transform_json(result.transform)},
                    {"pose", {{"translation", {result.pose[0], result.pose[1], result.pose[2]}},
                              {"rotation_xyz_deg", {result.pose[3], result.pose[4], result.pose[5]}}}},
                    {"center", {result.center.x(), result.center.y(), result.center.z()}},
                    {"q_idem", result.q_idem},
                    {"q_start", result.q_start},
                    {"iterations", result.iterations},
                    {"evaluations", result.evaluations},
                    {"converged", result.converged},
                    {"radius", result.radius},
                    {"roi", roi}},
                   out);
  std::ofstream trace(dir / "trace.csv");
  if (!trace) throw idem::IoError("cannot write '" + (dir / "trace.csv").string() + "'");
  trace << "iteration,tx,ty,tz,rx,ry,rz,qtot\n";
  char buf[64];
  for (const auto& t : result.trace) {
    trace << t.iteration;
    for (double v : t.x) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      trace << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", t.value);
    trace << buf;
  }
  write_run_metadata(g, dir, "register",
                     {{"fixed", args.fixed},
                      {"moving", args.moving},
                      {"a", args.a},
                      {"roi", args.roi},
                      {"optimizer", args.optimizer},
                      {"tol", args.tol},
                      {"tol_q", args.tol_q},
                      {"max_iters", args.max_iters},
                      {"initial", init}});
  say(g, "q_idem " + std::to_string(result.q_idem) + " after " + std::to_string(result.iterations) +
             " moves (" + (result.converged ? "converged" : "not converged") + ")");
  return kExitOk;
}

// --- degrade ---------------------------------------------------------------

struct DegradeArgs {
  std::string kind;
  std::string in, out;
  double fraction = 1.0;
  std::size_t seeds = 30;
  std::size_t neighbors = 5;
  std::string normal = "1,0,0";
  std::optional<double> offset;
  std::optional<std::size_t> count;
  std::string keep = "below";
  double sigma = 0.0;
};

int run_degrade(const Global& g, const DegradeArgs& args) {
  idem::DegradationSpec spec;
  spec.kind = idem::parse_degradation_kind(args.kind);
  spec.seed = g.seed;
  spec.fraction = args.fraction;
  spec.n_seeds = args.seeds;
  spec.neighbors = args.neighbors;
  const auto n = parse_numbers(args.normal, 3, "--normal");
  spec.normal = idem::Vec3(n[0], n[1], n[2]);
  spec.side = idem::parse_keep_side(args.keep);
  spec.sigma = args.sigma;

  const auto cloud = idem::load_cloud(args.in);
  if (spec.kind == idem::DegradationKind::partial_crop) {
    if (args.offset.has_value() == args.count.has_value()) {
      throw idem::ValidationError("partial-crop needs exactly one of --offset and --count");
    }
    spec.offset = args.offset ? *args.offset
                              : idem::crop_offset_for_count(cloud, spec.normal, *args.count, spec.side);
  }
  const auto result = spec.apply(cloud);
  idem::save_cloud(result, args.out);
  json params = {{"kind", std::string(idem::to_string(spec.kind))},
                 {"in", args.in},
                 {"out", args.out},
                 {"input_points", cloud.size()},
                 {"output_points", result.size()}};
  switch (spec.kind) {
    case idem::DegradationKind::downsample:
    case idem::DegradationKind::bbox_noise: params["fraction"] = spec.fraction; break;
    case idem::DegradationKind::holes:
      params["seeds"] = spec.n_seeds;
      params["neighbors"] = spec.neighbors;
      break;
    case idem::DegradationKind::partial_crop:
      params["normal"] = n;
      params["offset"] = spec.offset;
      params["keep"] = args.keep;
      break;
    case idem::DegradationKind::gaussian_perturb: params["sigma"] = spec.sigma; break;
  }
  if (g.out_dir_given) write_run_metadata(g, prepare_out_dir(g), "degrade", params);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu -> %zu points", cloud.size(), result.size());
  std::string line = buf;
  if (spec.kind == idem::DegradationKind::partial_crop) {
    std::snprintf(buf, sizeof buf, " (offset %.17g)", spec.offset);
    line += buf;
  }
  say(g, line);
  return kExitOk;
}

// --- sensitivity -----------------------------------------------------------

struct SensitivityArgs {
  std::string cloud;
  std::string sigmas = "0.01,0.02,0.05,0.1";
  std::size_t trials = 200;
  double a = 1.0;
  std::string out = "report.csv";
};

int run_sensitivity_cmd(const Global& g, const SensitivityArgs& args) {
  idem::SensitivityConfig config;
  config.sigmas = parse_numbers(args.sigmas, 0, "--sigmas");
  config.trials = args.trials;
  config.seed = g.seed;
  config.a = args.a;
  config.validate();
  const auto cloud = idem::load_cloud(args.cloud);
  const auto report = idem::run_sensitivity(cloud, config);
  const auto dir = prepare_out_dir(g);
  const fs::path out = fs::path(args.out).is_absolute() ? fs::path(args.out) : dir / args.out;
  idem::write_sensitivity_csv(report, out);
  write_run_metadata(g, dir, "sensitivity",
                     {{"cloud", args.cloud},
                      {"sigmas", config.sigmas},
                      {"trials", config.trials},
                      {"a", config.a},
                      {"radius", report.radius}});
  if (!g.quiet) {
    std::fprintf(stderr, "%10s %14s %14s %10s %9s\n", "sigma", "mean", "stddev", "cv", "negative");
    for (const auto& r : report.rows) {
      std::fprintf(stderr, "%10.4g %14.6g %14.6g %10.4g %9zu\n", r.sigma, r.mean, r.stddev, r.cv, r.negative);
    }
  }
  return kExitOk;
}

// --- reproduce -------------------------------------------------------------

struct ReproduceArgs {
  std::string manifest;
  bool grids = false;
};

int run_reproduce(const Global& g, const ReproduceArgs& args) {
  const auto manifest =
      idem::load_manifest(args.manifest, g.seed_given ? std::optional(g.seed) : std::nullopt);
  const auto dir = prepare_out_dir(g);
  idem::ReproduceOptions options;
  options.jobs = g.jobs;
  if (args.grids) options.grid_dir = dir / "grids";
  options.on_scenario = [&](const idem::ScenarioOutcome& s) {
    if (g.quiet) return;
    const char* st = s.skipped ? "SKIP" : (!s.error.empty() ? "ERROR" : (s.passed() ? "PASS" : "FAIL"));
    std::fprintf(stderr, "%-14s %-5s %.1fs%s%s\n", s.id.c_str(), st, s.seconds,
                 s.error.empty() ? "" : "  ", s.error.c_str());
  };
  const auto report = idem::run_manifest(manifest, options);
  idem::write_table_markdown(report, dir / "table.md");
  idem::write_table_csv(report, dir / "table.csv");
  write_run_metadata(g, dir, "reproduce",
                     {{"manifest", args.manifest},
                      {"manifest_seed", manifest.seed},
                      {"scenarios", manifest.scenarios.size()},
                      {"grids", args.grids}});
  return report.all_passed() ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-based alignment metric for point clouds: sweeps, registration and experiments"};
  app.set_version_flag("--version", std::string(idem::kVersion));
  app.require_subcommand(1);

  Global g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress progress output");
  auto* out_opt = app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();

  MetricArgs metric;
  auto* metric_cmd = app.add_subcommand("metric", "Evaluate every metric at the identity pose (JSON on stdout)");
  metric_cmd->add_option("--fixed", metric.fixed, "First cloud (.xyz or .ply)")->required();
  metric_cmd->add_option("--moving", metric.moving, "Second cloud")->required();
  metric_cmd->add_option("--a", metric.a, "Radius multiplier")->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate metrics over a translation or rotation lattice");
  sweep_cmd->add_option("--fixed", sweep.fixed, "Fixed cloud")->required();
  sweep_cmd->add_option("--moving", sweep.moving, "Moving cloud")->required();
  sweep_cmd->add_option("--mode", sweep.mode, "translate|rotate - axis|plane|volume")->capture_default_str();
  sweep_cmd->add_option("--axes", sweep.axes, "Swept axes, e.g. X, XY, XYZ (default: first axes)");
  sweep_cmd->add_option("--range", sweep.range, "Half-width of the lattice")->capture_default_str();
  sweep_cmd->add_option("--step", sweep.step, "Lattice spacing")->capture_default_str();
  sweep_cmd->add_option("--metrics", sweep.metrics, "Comma-separated metrics or 'all'")->capture_default_str();
  sweep_cmd->add_option("--a", sweep.a, "Radius multiplier")->capture_default_str();

  RegisterArgs reg;
  auto* reg_cmd = app.add_subcommand("register", "Minimise q_tot over rigid poses inside the ROI");
  reg_cmd->add_option("--fixed", reg.fixed, "Fixed cloud")->required();
  reg_cmd->add_option("--moving", reg.moving, "Moving cloud")->required();
  reg_cmd->add_option("--a", reg.a, "Radius multiplier")->capture_default_str();
  reg_cmd->add_option("--roi", reg.roi, "'auto' or 12 numbers: lower,upper for tx,ty,tz,rx,ry,rz")
      ->capture_default_str();
  reg_cmd->add_option("--optimizer", reg.optimizer, "pattern-search or nelder-mead")->capture_default_str();
  reg_cmd->add_option("--tol", reg.tol, "Step-size tolerance")->capture_default_str();
  reg_cmd->add_option("--tol-q", reg.tol_q, "Smallest q_tot decrease that counts")->capture_default_str();
  reg_cmd->add_option("--max-iters", reg.max_iters, "Maximum optimizer polls")->capture_default_str();
  reg_cmd->add_option("--initial", reg.initial, "Initial pose tx,ty,tz,rx,ry,rz (degrees)")->capture_default_str();
  reg_cmd->add_option("--out", reg.out, "Transform JSON (relative paths go under --out-dir)")->capture_default_str();

  DegradeArgs deg;
  auto* deg_cmd = app.add_subcommand("degrade", "Write a degraded copy of a cloud");
  deg_cmd->add_option("--kind", deg.kind, "downsample|bbox-noise|holes|partial-crop|gaussian-perturb")->required();
  deg_cmd->add_option("--in", deg.in, "Input cloud")->required();
  deg_cmd->add_option("--out", deg.out, "Output cloud (.xyz or .ply)")->required();
  deg_cmd->add_option("--fraction", deg.fraction, "Kept fraction (downsample) or added fraction (bbox-noise)");
  deg_cmd->add_option("--seeds", deg.seeds, "Hole seeds")->capture_default_str();
  deg_cmd->add_option("--neighbors", deg.neighbors, "Points removed per hole")->capture_default_str();
  deg_cmd->add_option("--normal", deg.normal, "Crop plane normal nx,ny,nz")->capture_default_str();
  deg_cmd->add_option("--offset", deg.offset, "Crop plane offset along the normal");
  deg_cmd->add_option("--count", deg.count, "Derive the crop offset that keeps this many points");
  deg_cmd->add_option("--keep", deg.keep, "below or above the plane")->capture_default_str();
  deg_cmd->add_option("--sigma", deg.sigma, "Gaussian perturbation sigma");

  SensitivityArgs sens;
  auto* sens_cmd = app.add_subcommand("sensitivity", "Monte Carlo q_tot statistics under Gaussian perturbation");
  sens_cmd->add_option("--cloud", sens.cloud, "Input cloud")->required();
  sens_cmd->add_option("--sigmas", sens.sigmas, "Comma-separated noise levels")->capture_default_str();
  sens_cmd->add_option("--trials", sens.trials, "Trials per level")->capture_default_str();
  sens_cmd->add_option("--a", sens.a, "Radius multiplier")->capture_default_str();
  sens_cmd->add_option("--out", sens.out, "Report CSV (relative paths go under --out-dir)")->capture_default_str();

  ReproduceArgs repro;
  auto* repro_cmd = app.add_subcommand("reproduce", "Run every scenario of an experiment manifest");
  repro_cmd->add_option("manifest", repro.manifest, "Manifest file")->required();
  repro_cmd->add_flag("--grids", repro.grids, "Also export every sweep grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  g.seed_given = seed_opt->count() > 0;
  g.out_dir_given = out_opt->count() > 0;
#ifdef _OPENMP
  omp_set_num_threads(g.jobs);
#endif

  try {
    if (metric_cmd->parsed()) return run_metric(g, metric);
    if (sweep_cmd->parsed()) return run_sweep_cmd(g, sweep);
    if (reg_cmd->parsed()) return run_register(g, reg);
    if (deg_cmd->parsed()) return run_degrade(g, deg);
    if (sens_cmd->parsed()) return run_sensitivity_cmd(g, sens);
    if (repro_cmd->parsed()) return run_reproduce(g, repro);
  } catch (const idem::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const idem::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
