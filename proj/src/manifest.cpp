#include "idem/experiment/manifest.hpp"

#include "idem/cloud_io.hpp"
#include "idem/errors.hpp"
#include "idem/random.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace idem {

namespace {

struct Context {
  std::string source;

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    const auto mark = node.Mark();
    throw ParseError(what, mark.is_null() ? 0 : static_cast<std::size_t>(mark.line) + 1, source);
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed,
                  const std::string& what) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  template <typename T>
  T get(const YAML::Node& node, const std::string& what) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "bad value for " + what);
    }
  }
};

Vec3 parse_vec3(const Context& ctx, const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() != 3) ctx.fail(node, what + " must be a list of 3 numbers");
  return {ctx.get<double>(node[0], what), ctx.get<double>(node[1], what),
          ctx.get<double>(node[2], what)};
}

DegradationSpec parse_step(const Context& ctx, const YAML::Node& node, std::uint64_t default_seed) {
  ctx.require_map(node, "degradation step");
  if (!node["kind"]) ctx.fail(node, "degradation step needs a kind");
  DegradationSpec spec;
  spec.kind = parse_degradation_kind(ctx.get<std::string>(node["kind"], "kind"));
  spec.seed = node["seed"] ? ctx.get<std::uint64_t>(node["seed"], "seed") : default_seed;
  switch (spec.kind) {
    case DegradationKind::downsample:
    case DegradationKind::bbox_noise:
      ctx.check_keys(node, {"kind", "seed", "fraction"}, "degradation step");
      if (!node["fraction"]) ctx.fail(node, "missing fraction");
      spec.fraction = ctx.get<double>(node["fraction"], "fraction");
      break;
    case DegradationKind::holes:
      ctx.check_keys(node, {"kind", "seed", "seeds", "neighbors"}, "degradation step");
      if (!node["seeds"] || !node["neighbors"]) ctx.fail(node, "holes need seeds and neighbors");
      spec.n_seeds = ctx.get<std::size_t>(node["seeds"], "seeds");
      spec.neighbors = ctx.get<std::size_t>(node["neighbors"], "neighbors");
      break;
    case DegradationKind::partial_crop:
      ctx.check_keys(node, {"kind", "seed", "normal", "offset", "keep"}, "degradation step");
      if (!node["offset"] || !node["keep"]) ctx.fail(node, "partial-crop needs offset and keep");
      if (node["normal"]) spec.normal = parse_vec3(ctx, node["normal"], "normal");
      spec.offset = ctx.get<double>(node["offset"], "offset");
      spec.side = parse_keep_side(ctx.get<std::string>(node["keep"], "keep"));
      break;
    case DegradationKind::gaussian_perturb:
      ctx.check_keys(node, {"kind", "seed", "sigma"}, "degradation step");
      if (!node["sigma"]) ctx.fail(node, "missing sigma");
      spec.sigma = ctx.get<double>(node["sigma"], "sigma");
      break;
  }
  spec.validate();
  return spec;
}

CloudSource parse_source(const Context& ctx, const YAML::Node& node,
                         const std::filesystem::path& base_dir, std::uint64_t seed) {
  ctx.require_map(node, "cloud source");
  ctx.check_keys(node, {"file", "degrade"}, "cloud source");
  if (!node["file"]) ctx.fail(node, "cloud source needs a file");
  CloudSource out;
  out.file = base_dir / ctx.get<std::string>(node["file"], "file");
  if (const auto steps = node["degrade"]) {
    if (!steps.IsSequence()) ctx.fail(steps, "degrade must be a list");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      out.steps.push_back(parse_step(ctx, steps[i], derive_seed(seed, i)));
    }
  }
  return out;
}

SweepSpec parse_sweep(const Context& ctx, const YAML::Node& node, SweepSpec base) {
  ctx.require_map(node, "sweep");
  ctx.check_keys(node, {"mode", "axes", "range", "step", "metrics", "a"}, "sweep");
  std::size_t axis_count = base.axes.size();
  if (node["mode"]) parse_sweep_mode(ctx.get<std::string>(node["mode"], "mode"), base.kind, axis_count);
  if (node["axes"]) base.axes = parse_axes(ctx.get<std::string>(node["axes"], "axes"));
  if (base.axes.size() != axis_count) {
    ctx.fail(node, "sweep mode " + base.mode() + " does not match axes " + axes_name(base.axes));
  }
  if (node["range"]) base.range = ctx.get<double>(node["range"], "range");
  if (node["step"]) base.step = ctx.get<double>(node["step"], "step");
  if (node["a"]) base.a = ctx.get<double>(node["a"], "a");
  if (const auto m = node["metrics"]) {
    if (m.IsScalar()) {
      base.metrics = parse_metric_list(ctx.get<std::string>(m, "metrics"));
    } else if (m.IsSequence()) {
      base.metrics.clear();
      for (const auto& item : m) base.metrics.push_back(parse_metric(ctx.get<std::string>(item, "metric")));
    } else {
      ctx.fail(m, "metrics must be a list");
    }
  }
  base.validate();
  return base;
}

std::vector<Expectation> parse_expectations(const Context& ctx, const YAML::Node& node) {
  ctx.require_map(node, "expect");
  std::vector<Expectation> out;
  for (const auto& kv : node) {
    Expectation e;
    e.key = kv.first.as<std::string>();
    if (e.key != "fixed-points" && e.key != "moving-points" && e.key != "r4th") parse_metric(e.key);
    const YAML::Node& body = kv.second;
    ctx.require_map(body, "expectation '" + e.key + "'");
    ctx.check_keys(body, {"equals", "tol", "at_least", "at_most"}, "expectation");
    if (body["equals"]) {
      e.kind = Expectation::Kind::equals;
      e.value = ctx.get<double>(body["equals"], "equals");
      if (body["tol"]) e.tolerance = ctx.get<double>(body["tol"], "tol");
      if (!(e.tolerance >= 0.0)) ctx.fail(body, "tol must be >= 0");
    } else if (body["at_least"]) {
      e.kind = Expectation::Kind::at_least;
      e.value = ctx.get<double>(body["at_least"], "at_least");
    } else if (body["at_most"]) {
      e.kind = Expectation::Kind::at_most;
      e.value = ctx.get<double>(body["at_most"], "at_most");
    } else {
      ctx.fail(body, "expectation needs equals, at_least or at_most");
    }
    if (body.size() > (e.kind == Expectation::Kind::equals && body["tol"] ? 2u : 1u)) {
      ctx.fail(body, "expectation '" + e.key + "' mixes several comparisons");
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

bool Expectation::check(double actual) const {
  switch (kind) {
    case Kind::equals: return std::abs(actual - value) <= tolerance;
    case Kind::at_least: return actual >= value;
    case Kind::at_most: return actual <= value;
  }
  return false;
}

std::string Expectation::describe() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::equals:
      s << "== " << value;
      if (tolerance > 0.0) s << " +/- " << tolerance;
      break;
    case Kind::at_least: s << ">= " << value; break;
    case Kind::at_most: s << "<= " << value; break;
  }
  return s.str();
}

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                  const std::string& source,
                                  std::optional<std::uint64_t> seed_override) {
  const Context ctx{source};
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, static_cast<std::size_t>(e.mark.line) + 1, source);
  }
  ExperimentManifest manifest;
  manifest.base_dir = base_dir;
  if (seed_override) manifest.seed = *seed_override;
  if (root.IsNull()) return manifest;
  ctx.require_map(root, "manifest");
  ctx.check_keys(root, {"seed", "defaults", "scenarios"}, "manifest");
  if (root["seed"]) manifest.seed = ctx.get<std::uint64_t>(root["seed"], "seed");
  if (seed_override) manifest.seed = *seed_override;

  SweepSpec default_sweep;
  default_sweep.metrics = {Metric::qtot};
  std::optional<SweepSpec> default_baseline;
  if (const auto d = root["defaults"]) {
    ctx.require_map(d, "defaults");
    ctx.check_keys(d, {"sweep", "baseline_sweep"}, "defaults");
    if (d["sweep"]) default_sweep = parse_sweep(ctx, d["sweep"], default_sweep);
    if (d["baseline_sweep"]) default_baseline = parse_sweep(ctx, d["baseline_sweep"], default_sweep);
  }

  const auto list = root["scenarios"];
  if (!list) return manifest;
  if (!list.IsSequence()) ctx.fail(list, "scenarios must be a list");
  std::set<std::string> ids;
  for (const auto& node : list) {
    ctx.require_map(node, "scenario");
    ctx.check_keys(node, {"id", "description", "fixed", "moving", "sweep", "baseline_sweep", "expect",
                          "external"},
                   "scenario");
    if (!node["id"] || !node["fixed"] || !node["moving"]) {
      ctx.fail(node, "scenario needs id, fixed and moving");
    }
    Scenario s;
    s.id = ctx.get<std::string>(node["id"], "id");
    if (!ids.insert(s.id).second) throw ValidationError("duplicate scenario id '" + s.id + "'");
    if (node["description"]) s.description = ctx.get<std::string>(node["description"], "description");
    if (node["external"]) s.external = ctx.get<bool>(node["external"], "external");
    s.seed = derive_seed(manifest.seed, stable_hash(s.id));
    s.fixed = parse_source(ctx, node["fixed"], base_dir, derive_seed(s.seed, 1));
    s.moving = parse_source(ctx, node["moving"], base_dir, derive_seed(s.seed, 2));
    s.sweep = node["sweep"] ? parse_sweep(ctx, node["sweep"], default_sweep) : default_sweep;
    if (node["baseline_sweep"]) {
      s.baseline_sweep = parse_sweep(ctx, node["baseline_sweep"], default_baseline.value_or(s.sweep));
    } else {
      s.baseline_sweep = default_baseline;
    }
    if (s.baseline_sweep) {
      for (Metric m : s.baseline_sweep->metrics) {
        if (s.sweep.has_metric(m)) {
          throw ValidationError("scenario '" + s.id + "': metric '" + std::string(to_string(m)) +
                                "' is in both sweeps");
        }
      }
    }
    if (node["expect"]) s.expect = parse_expectations(ctx, node["expect"]);
    for (const auto& e : s.expect) {
      if (e.key == "fixed-points" || e.key == "moving-points" || e.key == "r4th") continue;
      const Metric m = parse_metric(e.key);
      if (!s.sweep.has_metric(m) && !(s.baseline_sweep && s.baseline_sweep->has_metric(m))) {
        throw ValidationError("scenario '" + s.id + "' expects metric '" + e.key +
                              "' that no sweep evaluates");
      }
    }
    if (!s.external) {
      for (const auto* src : {&s.fixed, &s.moving}) {
        if (!std::filesystem::exists(src->file)) {
          throw IoError("scenario '" + s.id + "': input '" + src->file.string() + "' does not exist");
        }
      }
    }
    manifest.scenarios.push_back(std::move(s));
  }
  return manifest;
}

ExperimentManifest load_manifest(const std::filesystem::path& path,
                                 std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path(), path.string(), seed_override);
}

PointCloud materialize(const CloudSource& source) {
  PointCloud cloud = load_cloud(source.file);
  for (const auto& step : source.steps) cloud = step.apply(cloud);
  return cloud;
}

}  // namespace idem
