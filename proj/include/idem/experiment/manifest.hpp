#pragma once

#include "idem/degrade.hpp"
#include "idem/sweep.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace idem {

/// A cloud file followed by a chain of degradations.
struct CloudSource {
  std::filesystem::path file;  // resolved against the manifest directory
  std::vector<DegradationSpec> steps;
};

/// One asserted value. Keys are metric names (argmin error of that metric),
/// "fixed-points", "moving-points" or "r4th" (weighted r_4th of the pair).
struct Expectation {
  enum class Kind { equals, at_least, at_most };

  std::string key;
  Kind kind = Kind::equals;
  double value = 0.0;
  double tolerance = 0.0;  // equals only

  bool check(double actual) const;
  std::string describe() const;
};

struct Scenario {
  std::string id;
  std::string description;
  CloudSource fixed;
  CloudSource moving;
  SweepSpec sweep;
  std::optional<SweepSpec> baseline_sweep;  // separate lattice for the distance metrics
  std::vector<Expectation> expect;
  bool external = false;  // inputs are not shipped; skipped when missing
  std::uint64_t seed = 0;  // base of the degradation seeds
};

/// Scenario list in YAML:
///
///   seed: 42
///   defaults: {sweep: {...}, baseline_sweep: {...}}
///   scenarios:
///     - id: B0-B0.1
///       description: ...
///       fixed: {file: ../data/bunny_b0.ply}
///       moving: {file: ../data/bunny_b0.ply, degrade: [{kind: downsample, fraction: 0.1}]}
///       expect: {qtot: {equals: 0}, rmse-12: {at_least: 0.25}}
///
/// Sweep blocks take mode, axes, range, step, metrics and a; scenario blocks
/// override the defaults field by field. Degradation steps without an explicit
/// seed get derive_seed(derive_seed(scenario seed, 1 for fixed, 2 for moving),
/// step index), where the scenario seed is derive_seed(manifest seed,
/// stable_hash(id)).
struct ExperimentManifest {
  std::filesystem::path base_dir;
  std::uint64_t seed = 42;
  std::vector<Scenario> scenarios;
};

/// Throws ParseError on malformed YAML or unknown keys, ValidationError on
/// invalid values or duplicate ids, IoError when a non-external input is missing.
/// `seed_override` replaces the file's master seed before any seed is derived.
ExperimentManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                  const std::string& source = "manifest",
                                  std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentManifest load_manifest(const std::filesystem::path& path,
                                 std::optional<std::uint64_t> seed_override = std::nullopt);

/// Loads the file and applies the degradation chain.
PointCloud materialize(const CloudSource& source);

/// Stable 64-bit FNV-1a hash, used to derive per-scenario seeds from ids.
std::uint64_t stable_hash(std::string_view text);

}  // namespace idem
