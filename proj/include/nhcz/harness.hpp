#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhcz/ball_index.hpp"
#include "nhcz/balls.hpp"
#include "nhcz/czop.hpp"
#include "nhcz/fspaces.hpp"
#include "nhcz/mspace.hpp"
#include "nhcz/pairs.hpp"
#include "nhcz/report.hpp"

namespace nhcz {

/// A reproducible instance: (kind, size, seed) determines everything else.
struct Scenario {
  std::string kind;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  DiscreteSpace space;
  DominatingFunction lambda;
  /// Kernel used by operator checks: "bergman" or "antisymmetric-lambda".
  std::string kernel_name;
  double kernel_m = 1.0;
  /// Generation facts (non-doubling witness, fitted constants).
  nlohmann::json info = nlohmann::json::object();

  std::string id() const;
};

std::vector<std::string> scenario_kinds();

/// Kinds: line3-canonical, grid, cluster-spike, power-floor-line, bergman-sample.
Scenario generate(const std::string& kind, std::size_t size, std::uint64_t seed);

nlohmann::json to_json(const Scenario& s);
/// Regenerates from (kind, size, seed) when only those are given; otherwise loads space and lambda.
Scenario scenario_from_json(const nlohmann::json& j);

Kernel scenario_kernel(const Scenario& s);

/// Seeded test functions: "random-sign", "mean-zero", "gaussian", "spike", "indicator", "smooth".
FunctionOnSpace scenario_function(const Scenario& s, const std::string& family, std::uint64_t seed);

/// Mixes two 64-bit values into an independent seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Random valid infinity-variant atomic block: two sub-balls of a host ball with
/// maximal-size indicator atoms and opposite signs balancing the integral.
AtomicBlock random_atomic_block(const BallIndex& index, std::mt19937_64& rng);

struct ScenarioSpec {
  std::string kind;
  std::size_t size = 0;
  std::uint64_t seed = 7;
};

struct SuiteConfig {
  std::vector<ScenarioSpec> scenarios;
  /// Check names; "all" expands to every check.
  std::vector<std::string> checks;
  PairScanOptions pairs;
  std::uint64_t seed = 7;
  /// Adds a corrupted decomposition to the cz check (its failure is expected).
  bool inject_fault = false;
  /// Compare constants between sizes s and 2s of the same kind and seed.
  bool drift = true;
  double drift_factor = 2.0;

  static SuiteConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SuiteRecord {
  std::string scenario;
  std::string kind;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  CheckReport report;
  double wall_ms = 0.0;

  nlohmann::json to_json(bool with_timing = true) const;
};

struct DriftRecord {
  std::string check;
  std::string kind;
  std::uint64_t seed = 0;
  std::string value;
  std::size_t size_small = 0;
  std::size_t size_large = 0;
  double small = 0.0;
  double large = 0.0;
  /// max(large / small, small / large); infinity if exactly one side is zero.
  double factor = 1.0;
  bool flagged = false;

  nlohmann::json to_json() const;
};

struct SuiteResult {
  std::vector<SuiteRecord> records;
  std::vector<DriftRecord> drift;

  /// All exact assertions held.
  bool passed() const;
  std::size_t failed_count() const;
  /// One JSON document per line: records then drift entries.
  std::string to_jsonl(bool with_timing = true) const;
  std::string to_csv() const;
};

std::vector<std::string> check_names();

/// Runs one named check on a scenario.
CheckReport run_check(const std::string& name, const Scenario& scenario, const SuiteConfig& config);

SuiteResult run_suite(const SuiteConfig& config);

/// Size-doubling comparison of every value whose key starts with "constant".
std::vector<DriftRecord> compare_sizes(const std::vector<SuiteRecord>& records, double factor);

}  // namespace nhcz
