#pragma once

// The aggregated verification suite: a fixed registry of numerical checks,
// grouped by module, run deterministically from one seed.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncm {

/// Invalid suite configuration (exit status 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Environment variable read for the default seed.
inline constexpr const char* kSeedEnvVar = "NCM_SEED";
inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// NCM_SEED when set to an unsigned integer, kDefaultSeed otherwise. A set
/// but malformed value throws ConfigError.
std::uint64_t default_seed();

enum class ReportFormat { Json, Csv };

struct SuiteConfig {
  std::uint64_t seed = kDefaultSeed;
  /// Per-check tolerance overrides, keyed by check name.
  std::map<std::string, double> tolerances;
  std::vector<double> p_grid{1.0, 1.5, 3.0, 3.141592653589793};
  /// Per-module size caps, keyed by module name.
  std::map<std::string, int> dim_caps;
  /// Empty selects every module.
  std::set<std::string> modules;
  std::string output;  // empty: standard output
  ReportFormat format = ReportFormat::Json;

  /// Parses and validates; throws ConfigError. Missing keys keep defaults
  /// (the seed defaults to default_seed()).
  static SuiteConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  /// Throws ConfigError on unknown modules or checks, negative tolerances,
  /// an empty or non-positive p grid, or caps outside module guards.
  void validate() const;
  int cap(const std::string& module) const;
};

struct CheckInfo {
  std::string module;
  std::string name;
  std::string anchor;
  double tolerance = 0.0;
  /// "<=": pass iff measured <= tolerance. ">=": pass iff measured >= tolerance.
  std::string comparison = "<=";
};

/// Every check in registry order.
const std::vector<CheckInfo>& suite_checks();
/// Module names in registry order.
std::vector<std::string> suite_modules();
/// Anchor labels a record may carry.
const std::set<std::string>& known_anchors();

struct CheckRecord {
  std::string module;
  std::string name;
  std::string anchor;
  bool pass = false;
  std::optional<double> measured;  // empty when the check raised
  double tolerance = 0.0;
  std::string comparison;
  double runtime_seconds = 0.0;
  std::string detail;
};

struct ReportDocument {
  std::vector<CheckRecord> records;  // sorted by name
  int total = 0;
  int passed = 0;
  int failed = 0;
  nlohmann::json config;

  nlohmann::json to_json() const;
  std::string to_csv() const;
  /// 0 when every record passed, 1 otherwise.
  int exit_status() const { return failed == 0 ? 0 : 1; }
};

/// Runs the selected modules. Throws ConfigError for invalid configuration.
ReportDocument run_suite(const SuiteConfig& config);

}  // namespace ncm
