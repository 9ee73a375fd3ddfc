#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "neelgap/verifier.hpp"

namespace neelgap {

/// Malformed or inconsistent run configuration (exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Caps {
  double max_state_bits = 20.0;
  Eigen::Index dense_cap = 4096;
  std::uint64_t max_full_dim = std::uint64_t{1} << 16;
};

struct ScalingSpec {
  int d = 1;
  Spin spin{};
  std::vector<int> R_values{8, 16, 32, 64};
  double exponent_tolerance = 0.15;
};

struct RunConfig {
  std::vector<LatticeSpec> lattices;
  std::vector<double> B_list{0.0, 0.5};
  std::vector<double> beta_list{1.0};
  bool zero_temperature = true;
  std::vector<int> R_list{1};
  std::vector<double> epsilon_list{0.1};
  std::vector<std::string> scenarios;  // empty selects the whole catalog
  std::string output_dir = "neelgap-out";
  Caps caps;
  std::uint64_t seed = 20240601;
  double tolerance = 1e-9;
  int threads = 1;
  int samples = 8;  // random trial states / field samples per point
  CutoffParams cutoff;
  WindowSpec windows;
  ScalingSpec scaling;
  bool inject_defect = false;
  /// Run R values whose Omega_2R does not fit (flagged "clipped"); false skips them.
  bool clip = true;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

struct ScenarioInfo {
  std::string name;
  std::string anchor;
  std::string parameters;
};

const std::vector<ScenarioInfo>& scenario_catalog();

enum class Status { pass, fail, skip };
std::string to_string(Status s);

struct ScenarioResult {
  std::string scenario;
  nlohmann::json params;
  Status status = Status::skip;
  std::string reason;
  nlohmann::json report;
  std::vector<std::string> structure_rows;
  std::vector<std::string> scaling_rows;
};

struct RunSummary {
  std::vector<ScenarioResult> results;  // sorted by scenario name, then parameters
  int passed = 0, failed = 0, skipped = 0;
  int exit_code() const { return failed > 0 ? 2 : 0; }
};

/// Seed of one scenario instance: FNV-1a of name and parameters mixed with the base seed.
std::uint64_t scenario_seed(std::uint64_t base, const std::string& scenario, const nlohmann::json& params);

RunSummary run(const RunConfig& config);
/// report.json, scaling.csv and structure.csv under config.output_dir.
void write_outputs(const RunSummary& summary, const RunConfig& config);
nlohmann::json report_json(const RunSummary& summary, const RunConfig& config, bool with_timestamp = true);

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 2;
inline constexpr int kExitConfig = 3;

}  // namespace neelgap
