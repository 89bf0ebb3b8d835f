#pragma once

// Run orchestration behind the rchsim command line: simulation with CSV and
// JSON summary output, equivalence and port studies, built-in check suites.
//
// Exit codes: 0 success, 1 I/O or internal error, 2 parse/validation/usage
// failure, 3 non-finite numerics, 4 a reported check failed.

#include <cstdint>
#include <string>
#include <vector>

#include "rch/scenario.hpp"
#include "rch/verify.hpp"

namespace rch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNonFinite = 3;
inline constexpr int kExitCheckFailed = 4;

struct RunOptions {
  std::string out_dir = ".";
  std::uint64_t seed = kDefaultSeed;
  bool quiet = false;
  /// Base name for default output files (scenario file stem).
  std::string stem = "scenario";
};

struct DiagnosticStats {
  std::string name;
  double initial = 0.0;
  double final = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// max_t |v(t) - v(0)|
  double drift = 0.0;
};

DiagnosticStats diagnostic_stats(const std::string& name, const std::vector<double>& values);

struct RunSummary {
  std::string command;
  Json scenario;
  double wall_time_s = 0.0;
  std::size_t steps = 0;
  double final_time = 0.0;
  std::vector<std::string> state_columns;
  std::vector<double> final_state;
  std::vector<DiagnosticStats> diagnostics;
  std::vector<CheckReport> checks;
  std::string csv_path;
  std::string report_path;

  bool all_passed() const;
  Json to_json() const;
};

Json to_json(const CheckReport& r);

/// Integrates the scenario, writes the CSV and the summary, evaluates the
/// scenario's drift checks. Throws NonFinite (with step) and IoError.
RunSummary run_simulation(const ScenarioConfig& c, const RunOptions& opts);
/// Requires an `equivalence` block: the on-set check plus the detector run.
RunSummary run_equivalence(const ScenarioConfig& c, const RunOptions& opts);
/// Requires a `port` block: energy-balance order study (plus the trivial-port
/// identity on the rotor chart for rotor systems).
RunSummary run_port(const ScenarioConfig& c, const RunOptions& opts);
/// Simulation together with every equivalence and port block present.
RunSummary run_verify(const ScenarioConfig& c, const RunOptions& opts);

/// Built-in suites: all, brackets, derivation, casimirs, gradients, equivalence, ports.
const std::vector<std::string>& suite_names();
std::vector<CheckReport> run_suite(const std::string& suite, std::uint64_t seed);

/// Entry point of the rchsim executable.
int run_cli(int argc, char** argv);

}  // namespace rch
