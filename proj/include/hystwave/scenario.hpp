#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hystwave/diagnostics.hpp"

namespace hystwave {

/// Parsed scenario. `effective` is the configuration with every default
/// filled in; running from it reproduces the same report.
struct ScenarioConfig {
  nlohmann::json effective;
};

/// Validates field names and types; errors name the offending field.
ScenarioConfig parse_config(const nlohmann::json& raw);
ScenarioConfig load_config(const std::filesystem::path& path);

PreisachDensity build_density(const ScenarioConfig& cfg);  // validated, carries constants
Discretization build_discretization(const ScenarioConfig& cfg);
ProblemData build_problem(const ScenarioConfig& cfg, const Discretization& disc);
SolverOptions build_solver_options(const ScenarioConfig& cfg);

/// Exit codes of run/sweep/validate.
enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_outside_regime = 2 };

struct RunOutcome {
  int exit_code = exit_ok;
  std::string status;  // "converged", "unconfined", "nonconvergence", "memory-not-periodic"
  std::string message;
  nlohmann::json report;
  std::optional<FourierSolution> solution;  // converged or last iterate
};

/// Solves and diagnoses one scenario. Exit 0 on convergence with max|p| <= R,
/// 2 on nonconvergence or loss of confinement. Configuration problems throw.
RunOutcome solve_scenario(const ScenarioConfig& cfg);

/// solve_scenario plus report JSON, norms CSV and probe series under out_dir.
RunOutcome run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Data amplitude giving delta = target (0 for target 0).
double amplitude_for_delta(const ScenarioConfig& cfg, double target);

struct SweepRow {
  double delta = 0.0;
  double amplitude = 0.0;
  RunOutcome outcome;
  bool converged = false;
  bool confined = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int delta_star_row = -1;  // largest delta that converged with confinement
};

/// Runs the scenario once per delta value (data rescaled to that delta).
/// Density and basis are validated before any row.
SweepResult sweep_delta(const ScenarioConfig& cfg, const std::vector<double>& deltas);
std::string sweep_csv(const SweepResult& result);

/// Density and basis checks only. Samples `samples` random (r, v) points
/// with the given seed to confirm 0 <= rho <= rho*. Returns the constants.
nlohmann::json validate_scenario(const ScenarioConfig& cfg, std::uint64_t seed, int samples = 1000);

/// Time series t,x,u,u_t,p,p_t,g_R at the probe points.
void write_probes(std::ostream& out, const FourierSolution& sol, const Discretization& disc,
                  const PreisachEvaluator& eval, const std::vector<double>& xs);

}  // namespace hystwave
