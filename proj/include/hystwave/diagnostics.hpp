#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hystwave/galerkin.hpp"

namespace hystwave {

/// One-node inequality audit evaluated at n_t / 2, n_t and 2 n_t samples per
/// period. The slack is taken at 2 n_t; eps_grid is the larger of the two
/// measured halving differences plus a round-off floor.
struct InequalityAudit {
  double slack_coarse = 0.0;
  double slack_fine = 0.0;
  double eps_grid = 0.0;
  bool confined = true;  // sup |p| <= R
  bool passed() const { return slack_fine >= -eps_grid; }
};

/// int G_R[p] p_ttt dt - (K_R / 2) int |p_t|^3 dt; the left side is the
/// by-parts form of -int (G_R)_t p_tt dt. Throws ConfigurationError without K_R.
InequalityAudit ene2_audit(const TrigSeries& p, const PreisachEvaluator& eval, std::size_t n_t);

/// int (G_R)_t p dt = -int G_R p_t dt.
InequalityAudit ene3_audit(const TrigSeries& p, const PreisachEvaluator& eval, std::size_t n_t);

/// Audit over every quadrature node of the pressure field.
struct FieldAudit {
  double min_slack = 0.0;   // min over nodes of slack_fine
  double min_margin = 0.0;  // min over nodes of slack_fine + eps_grid
  double eps_grid = 0.0;    // max over nodes
  double weighted = 0.0;    // sum_q w_q slack_fine (the spatial integral)
  std::size_t nodes = 0;
  std::size_t unconfined = 0;
  bool passed = true;
};

FieldAudit ene2_field_audit(const ModalCoeffs& p, const Discretization& disc, const PreisachEvaluator& eval);
FieldAudit ene3_field_audit(const ModalCoeffs& p, const Discretization& disc, const PreisachEvaluator& eval);

struct EstimateNorms {
  double es1_u_t = 0.0;
  double es1_grad_p = 0.0;
  double es1_p_boundary = 0.0;
  double es2_u_tt_sq = 0.0;
  double es2_p_t_cubed = 0.0;
  double es2_grad_p_t_sq = 0.0;
  double es2_p_t_boundary_sq = 0.0;
  double es3 = 0.0;
  double es4 = 0.0;
};

/// |u_t|^2 + |p_x|^2 + gamma |p|^2 integrated (lhs) against the data pairing
/// int int (f u_t + h p) + int gamma p* p; slack = data - lhs.
struct EnergyPairing {
  double lhs = 0.0;
  double data = 0.0;
  double slack = 0.0;
};

struct Confinement {
  double max_abs_p = 0.0;
  double R = 0.0;
  double max_g_gap = 0.0;  // max |G - G_R| at the quadrature nodes
  bool coincides = false;
};

struct DiagnosticsReport {
  EstimateNorms norms;
  FieldAudit ene2;
  FieldAudit ene3;
  EnergyPairing es1_pairing;
  Confinement confinement;
  double delta = 0.0;
  double solution_norm = 0.0;
  double truncation = 0.0;
  bool converged = false;
  double residual_final = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  std::vector<IterationRecord> history;
  std::optional<double> linear_response_ratio;
};

EstimateNorms estimate_norms(const FourierSolution& sol, const Discretization& disc, const PreisachEvaluator& eval,
                             BoundaryWeights gamma);
EnergyPairing energy_pairing(const FourierSolution& sol, const ProblemData& data, const Discretization& disc);
Confinement confinement_record(const FourierSolution& sol, const Discretization& disc, const PreisachEvaluator& eval);

/// Full diagnostics for a solution; telemetry fills the solver fields.
DiagnosticsReport estimate_suite(const FourierSolution& sol, const ProblemData& data, const Discretization& disc,
                                 const PreisachEvaluator& eval, const SolveTelemetry& telemetry, bool converged);

/// Nested record keyed as norms.es1.*, norms.es2.*, norms.es3, norms.es4,
/// energy.*, confinement.*, delta, solver.*.
nlohmann::json report_json(const DiagnosticsReport& report);

/// Scalar leaves of a JSON object as dotted keys, in key order.
std::vector<std::pair<std::string, nlohmann::json>> flatten(const nlohmann::json& j, const std::string& prefix = "");

/// Header and row with the scalar report keys as columns.
std::string report_csv(const nlohmann::json& report);

/// Plain-text table of the same keys.
std::string report_table(const nlohmann::json& report);

}  // namespace hystwave
