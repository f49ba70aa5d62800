#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hystwave/errors.hpp"
#include "hystwave/norms.hpp"
#include "hystwave/preisach.hpp"
#include "hystwave/spectral_basis.hpp"
#include "hystwave/trig_series.hpp"

namespace hystwave {

/// Spatial basis plus time grid shared by every solver component.
struct Discretization {
  SpatialBasis basis;
  TimeModes modes;
  int m() const { return basis.m; }
};

Discretization make_discretization(double L, double a, int m, std::size_t n_t, std::size_t n_quad);

/// u_{jk} (k = 1..m) and p_{jl} (l = 0..m), j = -m..m.
struct FourierSolution {
  ModalCoeffs u;
  ModalCoeffs p;

  FourierSolution() = default;
  explicit FourierSolution(int m) : u(m, 1), p(m, 0) {}

  int m() const { return u.m(); }
  /// (2m+1) m + (2m+1)(m+1)
  std::size_t size() const { return u.size() + p.size(); }
  double norm() const;

  Eigen::VectorXd flat() const;
  static FourierSolution from_flat(int m, const Eigen::VectorXd& x);
};

/// Forcing f (Dirichlet modes), h (Neumann modes), boundary pressure at both
/// endpoints as time series, and gamma at both endpoints. Coefficient arrays
/// may carry more modes than the discretization; extra modes are ignored.
struct ProblemData {
  ModalCoeffs f;
  ModalCoeffs h;
  std::array<TrigSeries, 2> p_star;
  BoundaryWeights gamma{1.0, 1.0};

  static ProblemData zero(int m);
};

/// Throws ConfigurationError unless gamma >= 0 at both ends and > 0 at one.
void check_problem(const ProblemData& data);

/// Max of ||f||, ||f_t||, ||h||, ||h_t|| (bulk) and ||p*||, ||p*_t|| (gamma-weighted
/// boundary), all by quadrature on the discretization grid.
double data_delta(const ProblemData& data, const Discretization& disc);

/// Momentum residuals v_{jk} and mass residuals w_{jl} of the homotopy at alpha.
struct ResidualVector {
  ModalCoeffs v;
  ModalCoeffs w;
  double alpha = 0.0;

  /// sqrt(sum (v^2 + w^2) / N_j)
  double norm() const;
};

enum class Execution { serial, parallel };

/// Periodic G_R time series at every quadrature node for the pressure
/// p(x_q, t) = sum p_{jl} psi_l(x_q) e_j(t). Result [q][n].
std::vector<std::vector<double>> periodic_g_R_field(const ModalCoeffs& p, const Discretization& disc,
                                                     const PreisachEvaluator& eval,
                                                     Execution exec = Execution::parallel);

/// Int int (G_R)_t psi_l e_j for |j|, l <= m_out, computed by parts in time.
ModalCoeffs test_time_derivative(const std::vector<std::vector<double>>& g_R, const Discretization& disc,
                                 int m_out);

/// test_time_derivative(periodic_g_R_field(p)) for the retained modes.
/// Execution::serial is the single-threaded reference; both paths are
/// bitwise identical.
ModalCoeffs hysteresis_projection(const ModalCoeffs& p, const Discretization& disc, const PreisachEvaluator& eval,
                                  Execution exec = Execution::parallel);

/// Linear part of the residual, without data and hysteresis. `beta` adds
/// beta * int int p_t psi_l e_j to the mass rows.
ResidualVector apply_linear(const FourierSolution& sol, const Discretization& disc, BoundaryWeights gamma,
                            double alpha, double beta = 0.0);

/// Data part: N_j f_{jk} and N_j (h_{jl} + sum_b gamma_b psi_l(x_b) p*_{b,j}).
ResidualVector data_vector(const ProblemData& data, const Discretization& disc);

ResidualVector assemble_residual(const FourierSolution& sol, const ProblemData& data, const Discretization& disc,
                                 const PreisachEvaluator& eval, double alpha,
                                 Execution exec = Execution::parallel);

/// LU factors of the frequency blocks (j, -j) of the linear operator.
class LinearBlocks {
 public:
  LinearBlocks(const Discretization& disc, BoundaryWeights gamma, double alpha, double beta = 0.0);
  /// Solves apply_linear(x) = rhs.
  FourierSolution solve(const ResidualVector& rhs) const;
  /// Dense block matrix for frequency n (n = 0 or n >= 1).
  const Eigen::MatrixXd& block(int n) const { return blocks_[static_cast<std::size_t>(n)]; }

 private:
  int m_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

struct SolverOptions {
  std::vector<double> alpha_schedule{0.0, 0.25, 0.5, 0.75, 1.0};
  double theta = 0.5;
  double tol_res = 1e-8;  // relative to delta
  int max_iterations = 2000;  // per alpha step
  int stagnation_window = 50;
  double stagnation_reduction = 0.01;
  int max_refinements = 3;  // bisections of a failing alpha step
  /// Adds beta p_t to the inverted linear part, beta estimated from the
  /// current iterate; the fixed point is unchanged.
  bool shift_preconditioner = true;
  Execution execution = Execution::parallel;
};

struct IterationRecord {
  double alpha = 0.0;
  int iteration = 0;
  double residual = 0.0;
  double theta = 0.0;
};

struct SolveTelemetry {
  std::vector<IterationRecord> history;
  std::vector<double> alphas;  // alpha steps actually completed
  int iterations = 0;
  double residual_final = 0.0;
  double tolerance = 0.0;
  double delta = 0.0;
};

struct SolveResult {
  FourierSolution solution;
  SolveTelemetry telemetry;
};

/// Stagnation of the damped iteration; carries the last iterate.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, FourierSolution last, SolveTelemetry telemetry)
      : Error(what), last_(std::move(last)), telemetry_(std::move(telemetry)) {}
  const FourierSolution& last_iterate() const { return last_; }
  const SolveTelemetry& telemetry() const { return telemetry_; }

 private:
  FourierSolution last_;
  SolveTelemetry telemetry_;
};

/// alpha-continuation with damped, lagged-hysteresis iteration.
SolveResult continuation_solve(const ProblemData& data, const Discretization& disc, const PreisachEvaluator& eval,
                               const SolverOptions& options = {});

/// Norm of the mass-equation hysteresis term on the first truncated modes
/// (|j| = m + 1 or l = m + 1), relative to the retained part.
double truncation_indicator(const FourierSolution& sol, const Discretization& disc, const PreisachEvaluator& eval);

}  // namespace hystwave
