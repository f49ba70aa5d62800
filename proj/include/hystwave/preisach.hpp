#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hystwave/density.hpp"
#include "hystwave/memory.hpp"
#include "hystwave/trig_series.hpp"

namespace hystwave {

/// G[p], G_R[p], potential V[p] and dissipation D[p] at one instant.
/// g_R is NaN when the convexified operator was not requested.
struct OperatorOutputs {
  double g = 0.0;
  double g_R = 0.0;
  double v_pot = 0.0;
  double d_diss = 0.0;
};

/// Integrates the inner density integrals along the memory curve. Each linear
/// piece of r -> xi_r is split where the integrand stops being smooth (density
/// breaks, r = R, |xi_r| = R - r) and every panel gets a Gauss-Legendre rule
/// of the requested order.
class PreisachEvaluator {
 public:
  /// The convexified operator is available iff the density carries validated constants.
  explicit PreisachEvaluator(PreisachDensity density, std::size_t order = 16);

  bool convexified() const { return rho_R_.has_value(); }
  const PreisachDensity& density() const { return density_; }
  std::size_t order() const { return order_; }

  OperatorOutputs outputs(const MemoryState& memory, bool with_convexified = true) const;
  double g(const MemoryState& memory) const;
  double g_R(const MemoryState& memory) const;

 private:
  template <class Visit>
  void for_each_node(const MemoryState& memory, Visit&& visit) const;

  PreisachDensity density_;
  std::optional<ConvexifiedDensity> rho_R_;
  std::size_t order_;
  std::vector<double> r_breaks_;
  std::vector<double> v_breaks_;
};

/// Evaluates all four operator outputs; throws GridError for a zero-order rule
/// and ConfigurationError if `convexified` is set on an unvalidated density.
OperatorOutputs preisach_eval(const PreisachDensity& density, const MemoryState& memory,
                              bool convexified, std::size_t order = 64);

/// Operator outputs along a trajectory started from the virgin state.
std::vector<OperatorOutputs> preisach_trajectory(const PreisachEvaluator& eval,
                                                 std::span<const double> samples);

/// Periodic regime of G_R (and G) at the sample instants: the signal is fed
/// twice from the virgin state and the second period is returned. Throws
/// MemoryNotPeriodic if the memory after the second period differs from the
/// one after the first by more than `tol` (scaled by the input amplitude).
struct PeriodicResponse {
  std::vector<double> g_R;
  std::vector<double> g;  // empty unless requested
  double memory_drift = 0.0;
};

PeriodicResponse periodic_preisach_response(const PreisachEvaluator& eval, const PeriodicSignal& signal,
                                            bool with_plain = false, double tol = 1e-10);

/// Discrete residuals of the play energy balance and of the monotonicity
/// identity, evaluated on the trajectory with contact onsets resolved
/// (play_resolved_trajectory). One entry per resolved step.
struct PlayResiduals {
  std::vector<double> energy;  // d(xi) p - d(xi^2)/2 - |r d(xi)|
  std::vector<double> mono;    // d(xi) (d(p) - d(xi))
};

PlayResiduals play_energy_residuals(double r, std::span<const double> samples);

/// Residual d(G) p - d(V) - |d(D)| per sample step of a Preisach trajectory.
std::vector<double> preisach_energy_residuals(std::span<const double> samples,
                                              std::span<const OperatorOutputs> outputs);

struct GrowthReport {
  double max_value_ratio = 0.0;  // max |G_R| / (H_rho ||p||^2)
  double max_rate_ratio = 0.0;   // max |dG_R| / (H_rho ||p|| |dp|)
  std::size_t violations = 0;    // samples breaking either quadratic-growth bound
  bool coincidence_checked = false;  // ||p||_inf <= R
  double max_coincidence_gap = 0.0;  // max |G - G_R| when checked
  std::vector<double> g;
  std::vector<double> g_R;
};

/// Checks the quadratic growth bounds of G_R at every step and, when the
/// input stays inside [-R, R], that G and G_R coincide.
GrowthReport growth_and_coincidence_check(const PreisachEvaluator& eval, std::span<const double> samples);

/// CSV with header t,p,xi_r1,...,xi_rK,g,g_R,V,D (g_R empty without constants).
void write_trajectory_csv(std::ostream& out, std::span<const double> t, std::span<const double> p,
                          std::span<const double> radii, const PreisachEvaluator& eval);

struct TrajectoryInput {
  std::vector<double> t;
  std::vector<double> p;
};

/// Reads the t and p columns of a trajectory CSV (other columns ignored).
TrajectoryInput read_trajectory_csv(std::istream& in);

}  // namespace hystwave
