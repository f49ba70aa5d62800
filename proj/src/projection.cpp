#include <cmath>
#include <exception>
#include <string>

#include "hystwave/galerkin.hpp"

namespace hystwave {

namespace {

TrigSeries node_series(const ModalCoeffs& p, const SpatialBasis& basis, std::size_t q) {
  TrigSeries s(p.m());
  for (int j = -p.m(); j <= p.m(); ++j) {
    double acc = 0.0;
    for (int l = 0; l <= p.m(); ++l) acc += p(j, l) * basis.psi_q[static_cast<std::size_t>(l)][q];
    s[j] = acc;
  }
  return s;
}

std::vector<double> node_g_R(const ModalCoeffs& p, const Discretization& disc, const PreisachEvaluator& eval,
                             std::size_t q) {
  const PeriodicSignal signal = resolve_signal(node_series(p, disc.basis, q), disc.modes.n_t);
  return periodic_preisach_response(eval, signal).g_R;
}

void check_inputs(const ModalCoeffs& p, const Discretization& disc, const PreisachEvaluator& eval) {
  if (!eval.convexified()) throw ConfigurationError("hysteresis projection needs validated density constants");
  if (p.m() != disc.m() || p.first() != 0) throw ShapeError("hysteresis projection: pressure coefficients do not match basis");
}

}  // namespace

std::vector<std::vector<double>> periodic_g_R_field(const ModalCoeffs& p, const Discretization& disc,
                                                     const PreisachEvaluator& eval, Execution exec) {
  check_inputs(p, disc, eval);
  const std::size_t nq = disc.basis.n_quad();
  std::vector<std::vector<double>> out(nq);
  if (exec == Execution::serial) {
    for (std::size_t q = 0; q < nq; ++q) out[q] = node_g_R(p, disc, eval, q);
    return out;
  }
  // Exceptions may not leave the parallel region; keep the first by node index.
  std::vector<std::exception_ptr> errors(nq);
  const long count = static_cast<long>(nq);
#pragma omp parallel for schedule(dynamic, 1)
  for (long q = 0; q < count; ++q) {
    try {
      out[static_cast<std::size_t>(q)] = node_g_R(p, disc, eval, static_cast<std::size_t>(q));
    } catch (...) {
      errors[static_cast<std::size_t>(q)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

ModalCoeffs test_time_derivative(const std::vector<std::vector<double>>& g_R, const Discretization& disc,
                                 int m_out) {
  const auto& b = disc.basis;
  const auto& tm = disc.modes;
  if (g_R.size() != b.n_quad()) throw ShapeError("test_time_derivative: one series per quadrature node expected");
  if (tm.n_t <= static_cast<std::size_t>(2 * m_out + 1))
    throw GridError("test_time_derivative: n_t = " + std::to_string(tm.n_t) + " aliases m = " + std::to_string(m_out));
  std::vector<std::vector<double>> e(static_cast<std::size_t>(2 * m_out + 1), std::vector<double>(tm.n_t));
  for (int j = -m_out; j <= m_out; ++j)
    for (std::size_t n = 0; n < tm.n_t; ++n)
      e[static_cast<std::size_t>(j + m_out)][n] = std::abs(j) <= tm.m ? tm.e(j, n) : time_mode(j, tm.t(n));
  // int (G_R)_t e_j dt = -int G_R (e_j)' dt = -j int G_R e_{-j} dt
  ModalCoeffs out(m_out, 0);
  std::vector<double> tested(static_cast<std::size_t>(2 * m_out + 1));
  for (std::size_t q = 0; q < b.n_quad(); ++q) {
    const auto& g = g_R[q];
    if (g.size() != tm.n_t) throw ShapeError("test_time_derivative: series length differs from n_t");
    for (int j = -m_out; j <= m_out; ++j) {
      const auto& em = e[static_cast<std::size_t>(-j + m_out)];
      double acc = 0.0;
      for (std::size_t n = 0; n < tm.n_t; ++n) acc += g[n] * em[n];
      tested[static_cast<std::size_t>(j + m_out)] = -j * acc * tm.dt;
    }
    const double x = b.quad.nodes[q];
    for (int l = 0; l <= m_out; ++l) {
      const double wpsi = b.quad.weights[q] * (l <= b.m ? b.psi_q[static_cast<std::size_t>(l)][q] : b.psi(l, x));
      for (int j = -m_out; j <= m_out; ++j) out(j, l) += wpsi * tested[static_cast<std::size_t>(j + m_out)];
    }
  }
  return out;
}

ModalCoeffs hysteresis_projection(const ModalCoeffs& p, const Discretization& disc, const PreisachEvaluator& eval,
                                  Execution exec) {
  return test_time_derivative(periodic_g_R_field(p, disc, eval, exec), disc, disc.m());
}

}  // namespace hystwave
