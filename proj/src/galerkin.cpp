#include "hystwave/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace hystwave {

Discretization make_discretization(double L, double a, int m, std::size_t n_t, std::size_t n_quad) {
  return Discretization{build_spatial_basis(L, a, m, n_quad), build_time_modes(m, n_t)};
}

double FourierSolution::norm() const {
  double acc = 0.0;
  for (double x : u.flat()) acc += x * x;
  for (double x : p.flat()) acc += x * x;
  return std::sqrt(acc);
}

Eigen::VectorXd FourierSolution::flat() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(size()));
  Eigen::Index i = 0;
  for (double v : u.flat()) x[i++] = v;
  for (double v : p.flat()) x[i++] = v;
  return x;
}

FourierSolution FourierSolution::from_flat(int m, const Eigen::VectorXd& x) {
  FourierSolution s(m);
  if (static_cast<std::size_t>(x.size()) != s.size()) throw ShapeError("FourierSolution::from_flat: size mismatch");
  Eigen::Index i = 0;
  for (double& v : s.u.flat()) v = x[i++];
  for (double& v : s.p.flat()) v = x[i++];
  return s;
}

ProblemData ProblemData::zero(int m) {
  ProblemData d;
  d.f = ModalCoeffs(m, 1);
  d.h = ModalCoeffs(m, 0);
  d.p_star = {TrigSeries(m), TrigSeries(m)};
  return d;
}

void check_problem(const ProblemData& data) {
  const auto& g = data.gamma;
  if (!(g.gamma0 >= 0.0) || !(g.gammaL >= 0.0)) throw ConfigurationError("data.gamma: values must be non-negative");
  if (!(g.gamma0 > 0.0) && !(g.gammaL > 0.0))
    throw ConfigurationError("data.gamma: at least one endpoint value must be positive");
  if (data.f.first() != 1 || data.h.first() != 0) throw ShapeError("data: f needs Dirichlet and h Neumann indexing");
}

namespace {

// Coefficient of (j, s) in c, zero outside its range.
double coeff(const ModalCoeffs& c, int j, int s) {
  if (std::abs(j) > c.m() || s < c.first() || s > c.m()) return 0.0;
  return c(j, s);
}

double series_coeff(const TrigSeries& s, int j) { return std::abs(j) > s.order() ? 0.0 : s[j]; }

ModalCoeffs restrict_to(const ModalCoeffs& c, int m, int first) {
  ModalCoeffs out(m, first);
  for (int j = -m; j <= m; ++j)
    for (int s = first; s <= m; ++s) out(j, s) = coeff(c, j, s);
  return out;
}

FieldSamples boundary_samples(const std::array<TrigSeries, 2>& p_star, const TimeModes& modes, int derivative) {
  FieldSamples s{modes.n_t, 2, std::vector<double>(2 * modes.n_t)};
  for (std::size_t b = 0; b < 2; ++b) {
    const TrigSeries ser = p_star[b].derivative(derivative);
    for (std::size_t n = 0; n < modes.n_t; ++n) s(n, b) = ser.value(modes.t(n));
  }
  return s;
}

struct Couplings {
  Eigen::MatrixXd B;      // [k - 1][l] = int psi_l phi_k'
  Eigen::MatrixXd Gamma;  // [l][l'] = sum_b gamma_b psi_l(x_b) psi_l'(x_b)
  std::vector<double> psi0, psiL;
};

Couplings couplings(const SpatialBasis& b, BoundaryWeights gamma) {
  const int m = b.m;
  Couplings c;
  c.B = Eigen::MatrixXd::Zero(m, m + 1);
  for (int k = 1; k <= m; ++k)
    for (int l = 0; l <= m; ++l) {
      double acc = 0.0;
      for (std::size_t q = 0; q < b.n_quad(); ++q)
        acc += b.quad.weights[q] * b.dphi_q[static_cast<std::size_t>(k - 1)][q] * b.psi_q[static_cast<std::size_t>(l)][q];
      c.B(k - 1, l) = acc;
    }
  for (int l = 0; l <= m; ++l) {
    c.psi0.push_back(b.psi(l, 0.0));
    c.psiL.push_back(b.psi(l, b.L));
  }
  c.Gamma = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int l = 0; l <= m; ++l)
    for (int k = 0; k <= m; ++k)
      c.Gamma(l, k) = gamma.gamma0 * c.psi0[static_cast<std::size_t>(l)] * c.psi0[static_cast<std::size_t>(k)] +
                      gamma.gammaL * c.psiL[static_cast<std::size_t>(l)] * c.psiL[static_cast<std::size_t>(k)];
  return c;
}

}  // namespace

double data_delta(const ProblemData& data, const Discretization& disc) {
  const int m = disc.m();
  const ModalCoeffs f = restrict_to(data.f, m, 1);
  const ModalCoeffs h = restrict_to(data.h, m, 0);
  const auto& b = disc.basis;
  const auto& tm = disc.modes;
  std::array<double, 6> norms{};
  for (int d = 0; d <= 1; ++d) {
    norms[static_cast<std::size_t>(d)] = periodic_norm(
        synthesize_field(f, SpatialFamily::dirichlet, b, tm, b.quad.nodes, d), 2.0, NormRegion::bulk, b, tm.dt);
    norms[static_cast<std::size_t>(2 + d)] = periodic_norm(
        synthesize_field(h, SpatialFamily::neumann, b, tm, b.quad.nodes, d), 2.0, NormRegion::bulk, b, tm.dt);
    // only the modes resolved by the discretization enter the system
    std::array<TrigSeries, 2> ps{TrigSeries(m), TrigSeries(m)};
    for (std::size_t e = 0; e < 2; ++e)
      for (int j = -m; j <= m; ++j) ps[e][j] = series_coeff(data.p_star[e], j);
    norms[static_cast<std::size_t>(4 + d)] =
        periodic_norm(boundary_samples(ps, tm, d), 2.0, NormRegion::boundary, b, tm.dt, data.gamma);
  }
  return *std::max_element(norms.begin(), norms.end());
}

double ResidualVector::norm() const {
  double acc = 0.0;
  for (int j = -v.m(); j <= v.m(); ++j) {
    const double nj = TimeModes::norm(j);
    for (int k = v.first(); k <= v.m(); ++k) acc += v(j, k) * v(j, k) / nj;
    for (int l = w.first(); l <= w.m(); ++l) acc += w(j, l) * w(j, l) / nj;
  }
  return std::sqrt(acc);
}

ResidualVector apply_linear(const FourierSolution& sol, const Discretization& disc, BoundaryWeights gamma,
                            double alpha, double beta) {
  const int m = disc.m();
  if (sol.m() != m) throw ShapeError("apply_linear: solution and discretization disagree on m");
  const auto& b = disc.basis;
  const Couplings c = couplings(b, gamma);
  const double damp = 1.0 - alpha + beta;
  ResidualVector r{ModalCoeffs(m, 1), ModalCoeffs(m, 0), alpha};
  for (int j = -m; j <= m; ++j) {
    const double nj = TimeModes::norm(j);
    for (int k = 1; k <= m; ++k) {
      double acc = (b.lambda[static_cast<std::size_t>(k - 1)] - j * j) * sol.u(j, k) - j * sol.u(-j, k);
      for (int l = 0; l <= m; ++l) acc += c.B(k - 1, l) * sol.p(j, l);
      r.v(j, k) = nj * acc;
    }
    for (int l = 0; l <= m; ++l) {
      double acc = damp * (-j * sol.p(-j, l)) + b.mu[static_cast<std::size_t>(l)] * sol.p(j, l);
      for (int k = 1; k <= m; ++k) acc += j * c.B(k - 1, l) * sol.u(-j, k);
      for (int k = 0; k <= m; ++k) acc += c.Gamma(l, k) * sol.p(j, k);
      r.w(j, l) = nj * acc;
    }
  }
  return r;
}

ResidualVector data_vector(const ProblemData& data, const Discretization& disc) {
  const int m = disc.m();
  const Couplings c = couplings(disc.basis, data.gamma);
  ResidualVector r{ModalCoeffs(m, 1), ModalCoeffs(m, 0), 1.0};
  for (int j = -m; j <= m; ++j) {
    const double nj = TimeModes::norm(j);
    for (int k = 1; k <= m; ++k) r.v(j, k) = nj * coeff(data.f, j, k);
    const double ps0 = series_coeff(data.p_star[0], j);
    const double psL = series_coeff(data.p_star[1], j);
    for (int l = 0; l <= m; ++l)
      r.w(j, l) = nj * (coeff(data.h, j, l) + data.gamma.gamma0 * c.psi0[static_cast<std::size_t>(l)] * ps0 +
                        data.gamma.gammaL * c.psiL[static_cast<std::size_t>(l)] * psL);
  }
  return r;
}

namespace {

// v <- lin + alpha * (hyst - data), on the w rows for hyst.
ResidualVector combine(ResidualVector lin, const ModalCoeffs* hyst, const ResidualVector& data, double alpha) {
  auto lv = lin.v.flat();
  auto dv = data.v.flat();
  for (std::size_t i = 0; i < lv.size(); ++i) lv[i] -= alpha * dv[i];
  auto lw = lin.w.flat();
  auto dw = data.w.flat();
  for (std::size_t i = 0; i < lw.size(); ++i) lw[i] -= alpha * dw[i];
  if (hyst) {
    auto hw = hyst->flat();
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] += alpha * hw[i];
  }
  return lin;
}

}  // namespace

ResidualVector assemble_residual(const FourierSolution& sol, const ProblemData& data, const Discretization& disc,
                                 const PreisachEvaluator& eval, double alpha, Execution exec) {
  if (!eval.convexified()) throw ConfigurationError("assemble_residual: density constants not validated");
  const ResidualVector lin = apply_linear(sol, disc, data.gamma, alpha);
  const ResidualVector dat = data_vector(data, disc);
  if (alpha == 0.0) return combine(lin, nullptr, dat, alpha);
  const ModalCoeffs hyst = hysteresis_projection(sol.p, disc, eval, exec);
  return combine(lin, &hyst, dat, alpha);
}

LinearBlocks::LinearBlocks(const Discretization& disc, BoundaryWeights gamma, double alpha, double beta)
    : m_(disc.m()) {
  const int m = m_;
  const auto& b = disc.basis;
  const Couplings c = couplings(b, gamma);
  const double damp = 1.0 - alpha + beta;
  for (int n = 0; n <= m; ++n) {
    const int copies = n == 0 ? 1 : 2;
    const int size = copies * (2 * m + 1);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size, size);
    // slot 0 holds j = n, slot 1 holds j = -n
    auto slot = [&](int j) { return (n == 0 || j == n) ? 0 : 1; };
    auto iu = [&](int j, int k) { return slot(j) * m + (k - 1); };
    auto ip = [&](int j, int l) { return copies * m + slot(j) * (m + 1) + l; };
    for (int s = 0; s < copies; ++s) {
      const int j = s == 0 ? n : -n;
      const double nj = TimeModes::norm(j);
      for (int k = 1; k <= m; ++k) {
        M(iu(j, k), iu(j, k)) += nj * (b.lambda[static_cast<std::size_t>(k - 1)] - j * j);
        M(iu(j, k), iu(-j, k)) += -nj * j;
        for (int l = 0; l <= m; ++l) M(iu(j, k), ip(j, l)) += nj * c.B(k - 1, l);
      }
      for (int l = 0; l <= m; ++l) {
        M(ip(j, l), ip(-j, l)) += -nj * damp * j;
        M(ip(j, l), ip(j, l)) += nj * b.mu[static_cast<std::size_t>(l)];
        for (int k = 1; k <= m; ++k) M(ip(j, l), iu(-j, k)) += nj * j * c.B(k - 1, l);
        for (int k = 0; k <= m; ++k) M(ip(j, l), ip(j, k)) += nj * c.Gamma(l, k);
      }
    }
    lu_.emplace_back(M);
    blocks_.push_back(std::move(M));
  }
}

FourierSolution LinearBlocks::solve(const ResidualVector& rhs) const {
  const int m = m_;
  FourierSolution x(m);
  for (int n = 0; n <= m; ++n) {
    const int copies = n == 0 ? 1 : 2;
    Eigen::VectorXd r(copies * (2 * m + 1));
    for (int s = 0; s < copies; ++s) {
      const int j = s == 0 ? n : -n;
      for (int k = 1; k <= m; ++k) r[s * m + k - 1] = rhs.v(j, k);
      for (int l = 0; l <= m; ++l) r[copies * m + s * (m + 1) + l] = rhs.w(j, l);
    }
    const Eigen::VectorXd y = lu_[static_cast<std::size_t>(n)].solve(r);
    for (int s = 0; s < copies; ++s) {
      const int j = s == 0 ? n : -n;
      for (int k = 1; k <= m; ++k) x.u(j, k) = y[s * m + k - 1];
      for (int l = 0; l <= m; ++l) x.p(j, l) = y[copies * m + s * (m + 1) + l];
    }
  }
  return x;
}

namespace {

// beta = alpha * int int (G_R)_t p_t / int int p_t^2, clamped at zero.
double shift_estimate(const ModalCoeffs& hyst, const ModalCoeffs& p, double alpha) {
  double num = 0.0;
  double den = 0.0;
  for (int j = -p.m(); j <= p.m(); ++j)
    for (int l = 0; l <= p.m(); ++l) {
      const double pt = -j * p(-j, l);
      num += hyst(j, l) * pt;
      den += TimeModes::norm(j) * pt * pt;
    }
  if (!(den > 0.0)) return 0.0;
  return std::max(0.0, alpha * num / den);
}

enum class StepOutcome { converged, stagnated };

struct StepState {
  FourierSolution u;
  double residual = 0.0;
};

StepOutcome run_alpha_step(double alpha, StepState& st, const ProblemData& data, const Discretization& disc,
                           const PreisachEvaluator& eval, const SolverOptions& opt, const ResidualVector& dat,
                           double tol, SolveTelemetry& tel) {
  double theta = opt.theta;
  int streak = 0;
  std::deque<double> window;
  double prev = 0.0;
  for (int it = 0;; ++it) {
    ModalCoeffs hyst;
    const bool hysteretic = alpha > 0.0;
    if (hysteretic) hyst = hysteresis_projection(st.u.p, disc, eval, opt.execution);
    const ResidualVector r =
        combine(apply_linear(st.u, disc, data.gamma, alpha), hysteretic ? &hyst : nullptr, dat, alpha);
    const double res = r.norm();
    st.residual = res;
    tel.history.push_back({alpha, it, res, theta});
    ++tel.iterations;
    if (res <= tol) return StepOutcome::converged;
    if (it >= opt.max_iterations) return StepOutcome::stagnated;
    window.push_back(res);
    if (static_cast<int>(window.size()) > opt.stagnation_window) {
      if (res > (1.0 - opt.stagnation_reduction) * window.front()) return StepOutcome::stagnated;
      window.pop_front();
    }
    if (it > 0 && res > prev) {
      theta *= 0.5;
      streak = 0;
    } else if (++streak >= 5 && theta < opt.theta) {
      theta = std::min(opt.theta, 2.0 * theta);
      streak = 0;
    }
    prev = res;
    const double beta = (opt.shift_preconditioner && hysteretic) ? shift_estimate(hyst, st.u.p, alpha) : 0.0;
    const FourierSolution step = LinearBlocks(disc, data.gamma, alpha, beta).solve(r);
    // Without hysteresis the linear solve is exact; damping only slows it.
    const double t = hysteretic ? theta : 1.0;
    auto u = st.u.u.flat();
    auto su = step.u.flat();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= t * su[i];
    auto p = st.u.p.flat();
    auto sp = step.p.flat();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= t * sp[i];
  }
}

}  // namespace

SolveResult continuation_solve(const ProblemData& data, const Discretization& disc, const PreisachEvaluator& eval,
                               const SolverOptions& opt) {
  check_problem(data);
  if (!eval.convexified()) throw ConfigurationError("continuation_solve: density constants not validated");
  const auto& sched = opt.alpha_schedule;
  if (sched.empty() || sched.back() != 1.0) throw ConfigurationError("solver.alpha_schedule: must end at 1");
  for (std::size_t i = 0; i < sched.size(); ++i) {
    if (!(sched[i] >= 0.0 && sched[i] <= 1.0)) throw ConfigurationError("solver.alpha_schedule: values must lie in [0, 1]");
    if (i > 0 && !(sched[i] > sched[i - 1])) throw ConfigurationError("solver.alpha_schedule: must be increasing");
  }
  if (!(opt.theta > 0.0 && opt.theta <= 1.0)) throw ConfigurationError("solver.theta: must lie in (0, 1]");
  if (!(opt.tol_res > 0.0)) throw ConfigurationError("solver.tol_res: must be positive");

  SolveTelemetry tel;
  tel.delta = data_delta(data, disc);
  tel.tolerance = opt.tol_res * tel.delta;
  const ResidualVector dat = data_vector(data, disc);

  StepState st{FourierSolution(disc.m()), 0.0};
  std::deque<double> pending(sched.begin(), sched.end());
  double done = sched.front() == 0.0 ? -1.0 : 0.0;  // last converged alpha
  int refined = 0;
  while (!pending.empty()) {
    const double alpha = pending.front();
    const FourierSolution start = st.u;
    const StepOutcome out = run_alpha_step(alpha, st, data, disc, eval, opt, dat, tel.tolerance, tel);
    if (out == StepOutcome::converged) {
      pending.pop_front();
      tel.alphas.push_back(alpha);
      done = alpha;
      continue;
    }
    const double lo = std::max(done, 0.0);
    if (refined >= opt.max_refinements || !(alpha - lo > 1e-6)) {
      tel.residual_final = st.residual;
      std::ostringstream msg;
      msg << "solver stagnated at alpha = " << alpha << " (residual " << st.residual << ", tolerance "
          << tel.tolerance << ", " << tel.iterations << " iterations)";
      throw NonConvergence(msg.str(), st.u, tel);
    }
    ++refined;
    st.u = start;
    pending.push_front(0.5 * (lo + alpha));
  }
  tel.residual_final = st.residual;
  return {st.u, tel};
}

double truncation_indicator(const FourierSolution& sol, const Discretization& disc, const PreisachEvaluator& eval) {
  const int m = disc.m();
  if (disc.modes.n_t <= static_cast<std::size_t>(2 * (m + 1) + 1)) return std::nan("");
  const auto field = periodic_g_R_field(sol.p, disc, eval);
  const ModalCoeffs wide = test_time_derivative(field, disc, m + 1);
  double kept = 0.0;
  double cut = 0.0;
  for (int j = -(m + 1); j <= m + 1; ++j)
    for (int l = 0; l <= m + 1; ++l) {
      const double x = wide(j, l) * wide(j, l) / TimeModes::norm(j);
      (std::abs(j) <= m && l <= m ? kept : cut) += x;
    }
  if (!(kept > 0.0)) return 0.0;
  return std::sqrt(cut / kept);
}

}  // namespace hystwave
