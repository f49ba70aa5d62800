#include "hystwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace hystwave {

namespace {

double signal_sup(const PeriodicSignal& s) {
  double sup = 0.0;
  for (double v : s.samples) sup = std::max(sup, std::abs(v));
  for (const auto& e : s.extrema) sup = std::max(sup, std::abs(e.value));
  return sup;
}

struct NodeValue {
  double value = 0.0;
  double scale = 0.0;  // magnitude of the summed terms, for the round-off floor
};

NodeValue ene2_value(const TrigSeries& p, const PreisachEvaluator& eval, std::size_t n_t, double K_R) {
  const PeriodicSignal sig = resolve_signal(p, n_t);
  const std::vector<double> g = periodic_preisach_response(eval, sig).g_R;
  const std::vector<double> pt = p.derivative(1).sample(n_t);
  const std::vector<double> pttt = p.derivative(3).sample(n_t);
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(n_t);
  double lhs = 0.0, rhs = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < n_t; ++n) {
    lhs += g[n] * pttt[n];
    scale += std::abs(g[n] * pttt[n]);
    rhs += std::pow(std::abs(pt[n]), 3);
  }
  return {dt * lhs - 0.5 * K_R * dt * rhs, dt * (scale + 0.5 * K_R * rhs)};
}

NodeValue ene3_value(const TrigSeries& p, const PreisachEvaluator& eval, std::size_t n_t) {
  const PeriodicSignal sig = resolve_signal(p, n_t);
  const std::vector<double> g = periodic_preisach_response(eval, sig).g_R;
  const std::vector<double> pt = p.derivative(1).sample(n_t);
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(n_t);
  double acc = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < n_t; ++n) {
    acc -= g[n] * pt[n];
    scale += std::abs(g[n] * pt[n]);
  }
  return {dt * acc, dt * scale};
}

template <class Eval>
InequalityAudit grid_audit(const TrigSeries& p, const PreisachEvaluator& eval, std::size_t n_t, Eval&& value) {
  const auto& k = eval.density().constants();
  if (!k) throw ConfigurationError("inequality audit needs validated density constants");
  InequalityAudit a;
  const NodeValue half = value(n_t / 2);
  const NodeValue coarse = value(n_t);
  const NodeValue fine = value(2 * n_t);
  a.slack_coarse = coarse.value;
  a.slack_fine = fine.value;
  // Larger of the last two halving differences: a single difference can
  // undershoot while the error still changes sign.
  a.eps_grid = std::max(std::abs(half.value - coarse.value), std::abs(coarse.value - fine.value)) +
               1e-13 * std::max({half.scale, coarse.scale, fine.scale});
  a.confined = signal_sup(resolve_signal(p, 2 * n_t)) <= k->R;
  return a;
}

TrigSeries node_series(const ModalCoeffs& p, const SpatialBasis& b, double x) {
  TrigSeries s(p.m());
  for (int j = -p.m(); j <= p.m(); ++j) {
    double acc = 0.0;
    for (int l = 0; l <= p.m(); ++l) acc += p(j, l) * b.psi(l, x);
    s[j] = acc;
  }
  return s;
}

template <class Audit>
FieldAudit field_audit(const ModalCoeffs& p, const Discretization& disc, Audit&& audit) {
  FieldAudit out;
  out.min_slack = std::numeric_limits<double>::infinity();
  out.min_margin = std::numeric_limits<double>::infinity();
  const auto& b = disc.basis;
  const std::size_t nq = b.n_quad();
  std::vector<InequalityAudit> per(nq);
  const long count = static_cast<long>(nq);
#pragma omp parallel for schedule(dynamic, 1)
  for (long q = 0; q < count; ++q)
    per[static_cast<std::size_t>(q)] = audit(node_series(p, b, b.quad.nodes[static_cast<std::size_t>(q)]));
  for (std::size_t q = 0; q < nq; ++q) {
    const auto& a = per[q];
    out.min_slack = std::min(out.min_slack, a.slack_fine);
    out.min_margin = std::min(out.min_margin, a.slack_fine + a.eps_grid);
    out.eps_grid = std::max(out.eps_grid, a.eps_grid);
    out.weighted += b.quad.weights[q] * a.slack_fine;
    if (!a.confined) ++out.unconfined;
    if (!a.passed()) out.passed = false;
  }
  out.nodes = nq;
  return out;
}

}  // namespace

InequalityAudit ene2_audit(const TrigSeries& p, const PreisachEvaluator& eval, std::size_t n_t) {
  const auto& k = eval.density().constants();
  if (!k) throw ConfigurationError("ene2 audit needs K_R (validated density constants)");
  const double K_R = k->K_R;
  return grid_audit(p, eval, n_t, [&](std::size_t n) { return ene2_value(p, eval, n, K_R); });
}

InequalityAudit ene3_audit(const TrigSeries& p, const PreisachEvaluator& eval, std::size_t n_t) {
  return grid_audit(p, eval, n_t, [&](std::size_t n) { return ene3_value(p, eval, n); });
}

FieldAudit ene2_field_audit(const ModalCoeffs& p, const Discretization& disc, const PreisachEvaluator& eval) {
  return field_audit(p, disc, [&](const TrigSeries& s) { return ene2_audit(s, eval, disc.modes.n_t); });
}

FieldAudit ene3_field_audit(const ModalCoeffs& p, const Discretization& disc, const PreisachEvaluator& eval) {
  return field_audit(p, disc, [&](const TrigSeries& s) { return ene3_audit(s, eval, disc.modes.n_t); });
}

namespace {

FieldSamples boundary_field(const ModalCoeffs& p, const Discretization& disc, int time_order) {
  const std::vector<double> ends{0.0, disc.basis.L};
  return synthesize_field(p, SpatialFamily::neumann, disc.basis, disc.modes, ends, time_order);
}

double sum_pow(const FieldSamples& f, const std::vector<double>& w, double q, double dt) {
  double acc = 0.0;
  for (std::size_t n = 0; n < f.n_t; ++n)
    for (std::size_t i = 0; i < f.n_x; ++i) acc += w[i] * std::pow(std::abs(f(n, i)), q);
  return acc * dt;
}

}  // namespace

EstimateNorms estimate_norms(const FourierSolution& sol, const Discretization& disc, const PreisachEvaluator& eval,
                             BoundaryWeights gamma) {
  const auto& b = disc.basis;
  const auto& tm = disc.modes;
  const auto& x = b.quad.nodes;
  const double dt = tm.dt;
  auto U = [&](int t_order, int x_order) {
    return synthesize_field(sol.u, SpatialFamily::dirichlet, b, tm, x, t_order, x_order);
  };
  auto P = [&](int t_order, int x_order) {
    return synthesize_field(sol.p, SpatialFamily::neumann, b, tm, x, t_order, x_order);
  };
  EstimateNorms e;
  e.es1_u_t = periodic_norm(U(1, 0), 2.0, NormRegion::bulk, b, dt);
  e.es1_grad_p = periodic_norm(P(0, 1), 2.0, NormRegion::bulk, b, dt);
  e.es1_p_boundary = periodic_norm(boundary_field(sol.p, disc, 0), 2.0, NormRegion::boundary, b, dt, gamma);
  e.es2_u_tt_sq = std::pow(periodic_norm(U(2, 0), 2.0, NormRegion::bulk, b, dt), 2);
  e.es2_p_t_cubed = std::pow(periodic_norm(P(1, 0), 3.0, NormRegion::bulk, b, dt), 3);
  e.es2_grad_p_t_sq = std::pow(periodic_norm(P(1, 1), 2.0, NormRegion::bulk, b, dt), 2);
  e.es2_p_t_boundary_sq =
      std::pow(periodic_norm(boundary_field(sol.p, disc, 1), 2.0, NormRegion::boundary, b, dt, gamma), 2);
  e.es3 = periodic_norm(U(1, 1), 2.0, NormRegion::bulk, b, dt);

  // (G_R)_t by centered differences of the periodic response
  const auto g = periodic_g_R_field(sol.p, disc, eval);
  const std::size_t N = tm.n_t;
  double es4 = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    double s = 0.0;
    for (std::size_t q = 0; q < b.n_quad(); ++q) {
      const double d = (g[q][(n + 1) % N] - g[q][(n + N - 1) % N]) / (2.0 * dt);
      s += b.quad.weights[q] * d * d;
    }
    es4 += std::pow(s, 1.5);
  }
  e.es4 = es4 * dt;
  return e;
}

EnergyPairing energy_pairing(const FourierSolution& sol, const ProblemData& data, const Discretization& disc) {
  const auto& b = disc.basis;
  const auto& tm = disc.modes;
  const int m = disc.m();
  const auto& x = b.quad.nodes;
  const double dt = tm.dt;
  ModalCoeffs f(m, 1), h(m, 0);
  for (int j = -m; j <= m; ++j) {
    for (int k = 1; k <= m; ++k)
      f(j, k) = (std::abs(j) <= data.f.m() && k <= data.f.m()) ? data.f(j, k) : 0.0;
    for (int l = 0; l <= m; ++l)
      h(j, l) = (std::abs(j) <= data.h.m() && l <= data.h.m()) ? data.h(j, l) : 0.0;
  }
  const FieldSamples ut = synthesize_field(sol.u, SpatialFamily::dirichlet, b, tm, x, 1);
  const FieldSamples px = synthesize_field(sol.p, SpatialFamily::neumann, b, tm, x, 0, 1);
  const FieldSamples pp = synthesize_field(sol.p, SpatialFamily::neumann, b, tm, x);
  const FieldSamples ff = synthesize_field(f, SpatialFamily::dirichlet, b, tm, x);
  const FieldSamples hh = synthesize_field(h, SpatialFamily::neumann, b, tm, x);
  const FieldSamples pb = boundary_field(sol.p, disc, 0);
  const std::vector<double> gw{data.gamma.gamma0, data.gamma.gammaL};

  EnergyPairing e;
  e.lhs = sum_pow(ut, b.quad.weights, 2.0, dt) + sum_pow(px, b.quad.weights, 2.0, dt) + sum_pow(pb, gw, 2.0, dt);
  double pair = 0.0;
  for (std::size_t n = 0; n < tm.n_t; ++n) {
    for (std::size_t q = 0; q < b.n_quad(); ++q)
      pair += b.quad.weights[q] * (ff(n, q) * ut(n, q) + hh(n, q) * pp(n, q));
    for (std::size_t e2 = 0; e2 < 2; ++e2) {
      const auto& ps = data.p_star[e2];
      double star = 0.0;
      for (int j = -std::min(m, ps.order()); j <= std::min(m, ps.order()); ++j) star += ps[j] * tm.e(j, n);
      pair += gw[e2] * star * pb(n, e2);
    }
  }
  e.data = pair * dt;
  e.slack = e.data - e.lhs;
  return e;
}

Confinement confinement_record(const FourierSolution& sol, const Discretization& disc, const PreisachEvaluator& eval) {
  Confinement c;
  const auto& k = eval.density().constants();
  if (!k) throw ConfigurationError("confinement record needs validated density constants");
  c.R = k->R;
  const auto& b = disc.basis;
  std::vector<double> xs = b.quad.nodes;
  xs.push_back(0.0);
  xs.push_back(b.L);
  const std::size_t nq = b.n_quad();
  std::vector<double> sup(xs.size(), 0.0), gap(nq, 0.0);
  const long count = static_cast<long>(xs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const PeriodicSignal sig = resolve_signal(node_series(sol.p, b, xs[iu]), disc.modes.n_t);
    sup[iu] = signal_sup(sig);
    if (iu < nq) {
      const PeriodicResponse r = periodic_preisach_response(eval, sig, true);
      for (std::size_t n = 0; n < r.g.size(); ++n) gap[iu] = std::max(gap[iu], std::abs(r.g[n] - r.g_R[n]));
    }
  }
  c.max_abs_p = *std::max_element(sup.begin(), sup.end());
  c.max_g_gap = *std::max_element(gap.begin(), gap.end());
  c.coincides = c.max_abs_p <= c.R;
  return c;
}

DiagnosticsReport estimate_suite(const FourierSolution& sol, const ProblemData& data, const Discretization& disc,
                                 const PreisachEvaluator& eval, const SolveTelemetry& telemetry, bool converged) {
  DiagnosticsReport r;
  r.norms = estimate_norms(sol, disc, eval, data.gamma);
  r.ene2 = ene2_field_audit(sol.p, disc, eval);
  r.ene3 = ene3_field_audit(sol.p, disc, eval);
  r.es1_pairing = energy_pairing(sol, data, disc);
  r.confinement = confinement_record(sol, disc, eval);
  r.delta = telemetry.delta;
  r.solution_norm = sol.norm();
  r.truncation = truncation_indicator(sol, disc, eval);
  r.converged = converged;
  r.residual_final = telemetry.residual_final;
  r.tolerance = telemetry.tolerance;
  r.iterations = telemetry.iterations;
  r.history = telemetry.history;
  return r;
}

namespace {

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

nlohmann::json audit_json(const FieldAudit& a) {
  return {{"min_slack", number(a.min_slack)}, {"min_margin", number(a.min_margin)},
          {"eps_grid", number(a.eps_grid)},   {"nodes", a.nodes},
          {"unconfined_nodes", a.unconfined}, {"passed", a.passed}};
}

}  // namespace

nlohmann::json report_json(const DiagnosticsReport& r) {
  nlohmann::json j;
  const auto& n = r.norms;
  j["norms"]["es1"] = {{"u_t", n.es1_u_t}, {"grad_p", n.es1_grad_p}, {"p_boundary", n.es1_p_boundary}};
  j["norms"]["es2"] = {{"u_tt_sq", n.es2_u_tt_sq},
                       {"p_t_cubed", n.es2_p_t_cubed},
                       {"grad_p_t_sq", n.es2_grad_p_t_sq},
                       {"p_t_boundary_sq", n.es2_p_t_boundary_sq}};
  j["norms"]["es3"] = n.es3;
  j["norms"]["es4"] = n.es4;
  j["energy"]["ene2"] = audit_json(r.ene2);
  j["energy"]["ene3"] = audit_json(r.ene3);
  j["energy"]["ene3"]["value"] = number(r.ene3.weighted);
  j["energy"]["es1"] = {{"lhs", r.es1_pairing.lhs}, {"data_pairing", r.es1_pairing.data}, {"slack", r.es1_pairing.slack}};
  j["confinement"] = {{"max_abs_p", r.confinement.max_abs_p},
                      {"R", r.confinement.R},
                      {"coincides", r.confinement.coincides},
                      {"max_g_gap", r.confinement.max_g_gap}};
  j["delta"] = r.delta;
  j["solution_norm"] = r.solution_norm;
  j["solver"] = {{"converged", r.converged},
                 {"residual_final", r.residual_final},
                 {"tolerance", r.tolerance},
                 {"iterations", r.iterations},
                 {"truncation_indicator", number(r.truncation)}};
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : r.history) hist.push_back({h.alpha, h.iteration, h.residual, h.theta});
  j["solver"]["history"] = hist;  // [alpha, iteration, residual, theta]
  j["linear_response_ratio"] = r.linear_response_ratio ? number(*r.linear_response_ratio) : nlohmann::json();
  return j;
}

std::vector<std::pair<std::string, nlohmann::json>> flatten(const nlohmann::json& j, const std::string& prefix) {
  std::vector<std::pair<std::string, nlohmann::json>> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      auto sub = flatten(*it, key);
      out.insert(out.end(), sub.begin(), sub.end());
    } else if (!it->is_array()) {
      out.emplace_back(key, *it);
    }
  }
  return out;
}

namespace {

std::string cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string report_csv(const nlohmann::json& report) {
  nlohmann::json scalars = report;
  scalars.erase("config");
  const auto flat = flatten(scalars);
  std::ostringstream out;
  for (std::size_t i = 0; i < flat.size(); ++i) out << (i ? "," : "") << flat[i].first;
  out << '\n';
  for (std::size_t i = 0; i < flat.size(); ++i) out << (i ? "," : "") << cell(flat[i].second);
  out << '\n';
  return out.str();
}

std::string report_table(const nlohmann::json& report) {
  nlohmann::json scalars = report;
  scalars.erase("config");
  const auto flat = flatten(scalars);
  std::size_t width = 0;
  for (const auto& [k, v] : flat) width = std::max(width, k.size());
  std::ostringstream out;
  for (const auto& [k, v] : flat) out << std::left << std::setw(static_cast<int>(width) + 2) << k << cell(v) << '\n';
  return out.str();
}

}  // namespace hystwave
