#include "hystwave/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace hystwave {

namespace {

using nlohmann::json;

const json& default_config() {
  static const json d = R"({
    "density": {"family": "uniform", "params": {}, "R": 1.0, "resolution": 201, "order": 16},
    "basis": {"L": 1.0, "a": 1.0, "m": 8, "n_t": 256, "n_quad": 64},
    "data": {"amplitude": 1.0, "f": [], "h": [], "p_star": {"x0": [], "xL": []},
             "gamma": [1.0, 1.0], "declared_delta": null},
    "solver": {"alpha_schedule": [0.0, 0.25, 0.5, 0.75, 1.0], "theta": 0.5, "tol_res": 1e-8,
               "max_iterations": 2000, "stagnation_window": 50, "stagnation_reduction": 0.01,
               "max_refinements": 3,
               "shift_preconditioner": true, "parallel": true},
    "output": {"report": "report.json", "norms": "norms.csv", "probes": {"file": "probes.csv", "x": []}}
  })"_json;
  return d;
}

json family_defaults(const std::string& family) {
  switch (density_family_from_string(family)) {
    case DensityFamily::uniform: return {{"c", 1.0}, {"r_max", 10.0}, {"v_max", 10.0}};
    case DensityFamily::gaussian_in_v: return {{"c", 1.0}, {"sigma", 1.0}, {"r_max", 10.0}};
    case DensityFamily::separable_exponential: return {{"c", 1.0}, {"ell_r", 1.0}, {"ell_v", 1.0}};
    case DensityFamily::tabulated_grid:
      return {{"r", json::array()}, {"v", json::array()}, {"values", json::array()}};
  }
  return json::object();
}

bool same_kind(const json& def, const json& val) {
  if (def.is_null()) return val.is_null() || val.is_number();
  if (def.is_number()) return val.is_number();
  return def.type() == val.type();
}

void merge(json& eff, const json& raw, const std::string& path) {
  if (!raw.is_object()) throw ConfigurationError(path + ": expected an object");
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    const std::string field = path.empty() ? it.key() : path + "." + it.key();
    if (!eff.contains(it.key())) throw ConfigurationError(field + ": unknown field");
    json& slot = eff[it.key()];
    if (slot.is_object() && field != "density.params") {
      merge(slot, *it, field);
    } else if (field == "density.params") {
      if (!it->is_object()) throw ConfigurationError(field + ": expected an object");
      slot = *it;
    } else {
      if (!same_kind(slot, *it)) throw ConfigurationError(field + ": wrong type (got " + it->dump() + ")");
      slot = *it;
    }
  }
}

double num(const json& cfg, const std::string& section, const std::string& key) {
  return cfg.at(section).at(key).get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigurationError(field + ": expected an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigurationError(field + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigurationError(field + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config(const json& raw) {
  json eff = default_config();
  merge(eff, raw, "");
  json& dens = eff["density"];
  const std::string family = dens["family"].get<std::string>();
  json params = family_defaults(family);
  for (auto it = dens["params"].begin(); it != dens["params"].end(); ++it) {
    const std::string field = "density.params." + it.key();
    if (!params.contains(it.key())) throw ConfigurationError(field + ": unknown parameter for family " + family);
    if (!same_kind(params[it.key()], *it)) throw ConfigurationError(field + ": wrong type");
    params[it.key()] = *it;
  }
  dens["params"] = params;
  for (const char* key : {"m", "n_t", "n_quad"}) integer(eff["basis"][key], std::string("basis.") + key);
  integer(dens["resolution"], "density.resolution");
  integer(dens["order"], "density.order");
  for (const char* key : {"max_iterations", "stagnation_window", "max_refinements"})
    integer(eff["solver"][key], std::string("solver.") + key);
  if (eff["data"]["gamma"].size() != 2) throw ConfigurationError("data.gamma: expected [gamma(0), gamma(L)]");
  return {eff};
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path.string());
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config " + path.string() + ": " + e.what());
  }
  return parse_config(raw);
}

PreisachDensity build_density(const ScenarioConfig& cfg) {
  const json& d = cfg.effective.at("density");
  const json& p = d.at("params");
  PreisachDensity base = PreisachDensity::uniform();
  switch (density_family_from_string(d.at("family").get<std::string>())) {
    case DensityFamily::uniform:
      base = PreisachDensity::uniform({p["c"].get<double>(), p["r_max"].get<double>(), p["v_max"].get<double>()});
      break;
    case DensityFamily::gaussian_in_v:
      base = PreisachDensity::gaussian_in_v(
          {p["c"].get<double>(), p["sigma"].get<double>(), p["r_max"].get<double>()});
      break;
    case DensityFamily::separable_exponential:
      base = PreisachDensity::separable_exponential(
          {p["c"].get<double>(), p["ell_r"].get<double>(), p["ell_v"].get<double>()});
      break;
    case DensityFamily::tabulated_grid:
      base = PreisachDensity::tabulated({numbers(p["r"], "density.params.r"), numbers(p["v"], "density.params.v"),
                                         numbers(p["values"], "density.params.values")});
      break;
  }
  const int order = d.at("order").get<int>();
  if (order < 1) throw ConfigurationError("density.order: must be positive");
  return base.with_constants(validate_density(base, d.at("R").get<double>(), d.at("resolution").get<int>()));
}

Discretization build_discretization(const ScenarioConfig& cfg) {
  const json& b = cfg.effective.at("basis");
  const int m = b.at("m").get<int>();
  const int n_t = b.at("n_t").get<int>();
  const int n_quad = b.at("n_quad").get<int>();
  if (n_t < 1 || n_quad < 1) throw GridError("basis: n_t and n_quad must be positive");
  return make_discretization(num(cfg.effective, "basis", "L"), num(cfg.effective, "basis", "a"), m,
                             static_cast<std::size_t>(n_t), static_cast<std::size_t>(n_quad));
}

namespace {

// (j, s, amp) triples with |j| <= m and s in [first, m].
void add_modes(ModalCoeffs& c, const json& list, const std::string& field, double amplitude) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = field + "[" + std::to_string(i) + "]";
    const json& e = list[i];
    if (!e.is_array() || e.size() != 3 || !e[2].is_number()) throw ConfigurationError(at + ": expected [j, index, amplitude]");
    const int j = integer(e[0], at + ".j");
    const int s = integer(e[1], at + ".index");
    if (std::abs(j) > c.m()) throw ConfigurationError(at + ": |j| exceeds basis.m");
    if (s < c.first() || s > c.m())
      throw ConfigurationError(at + ": spatial index outside [" + std::to_string(c.first()) + ", basis.m]");
    c(j, s) += amplitude * e[2].get<double>();
  }
}

void add_series(TrigSeries& s, const json& list, const std::string& field, double amplitude) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = field + "[" + std::to_string(i) + "]";
    const json& e = list[i];
    if (!e.is_array() || e.size() != 2 || !e[1].is_number()) throw ConfigurationError(at + ": expected [j, amplitude]");
    const int j = integer(e[0], at + ".j");
    if (std::abs(j) > s.order()) throw ConfigurationError(at + ": |j| exceeds basis.m");
    s[j] += amplitude * e[1].get<double>();
  }
}

}  // namespace

ProblemData build_problem(const ScenarioConfig& cfg, const Discretization& disc) {
  const json& d = cfg.effective.at("data");
  const double amp = d.at("amplitude").get<double>();
  if (!std::isfinite(amp)) throw ConfigurationError("data.amplitude: must be finite");
  ProblemData data = ProblemData::zero(disc.m());
  add_modes(data.f, d.at("f"), "data.f", amp);
  add_modes(data.h, d.at("h"), "data.h", amp);
  add_series(data.p_star[0], d.at("p_star").at("x0"), "data.p_star.x0", amp);
  add_series(data.p_star[1], d.at("p_star").at("xL"), "data.p_star.xL", amp);
  const auto g = numbers(d.at("gamma"), "data.gamma");
  data.gamma = {g[0], g[1]};
  check_problem(data);
  return data;
}

SolverOptions build_solver_options(const ScenarioConfig& cfg) {
  const json& s = cfg.effective.at("solver");
  SolverOptions o;
  o.alpha_schedule = numbers(s.at("alpha_schedule"), "solver.alpha_schedule");
  o.theta = s.at("theta").get<double>();
  o.tol_res = s.at("tol_res").get<double>();
  o.max_iterations = s.at("max_iterations").get<int>();
  o.stagnation_window = s.at("stagnation_window").get<int>();
  o.stagnation_reduction = s.at("stagnation_reduction").get<double>();
  o.max_refinements = s.at("max_refinements").get<int>();
  o.shift_preconditioner = s.at("shift_preconditioner").get<bool>();
  o.execution = s.at("parallel").get<bool>() ? Execution::parallel : Execution::serial;
  if (o.max_iterations < 1 || o.stagnation_window < 1 || o.max_refinements < 0)
    throw ConfigurationError("solver: iteration limits must be positive");
  if (!(o.stagnation_reduction > 0.0 && o.stagnation_reduction < 1.0))
    throw ConfigurationError("solver.stagnation_reduction: must lie in (0, 1)");
  return o;
}

namespace {

void finish_report(RunOutcome& out, const ScenarioConfig& cfg) {
  out.report["status"] = out.status;
  out.report["message"] = out.message;
  out.report["config"] = cfg.effective;
}

}  // namespace

RunOutcome solve_scenario(const ScenarioConfig& cfg) {
  const PreisachDensity density = build_density(cfg);
  const Discretization disc = build_discretization(cfg);
  const ProblemData data = build_problem(cfg, disc);
  const SolverOptions opt = build_solver_options(cfg);
  const json& declared = cfg.effective.at("data").at("declared_delta");
  if (!declared.is_null()) {
    const double delta = data_delta(data, disc);
    const double want = declared.get<double>();
    if (std::abs(delta - want) > 1e-6 * std::max(std::abs(delta), 1e-300)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "data.declared_delta: declared " << want << " but the data give " << delta;
      throw ConfigurationError(msg.str());
    }
  }
  const PreisachEvaluator eval(density, static_cast<std::size_t>(cfg.effective.at("density").at("order").get<int>()));

  RunOutcome out;
  try {
    const SolveResult res = continuation_solve(data, disc, eval, opt);
    DiagnosticsReport rep = estimate_suite(res.solution, data, disc, eval, res.telemetry, true);
    out.report = report_json(rep);
    out.solution = res.solution;
    if (rep.confinement.coincides) {
      out.status = "converged";
      out.exit_code = exit_ok;
    } else {
      out.status = "unconfined";
      out.exit_code = exit_outside_regime;
      out.message = "converged but max|p| exceeds R";
    }
  } catch (const NonConvergence& e) {
    out.status = "nonconvergence";
    out.exit_code = exit_outside_regime;
    out.message = e.what();
    out.solution = e.last_iterate();
    try {
      out.report = report_json(estimate_suite(e.last_iterate(), data, disc, eval, e.telemetry(), false));
    } catch (const MemoryNotPeriodic&) {
      DiagnosticsReport rep;
      rep.delta = e.telemetry().delta;
      rep.residual_final = e.telemetry().residual_final;
      rep.iterations = e.telemetry().iterations;
      rep.history = e.telemetry().history;
      out.report = report_json(rep);
    }
  } catch (const MemoryNotPeriodic& e) {
    out.status = "memory-not-periodic";
    out.exit_code = exit_outside_regime;
    out.message = e.what();
    DiagnosticsReport rep;
    rep.delta = data_delta(data, disc);
    out.report = report_json(rep);
  }
  finish_report(out, cfg);
  return out;
}

void write_probes(std::ostream& out, const FourierSolution& sol, const Discretization& disc,
                  const PreisachEvaluator& eval, const std::vector<double>& xs) {
  const auto& b = disc.basis;
  const auto& tm = disc.modes;
  out << "t,x,u,u_t,p,p_t,g_R\n";
  out.precision(17);
  const FieldSamples u = synthesize_field(sol.u, SpatialFamily::dirichlet, b, tm, xs);
  const FieldSamples ut = synthesize_field(sol.u, SpatialFamily::dirichlet, b, tm, xs, 1);
  const FieldSamples p = synthesize_field(sol.p, SpatialFamily::neumann, b, tm, xs);
  const FieldSamples pt = synthesize_field(sol.p, SpatialFamily::neumann, b, tm, xs, 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    TrigSeries s(sol.m());
    for (int j = -sol.m(); j <= sol.m(); ++j)
      for (int l = 0; l <= sol.m(); ++l) s[j] += sol.p(j, l) * b.psi(l, xs[i]);
    const std::vector<double> g = periodic_preisach_response(eval, resolve_signal(s, tm.n_t)).g_R;
    for (std::size_t n = 0; n < tm.n_t; ++n)
      out << tm.t(n) << ',' << xs[i] << ',' << u(n, i) << ',' << ut(n, i) << ',' << p(n, i) << ',' << pt(n, i)
          << ',' << g[n] << '\n';
  }
}

RunOutcome run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  RunOutcome out = solve_scenario(cfg);
  const json& o = cfg.effective.at("output");
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir / o.at("report").get<std::string>());
    f << out.report.dump(2) << '\n';
  }
  {
    std::ofstream f(out_dir / o.at("norms").get<std::string>());
    f << report_csv(out.report);
  }
  const auto xs = numbers(o.at("probes").at("x"), "output.probes.x");
  if (!xs.empty() && out.solution) {
    const Discretization disc = build_discretization(cfg);
    for (double x : xs)
      if (x < 0.0 || x > disc.basis.L) throw ConfigurationError("output.probes.x: probe outside [0, L]");
    const PreisachEvaluator eval(build_density(cfg),
                                 static_cast<std::size_t>(cfg.effective.at("density").at("order").get<int>()));
    std::ofstream f(out_dir / o.at("probes").at("file").get<std::string>());
    try {
      write_probes(f, *out.solution, disc, eval, xs);
    } catch (const MemoryNotPeriodic&) {
      // probes are best effort on a failed run
    }
  }
  return out;
}

double amplitude_for_delta(const ScenarioConfig& cfg, double target) {
  if (!(target >= 0.0) || !std::isfinite(target)) throw ConfigurationError("sweep: delta values must be non-negative");
  if (target == 0.0) return 0.0;
  ScenarioConfig unit = cfg;
  unit.effective["data"]["amplitude"] = 1.0;
  const Discretization disc = build_discretization(unit);
  const double d1 = data_delta(build_problem(unit, disc), disc);
  if (!(d1 > 0.0)) throw ConfigurationError("data: forcing is identically zero, cannot scale to delta > 0");
  return target / d1;
}

SweepResult sweep_delta(const ScenarioConfig& cfg, const std::vector<double>& deltas) {
  // validation gate: fail before any row
  build_density(cfg);
  const Discretization disc = build_discretization(cfg);
  build_problem(cfg, disc);
  std::vector<double> amps;
  for (double d : deltas) amps.push_back(amplitude_for_delta(cfg, d));

  SweepResult res;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    SweepRow row;
    row.delta = deltas[i];
    row.amplitude = amps[i];
    ScenarioConfig c = cfg;
    c.effective["data"]["amplitude"] = amps[i];
    c.effective["data"]["declared_delta"] = nullptr;
    try {
      row.outcome = solve_scenario(c);
    } catch (const Error& e) {
      row.outcome.status = "error";
      row.outcome.exit_code = exit_config;
      row.outcome.message = e.what();
    }
    row.converged = row.outcome.report.contains("solver") && row.outcome.report["solver"].value("converged", false);
    row.confined = row.outcome.report.contains("confinement") &&
                   row.outcome.report["confinement"].value("coincides", false);
    res.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    if (r.converged && r.confined &&
        (res.delta_star_row < 0 || r.delta > res.rows[static_cast<std::size_t>(res.delta_star_row)].delta))
      res.delta_star_row = static_cast<int>(i);
  }
  return res;
}

std::string sweep_csv(const SweepResult& result) {
  json tmpl = report_json(DiagnosticsReport{});
  const auto keys = flatten(tmpl);
  std::ostringstream out;
  out << "delta,amplitude,status,exit_code,converged,confined,delta_star,linear_response_ratio";
  for (const auto& [k, v] : keys) out << ',' << k;
  out << '\n';
  out.precision(17);
  auto norm_of = [](const SweepRow& r) { return r.outcome.report.value("solution_norm", 0.0); };
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    std::string ratio;
    for (const auto& h : result.rows) {
      if (!(r.converged && h.converged) || !(h.delta > 0.0)) continue;
      if (std::abs(h.delta * 2.0 - r.delta) <= 1e-9 * r.delta && norm_of(h) > 0.0) {
        std::ostringstream s;
        s.precision(17);
        s << norm_of(r) / norm_of(h);
        ratio = s.str();
      }
    }
    out << r.delta << ',' << r.amplitude << ',' << r.outcome.status << ',' << r.outcome.exit_code << ','
        << (r.converged ? "true" : "false") << ',' << (r.confined ? "true" : "false") << ','
        << (static_cast<int>(i) == result.delta_star_row ? "true" : "false") << ',' << ratio;
    const auto flat = flatten(r.outcome.report.is_object() ? r.outcome.report : json::object());
    for (const auto& [k, v] : keys) {
      out << ',';
      auto it = std::find_if(flat.begin(), flat.end(), [&](const auto& e) { return e.first == k; });
      if (it != flat.end() && !it->second.is_null()) out << (it->second.is_string() ? it->second.get<std::string>() : it->second.dump());
    }
    out << '\n';
  }
  return out.str();
}

json validate_scenario(const ScenarioConfig& cfg, std::uint64_t seed, int samples) {
  const PreisachDensity d = build_density(cfg);
  const Discretization disc = build_discretization(cfg);
  build_problem(cfg, disc);
  const DensityConstants& k = *d.constants();
  std::mt19937_64 rng(seed);
  const double span = std::max(4.0 * k.R, 10.0);
  std::uniform_real_distribution<double> r_dist(0.0, span), v_dist(-span, span);
  for (int i = 0; i < samples; ++i) {
    const double r = r_dist(rng);
    const double v = v_dist(rng);
    const double rho = d(r, v);
    if (!(rho >= 0.0) || rho > d.rho_star(r) * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "density: 0 <= rho <= rho* fails at (r, v) = (" << r << ", " << v << ")";
      throw ConfigurationError(msg.str());
    }
  }
  return {{"density",
           {{"family", to_string(d.family())},
            {"R", k.R},
            {"C_rho", k.C_rho},
            {"C_rho_star", k.C_rho_star},
            {"A_R", k.A_R},
            {"C_R", k.C_R},
            {"K_R", k.K_R},
            {"H_rho", k.H_rho}}},
          {"basis",
           {{"m", disc.m()},
            {"n_t", disc.modes.n_t},
            {"n_quad", disc.basis.n_quad()},
            {"unknowns", FourierSolution(disc.m()).size()}}},
          {"samples_checked", samples},
          {"seed", seed}};
}

}  // namespace hystwave
