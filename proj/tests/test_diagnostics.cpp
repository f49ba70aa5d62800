#include <doctest.h>

#include <cmath>

#include "hystwave/diagnostics.hpp"

using namespace hystwave;

namespace {

PreisachDensity validated(PreisachDensity d, double R) { return d.with_constants(validate_density(d, R)); }

TrigSeries sine(double eps) {
  TrigSeries s(1);
  s[1] = eps;
  return s;
}

SolveResult solve_small(const Discretization& disc, const PreisachEvaluator& eval, double delta) {
  ProblemData data = ProblemData::zero(disc.m());
  data.f(1, 1) = delta;
  return continuation_solve(data, disc, eval);
}

}  // namespace

TEST_CASE("ene2 audit") {
  const PreisachEvaluator eval(validated(PreisachDensity::uniform(), 1.0), 16);
  SUBCASE("zero input") {
    const InequalityAudit a = ene2_audit(TrigSeries(2), eval, 128);
    CHECK(a.slack_fine == 0.0);
    CHECK(a.passed());
    CHECK(a.confined);
  }
  SUBCASE("amplitude sweep") {
    for (double eps : {0.1, 0.2, 0.3, 0.4}) {
      const InequalityAudit a = ene2_audit(sine(eps), eval, 256);
      CHECK(a.passed());
      CHECK(a.confined);
      CHECK(a.eps_grid >= 0.0);
    }
  }
  SUBCASE("needs constants") {
    const PreisachEvaluator plain(PreisachDensity::uniform(), 16);
    CHECK_THROWS_AS(ene2_audit(sine(0.1), plain, 64), ConfigurationError);
  }
}

TEST_CASE("ene3 audit is nonnegative") {
  const PreisachEvaluator eval(validated(PreisachDensity::gaussian_in_v(), 0.3), 16);
  TrigSeries s(3);
  s[1] = 0.15;
  s[-3] = 0.05;
  const InequalityAudit a = ene3_audit(s, eval, 256);
  CHECK(a.passed());
  CHECK(a.slack_fine > 0.0);
  CHECK(ene3_audit(sine(1.0), eval, 256).confined == false);
}

TEST_CASE("zero solution gives an all-zero report") {
  const Discretization disc = make_discretization(1.0, 1.0, 3, 64, 32);
  const PreisachEvaluator eval(validated(PreisachDensity::uniform(), 1.0), 16);
  const DiagnosticsReport rep =
      estimate_suite(FourierSolution(3), ProblemData::zero(3), disc, eval, SolveTelemetry{}, true);
  const EstimateNorms& n = rep.norms;
  for (double v : {n.es1_u_t, n.es1_grad_p, n.es1_p_boundary, n.es2_u_tt_sq, n.es2_p_t_cubed, n.es2_grad_p_t_sq,
                   n.es2_p_t_boundary_sq, n.es3, n.es4})
    CHECK(v == 0.0);
  CHECK(rep.es1_pairing.lhs == 0.0);
  CHECK(rep.es1_pairing.data == 0.0);
  CHECK(rep.confinement.max_abs_p == 0.0);
  CHECK(rep.confinement.coincides);
  CHECK(rep.ene2.min_slack == 0.0);
  CHECK(rep.delta == 0.0);
}

TEST_CASE("norms scale with the data") {
  const Discretization disc = make_discretization(1.0, 1.0, 4, 128, 32);
  const PreisachEvaluator eval(validated(PreisachDensity::uniform(), 1.0), 16);
  EstimateNorms n[2];
  DiagnosticsReport reps[2];
  int i = 0;
  for (double delta : {1e-3, 2e-3}) {
    const SolveResult res = solve_small(disc, eval, delta);
    ProblemData data = ProblemData::zero(4);
    data.f(1, 1) = delta;
    reps[i] = estimate_suite(res.solution, data, disc, eval, res.telemetry, true);
    n[i] = reps[i].norms;
    ++i;
  }
  auto ratio = [](double a, double b) { return b / a; };
  CHECK(ratio(n[0].es1_u_t, n[1].es1_u_t) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(ratio(n[0].es1_grad_p, n[1].es1_grad_p) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(ratio(n[0].es3, n[1].es3) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(ratio(n[0].es2_u_tt_sq, n[1].es2_u_tt_sq) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(ratio(n[0].es2_p_t_cubed, n[1].es2_p_t_cubed) == doctest::Approx(8.0).epsilon(0.1));
  for (const auto& r : reps) {
    CHECK(r.confinement.coincides);
    CHECK(r.confinement.max_abs_p < 1.0);
    CHECK(r.confinement.max_g_gap <= 1e-12);
    CHECK(r.es1_pairing.slack >= -1e-8 * r.delta);
  }
}

TEST_CASE("report layout") {
  DiagnosticsReport rep;
  rep.linear_response_ratio = 2.0;
  const nlohmann::json j = report_json(rep);
  for (const char* key : {"/norms/es1/u_t", "/norms/es2/p_t_cubed", "/norms/es3", "/norms/es4", "/energy/ene2/passed",
                          "/energy/es1/slack", "/confinement/coincides", "/delta", "/solver/converged",
                          "/linear_response_ratio"})
    CHECK(j.contains(nlohmann::json::json_pointer(key)));
  const auto flat = flatten(j);
  bool found = false;
  for (const auto& [k, v] : flat) found = found || k == "norms.es1.u_t";
  CHECK(found);
  const std::string csv = report_csv(j);
  const auto nl = csv.find('\n');
  REQUIRE(nl != std::string::npos);
  const std::string header = csv.substr(0, nl);
  const std::string row = csv.substr(nl + 1);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(report_table(j).find("norms.es3") != std::string::npos);
}
