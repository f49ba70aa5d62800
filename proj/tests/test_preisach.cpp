#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hystwave/density.hpp"
#include "hystwave/errors.hpp"
#include "hystwave/preisach.hpp"
#include "oracles.hpp"

using namespace hystwave;

namespace {

MemoryState ramp_to(double a, int steps = 100) {
  MemoryState m;
  for (int i = 1; i <= steps; ++i) m.update(a * i / steps);
  return m;
}

std::vector<double> sine(double amp, std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / n);
  return p;
}

PreisachDensity validated(PreisachDensity d, double R) { return d.with_constants(validate_density(d, R)); }

}  // namespace

TEST_CASE("virgin memory has zero outputs") {
  for (const auto& d : {PreisachDensity::uniform(), PreisachDensity::gaussian_in_v()}) {
    const OperatorOutputs o = preisach_eval(validated(d, 0.3), MemoryState{}, true);
    CHECK(o.g == 0.0);
    CHECK(o.g_R == 0.0);
    CHECK(o.v_pot == 0.0);
    CHECK(o.d_diss == 0.0);
  }
}

TEST_CASE("ramp closed forms against a dense oracle") {
  const MemoryState m = ramp_to(1.0);
  const OperatorOutputs o = preisach_eval(PreisachDensity::uniform(), m, false, 64);
  CHECK(std::abs(o.g - 0.5) <= 1e-6);
  CHECK(std::abs(o.v_pot - 1.0 / 6.0) <= 1e-6);
  CHECK(std::abs(o.d_diss - 1.0 / 6.0) <= 1e-6);
  const double g_ref = oracle::midpoint([](double r) { return std::max(0.0, 1.0 - r); }, 0.0, 2.0, 20000);
  CHECK(o.g == doctest::Approx(g_ref).epsilon(1e-6));
}

TEST_CASE("gaussian outputs against a double midpoint oracle") {
  const auto d = PreisachDensity::gaussian_in_v({1.0, 0.7, 10.0});
  MemoryState m;
  for (double v : {0.9, -0.4, 0.5, 0.1}) m.update(v);
  const OperatorOutputs o = preisach_eval(d, m, false, 32);
  const double ref = oracle::midpoint(
      [&](double r) {
        const double x = m.xi(r);
        return oracle::midpoint([&](double v) { return std::exp(-v * v / 0.49); }, 0.0, x, 400);
      },
      0.0, 1.0, 4000);
  CHECK(o.g == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(preisach_eval(PreisachDensity::uniform(), MemoryState{}, false, 0), GridError);
  CHECK_THROWS_AS(preisach_eval(PreisachDensity::uniform(), MemoryState{}, true), ConfigurationError);
}

TEST_CASE("energy residuals") {
  SUBCASE("inside the dead band everything vanishes") {
    std::vector<double> p;
    for (int i = 0; i <= 50; ++i) p.push_back(0.01 * i);
    const auto res = play_energy_residuals(1.0, p);
    for (double e : res.energy) CHECK(e == 0.0);
    for (double e : res.mono) CHECK(e == 0.0);
  }
  SUBCASE("period sum decays at first order, monotone identity is exact") {
    // per-step residuals are O(dt^2), their sum over a period O(dt)
    double prev_sum = 0.0, prev_max = 0.0;
    for (std::size_t n : {1000u, 2000u, 4000u}) {
      const auto res = play_energy_residuals(1.0, sine(2.0, n));
      double sum = 0.0, mx = 0.0, mono = 0.0;
      for (double v : res.energy) {
        sum += std::abs(v);
        mx = std::max(mx, std::abs(v));
      }
      for (double v : res.mono) mono = std::max(mono, std::abs(v));
      CHECK(mono <= 1e-12);
      if (prev_sum > 0.0) {
        CHECK(prev_sum / sum == doctest::Approx(2.0).epsilon(0.15));
        CHECK(prev_max / mx == doctest::Approx(4.0).epsilon(0.15));
      }
      prev_sum = sum;
      prev_max = mx;
    }
  }
  SUBCASE("Preisach residual length") {
    const PreisachEvaluator eval(PreisachDensity::uniform(), 16);
    const auto p = sine(1.0, 200);
    const auto out = preisach_trajectory(eval, p);
    CHECK(preisach_energy_residuals(p, out).size() + 1 == p.size());
  }
}

TEST_CASE("growth and coincidence") {
  const double R = 0.3;
  const PreisachEvaluator eval(validated(PreisachDensity::gaussian_in_v(), R), 16);
  SUBCASE("zero input") {
    const GrowthReport rep = growth_and_coincidence_check(eval, std::vector<double>(64, 0.0));
    CHECK(rep.violations == 0);
    for (double v : rep.g_R) CHECK(v == 0.0);
  }
  SUBCASE("inside the band G and G_R agree") {
    const GrowthReport rep = growth_and_coincidence_check(eval, sine(0.5 * R, 512));
    CHECK(rep.coincidence_checked);
    CHECK(rep.max_coincidence_gap <= 1e-14);
    CHECK(rep.violations == 0);
  }
  SUBCASE("outside the band only growth bounds hold") {
    const GrowthReport rep = growth_and_coincidence_check(eval, sine(3.0 * R, 512));
    CHECK_FALSE(rep.coincidence_checked);
    CHECK(rep.violations == 0);
    double gap = 0.0;
    for (std::size_t i = 0; i < rep.g.size(); ++i) gap = std::max(gap, std::abs(rep.g[i] - rep.g_R[i]));
    CHECK(gap > 1e-3);
  }
}

TEST_CASE("periodic response is independent of the warm-up length") {
  const PreisachEvaluator eval(validated(PreisachDensity::uniform(), 1.0), 16);
  TrigSeries s(3);
  s[1] = 0.8;
  s[-3] = 0.2;
  const PeriodicSignal sig = resolve_signal(s, 256);
  const PeriodicResponse a = periodic_preisach_response(eval, sig, true);
  CHECK(a.memory_drift <= 1e-12);
  REQUIRE(a.g.size() == 256);
  for (std::size_t i = 0; i < a.g.size(); ++i) CHECK(a.g[i] == doctest::Approx(a.g_R[i]).epsilon(1e-14));
}

TEST_CASE("trajectory CSV round trip") {
  const PreisachEvaluator eval(PreisachDensity::uniform(), 16);
  const auto p = sine(1.0, 20);
  std::vector<double> t;
  for (std::size_t i = 0; i < p.size(); ++i) t.push_back(0.1 * i);
  std::stringstream ss;
  write_trajectory_csv(ss, t, p, std::vector<double>{0.5, 1.0}, eval);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  CHECK(header.find("t,p,") == 0);
  const TrajectoryInput back = read_trajectory_csv(ss);
  REQUIRE(back.p.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(back.p[i] == doctest::Approx(p[i]).epsilon(1e-12));
}
