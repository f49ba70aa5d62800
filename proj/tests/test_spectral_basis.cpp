#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hystwave/errors.hpp"
#include "hystwave/norms.hpp"
#include "hystwave/spectral_basis.hpp"

using namespace hystwave;
constexpr double pi = std::numbers::pi;

TEST_CASE("eigenvalues") {
  const SpatialBasis b = build_spatial_basis(1.0, 1.0, 1, 8);
  CHECK(b.lambda[0] == doctest::Approx(pi * pi));
  CHECK(b.mu[0] == 0.0);
  CHECK(b.mu[1] == doctest::Approx(pi * pi));
  const SpatialBasis c = build_spatial_basis(2.0, 4.0, 3, 16);
  CHECK(c.lambda[2] == doctest::Approx(9.0 * pi * pi));
}

TEST_CASE("Gram matrices are the identity") {
  const SpatialBasis b = build_spatial_basis(1.7, 1.0, 4, 32);
  for (int l = 0; l <= 4; ++l)
    for (int k = 0; k <= 4; ++k) {
      double psi = 0.0, phi = 0.0;
      for (std::size_t q = 0; q < b.n_quad(); ++q) {
        psi += b.quad.weights[q] * b.psi_q[l][q] * b.psi_q[k][q];
        if (l >= 1 && k >= 1) phi += b.quad.weights[q] * b.phi_q[l - 1][q] * b.phi_q[k - 1][q];
      }
      CHECK(std::abs(psi - (l == k ? 1.0 : 0.0)) <= 1e-12);
      if (l >= 1 && k >= 1) CHECK(std::abs(phi - (l == k ? 1.0 : 0.0)) <= 1e-12);
    }
}

TEST_CASE("grid checks") {
  CHECK_THROWS_AS(build_spatial_basis(1.0, 1.0, 8, 10), GridError);
  CHECK_THROWS_AS(build_spatial_basis(0.0, 1.0, 2, 16), ConfigurationError);
  CHECK_THROWS_AS(build_time_modes(4, 9), GridError);
  CHECK(TimeModes::norm(0) == doctest::Approx(2.0 * pi));
  CHECK(TimeModes::norm(3) == doctest::Approx(pi));
  CHECK(TimeModes::norm(-3) == doctest::Approx(pi));
}

TEST_CASE("synthesis of simple fields") {
  const SpatialBasis b = build_spatial_basis(1.0, 1.0, 3, 16);
  const TimeModes tm = build_time_modes(3, 64);
  SUBCASE("zero") {
    const FieldSamples f = synthesize_field(ModalCoeffs(3, 0), SpatialFamily::neumann, b, tm, b.quad.nodes);
    for (double v : f.values) CHECK(v == 0.0);
  }
  SUBCASE("constant") {
    ModalCoeffs c(3, 0);
    c(0, 0) = 2.5;
    const FieldSamples f = synthesize_field(c, SpatialFamily::neumann, b, tm, b.quad.nodes);
    for (double v : f.values) CHECK(v == doctest::Approx(2.5 * b.psi(0, 0.3)));
  }
  SUBCASE("time derivative against finite differences") {
    ModalCoeffs c(3, 1);
    c(1, 1) = 1.0;
    const std::vector<double> x{0.25, 0.5};
    const FieldSamples u = synthesize_field(c, SpatialFamily::dirichlet, b, tm, x);
    const FieldSamples ut = synthesize_field(c, SpatialFamily::dirichlet, b, tm, x, 1);
    double err = 0.0;
    for (std::size_t n = 0; n < tm.n_t; ++n) {
      const double exact = std::cos(tm.t(n)) * std::sqrt(2.0) * std::sin(pi * x[1]);
      CHECK(ut(n, 1) == doctest::Approx(exact).epsilon(1e-12));
      const double fd = (u((n + 1) % tm.n_t, 1) - u((n + tm.n_t - 1) % tm.n_t, 1)) / (2.0 * tm.dt);
      err = std::max(err, std::abs(fd - ut(n, 1)));
    }
    CHECK(err <= tm.dt * tm.dt);
  }
  SUBCASE("coefficient derivative matches synthesized derivative") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ModalCoeffs c(3, 0);
    for (double& v : c.flat()) v = U(rng);
    for (int k = 1; k <= 3; ++k) {
      const FieldSamples a = synthesize_field(time_derivative(c, k), SpatialFamily::neumann, b, tm, b.quad.nodes);
      const FieldSamples d = synthesize_field(c, SpatialFamily::neumann, b, tm, b.quad.nodes, k);
      for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == doctest::Approx(d.values[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("projection") {
  const SpatialBasis b = build_spatial_basis(1.0, 1.0, 4, 24);
  const TimeModes tm = build_time_modes(4, 32);
  SUBCASE("round trip") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto fam : {SpatialFamily::dirichlet, SpatialFamily::neumann}) {
      ModalCoeffs c(4, fam == SpatialFamily::dirichlet ? 1 : 0);
      for (double& v : c.flat()) v = U(rng);
      const ModalCoeffs back = project_field(synthesize_field(c, fam, b, tm, b.quad.nodes), fam, b, tm);
      double err = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) err = std::max(err, std::abs(back.flat()[i] - c.flat()[i]));
      CHECK(err <= 1e-10);
    }
  }
  SUBCASE("constant field") {
    FieldSamples f{tm.n_t, b.n_quad(), std::vector<double>(tm.n_t * b.n_quad(), 3.0)};
    const ModalCoeffs c = project_field(f, SpatialFamily::neumann, b, tm);
    for (int j = -4; j <= 4; ++j)
      for (int l = 0; l <= 4; ++l) CHECK(c(j, l) == doctest::Approx(j == 0 && l == 0 ? 3.0 : 0.0));
  }
  SUBCASE("single mode") {
    FieldSamples f{tm.n_t, b.n_quad(), std::vector<double>(tm.n_t * b.n_quad())};
    for (std::size_t n = 0; n < tm.n_t; ++n)
      for (std::size_t q = 0; q < b.n_quad(); ++q)
        f(n, q) = std::sin(2.0 * tm.t(n)) * std::sqrt(2.0) * std::cos(pi * b.quad.nodes[q]);
    const ModalCoeffs c = project_field(f, SpatialFamily::neumann, b, tm);
    for (int j = -4; j <= 4; ++j)
      for (int l = 0; l <= 4; ++l) CHECK(c(j, l) == doctest::Approx(j == 2 && l == 1 ? 1.0 : 0.0));
  }
  SUBCASE("shape mismatch") {
    FieldSamples f{tm.n_t, 3, std::vector<double>(tm.n_t * 3)};
    CHECK_THROWS_AS(project_field(f, SpatialFamily::neumann, b, tm), ShapeError);
  }
}

TEST_CASE("periodic norms") {
  const SpatialBasis b = build_spatial_basis(1.0, 1.0, 2, 16);
  const TimeModes tm = build_time_modes(2, 64);
  FieldSamples c{tm.n_t, b.n_quad(), std::vector<double>(tm.n_t * b.n_quad(), -2.0)};
  CHECK(periodic_norm(c, 2.0, NormRegion::bulk, b, tm.dt) == doctest::Approx(2.0 * std::sqrt(2.0 * pi)));
  FieldSamples s{tm.n_t, b.n_quad(), std::vector<double>(tm.n_t * b.n_quad())};
  for (std::size_t n = 0; n < tm.n_t; ++n)
    for (std::size_t q = 0; q < b.n_quad(); ++q) s(n, q) = std::sin(tm.t(n));
  CHECK(periodic_norm(s, 2.0, NormRegion::bulk, b, tm.dt) == doctest::Approx(std::sqrt(pi)));
  FieldSamples e{tm.n_t, 2, std::vector<double>(tm.n_t * 2, 1.5)};
  CHECK(periodic_norm(e, 2.0, NormRegion::boundary, b, tm.dt, {1.0, 0.0}) ==
        doctest::Approx(1.5 * std::sqrt(2.0 * pi)));
  // homogeneity and Holder on a bounded domain
  FieldSamples s3 = s;
  for (double& v : s3.values) v *= -3.0;
  CHECK(periodic_norm(s3, 3.0, NormRegion::bulk, b, tm.dt) ==
        doctest::Approx(3.0 * periodic_norm(s, 3.0, NormRegion::bulk, b, tm.dt)));
  const double vol = 2.0 * pi * b.L;
  CHECK(periodic_norm(s, 2.0, NormRegion::bulk, b, tm.dt) <=
        std::pow(vol, 1.0 / 2.0 - 1.0 / 3.0) * periodic_norm(s, 3.0, NormRegion::bulk, b, tm.dt) + 1e-12);
  CHECK_THROWS_AS(periodic_norm(s, 0.5, NormRegion::bulk, b, tm.dt), GridError);
}
