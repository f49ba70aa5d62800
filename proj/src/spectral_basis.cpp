#include "hystwave/spectral_basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hystwave/errors.hpp"
#include "hystwave/trig_series.hpp"

namespace hystwave {

namespace {
constexpr double pi = std::numbers::pi;
}

double SpatialBasis::phi(int k, double x) const { return std::sqrt(2.0 / L) * std::sin(k * pi * x / L); }
double SpatialBasis::dphi(int k, double x) const {
  return std::sqrt(2.0 / L) * (k * pi / L) * std::cos(k * pi * x / L);
}
double SpatialBasis::psi(int l, double x) const {
  return l == 0 ? std::sqrt(1.0 / L) : std::sqrt(2.0 / L) * std::cos(l * pi * x / L);
}
double SpatialBasis::dpsi(int l, double x) const {
  return l == 0 ? 0.0 : -std::sqrt(2.0 / L) * (l * pi / L) * std::sin(l * pi * x / L);
}

SpatialBasis build_spatial_basis(double L, double a, int m, std::size_t n_quad) {
  if (!(L > 0.0) || !(a > 0.0)) throw ConfigurationError("basis: L and a must be positive");
  if (m < 1) throw GridError("basis: mode count m must be at least 1");
  if (n_quad < static_cast<std::size_t>(2 * m + 2))
    throw GridError("basis: n_quad = " + std::to_string(n_quad) + " aliases m = " + std::to_string(m) +
                    " modes (need n_quad >= 2m + 2)");
  SpatialBasis b;
  b.L = L;
  b.a = a;
  b.m = m;
  b.quad = gauss_legendre(n_quad, 0.0, L);
  for (int k = 1; k <= m; ++k) b.lambda.push_back(a * (k * pi / L) * (k * pi / L));
  for (int l = 0; l <= m; ++l) b.mu.push_back((l * pi / L) * (l * pi / L));
  for (int k = 1; k <= m; ++k) {
    std::vector<double> v, dv;
    for (double x : b.quad.nodes) {
      v.push_back(b.phi(k, x));
      dv.push_back(b.dphi(k, x));
    }
    b.phi_q.push_back(std::move(v));
    b.dphi_q.push_back(std::move(dv));
  }
  for (int l = 0; l <= m; ++l) {
    std::vector<double> v, dv;
    for (double x : b.quad.nodes) {
      v.push_back(b.psi(l, x));
      dv.push_back(b.dpsi(l, x));
    }
    b.psi_q.push_back(std::move(v));
    b.dpsi_q.push_back(std::move(dv));
  }
  return b;
}

double TimeModes::norm(int j) { return j == 0 ? 2.0 * pi : pi; }

TimeModes build_time_modes(int m, std::size_t n_t) {
  if (m < 0) throw GridError("time modes: m must be non-negative");
  if (n_t <= static_cast<std::size_t>(2 * m + 1))
    throw GridError("time modes: n_t = " + std::to_string(n_t) + " aliases m = " + std::to_string(m) +
                    " (need n_t > 2m + 1)");
  TimeModes tm;
  tm.m = m;
  tm.n_t = n_t;
  tm.dt = 2.0 * pi / static_cast<double>(n_t);
  tm.table.assign(static_cast<std::size_t>(2 * m + 1), std::vector<double>(n_t));
  for (int j = -m; j <= m; ++j)
    for (std::size_t n = 0; n < n_t; ++n) tm.table[static_cast<std::size_t>(j + m)][n] = time_mode(j, tm.t(n));
  return tm;
}

ModalCoeffs time_derivative(const ModalCoeffs& c, int k) {
  ModalCoeffs out = c;
  for (int step = 0; step < k; ++step) {
    ModalCoeffs next(c.m(), c.first());
    for (int j = -c.m(); j <= c.m(); ++j)
      for (int s = c.first(); s <= c.m(); ++s) next(j, s) = -j * out(-j, s);
    out = std::move(next);
  }
  return out;
}

namespace {

double basis_value(SpatialFamily family, const SpatialBasis& b, int s, double x, int space_order) {
  if (family == SpatialFamily::dirichlet) return space_order == 0 ? b.phi(s, x) : b.dphi(s, x);
  return space_order == 0 ? b.psi(s, x) : b.dpsi(s, x);
}

void check_shape(const ModalCoeffs& c, SpatialFamily family, const SpatialBasis& b) {
  const int first = family == SpatialFamily::dirichlet ? 1 : 0;
  if (c.m() != b.m || c.first() != first)
    throw ShapeError("coefficient index range (m = " + std::to_string(c.m()) + ", first = " +
                     std::to_string(c.first()) + ") does not match basis (m = " + std::to_string(b.m) + ")");
}

}  // namespace

FieldSamples synthesize_field(const ModalCoeffs& coeffs, SpatialFamily family, const SpatialBasis& basis,
                              const TimeModes& modes, std::span<const double> x, int time_order,
                              int space_order) {
  check_shape(coeffs, family, basis);
  if (modes.m != basis.m) throw ShapeError("synthesize_field: time modes and basis disagree on m");
  if (space_order < 0 || space_order > 1) throw ShapeError("synthesize_field: space_order must be 0 or 1");
  const ModalCoeffs c = time_derivative(coeffs, time_order);
  const int m = basis.m;
  // Spatial contraction first: amplitude of e_j at each x.
  std::vector<double> amp(static_cast<std::size_t>(2 * m + 1) * x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int s = c.first(); s <= m; ++s) {
      const double bv = basis_value(family, basis, s, x[i], space_order);
      for (int j = -m; j <= m; ++j) amp[static_cast<std::size_t>(j + m) * x.size() + i] += c(j, s) * bv;
    }
  }
  FieldSamples out{modes.n_t, x.size(), std::vector<double>(modes.n_t * x.size(), 0.0)};
  for (std::size_t n = 0; n < modes.n_t; ++n)
    for (int j = -m; j <= m; ++j) {
      const double e = modes.e(j, n);
      const double* a = &amp[static_cast<std::size_t>(j + m) * x.size()];
      for (std::size_t i = 0; i < x.size(); ++i) out(n, i) += a[i] * e;
    }
  return out;
}

ModalCoeffs project_field(const FieldSamples& samples, SpatialFamily family, const SpatialBasis& basis,
                          const TimeModes& modes) {
  if (samples.n_t != modes.n_t || samples.n_x != basis.n_quad())
    throw ShapeError("project_field: samples must live on the time grid x basis quadrature nodes");
  const int m = basis.m;
  const int first = family == SpatialFamily::dirichlet ? 1 : 0;
  ModalCoeffs out(m, first);
  const auto& table = family == SpatialFamily::dirichlet ? basis.phi_q : basis.psi_q;
  for (int s = first; s <= m; ++s) {
    const auto& bq = table[static_cast<std::size_t>(s - first)];
    // spatial projection per time sample
    std::vector<double> spatial(modes.n_t, 0.0);
    for (std::size_t n = 0; n < modes.n_t; ++n) {
      double acc = 0.0;
      for (std::size_t q = 0; q < basis.n_quad(); ++q) acc += basis.quad.weights[q] * bq[q] * samples(n, q);
      spatial[n] = acc;
    }
    for (int j = -m; j <= m; ++j) {
      double acc = 0.0;
      for (std::size_t n = 0; n < modes.n_t; ++n) acc += spatial[n] * modes.e(j, n);
      out(j, s) = acc * modes.dt / TimeModes::norm(j);
    }
  }
  return out;
}

}  // namespace hystwave
