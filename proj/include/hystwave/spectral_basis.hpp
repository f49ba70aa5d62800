#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hystwave/quadrature.hpp"

namespace hystwave {

/// Eigenbases of the 1D reduction on (0, L):
///   Dirichlet  -a phi'' = lambda phi,  phi_k = sqrt(2/L) sin(k pi x / L), lambda_k = a (k pi / L)^2
///   Neumann    -psi''   = mu psi,      psi_0 = sqrt(1/L), psi_l = sqrt(2/L) cos(l pi x / L), mu_l = (l pi / L)^2
/// tabulated on an n_quad-point Gauss-Legendre rule.
struct SpatialBasis {
  static constexpr int dimension = 1;

  double L = 1.0;
  double a = 1.0;
  int m = 0;
  QuadratureRule quad;

  std::vector<double> lambda;  // index k - 1
  std::vector<double> mu;      // index l

  // Tables at the quadrature nodes: [k - 1][q] and [l][q].
  std::vector<std::vector<double>> phi_q, dphi_q;
  std::vector<std::vector<double>> psi_q, dpsi_q;

  double phi(int k, double x) const;
  double dphi(int k, double x) const;
  double psi(int l, double x) const;
  double dpsi(int l, double x) const;

  std::size_t n_quad() const { return quad.nodes.size(); }
};

/// Throws GridError for m < 1 or n_quad < 2m + 2 (aliasing) and
/// ConfigurationError for non-positive L or a.
SpatialBasis build_spatial_basis(double L, double a, int m, std::size_t n_quad);

/// Time modes e_j, |j| <= m, on a uniform grid of n_t samples per period.
struct TimeModes {
  int m = 0;
  std::size_t n_t = 0;
  double dt = 0.0;
  std::vector<std::vector<double>> table;  // [j + m][n] = e_j(t_n)

  double e(int j, std::size_t n) const { return table[static_cast<std::size_t>(j + m)][n]; }
  double t(std::size_t n) const { return dt * static_cast<double>(n); }
  /// Integral of e_j^2 over one period.
  static double norm(int j);
};

/// Throws GridError unless n_t > 2m + 1.
TimeModes build_time_modes(int m, std::size_t n_t);

/// Coefficients c_{j,s} of sum_j sum_s c_{j,s} e_j(t) b_s(x) for |j| <= m and
/// spatial index s in [first, m] (first = 1 for displacement, 0 for pressure).
class ModalCoeffs {
 public:
  ModalCoeffs() = default;
  ModalCoeffs(int m, int first) : m_(m), first_(first), data_(static_cast<std::size_t>((2 * m + 1) * (m + 1 - first)), 0.0) {}

  int m() const { return m_; }
  int first() const { return first_; }
  int spatial_count() const { return m_ + 1 - first_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int j, int s) { return data_[index(j, s)]; }
  double operator()(int j, int s) const { return data_[index(j, s)]; }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool same_shape(const ModalCoeffs& other) const { return m_ == other.m_ && first_ == other.first_; }

 private:
  std::size_t index(int j, int s) const {
    return static_cast<std::size_t>((j + m_) * spatial_count() + (s - first_));
  }
  int m_ = 0;
  int first_ = 0;
  std::vector<double> data_;
};

/// Coefficients of the k-th time derivative: d/dt e_j = j e_{-j}, so the
/// coefficient of e_j becomes -j c_{-j}. k = 2 gives -j^2 c_j, k = 3 gives j^3 c_{-j}.
ModalCoeffs time_derivative(const ModalCoeffs& c, int k = 1);

enum class SpatialFamily { dirichlet, neumann };

/// Field samples on the time grid x an arbitrary set of points: values[n * n_x + i].
struct FieldSamples {
  std::size_t n_t = 0;
  std::size_t n_x = 0;
  std::vector<double> values;
  double operator()(std::size_t n, std::size_t i) const { return values[n * n_x + i]; }
  double& operator()(std::size_t n, std::size_t i) { return values[n * n_x + i]; }
};

/// Evaluates sum c_{j,s} d_t^{time_order} e_j(t_n) d_x^{space_order} b_s(x_i).
/// Throws ShapeError if the coefficient range does not match the basis.
FieldSamples synthesize_field(const ModalCoeffs& coeffs, SpatialFamily family, const SpatialBasis& basis,
                              const TimeModes& modes, std::span<const double> x, int time_order = 0,
                              int space_order = 0);

/// Discrete L2(Omega x period) projection of samples given on the time grid x
/// the basis quadrature nodes. Throws ShapeError on grid mismatch.
ModalCoeffs project_field(const FieldSamples& samples, SpatialFamily family, const SpatialBasis& basis,
                          const TimeModes& modes);

}  // namespace hystwave
