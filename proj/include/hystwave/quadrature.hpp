#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hystwave {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [a, b] (nodes ascending).
QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Reference rule on [-1, 1], cached per order. Safe to call concurrently.
const QuadratureRule& gauss_legendre_reference(std::size_t n);

/// Adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 48);

/// Periodic trapezoid rule over [0, 2 pi) for uniformly spaced samples.
double periodic_trapezoid(std::span<const double> samples);

}  // namespace hystwave
