#include "hystwave/norms.hpp"

#include <cmath>

#include "hystwave/errors.hpp"

namespace hystwave {

double periodic_norm(const FieldSamples& samples, double q, NormRegion region, const SpatialBasis& basis,
                     double dt, BoundaryWeights gamma) {
  if (!(q >= 1.0)) throw GridError("periodic_norm: exponent q must be >= 1");
  std::vector<double> w;
  if (region == NormRegion::bulk) {
    if (samples.n_x != basis.n_quad()) throw ShapeError("periodic_norm: bulk samples must sit on the quadrature nodes");
    w = basis.quad.weights;
  } else {
    if (samples.n_x != 2) throw ShapeError("periodic_norm: boundary samples need exactly two endpoints");
    w = {gamma.gamma0, gamma.gammaL};
  }
  double acc = 0.0;
  for (std::size_t n = 0; n < samples.n_t; ++n)
    for (std::size_t i = 0; i < samples.n_x; ++i) acc += w[i] * std::pow(std::abs(samples(n, i)), q);
  return std::pow(acc * dt, 1.0 / q);
}

}  // namespace hystwave
