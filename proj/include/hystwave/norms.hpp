#pragma once

#include "hystwave/spectral_basis.hpp"

namespace hystwave {

enum class NormRegion { bulk, boundary };

/// gamma at x = 0 and x = L.
struct BoundaryWeights {
  double gamma0 = 0.0;
  double gammaL = 0.0;
};

/// (int over one period of int |y|^q)^(1/q), trapezoid in time.
///   bulk:     samples on the time grid x the basis quadrature nodes, Gauss in space;
///   boundary: samples with n_x = 2 (x = 0, x = L), weighted by gamma.
/// Throws GridError for q < 1 and ShapeError if the samples do not match the region.
double periodic_norm(const FieldSamples& samples, double q, NormRegion region, const SpatialBasis& basis,
                     double dt, BoundaryWeights gamma = {});

}  // namespace hystwave
