#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hystwave {

/// Time mode e_j(t): sin(j t) for j >= 1, cos(j t) for j <= 0.
double time_mode(int j, double t);

/// 2 pi-periodic trigonometric polynomial sum_{|j| <= order} c_j e_j(t).
class TrigSeries {
 public:
  explicit TrigSeries(int order = 0) : order_(order), coeffs_(2 * order + 1, 0.0) {}

  /// Discrete L2 projection of uniform samples on [0, 2 pi) onto |j| <= (N - 1) / 2.
  static TrigSeries from_samples(std::span<const double> samples);

  int order() const { return order_; }
  double operator[](int j) const { return coeffs_[static_cast<std::size_t>(j + order_)]; }
  double& operator[](int j) { return coeffs_[static_cast<std::size_t>(j + order_)]; }

  double value(double t) const;
  /// k-th time derivative; uses d/dt e_j = j e_{-j}.
  TrigSeries derivative(int k = 1) const;
  /// Values at t_n = 2 pi n / count.
  std::vector<double> sample(std::size_t count) const;

 private:
  int order_;
  std::vector<double> coeffs_;
};

/// Interior extremum of the series between two consecutive grid samples.
struct TurningPoint {
  std::size_t after;  // lies in (t_after, t_after+1), indices modulo the grid size
  double t;
  double value;
};

/// Sign changes of the derivative strictly between grid samples, located by bisection.
std::vector<TurningPoint> interior_turning_points(const TrigSeries& series, std::size_t count);

/// Uniform samples of a periodic input together with the extrema that fall
/// between samples. Feeding both to a rate-independent operator reproduces
/// its response to the continuous input at the sample instants.
struct PeriodicSignal {
  std::vector<double> samples;
  std::vector<TurningPoint> extrema;  // sorted by `after`
};

PeriodicSignal resolve_signal(const TrigSeries& series, std::size_t count);
/// Samples only; the interpolant between samples is treated as linear.
PeriodicSignal sampled_signal(std::vector<double> samples);

}  // namespace hystwave
