#include "hystwave/trig_series.hpp"

#include <cmath>
#include <numbers>

namespace hystwave {

double time_mode(int j, double t) {
  return j >= 1 ? std::sin(j * t) : std::cos(j * t);
}

TrigSeries TrigSeries::from_samples(std::span<const double> samples) {
  const std::size_t n = samples.size();
  const int order = n == 0 ? 0 : static_cast<int>((n - 1) / 2);
  TrigSeries s(order);
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (int j = -order; j <= order; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += samples[k] * time_mode(j, dt * static_cast<double>(k));
    const double norm = (j == 0) ? 2.0 * std::numbers::pi : std::numbers::pi;
    s[j] = acc * dt / norm;
  }
  return s;
}

double TrigSeries::value(double t) const {
  double acc = (*this)[0];
  for (int j = 1; j <= order_; ++j) acc += (*this)[j] * std::sin(j * t) + (*this)[-j] * std::cos(j * t);
  return acc;
}

TrigSeries TrigSeries::derivative(int k) const {
  TrigSeries out = *this;
  for (int step = 0; step < k; ++step) {
    TrigSeries next(order_);
    // coefficient of e_j in the derivative is -j c_{-j}
    for (int j = -order_; j <= order_; ++j) next[j] = -j * out[-j];
    out = next;
  }
  return out;
}

std::vector<double> TrigSeries::sample(std::size_t count) const {
  std::vector<double> out(count);
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = value(dt * static_cast<double>(n));
  return out;
}

std::vector<TurningPoint> interior_turning_points(const TrigSeries& series, std::size_t count) {
  std::vector<TurningPoint> out;
  if (count == 0) return out;
  const TrigSeries d = series.derivative();
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(count);
  std::vector<double> slope = d.sample(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double fa = slope[n];
    const double fb = slope[(n + 1) % count];
    if (!(fa * fb < 0.0)) continue;
    double a = dt * static_cast<double>(n);
    double b = a + dt;
    double ga = fa;
    for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      const double gm = d.value(m);
      if ((gm < 0.0) == (ga < 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    const double t = 0.5 * (a + b);
    out.push_back({n, t, series.value(t)});
  }
  return out;
}

PeriodicSignal resolve_signal(const TrigSeries& series, std::size_t count) {
  return {series.sample(count), interior_turning_points(series, count)};
}

PeriodicSignal sampled_signal(std::vector<double> samples) {
  return {std::move(samples), {}};
}

}  // namespace hystwave
