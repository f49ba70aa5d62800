#include "hystwave/play.hpp"

#include <algorithm>
#include <string>

#include "hystwave/errors.hpp"

namespace hystwave {

namespace {

void check_threshold(double r) {
  if (!(r > 0.0)) throw InvalidThreshold("play threshold must be positive, got " + std::to_string(r));
}

}  // namespace

PlayState play_init(double r, double p0) {
  check_threshold(r);
  return {r, p0 - std::clamp(p0, -r, r)};
}

PlayState play_update(PlayState state, double p_new) {
  state.xi = p_new - std::clamp(p_new - state.xi, -state.r, state.r);
  return state;
}

std::vector<double> play_trajectory(double r, std::span<const double> samples) {
  check_threshold(r);
  std::vector<double> out;
  if (samples.empty()) return out;
  out.reserve(samples.size());
  PlayState s = play_init(r, samples.front());
  out.push_back(s.xi);
  for (std::size_t n = 1; n < samples.size(); ++n) {
    s = play_update(s, samples[n]);
    out.push_back(s.xi);
  }
  return out;
}

std::vector<double> periodic_play_response(double r, std::span<const double> one_period) {
  check_threshold(r);
  if (one_period.empty()) return {};
  PlayState s = play_init(r, one_period.front());
  for (std::size_t n = 1; n < one_period.size(); ++n) s = play_update(s, one_period[n]);
  std::vector<double> out;
  out.reserve(one_period.size());
  for (double p : one_period) {
    s = play_update(s, p);
    out.push_back(s.xi);
  }
  return out;
}

ResolvedTrajectory play_resolved_trajectory(double r, std::span<const double> samples) {
  check_threshold(r);
  ResolvedTrajectory tr;
  if (samples.empty()) return tr;
  PlayState s = play_init(r, samples.front());
  tr.time.push_back(0.0);
  tr.p.push_back(samples.front());
  tr.xi.push_back(s.xi);
  for (std::size_t n = 1; n < samples.size(); ++n) {
    const double p_old = samples[n - 1];
    const double p_new = samples[n];
    // Input level at which contact starts within this step, if any.
    double p_contact = p_old;
    if (p_new - s.xi > r) {
      p_contact = s.xi + r;
    } else if (p_new - s.xi < -r) {
      p_contact = s.xi - r;
    }
    if (p_contact != p_old && p_contact != p_new) {
      const double frac = (p_contact - p_old) / (p_new - p_old);
      tr.time.push_back(static_cast<double>(n - 1) + frac);
      tr.p.push_back(p_contact);
      tr.xi.push_back(s.xi);
    }
    s = play_update(s, p_new);
    tr.time.push_back(static_cast<double>(n));
    tr.p.push_back(p_new);
    tr.xi.push_back(s.xi);
  }
  return tr;
}

}  // namespace hystwave
