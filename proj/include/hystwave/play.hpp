#pragma once

#include <span>
#include <vector>

namespace hystwave {

/// One play element: threshold r and current output xi.
/// Invariant after any update with input p: |p - xi| <= r.
struct PlayState {
  double r = 1.0;
  double xi = 0.0;
};

/// Initial play output: xi = p0 - clamp(p0, -r, r). Throws InvalidThreshold for r <= 0.
PlayState play_init(double r, double p0);

/// One-step projection xi_new = p_new - clamp(p_new - xi_old, -r, r).
/// Contact |p_new - xi_old| == r is treated as no motion.
PlayState play_update(PlayState state, double p_new);

/// Folds play_init + play_update over the samples.
std::vector<double> play_trajectory(double r, std::span<const double> samples);

/// Runs the play over two concatenated periods starting from play_init and
/// returns the second one.
std::vector<double> periodic_play_response(double r, std::span<const double> one_period);

/// Trajectory of the play for the piecewise-linear interpolant of the samples,
/// with the instants where the play starts moving inserted as extra points.
/// `time` is the fractional sample index of every point.
struct ResolvedTrajectory {
  std::vector<double> time;  // fractional sample index
  std::vector<double> p;
  std::vector<double> xi;
};

ResolvedTrajectory play_resolved_trajectory(double r, std::span<const double> samples);

}  // namespace hystwave
