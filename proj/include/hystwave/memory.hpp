#pragma once

#include <span>
#include <vector>

#include "hystwave/play.hpp"

namespace hystwave {

/// Hysteresis memory of the whole play family {xi_r : r > 0} at one point.
///
/// The map r -> xi_r is piecewise linear with slopes in {-1, 0, +1}; it is
/// stored exactly as its breakpoints (r_0 = 0, xi_0 = current input) up to
/// r_cap, beyond which every play output is zero. update() applies the
/// one-step projection of play_update to every r at once.
class MemoryState {
 public:
  struct Breakpoint {
    double r;
    double xi;
  };

  /// Virgin state: xi_r = 0 for every r.
  MemoryState() = default;

  void update(double p);

  /// Play output for threshold r > 0.
  double xi(double r) const;
  double input() const { return points_.front().xi; }
  double r_cap() const { return points_.back().r; }
  double running_sup() const { return running_sup_; }
  bool virgin() const { return points_.size() == 1; }

  std::span<const Breakpoint> breakpoints() const { return points_; }

  /// PlayState at each requested threshold.
  std::vector<PlayState> plays(std::span<const double> r_nodes) const;

  /// Sup-distance between two memory curves.
  static double distance(const MemoryState& a, const MemoryState& b);

  /// True when r -> xi_r is 1-Lipschitz and vanishes beyond r_cap.
  bool well_formed(double tol = 1e-12) const;

 private:
  std::vector<Breakpoint> points_{{0.0, 0.0}};
  double running_sup_ = 0.0;
};

}  // namespace hystwave
