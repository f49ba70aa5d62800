#include "hystwave/memory.hpp"

#include <algorithm>
#include <cmath>

namespace hystwave {

void MemoryState::update(double p) {
  running_sup_ = std::max(running_sup_, std::abs(p));
  const double p0 = points_.front().xi;
  if (p == p0) return;

  // Ascending input clamps the curve from below by p - r, descending from
  // above by p + r. In both cases the gap h(r) is nondecreasing in r because
  // the curve is 1-Lipschitz, so the clamp replaces a prefix of the curve.
  const double s = (p > p0) ? 1.0 : -1.0;
  auto gap = [&](const Breakpoint& b) { return s * (b.xi - p) + b.r; };

  std::size_t i = 1;
  while (i < points_.size() && gap(points_[i]) < 0.0) ++i;

  std::vector<Breakpoint> next;
  next.reserve(points_.size() - std::min(i, points_.size()) + 3);
  next.push_back({0.0, p});
  if (i == points_.size()) {
    // The clamp line meets the zero tail at r = |p|.
    const double r_star = s * p;
    next.push_back({r_star, 0.0});
  } else {
    const Breakpoint& a = points_[i - 1];
    const Breakpoint& b = points_[i];
    const double ha = gap(a);
    const double hb = gap(b);
    double r_star = a.r + (b.r - a.r) * (-ha) / (hb - ha);
    r_star = std::clamp(r_star, a.r, b.r);
    if (r_star < b.r) next.push_back({r_star, p - s * r_star});
    next.insert(next.end(), points_.begin() + static_cast<std::ptrdiff_t>(i), points_.end());
  }
  points_ = std::move(next);
}

double MemoryState::xi(double r) const {
  if (r >= points_.back().r) return 0.0;
  auto it = std::upper_bound(points_.begin(), points_.end(), r,
                             [](double x, const Breakpoint& b) { return x < b.r; });
  const Breakpoint& b = *it;
  const Breakpoint& a = *(it - 1);
  return a.xi + (b.xi - a.xi) * (r - a.r) / (b.r - a.r);
}

std::vector<PlayState> MemoryState::plays(std::span<const double> r_nodes) const {
  std::vector<PlayState> out;
  out.reserve(r_nodes.size());
  for (double r : r_nodes) out.push_back({r, xi(r)});
  return out;
}

double MemoryState::distance(const MemoryState& a, const MemoryState& b) {
  // Both curves are piecewise linear: the sup of the difference is attained at a breakpoint of either.
  double d = 0.0;
  for (const auto& pt : a.points_) d = std::max(d, std::abs(pt.xi - b.xi(pt.r)));
  for (const auto& pt : b.points_) d = std::max(d, std::abs(pt.xi - a.xi(pt.r)));
  return d;
}

bool MemoryState::well_formed(double tol) const {
  if (points_.back().xi != 0.0 && points_.size() > 1) return false;
  for (std::size_t k = 1; k < points_.size(); ++k) {
    const double dr = points_[k].r - points_[k - 1].r;
    if (dr < 0.0) return false;
    if (std::abs(points_[k].xi - points_[k - 1].xi) > dr + tol) return false;
  }
  return true;
}

}  // namespace hystwave
