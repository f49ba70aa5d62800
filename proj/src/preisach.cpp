#include "hystwave/preisach.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hystwave/errors.hpp"
#include "hystwave/play.hpp"
#include "hystwave/quadrature.hpp"

namespace hystwave {

PreisachEvaluator::PreisachEvaluator(PreisachDensity density, std::size_t order)
    : density_(std::move(density)), order_(order) {
  if (order_ == 0) throw GridError("Preisach quadrature order must be positive");
  if (density_.constants()) rho_R_ = convexify_density(density_);
  r_breaks_ = density_.r_breaks();
  v_breaks_ = density_.v_breaks();
  gauss_legendre_reference(order_);  // warm the cache before any parallel use
}

template <class Visit>
void PreisachEvaluator::for_each_node(const MemoryState& memory, Visit&& visit) const {
  const auto pts = memory.breakpoints();
  const QuadratureRule& ref = gauss_legendre_reference(order_);
  std::vector<double> cuts;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double ra = pts[k].r;
    const double rb = pts[k + 1].r;
    if (!(rb > ra)) continue;
    const double ya = pts[k].xi;
    const double slope = (pts[k + 1].xi - ya) / (rb - ra);
    cuts.clear();
    cuts.push_back(ra);
    auto add = [&](double r) {
      if (r > ra && r < rb) cuts.push_back(r);
    };
    for (double r : r_breaks_) add(r);
    if (slope != 0.0)
      for (double v : v_breaks_) add(ra + (v - ya) / slope);
    if (rho_R_) {
      const double R = rho_R_->R();
      add(R);
      if (slope != -1.0) add((R - ya + slope * ra) / (slope + 1.0));
      if (slope != 1.0) add((ya - slope * ra + R) / (1.0 - slope));
    }
    cuts.push_back(rb);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c];
      const double b = cuts[c + 1];
      if (!(b > a)) continue;
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      for (std::size_t q = 0; q < ref.nodes.size(); ++q) {
        const double r = mid + half * ref.nodes[q];
        visit(r, ya + slope * (r - ra), half * ref.weights[q]);
      }
    }
  }
}

OperatorOutputs PreisachEvaluator::outputs(const MemoryState& memory, bool with_convexified) const {
  OperatorOutputs out;
  const bool want_R = with_convexified && rho_R_.has_value();
  for_each_node(memory, [&](double r, double xi, double w) {
    const double inner = density_.inner(r, xi);
    out.g += w * inner;
    out.v_pot += w * density_.inner_first_moment(r, xi);
    out.d_diss += w * r * inner;
    if (want_R) out.g_R += w * rho_R_->inner(r, xi);
  });
  if (!want_R) out.g_R = std::numeric_limits<double>::quiet_NaN();
  return out;
}

double PreisachEvaluator::g(const MemoryState& memory) const {
  double g = 0.0;
  for_each_node(memory, [&](double r, double xi, double w) { g += w * density_.inner(r, xi); });
  return g;
}

double PreisachEvaluator::g_R(const MemoryState& memory) const {
  if (!rho_R_) throw ConfigurationError("convexified operator requires validated density constants");
  double g = 0.0;
  for_each_node(memory, [&](double r, double xi, double w) { g += w * rho_R_->inner(r, xi); });
  return g;
}

OperatorOutputs preisach_eval(const PreisachDensity& density, const MemoryState& memory, bool convexified,
                              std::size_t order) {
  if (convexified && !density.constants())
    throw ConfigurationError("preisach_eval: convexified output needs validated density constants");
  PreisachEvaluator eval(density, order);
  return eval.outputs(memory, convexified);
}

std::vector<OperatorOutputs> preisach_trajectory(const PreisachEvaluator& eval, std::span<const double> samples) {
  std::vector<OperatorOutputs> out;
  out.reserve(samples.size());
  MemoryState memory;
  for (double p : samples) {
    memory.update(p);
    out.push_back(eval.outputs(memory));
  }
  return out;
}

namespace {

// Feeds one period of the signal (samples plus in-between extrema); calls
// record(n, memory) right after sample n has been applied.
template <class Record>
void feed_period(MemoryState& memory, const PeriodicSignal& signal, Record&& record) {
  std::size_t e = 0;
  for (std::size_t n = 0; n < signal.samples.size(); ++n) {
    memory.update(signal.samples[n]);
    record(n, memory);
    while (e < signal.extrema.size() && signal.extrema[e].after == n) {
      memory.update(signal.extrema[e].value);
      ++e;
    }
  }
}

}  // namespace

PeriodicResponse periodic_preisach_response(const PreisachEvaluator& eval, const PeriodicSignal& signal,
                                            bool with_plain, double tol) {
  PeriodicResponse out;
  const std::size_t n = signal.samples.size();
  if (n == 0) return out;
  MemoryState memory;
  feed_period(memory, signal, [](std::size_t, const MemoryState&) {});
  const MemoryState after_first = memory;
  out.g_R.resize(n);
  if (with_plain) out.g.resize(n);
  feed_period(memory, signal, [&](std::size_t k, const MemoryState& m) {
    out.g_R[k] = eval.g_R(m);
    if (with_plain) out.g[k] = eval.g(m);
  });
  out.memory_drift = MemoryState::distance(after_first, memory);
  const double scale = std::max(1.0, memory.running_sup());
  if (out.memory_drift > tol * scale)
    throw MemoryNotPeriodic("hysteresis memory not periodic after warm-up period (drift " +
                            std::to_string(out.memory_drift) + ")");
  return out;
}

PlayResiduals play_energy_residuals(double r, std::span<const double> samples) {
  const ResolvedTrajectory tr = play_resolved_trajectory(r, samples);
  PlayResiduals res;
  for (std::size_t k = 1; k < tr.p.size(); ++k) {
    const double dxi = tr.xi[k] - tr.xi[k - 1];
    const double dp = tr.p[k] - tr.p[k - 1];
    res.energy.push_back(dxi * tr.p[k] - 0.5 * (tr.xi[k] * tr.xi[k] - tr.xi[k - 1] * tr.xi[k - 1]) -
                         std::abs(r * dxi));
    res.mono.push_back(dxi * (dp - dxi));
  }
  return res;
}

std::vector<double> preisach_energy_residuals(std::span<const double> samples,
                                              std::span<const OperatorOutputs> outputs) {
  if (samples.size() != outputs.size())
    throw ShapeError("preisach_energy_residuals: " + std::to_string(samples.size()) + " samples vs " +
                     std::to_string(outputs.size()) + " outputs");
  std::vector<double> res;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const double dg = outputs[k].g - outputs[k - 1].g;
    const double dv = outputs[k].v_pot - outputs[k - 1].v_pot;
    const double dd = outputs[k].d_diss - outputs[k - 1].d_diss;
    res.push_back(dg * samples[k] - dv - std::abs(dd));
  }
  return res;
}

GrowthReport growth_and_coincidence_check(const PreisachEvaluator& eval, std::span<const double> samples) {
  GrowthReport rep;
  const auto& k = eval.density().constants();
  if (!k) throw ConfigurationError("growth check needs validated density constants");
  const double H = k->H_rho;
  double sup = 0.0;
  for (double p : samples) sup = std::max(sup, std::abs(p));
  rep.coincidence_checked = sup <= k->R;

  MemoryState memory;
  double running = 0.0;
  double prev_gR = 0.0;
  double prev_p = 0.0;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double p = samples[n];
    memory.update(p);
    running = std::max(running, std::abs(p));
    const OperatorOutputs o = eval.outputs(memory);
    rep.g.push_back(o.g);
    rep.g_R.push_back(o.g_R);
    // Round-off allowance proportional to the bound itself.
    const double value_bound = H * running * running;
    if (value_bound > 0.0) rep.max_value_ratio = std::max(rep.max_value_ratio, std::abs(o.g_R) / value_bound);
    if (std::abs(o.g_R) > value_bound * (1.0 + 1e-12) + 1e-300) ++rep.violations;
    if (n > 0) {
      const double rate_bound = H * running * std::abs(p - prev_p);
      const double dg = std::abs(o.g_R - prev_gR);
      if (rate_bound > 0.0) rep.max_rate_ratio = std::max(rep.max_rate_ratio, dg / rate_bound);
      if (dg > rate_bound * (1.0 + 1e-10) + 1e-15 * std::max(1.0, std::abs(o.g_R))) ++rep.violations;
    }
    if (rep.coincidence_checked) rep.max_coincidence_gap = std::max(rep.max_coincidence_gap, std::abs(o.g - o.g_R));
    prev_gR = o.g_R;
    prev_p = p;
  }
  return rep;
}

void write_trajectory_csv(std::ostream& out, std::span<const double> t, std::span<const double> p,
                          std::span<const double> radii, const PreisachEvaluator& eval) {
  if (t.size() != p.size()) throw ShapeError("write_trajectory_csv: t and p lengths differ");
  out << "t,p";
  for (std::size_t i = 0; i < radii.size(); ++i) out << ",xi_r" << (i + 1);
  out << ",g,g_R,V,D\n";
  out.precision(17);
  MemoryState memory;
  for (std::size_t n = 0; n < p.size(); ++n) {
    memory.update(p[n]);
    const OperatorOutputs o = eval.outputs(memory);
    out << t[n] << ',' << p[n];
    for (double r : radii) out << ',' << memory.xi(r);
    out << ',' << o.g << ',';
    if (eval.convexified()) out << o.g_R;
    out << ',' << o.v_pot << ',' << o.d_diss << '\n';
  }
}

TrajectoryInput read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ShapeError("trajectory CSV: missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ShapeError("trajectory CSV: missing column '" + name + "'");
    return static_cast<std::size_t>(std::distance(header.begin(), it));
  };
  const std::size_t ct = col("t");
  const std::size_t cp = col("p");
  TrajectoryInput data;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() <= std::max(ct, cp)) throw ShapeError("trajectory CSV: short row " + std::to_string(row));
    try {
      data.t.push_back(std::stod(cells[ct]));
      data.p.push_back(std::stod(cells[cp]));
    } catch (const std::exception&) {
      throw ShapeError("trajectory CSV: non-numeric value in row " + std::to_string(row));
    }
  }
  return data;
}

}  // namespace hystwave
