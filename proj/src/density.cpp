#include "hystwave/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hystwave/errors.hpp"
#include "hystwave/quadrature.hpp"

namespace hystwave {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cell index i with grid[i] <= x <= grid[i + 1]; grid has at least two nodes.
std::size_t locate(const std::vector<double>& grid, double x) {
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(grid.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, grid.size() - 2);
}

bool inside(const std::vector<double>& grid, double x) {
  return x >= grid.front() && x <= grid.back();
}

double table_at(const TabulatedParams& t, std::size_t i, std::size_t j) {
  return t.values[i * t.v.size() + j];
}

double bilinear(const TabulatedParams& t, double r, double v) {
  if (!inside(t.r, r) || !inside(t.v, v)) return 0.0;
  const std::size_t i = locate(t.r, r);
  const std::size_t j = locate(t.v, v);
  const double sr = (r - t.r[i]) / (t.r[i + 1] - t.r[i]);
  const double sv = (v - t.v[j]) / (t.v[j + 1] - t.v[j]);
  return (1 - sr) * (1 - sv) * table_at(t, i, j) + sr * (1 - sv) * table_at(t, i + 1, j) +
         (1 - sr) * sv * table_at(t, i, j + 1) + sr * sv * table_at(t, i + 1, j + 1);
}

// Centered difference in v at node (i, j); one-sided at the table edges.
double node_dv(const TabulatedParams& t, std::size_t i, std::size_t j) {
  const std::size_t nv = t.v.size();
  const std::size_t lo = (j == 0) ? 0 : j - 1;
  const std::size_t hi = (j + 1 == nv) ? nv - 1 : j + 1;
  return (table_at(t, i, hi) - table_at(t, i, lo)) / (t.v[hi] - t.v[lo]);
}

double table_dv(const TabulatedParams& t, double r, double v) {
  if (!inside(t.r, r) || !inside(t.v, v)) return 0.0;
  const std::size_t i = locate(t.r, r);
  const std::size_t j = locate(t.v, v);
  const double sr = (r - t.r[i]) / (t.r[i + 1] - t.r[i]);
  const double sv = (v - t.v[j]) / (t.v[j + 1] - t.v[j]);
  return (1 - sr) * (1 - sv) * node_dv(t, i, j) + sr * (1 - sv) * node_dv(t, i + 1, j) +
         (1 - sr) * sv * node_dv(t, i, j + 1) + sr * sv * node_dv(t, i + 1, j + 1);
}

// Integral over [0, x] of g(v) * rho_table(r, v), panel-wise over the table's v cells.
template <class Weight>
double table_inner(const TabulatedParams& t, double r, double x, Weight weight) {
  if (x == 0.0 || !inside(t.r, r)) return 0.0;
  const double lo = std::max(std::min(0.0, x), t.v.front());
  const double hi = std::min(std::max(0.0, x), t.v.back());
  if (lo >= hi) return 0.0;
  std::vector<double> cuts{lo};
  for (double vj : t.v)
    if (vj > lo && vj < hi) cuts.push_back(vj);
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += adaptive_simpson([&](double v) { return weight(v) * bilinear(t, r, v); }, cuts[k],
                              cuts[k + 1], 1e-10);
  }
  return x >= 0.0 ? total : -total;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigurationError(msg);
}

}  // namespace

std::string to_string(DensityFamily family) {
  switch (family) {
    case DensityFamily::uniform: return "uniform";
    case DensityFamily::gaussian_in_v: return "gaussian-in-v";
    case DensityFamily::separable_exponential: return "separable-exponential";
    case DensityFamily::tabulated_grid: return "tabulated-grid";
  }
  return "unknown";
}

DensityFamily density_family_from_string(const std::string& name) {
  if (name == "uniform") return DensityFamily::uniform;
  if (name == "gaussian-in-v") return DensityFamily::gaussian_in_v;
  if (name == "separable-exponential") return DensityFamily::separable_exponential;
  if (name == "tabulated-grid") return DensityFamily::tabulated_grid;
  throw ConfigurationError("density.family: unknown family '" + name + "'");
}

PreisachDensity PreisachDensity::uniform(UniformParams p) {
  require(p.c > 0.0, "density.params.c must be positive");
  require(p.r_max > 0.0 && p.v_max > 0.0, "density.params: r_max and v_max must be positive");
  return PreisachDensity(p);
}

PreisachDensity PreisachDensity::gaussian_in_v(GaussianParams p) {
  require(p.c > 0.0, "density.params.c must be positive");
  require(p.sigma > 0.0, "density.params.sigma must be positive");
  require(p.r_max > 0.0, "density.params.r_max must be positive");
  return PreisachDensity(p);
}

PreisachDensity PreisachDensity::separable_exponential(SeparableExponentialParams p) {
  require(p.c > 0.0, "density.params.c must be positive");
  require(p.ell_r > 0.0 && p.ell_v > 0.0, "density.params: ell_r and ell_v must be positive");
  return PreisachDensity(p);
}

PreisachDensity PreisachDensity::tabulated(TabulatedParams p) {
  require(p.r.size() >= 2 && p.v.size() >= 2, "density.params: table needs at least 2x2 nodes");
  require(p.values.size() == p.r.size() * p.v.size(),
          "density.params.values: expected r.size() * v.size() entries");
  require(std::is_sorted(p.r.begin(), p.r.end()) &&
              std::adjacent_find(p.r.begin(), p.r.end()) == p.r.end(),
          "density.params.r must be strictly increasing");
  require(std::is_sorted(p.v.begin(), p.v.end()) &&
              std::adjacent_find(p.v.begin(), p.v.end()) == p.v.end(),
          "density.params.v must be strictly increasing");
  require(p.r.front() >= 0.0, "density.params.r must be non-negative");
  for (double x : p.values) require(x >= 0.0 && std::isfinite(x), "density.params.values must be finite and >= 0");
  return PreisachDensity(std::make_shared<const TabulatedParams>(std::move(p)));
}

DensityFamily PreisachDensity::family() const {
  return std::visit(overloaded{
                        [](const UniformParams&) { return DensityFamily::uniform; },
                        [](const GaussianParams&) { return DensityFamily::gaussian_in_v; },
                        [](const SeparableExponentialParams&) { return DensityFamily::separable_exponential; },
                        [](const std::shared_ptr<const TabulatedParams>&) { return DensityFamily::tabulated_grid; },
                    },
                    params_);
}

const TabulatedParams* PreisachDensity::table() const {
  if (auto t = std::get_if<std::shared_ptr<const TabulatedParams>>(&params_)) return t->get();
  return nullptr;
}

double PreisachDensity::operator()(double r, double v) const {
  return std::visit(
      overloaded{
          [&](const UniformParams& p) { return (r <= p.r_max && std::abs(v) <= p.v_max) ? p.c : 0.0; },
          [&](const GaussianParams& p) {
            return r <= p.r_max ? p.c * std::exp(-(v * v) / (p.sigma * p.sigma)) : 0.0;
          },
          [&](const SeparableExponentialParams& p) {
            return p.c * std::exp(-r / p.ell_r) * std::exp(-std::abs(v) / p.ell_v);
          },
          [&](const std::shared_ptr<const TabulatedParams>& t) { return bilinear(*t, r, v); },
      },
      params_);
}

double PreisachDensity::dv(double r, double v) const {
  return std::visit(overloaded{
                        [&](const UniformParams&) { return 0.0; },
                        [&](const GaussianParams& p) {
                          if (r > p.r_max) return 0.0;
                          const double s2 = p.sigma * p.sigma;
                          return -2.0 * v / s2 * p.c * std::exp(-(v * v) / s2);
                        },
                        [&](const SeparableExponentialParams& p) {
                          const double sign = (v > 0.0) - (v < 0.0);
                          return -sign / p.ell_v * p.c * std::exp(-r / p.ell_r) *
                                 std::exp(-std::abs(v) / p.ell_v);
                        },
                        [&](const std::shared_ptr<const TabulatedParams>& t) { return table_dv(*t, r, v); },
                    },
                    params_);
}

double PreisachDensity::rho_star(double r) const {
  return std::visit(overloaded{
                        [&](const UniformParams& p) { return r <= p.r_max ? p.c : 0.0; },
                        [&](const GaussianParams& p) { return r <= p.r_max ? p.c : 0.0; },
                        [&](const SeparableExponentialParams& p) { return p.c * std::exp(-r / p.ell_r); },
                        [&](const std::shared_ptr<const TabulatedParams>& t) {
                          if (!inside(t->r, r)) return 0.0;
                          double best = 0.0;
                          for (double vj : t->v) best = std::max(best, bilinear(*t, r, vj));
                          return best;
                        },
                    },
                    params_);
}

double PreisachDensity::inner(double r, double x) const {
  return std::visit(
      overloaded{
          [&](const UniformParams& p) {
            return r <= p.r_max ? p.c * std::clamp(x, -p.v_max, p.v_max) : 0.0;
          },
          [&](const GaussianParams& p) {
            if (r > p.r_max) return 0.0;
            return p.c * p.sigma * std::sqrt(std::numbers::pi) * 0.5 * std::erf(x / p.sigma);
          },
          [&](const SeparableExponentialParams& p) {
            const double sign = (x > 0.0) - (x < 0.0);
            return p.c * std::exp(-r / p.ell_r) * sign * p.ell_v *
                   (-std::expm1(-std::abs(x) / p.ell_v));
          },
          [&](const std::shared_ptr<const TabulatedParams>& t) {
            return table_inner(*t, r, x, [](double) { return 1.0; });
          },
      },
      params_);
}

double PreisachDensity::inner_first_moment(double r, double x) const {
  return std::visit(
      overloaded{
          [&](const UniformParams& p) {
            if (r > p.r_max) return 0.0;
            const double xc = std::clamp(x, -p.v_max, p.v_max);
            return 0.5 * p.c * xc * xc;
          },
          [&](const GaussianParams& p) {
            if (r > p.r_max) return 0.0;
            const double s2 = p.sigma * p.sigma;
            return -0.5 * p.c * s2 * std::expm1(-(x * x) / s2);
          },
          [&](const SeparableExponentialParams& p) {
            const double y = std::abs(x) / p.ell_v;
            return p.c * std::exp(-r / p.ell_r) * p.ell_v * p.ell_v *
                   (1.0 - std::exp(-y) * (1.0 + y));
          },
          [&](const std::shared_ptr<const TabulatedParams>& t) {
            return table_inner(*t, r, x, [](double v) { return v; });
          },
      },
      params_);
}

std::vector<double> PreisachDensity::r_breaks() const {
  return std::visit(overloaded{
                        [](const UniformParams& p) { return std::vector<double>{p.r_max}; },
                        [](const GaussianParams& p) { return std::vector<double>{p.r_max}; },
                        [](const SeparableExponentialParams&) { return std::vector<double>{}; },
                        [](const std::shared_ptr<const TabulatedParams>& t) { return t->r; },
                    },
                    params_);
}

std::vector<double> PreisachDensity::v_breaks() const {
  return std::visit(overloaded{
                        [](const UniformParams& p) { return std::vector<double>{-p.v_max, p.v_max}; },
                        [](const GaussianParams&) { return std::vector<double>{}; },
                        [](const SeparableExponentialParams&) { return std::vector<double>{0.0}; },
                        [](const std::shared_ptr<const TabulatedParams>& t) { return t->v; },
                    },
                    params_);
}

double PreisachDensity::sup() const {
  return std::visit(overloaded{
                        [](const UniformParams& p) { return p.c; },
                        [](const GaussianParams& p) { return p.c; },
                        [](const SeparableExponentialParams& p) { return p.c; },
                        [](const std::shared_ptr<const TabulatedParams>& t) {
                          return *std::max_element(t->values.begin(), t->values.end());
                        },
                    },
                    params_);
}

double PreisachDensity::total_mass() const {
  return std::visit(
      overloaded{
          [](const UniformParams& p) { return p.c * p.r_max * 2.0 * p.v_max; },
          [](const GaussianParams& p) { return p.c * p.sigma * std::sqrt(std::numbers::pi) * p.r_max; },
          [](const SeparableExponentialParams& p) { return p.c * p.ell_r * 2.0 * p.ell_v; },
          [](const std::shared_ptr<const TabulatedParams>& t) {
            // Bilinear cells integrate exactly with the 2D trapezoid rule.
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < t->r.size(); ++i)
              for (std::size_t j = 0; j + 1 < t->v.size(); ++j)
                sum += 0.25 * (t->r[i + 1] - t->r[i]) * (t->v[j + 1] - t->v[j]) *
                       (table_at(*t, i, j) + table_at(*t, i + 1, j) + table_at(*t, i, j + 1) +
                        table_at(*t, i + 1, j + 1));
            return sum;
          },
      },
      params_);
}

double PreisachDensity::star_mass() const {
  return std::visit(overloaded{
                        [](const UniformParams& p) { return p.c * p.r_max; },
                        [](const GaussianParams& p) { return p.c * p.r_max; },
                        [](const SeparableExponentialParams& p) { return p.c * p.ell_r; },
                        [this](const std::shared_ptr<const TabulatedParams>& t) {
                          double sum = 0.0;
                          for (std::size_t i = 0; i + 1 < t->r.size(); ++i)
                            sum += adaptive_simpson([this](double r) { return rho_star(r); }, t->r[i],
                                                    t->r[i + 1], 1e-10);
                          return sum;
                        },
                    },
                    params_);
}

PreisachDensity PreisachDensity::with_constants(const DensityConstants& constants) const {
  PreisachDensity copy = *this;
  copy.constants_ = constants;
  return copy;
}

namespace {

struct RegionExtrema {
  double min_rho = kInf;
  double max_abs_dv = 0.0;
};

RegionExtrema scan_region(const PreisachDensity& d, double R, int resolution) {
  RegionExtrema ex;
  const int n = std::max(resolution, 3);
  for (int a = 0; a < n; ++a) {
    const double r = R * a / (n - 1);
    const double b = R - r;
    for (int c = 0; c < n; ++c) {
      const double v = -b + 2.0 * b * c / (n - 1);
      ex.min_rho = std::min(ex.min_rho, d(r, v));
      if (d.family() != DensityFamily::tabulated_grid) ex.max_abs_dv = std::max(ex.max_abs_dv, std::abs(d.dv(r, v)));
    }
  }
  switch (d.family()) {
    case DensityFamily::gaussian_in_v: {
      // |d rho/dv| peaks at |v| = sigma / sqrt(2) when that lies inside the region.
      const double sigma = std::get<GaussianParams>(d.params()).sigma;
      const double v_peak = sigma / std::sqrt(2.0);
      if (v_peak <= R) ex.max_abs_dv = std::max(ex.max_abs_dv, std::abs(d.dv(0.0, v_peak)));
      break;
    }
    case DensityFamily::separable_exponential: {
      // Supremum approached as v -> 0 at r = 0.
      ex.max_abs_dv = std::max(ex.max_abs_dv, std::abs(d.dv(0.0, std::numeric_limits<double>::min())));
      break;
    }
    case DensityFamily::tabulated_grid: {
      const TabulatedParams& t = *d.table();
      for (std::size_t i = 0; i < t.r.size(); ++i)
        for (std::size_t j = 0; j < t.v.size(); ++j)
          if (t.r[i] + std::abs(t.v[j]) <= R) ex.max_abs_dv = std::max(ex.max_abs_dv, std::abs(node_dv(t, i, j)));
      break;
    }
    case DensityFamily::uniform: break;
  }
  return ex;
}

}  // namespace

double convexity_margin(const PreisachDensity& density, double R, int resolution) {
  const RegionExtrema ex = scan_region(density, R, resolution);
  return 0.5 * ex.min_rho - R * ex.max_abs_dv;
}

double largest_feasible_radius(const PreisachDensity& density, double R_hi, int resolution) {
  const double C = scan_region(density, R_hi, resolution).max_abs_dv;
  auto margin = [&](double R) { return 0.5 * scan_region(density, R, resolution).min_rho - R * C; };
  double lo = 0.0;
  double hi = R_hi;
  if (margin(hi) > 0.0) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (margin(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

DensityConstants validate_density(const PreisachDensity& density, double R, int resolution) {
  if (!(R > 0.0) || !std::isfinite(R)) throw ConfigurationError("density.R must be positive and finite");
  if (resolution < 3) throw GridError("validate_density: resolution must be at least 3");
  DensityConstants k;
  k.R = R;
  k.C_rho = density.total_mass();
  k.C_rho_star = density.star_mass();
  k.H_rho = density.sup();
  if (!std::isfinite(k.C_rho_star)) throw ConfigurationError("density: dominating function rho* is not integrable");
  const RegionExtrema ex = scan_region(density, R, resolution);
  k.A_R = ex.min_rho;
  k.C_R = ex.max_abs_dv;
  if (!(k.A_R > 0.0))
    throw DegenerateDensity("density: A_R = inf rho on {r + |v| <= R} must be positive (got " +
                            std::to_string(k.A_R) + ")");
  k.K_R = 0.5 * k.A_R - R * k.C_R;
  if (!(k.K_R > 0.0)) {
    const double suggestion = largest_feasible_radius(density, R, resolution);
    throw ConvexityRadiusTooLarge("density: A_R/2 - R*C_R = " + std::to_string(k.K_R) +
                                      " <= 0; largest feasible R is about " + std::to_string(suggestion),
                                  suggestion);
  }
  return k;
}

ConvexifiedDensity::ConvexifiedDensity(PreisachDensity base, double R) : base_(std::move(base)), R_(R) {
  if (!(R_ > 0.0)) throw ConfigurationError("convexified density: R must be positive");
}

double ConvexifiedDensity::operator()(double r, double v) const {
  if (r > R_) return base_(R_, 0.0);
  const double b = R_ - r;
  if (v < -b) return base_(r, -b);
  if (v > b) return base_(r, b);
  return base_(r, v);
}

double ConvexifiedDensity::inner(double r, double x) const {
  if (r > R_) return base_(R_, 0.0) * x;
  const double b = R_ - r;
  if (x > b) return base_.inner(r, b) + base_(r, b) * (x - b);
  if (x < -b) return base_.inner(r, -b) + base_(r, -b) * (x + b);
  return base_.inner(r, x);
}

ConvexifiedDensity convexify_density(const PreisachDensity& density) {
  if (!density.constants()) throw ConfigurationError("convexify_density: density constants not validated");
  return ConvexifiedDensity(density, density.constants()->R);
}

}  // namespace hystwave
