#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hystwave {

enum class DensityFamily { uniform, gaussian_in_v, separable_exponential, tabulated_grid };

std::string to_string(DensityFamily family);
DensityFamily density_family_from_string(const std::string& name);

/// rho = c on (0, r_max] x [-v_max, v_max], zero outside.
struct UniformParams {
  double c = 1.0;
  double r_max = 10.0;
  double v_max = 10.0;
};

/// rho = c exp(-v^2 / sigma^2) for r <= r_max, zero beyond.
struct GaussianParams {
  double c = 1.0;
  double sigma = 1.0;
  double r_max = 10.0;
};

/// rho = c exp(-r / ell_r) exp(-|v| / ell_v).
struct SeparableExponentialParams {
  double c = 1.0;
  double ell_r = 1.0;
  double ell_v = 1.0;
};

/// Bilinear interpolation of values on an (r, v) grid; zero outside the box.
struct TabulatedParams {
  std::vector<double> r;
  std::vector<double> v;
  std::vector<double> values;  // row-major, values[i * v.size() + j] = rho(r[i], v[j])
};

/// Constants derived by validate_density for a convexity radius R.
struct DensityConstants {
  double R = 0.0;
  double C_rho = 0.0;       // integral of rho over the half plane
  double C_rho_star = 0.0;  // integral of the dominating function rho*
  double A_R = 0.0;         // inf rho on {r + |v| <= R}
  double C_R = 0.0;         // sup |d rho / dv| on {r + |v| <= R}
  double K_R = 0.0;         // A_R / 2 - R C_R
  double H_rho = 0.0;       // global sup rho
};

/// Preisach density rho(r, v) with closed-form inner integrals for the preset
/// families. Value type; tabulated data is shared between copies.
class PreisachDensity {
 public:
  static PreisachDensity uniform(UniformParams params = {});
  static PreisachDensity gaussian_in_v(GaussianParams params = {});
  static PreisachDensity separable_exponential(SeparableExponentialParams params = {});
  static PreisachDensity tabulated(TabulatedParams params);

  DensityFamily family() const;

  double operator()(double r, double v) const;
  /// d rho / dv: analytic for presets, centered differences on the table nodes otherwise.
  double dv(double r, double v) const;
  double rho_star(double r) const;

  /// Integral of rho(r, .) from 0 to x (signed).
  double inner(double r, double x) const;
  /// Integral of v rho(r, v) from 0 to x.
  double inner_first_moment(double r, double x) const;

  /// Radii and input levels across which rho is not smooth; the memory
  /// quadrature splits its panels there.
  std::vector<double> r_breaks() const;
  std::vector<double> v_breaks() const;

  double sup() const;
  double total_mass() const;
  double star_mass() const;

  /// Returns a copy carrying validated constants (see validate_density).
  PreisachDensity with_constants(const DensityConstants& constants) const;
  const std::optional<DensityConstants>& constants() const { return constants_; }

  const TabulatedParams* table() const;

  using Params = std::variant<UniformParams, GaussianParams, SeparableExponentialParams,
                              std::shared_ptr<const TabulatedParams>>;
  const Params& params() const { return params_; }

 private:
  explicit PreisachDensity(Params params) : params_(std::move(params)) {}

  Params params_;
  std::optional<DensityConstants> constants_;
};

/// Computes C_rho, C_rho*, A_R, C_R, K_R, H_rho for radius R on a dense grid of
/// `resolution` x `resolution` points covering {r + |v| <= R}.
/// Throws DegenerateDensity if A_R <= 0 and ConvexityRadiusTooLarge (with a
/// bisection-based suggestion) if A_R / 2 - R C_R <= 0.
DensityConstants validate_density(const PreisachDensity& density, double R, int resolution = 201);

/// Evaluates A_R / 2 - R C_R for a trial radius without throwing.
double convexity_margin(const PreisachDensity& density, double R, int resolution = 201);

/// Largest radius in (0, R_hi] with A_R / 2 - R C > 0, located by bisection.
/// C is the gradient bound on the R_hi region, which dominates C_R for every
/// smaller radius, so the returned radius is feasible.
double largest_feasible_radius(const PreisachDensity& density, double R_hi, int resolution = 201);

/// The convexified density rho_R: rho inside {r + |v| <= R}, clamped to the
/// boundary values outside it, and rho(R, 0) for r > R.
class ConvexifiedDensity {
 public:
  ConvexifiedDensity(PreisachDensity base, double R);

  double R() const { return R_; }
  const PreisachDensity& base() const { return base_; }

  double operator()(double r, double v) const;
  /// Integral of rho_R(r, .) from 0 to x. Equals base().inner(r, x)
  /// bit-for-bit whenever |x| <= R - r.
  double inner(double r, double x) const;

 private:
  PreisachDensity base_;
  double R_;
};

/// Requires validated constants; throws ConfigurationError otherwise.
ConvexifiedDensity convexify_density(const PreisachDensity& density);

}  // namespace hystwave
