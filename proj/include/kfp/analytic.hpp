#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "kfp/mesh.hpp"

namespace kfp {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// Physical time t and self-similar time s = log(1 + t).
struct FormulationTime {
  double t = 0.0;
  double s = 0.0;

  static FormulationTime from_t(double t);
  static FormulationTime from_s(double s);
};

/// Fundamental solution of the Lagrangian equation ∂ₜg = (∂ᵥ + t∂_z)²g:
/// G_t(v,z) = √3/(2πt²) · exp(−(3z² + (2tv − 3z)²)/(4t³)). Requires t > 0.
double kernel_G(double t, double v, double z);

/// ‖G_t‖_{L^q(ℝ²)}; pass kInfNorm for q = ∞.
double kernel_Lq_norm(double t, double q);

/// ‖G_t‖_q by tensor Gauss–Legendre quadrature in the decorrelated
/// coordinates (z, 2tv − 3z); q = ∞ is the sampled maximum on a 1001² grid.
double kernel_Lq_norm_quadrature(double t, double q, int panels = 32);

/// Covariance of the kernel G_t viewed as a Gaussian density in (v, z).
struct Covariance2 {
  double vv, vz, zz;
};
Covariance2 kernel_covariance(double t);

/// One axis-aligned Gaussian a·exp(−((v−v₀)/w_v)² − ((x−x₀)/w_x)²).
struct GaussianBump {
  double amplitude = 1.0;
  double v0 = 0.0;
  double x0 = 0.0;
  double width_v = 1.0;
  double width_x = 1.0;
};

/// Initial data descriptor: a finite sum of axis-aligned Gaussians.
/// An empty sum is the zero function.
class InitialData {
 public:
  InitialData() = default;
  explicit InitialData(std::vector<GaussianBump> terms) : terms_(std::move(terms)) {}

  /// f₀(v,x) = exp(−v² − x²)
  static InitialData gaussian();
  static InitialData zero() { return InitialData{}; }

  double operator()(double v, double x) const;
  InitialData scaled(double factor) const;

  /// ∫ f₀
  double mass() const;
  /// Upper bounds for ‖f₀‖_{L¹} and ‖f₀‖_{L∞} (exact for a single bump).
  double l1_norm() const;
  double linf_norm() const;

  /// Box outside of which every term is below exp(−radius²) of its peak.
  RectDomain support(double radius = 8.0) const;
  bool empty() const { return terms_.empty(); }
  const std::vector<GaussianBump>& terms() const { return terms_; }

 private:
  std::vector<GaussianBump> terms_;
};

/// Closed-form solutions for the Gaussian initial datum exp(−v² − x²):
/// f(t,v,x), g(t,v,z) and g̃(s,ṽ,z̃).
double exact_original(double t, double v, double x);
double exact_lagrangian(double t, double v, double z);
double exact_selfsimilar(double s, double vt, double zt);

/// Dispatch on the formulation; `time` is t for original/lagrangian and s
/// for selfsimilar.
double exact_solution(Form form, double time, const Point& p);

/// π·G₁ = (√3/2)·exp(−ṽ² + 3ṽz̃ − 3z̃²)
double steady_state(double vt, double zt);

/// min{ (√3/2π)·‖f₀‖₁/(1 − e^{−s})², e^{2s}‖f₀‖_∞ }, s > 0.
double linf_envelope(double s, double l1_norm, double linf_norm);

struct OracleOptions {
  double radius = 8.0;        // box half-width in standard deviations
  double stop_tol = 1e-9;     // successive-refinement stopping rule
  int order = 8;              // Gauss points per panel
  int initial_panels = 4;
  int max_panels = 1024;
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f(t,v,x) = ∬ G_t(ν,ζ) f₀(v−ν, x+vt−ζ) dν dζ by tensor Gauss–Legendre with
/// panel doubling. Throws OracleError if refinement does not stabilise.
double convolution_oracle(const InitialData& f0, double t, const Point& point,
                          const OracleOptions& options = {});
std::vector<double> convolution_oracle(const InitialData& f0, double t,
                                       const std::vector<Point>& points,
                                       const OracleOptions& options = {});

enum class MapDirection {
  original_to_lagrangian,   // (t,v,x) → (t,v,z = x + tv)
  lagrangian_to_original,   // (t,v,z) → (t,v,x = z − tv)
  lagrangian_to_selfsimilar,  // (t,v,z) → (s, v e^{−s/2}, z e^{−3s/2}), amp e^{2s}
  selfsimilar_to_lagrangian,  // inverse, amp e^{−2s}
};

struct MappedPoint {
  double time = 0.0;
  Point point;
  /// Factor multiplying the source amplitude: target = amplitude · source.
  double amplitude = 1.0;
};

MappedPoint map_variables(MapDirection direction, double time, const Point& point);

/// C_Ω(t) of the directional Poincaré inequality.
double poincare_constant(const RectDomain& domain, double t);
/// |Ω₁| / (√2·C_Ω(t)): bound on ‖g‖ / ‖∂ᵥg + t∂_z g‖ for g ∈ H¹₀(Ω).
double poincare_inequality_constant(const RectDomain& domain, double t);

/// Domain size condition under which the truncated self-similar solution does
/// not decay to zero.
bool domain_condition(const RectDomain& domain);

}  // namespace kfp
