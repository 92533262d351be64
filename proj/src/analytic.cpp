#include "kfp/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kfp/quadrature.hpp"

namespace kfp {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;
constexpr double kPi = std::numbers::pi;

}  // namespace

FormulationTime FormulationTime::from_t(double t) {
  if (t < 0.0) throw std::invalid_argument("FormulationTime: t must be >= 0");
  return {t, std::log1p(t)};
}

FormulationTime FormulationTime::from_s(double s) {
  if (s < 0.0) throw std::invalid_argument("FormulationTime: s must be >= 0");
  return {std::expm1(s), s};
}

double kernel_G(double t, double v, double z) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel_G: t must be > 0");
  const double w = 2.0 * t * v - 3.0 * z;
  return kSqrt3 / (2.0 * kPi * t * t) *
         std::exp(-(3.0 * z * z + w * w) / (4.0 * t * t * t));
}

double kernel_Lq_norm(double t, double q) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel_Lq_norm: t must be > 0");
  if (!(q >= 1.0)) throw std::invalid_argument("kernel_Lq_norm: q must be >= 1");
  const double peak = kSqrt3 / (2.0 * kPi * t * t);
  if (std::isinf(q)) return peak;
  return std::pow(q, -1.0 / q) * std::pow(peak, (q - 1.0) / q);
}

Covariance2 kernel_covariance(double t) {
  return {2.0 * t, t * t, 2.0 * t * t * t / 3.0};
}

InitialData InitialData::gaussian() { return InitialData({GaussianBump{}}); }

double InitialData::operator()(double v, double x) const {
  double sum = 0.0;
  for (const auto& b : terms_) {
    const double dv = (v - b.v0) / b.width_v;
    const double dx = (x - b.x0) / b.width_x;
    sum += b.amplitude * std::exp(-dv * dv - dx * dx);
  }
  return sum;
}

InitialData InitialData::scaled(double factor) const {
  auto terms = terms_;
  for (auto& b : terms) b.amplitude *= factor;
  return InitialData(std::move(terms));
}

double InitialData::mass() const {
  double m = 0.0;
  for (const auto& b : terms_) m += b.amplitude * kPi * b.width_v * b.width_x;
  return m;
}

double InitialData::l1_norm() const {
  double m = 0.0;
  for (const auto& b : terms_) m += std::abs(b.amplitude) * kPi * b.width_v * b.width_x;
  return m;
}

double InitialData::linf_norm() const {
  double m = 0.0;
  for (const auto& b : terms_) m += std::abs(b.amplitude);
  return m;
}

RectDomain InitialData::support(double radius) const {
  if (terms_.empty()) return RectDomain(-1.0, 1.0, -1.0, 1.0);
  double v_lo = INFINITY, v_hi = -INFINITY, x_lo = INFINITY, x_hi = -INFINITY;
  for (const auto& b : terms_) {
    v_lo = std::min(v_lo, b.v0 - radius * b.width_v);
    v_hi = std::max(v_hi, b.v0 + radius * b.width_v);
    x_lo = std::min(x_lo, b.x0 - radius * b.width_x);
    x_hi = std::max(x_hi, b.x0 + radius * b.width_x);
  }
  return RectDomain(v_lo, v_hi, x_lo, x_hi);
}

double exact_original(double t, double v, double x) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double den = 3.0 + 12.0 * t + 4.0 * t3 + 4.0 * t4;
  const double num = (3.0 + 3.0 * t2 + 4.0 * t3) * v * v +
                     6.0 * t * (1.0 + 2.0 * t) * v * x + 3.0 * (1.0 + 4.0 * t) * x * x;
  const double amp = 1.0 / std::sqrt(1.0 + 4.0 * t + 4.0 / 3.0 * t3 + 4.0 / 3.0 * t4);
  return amp * std::exp(-num / den);
}

double exact_lagrangian(double t, double v, double z) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double den = 3.0 + 12.0 * t + 4.0 * t3 + 4.0 * t4;
  const double num = (3.0 + 4.0 * t3) * v * v - 12.0 * t2 * v * z +
                     3.0 * (1.0 + 4.0 * t) * z * z;
  const double amp = 1.0 / std::sqrt(1.0 + 4.0 * t + 4.0 / 3.0 * t3 + 4.0 / 3.0 * t4);
  return amp * std::exp(-num / den);
}

double exact_selfsimilar(double s, double vt, double zt) {
  const double e = std::exp(s);
  const double e2 = e * e, e3 = e2 * e, e4 = e3 * e;
  const double em1 = std::expm1(s);
  const double den = 4.0 * e4 - 12.0 * e3 + 12.0 * e2 + 8.0 * e - 9.0;
  const double num = (4.0 * e4 - 12.0 * e3 + 12.0 * e2 - e) * vt * vt -
                     12.0 * e2 * em1 * em1 * vt * zt + (12.0 * e4 - 9.0 * e3) * zt * zt;
  const double amp =
      e2 / std::sqrt(4.0 / 3.0 * e4 - 4.0 * e3 + 4.0 * e2 + 8.0 / 3.0 * e - 3.0);
  return amp * std::exp(-num / den);
}

double exact_solution(Form form, double time, const Point& p) {
  if (time < 0.0) throw std::invalid_argument("exact_solution: time must be >= 0");
  switch (form) {
    case Form::original: return exact_original(time, p.v, p.z);
    case Form::lagrangian: return exact_lagrangian(time, p.v, p.z);
    case Form::selfsimilar: return exact_selfsimilar(time, p.v, p.z);
  }
  return 0.0;
}

double steady_state(double vt, double zt) {
  return 0.5 * kSqrt3 * std::exp(-vt * vt + 3.0 * vt * zt - 3.0 * zt * zt);
}

double linf_envelope(double s, double l1_norm, double linf_norm) {
  if (!(s > 0.0)) throw std::invalid_argument("linf_envelope: s must be > 0");
  if (l1_norm < 0.0 || linf_norm < 0.0) {
    throw std::invalid_argument("linf_envelope: norms must be >= 0");
  }
  const double a = -std::expm1(-s);
  const double first = kSqrt3 / (2.0 * kPi) * l1_norm / (a * a);
  const double second = std::exp(2.0 * s) * linf_norm;
  return std::min(first, second);
}

namespace {

double integrate_box(const InitialData& f0, double t, const Point& p, double nu_lo,
                     double nu_hi, double ze_lo, double ze_hi, int panels, int order) {
  const GaussRule rv = composite_gauss(nu_lo, nu_hi, panels, order);
  const GaussRule rz = composite_gauss(ze_lo, ze_hi, panels, order);
  const double shift = p.z + p.v * t;
  double sum = 0.0;
  for (std::size_t a = 0; a < rv.nodes.size(); ++a) {
    const double nu = rv.nodes[a];
    double row = 0.0;
    for (std::size_t b = 0; b < rz.nodes.size(); ++b) {
      const double zeta = rz.nodes[b];
      row += rz.weights[b] * kernel_G(t, nu, zeta) * f0(p.v - nu, shift - zeta);
    }
    sum += rv.weights[a] * row;
  }
  return sum;
}

}  // namespace

double convolution_oracle(const InitialData& f0, double t, const Point& point,
                          const OracleOptions& options) {
  if (!(t > 0.0)) throw std::invalid_argument("convolution_oracle: t must be > 0");
  if (f0.empty()) return 0.0;

  // Kernel box: ±radius standard deviations of each marginal of G_t.
  const Covariance2 cov = kernel_covariance(t);
  const double r = options.radius;
  double nu_lo = -r * std::sqrt(cov.vv), nu_hi = -nu_lo;
  double ze_lo = -r * std::sqrt(cov.zz), ze_hi = -ze_lo;

  // Initial-data box, shifted into (ν, ζ): f₀(v − ν, x + vt − ζ).
  // Each term has standard deviation width/√2 along each axis.
  const RectDomain box = f0.support(r / std::numbers::sqrt2);
  const double shift = point.z + point.v * t;
  nu_lo = std::max(nu_lo, point.v - box.v_max());
  nu_hi = std::min(nu_hi, point.v - box.v_min());
  ze_lo = std::max(ze_lo, shift - box.z_max());
  ze_hi = std::min(ze_hi, shift - box.z_min());
  if (!(nu_lo < nu_hi) || !(ze_lo < ze_hi)) return 0.0;

  int panels = options.initial_panels;
  double previous =
      integrate_box(f0, t, point, nu_lo, nu_hi, ze_lo, ze_hi, panels, options.order);
  while (panels < options.max_panels) {
    panels *= 2;
    const double current =
        integrate_box(f0, t, point, nu_lo, nu_hi, ze_lo, ze_hi, panels, options.order);
    if (std::abs(current - previous) < options.stop_tol) return current;
    previous = current;
  }
  throw OracleError("convolution_oracle: quadrature refinement did not stabilise");
}

std::vector<double> convolution_oracle(const InitialData& f0, double t,
                                       const std::vector<Point>& points,
                                       const OracleOptions& options) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(convolution_oracle(f0, t, p, options));
  return out;
}

MappedPoint map_variables(MapDirection direction, double time, const Point& point) {
  if (time < 0.0) throw std::invalid_argument("map_variables: time must be >= 0");
  switch (direction) {
    case MapDirection::original_to_lagrangian:
      return {time, {point.v, point.z + time * point.v}, 1.0};
    case MapDirection::lagrangian_to_original:
      return {time, {point.v, point.z - time * point.v}, 1.0};
    case MapDirection::lagrangian_to_selfsimilar: {
      const double s = std::log1p(time);
      return {s, {point.v * std::exp(-0.5 * s), point.z * std::exp(-1.5 * s)},
              std::exp(2.0 * s)};
    }
    case MapDirection::selfsimilar_to_lagrangian: {
      const double s = time;
      return {std::expm1(s), {point.v * std::exp(0.5 * s), point.z * std::exp(1.5 * s)},
              std::exp(-2.0 * s)};
    }
  }
  return {time, point, 1.0};
}

double poincare_constant(const RectDomain& domain, double t) {
  if (t < 0.0) throw std::invalid_argument("poincare_constant: t must be >= 0");
  const double r = domain.length_z() / domain.length_v() * t;
  return r <= 1.0 ? 1.0 : r;
}

double poincare_inequality_constant(const RectDomain& domain, double t) {
  return domain.length_v() / (std::numbers::sqrt2 * poincare_constant(domain, t));
}

bool domain_condition(const RectDomain& domain) {
  const double l1 = domain.length_v();
  const double l2 = domain.length_z();
  if (l2 <= l1) return l1 > std::numbers::sqrt2;
  return l2 > l1 * l1 / std::numbers::sqrt2;
}

double kernel_Lq_norm_quadrature(double t, double q, int panels) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel_Lq_norm_quadrature: t must be positive");
  if (!(q >= 1.0)) throw std::invalid_argument("kernel_Lq_norm_quadrature: q must be >= 1");
  const double t3 = t * t * t;
  if (std::isinf(q)) {
    // Sampled sup over ±8 standard deviations of each marginal.
    const double hv = 8.0 * std::sqrt(2.0 * t);
    const double hz = 8.0 * std::sqrt(2.0 * t3 / 3.0);
    double best = 0.0;
    constexpr int kSamples = 1001;
    for (int j = 0; j < kSamples; ++j) {
      const double z = -hz + 2.0 * hz * j / (kSamples - 1);
      for (int i = 0; i < kSamples; ++i) {
        const double v = -hv + 2.0 * hv * i / (kSamples - 1);
        best = std::max(best, kernel_G(t, v, z));
      }
    }
    return best;
  }
  // With u = 2tv − 3z the exponent separates: −q(3z² + u²)/(4t³), and
  // dv dz = du dz / (2t).
  const double half_z = 10.0 * std::sqrt(2.0 * t3 / (3.0 * q));
  const double half_u = 10.0 * std::sqrt(2.0 * t3 / q);
  const GaussRule rz = composite_gauss(-half_z, half_z, panels, 8);
  const GaussRule ru = composite_gauss(-half_u, half_u, panels, 8);
  double sum = 0.0;
  for (std::size_t a = 0; a < rz.nodes.size(); ++a) {
    const double z = rz.nodes[a];
    for (std::size_t b = 0; b < ru.nodes.size(); ++b) {
      const double v = (ru.nodes[b] + 3.0 * z) / (2.0 * t);
      sum += rz.weights[a] * ru.weights[b] * std::pow(kernel_G(t, v, z), q);
    }
  }
  return std::pow(sum / (2.0 * t), 1.0 / q);
}

}  // namespace kfp
