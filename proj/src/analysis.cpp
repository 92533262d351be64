#include "kfp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <fmt/core.h>

#include "kfp/analytic.hpp"
#include "kfp/assembly.hpp"

namespace kfp {

double l2_error(const Field& field, const ScalarFunction& reference) {
  const TriMesh& mesh = *field.mesh;
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(e);
    const auto quad = mesh.element_quadrature(e);
    const double u0 = field.values[static_cast<std::size_t>(el[0])];
    const double u1 = field.values[static_cast<std::size_t>(el[1])];
    const double u2 = field.values[static_cast<std::size_t>(el[2])];
    // Edge midpoints: (p0p1, p1p2, p2p0).
    const double uh[3] = {0.5 * (u0 + u1), 0.5 * (u1 + u2), 0.5 * (u2 + u0)};
    for (int q = 0; q < 3; ++q) {
      const double d = uh[q] - reference(quad[q].point.v, quad[q].point.z);
      sum += quad[q].weight * d * d;
    }
  }
  return std::sqrt(sum);
}

double linf_error(const Field& field, const ScalarFunction& reference) {
  const TriMesh& mesh = *field.mesh;
  double worst = 0.0;
  for (std::size_t k = 0; k < mesh.num_nodes(); ++k) {
    const Point& p = mesh.nodes()[k];
    worst = std::max(worst, std::abs(field.values[k] - reference(p.v, p.z)));
  }
  return worst;
}

double field_l2_norm(const Field& field) {
  return l2_error(field, [](double, double) { return 0.0; });
}

Field percent_diff(const Field& field, const ScalarFunction& reference) {
  Field interpolant = field;
  Field out = field;
  const auto& nodes = field.mesh->nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    interpolant.values[k] = reference(nodes[k].v, nodes[k].z);
  }
  const double denom = field_l2_norm(interpolant);
  if (!(denom > 0.0)) throw std::invalid_argument("percent_diff: reference has zero norm");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    out.values[k] = 100.0 * std::abs(field.values[k] - interpolant.values[k]) / denom;
  }
  return out;
}

namespace {

FitResult linear_log_fit(const std::vector<double>& x, const std::vector<double>& y,
                         bool log_x) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("fit: at least 3 points required");
  std::vector<double> X(x.size()), Y(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) throw std::invalid_argument("fit: values must be positive");
    if (log_x && !(x[i] > 0.0)) throw std::invalid_argument("fit: abscissae must be positive");
    X[i] = log_x ? std::log(x[i]) : x[i];
    Y[i] = std::log(y[i]);
  }
  const double n = static_cast<double>(X.size());
  const double mx = std::accumulate(X.begin(), X.end(), 0.0) / n;
  const double my = std::accumulate(Y.begin(), Y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit: abscissae are all equal");
  FitResult fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.coefficient = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double r = Y[i] - (intercept + fit.exponent * X[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace

FitResult power_law_fit(const std::vector<double>& x, const std::vector<double>& y) {
  return linear_log_fit(x, y, true);
}

FitResult exponential_fit(const std::vector<double>& x, const std::vector<double>& y) {
  return linear_log_fit(x, y, false);
}

FitResult decay_fit(const std::vector<NormRecord>& series, double t_lo, double t_hi,
                    FitKind kind, bool use_linf) {
  std::vector<double> t, y;
  for (const auto& rec : series) {
    if (rec.time < t_lo - 1e-12 || rec.time > t_hi + 1e-12) continue;
    const double value = use_linf ? rec.linf : rec.l2;
    if (!(value > 0.0)) throw std::invalid_argument("decay_fit: nonpositive norm in window");
    t.push_back(rec.time);
    y.push_back(value);
  }
  return kind == FitKind::power ? power_law_fit(t, y) : exponential_fit(t, y);
}

std::vector<double> pairwise_orders(const std::vector<double>& h,
                                    const std::vector<double>& errors) {
  if (h.size() != errors.size()) throw std::invalid_argument("pairwise_orders: size mismatch");
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    orders.push_back(std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]));
  }
  return orders;
}

ConvergenceResult convergence_report(const std::vector<ErrorRow>& rows) {
  if (rows.size() < 3) throw std::invalid_argument("convergence study needs >= 3 levels");
  ConvergenceResult result;
  result.rows = rows;
  std::vector<double> h, e;
  for (const auto& r : rows) {
    h.push_back(r.h);
    e.push_back(r.l2_error);
  }
  const auto orders = pairwise_orders(h, e);
  result.rows.front().order.reset();
  for (std::size_t i = 0; i < orders.size(); ++i) result.rows[i + 1].order = orders[i];
  result.fit = power_law_fit(h, e);
  return result;
}

ErrorRow final_error(const Trajectory& traj, double dt) {
  const double time = traj.final_time();
  const Form form = traj.form;
  auto reference = [form, time](double a, double b) {
    return exact_solution(form, time, {a, b});
  };
  const Field& field = traj.final_field();
  return {traj.mesh->h(), dt, time, l2_error(field, reference), linf_error(field, reference),
          std::nullopt};
}

ConvergenceResult convergence_study(const RunConfig& base, const std::vector<double>& h_levels) {
  if (h_levels.size() < 3) throw std::invalid_argument("convergence study needs >= 3 levels");
  std::vector<ErrorRow> rows;
  for (double h : h_levels) {
    if (!(h > 0.0)) throw std::invalid_argument("convergence study: h must be positive");
    RunConfig cfg = base;
    cfg.form = Form::selfsimilar;
    cfg.snapshot_stride = 0;
    cfg.n = static_cast<int>(std::lround(base.domain.length_v() / h));
    if (cfg.n < 1 || std::abs(cfg.n * h - base.domain.length_v()) > 1e-6 * h * cfg.n) {
      throw std::invalid_argument(
          fmt::format("convergence study: h = {} does not divide the domain", h));
    }
    rows.push_back(final_error(run_selfsimilar(cfg, InitialData::gaussian()), cfg.dt));
  }
  return convergence_report(rows);
}

const std::vector<NormRecord>& norm_timeseries(const Trajectory& traj) {
  if (traj.norms.empty()) throw std::invalid_argument("norm_timeseries: empty trajectory");
  return traj.norms;
}

bool envelope_check(const std::vector<NormRecord>& series, double l1, double linf,
                    double slack) {
  for (const auto& rec : series) {
    if (!(rec.time > 0.0)) continue;
    if (rec.linf > slack * linf_envelope(rec.time, l1, linf)) return false;
  }
  return true;
}

std::optional<double> poincare_ratio(const TriMesh& mesh, double t,
                                     std::span<const double> interior) {
  // Element-wise exact integrals: the directional derivative is constant per
  // element and g² is quadratic, so the midpoint rule is exact.
  const std::vector<double> g = mesh.expand(interior);
  double norm_sq = 0.0, deriv_sq = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(e);
    const auto grad = mesh.basis_gradients(e);
    const double area = mesh.element_area(e);
    const double u[3] = {g[static_cast<std::size_t>(el[0])], g[static_cast<std::size_t>(el[1])],
                         g[static_cast<std::size_t>(el[2])]};
    double d = 0.0;
    for (int a = 0; a < 3; ++a) d += u[a] * (grad[a].v + t * grad[a].z);
    deriv_sq += area * d * d;
    const double m01 = 0.5 * (u[0] + u[1]), m12 = 0.5 * (u[1] + u[2]), m20 = 0.5 * (u[2] + u[0]);
    norm_sq += area / 3.0 * (m01 * m01 + m12 * m12 + m20 * m20);
  }
  if (!(deriv_sq > 0.0)) return std::nullopt;
  const double c = poincare_inequality_constant(mesh.domain(), t);
  return std::sqrt(norm_sq) / (c * std::sqrt(deriv_sq));
}

PoincareResult poincare_check(const TriMesh& mesh, double t, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("poincare_check: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  PoincareResult result;
  std::vector<double> x(mesh.num_dofs());
  for (int k = 0; k < trials; ++k) {
    for (double& xi : x) xi = dist(rng);
    const auto ratio = poincare_ratio(mesh, t, x);
    if (!ratio) {
      ++result.skipped;
      continue;
    }
    ++result.evaluated;
    result.worst_ratio = std::max(result.worst_ratio, *ratio);
  }
  return result;
}

double region_l2_difference(const Field& a, const Field& b, const RectDomain& region,
                            double h) {
  const int n = std::max(1, static_cast<int>(std::lround(region.length_v() / h)));
  const TriMesh grid(region, n);
  double sum = 0.0;
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    for (const auto& q : grid.element_quadrature(e)) {
      const double d = a(q.point) - b(q.point);
      sum += q.weight * d * d;
    }
  }
  return std::sqrt(sum);
}

bool NestedDomainResult::decreasing() const {
  double previous = INFINITY;
  for (std::size_t i = 0; i < discrepancies.size(); ++i) {
    if (!condition_ok[i] || !condition_ok[i + 1]) continue;
    if (!(discrepancies[i] < previous)) return false;
    previous = discrepancies[i];
  }
  return true;
}

NestedDomainResult nested_domain_study(const RunConfig& config,
                                       const std::vector<double>& scales,
                                       const RectDomain& inner) {
  if (scales.empty()) throw std::invalid_argument("nested_domain_study: no scales");
  for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
    if (!(scales[i] <= scales[i + 1])) {
      throw std::invalid_argument("nested_domain_study: scales must be nondecreasing");
    }
  }
  // One spacing for all scales, no coarser than the config's, chosen so that
  // every domain is an integer number of cells wide. The meshes then share
  // nodes on the inner region and the comparison isolates truncation effects.
  const double h_target = config.domain.length_v() / config.n;
  const int m0 = static_cast<int>(std::ceil(2.0 * scales.front() / h_target - 1e-9));
  double h = 2.0 * scales.front() / m0;
  bool aligned = false;
  for (int m = m0; m < 8 * m0 && !aligned; ++m) {
    const double cand = 2.0 * scales.front() / m;
    aligned = std::all_of(scales.begin(), scales.end(), [cand](double sc) {
      const double cells = 2.0 * sc / cand;
      return std::abs(cells - std::round(cells)) < 1e-8 * cells;
    });
    if (aligned) h = cand;
  }
  NestedDomainResult result;
  if (!aligned) {
    result.warnings.push_back("no common mesh spacing for the given scales; meshes are not nested");
  }
  result.scales = scales;
  std::vector<Field> finals;
  for (double scale : scales) {
    RunConfig cfg = config;
    cfg.form = Form::selfsimilar;
    cfg.snapshot_stride = 0;
    cfg.domain = RectDomain::centered_square(scale);
    cfg.n = std::max(1, static_cast<int>(std::lround(2.0 * scale / h)));
    const bool ok = domain_condition(cfg.domain);
    result.condition_ok.push_back(ok);
    if (!ok) {
      result.warnings.push_back(fmt::format(
          "scale {} violates the domain size condition; excluded from the monotonicity check",
          scale));
    }
    finals.push_back(run_selfsimilar(cfg, InitialData::gaussian()).final_field());
  }
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    const double spacing = std::min(finals[i].mesh->h(), finals[i + 1].mesh->h());
    result.discrepancies.push_back(region_l2_difference(finals[i], finals[i + 1], inner, spacing));
  }
  return result;
}

}  // namespace kfp
