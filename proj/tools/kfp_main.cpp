// Command-line driver: one command per invocation, outputs under --out.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "kfp/analysis.hpp"
#include "kfp/analytic.hpp"
#include "kfp/config.hpp"
#include "kfp/output.hpp"
#include "kfp/solvers.hpp"

namespace {

using namespace kfp;
namespace fs = std::filesystem;

std::string config_block(const RunConfig& config) {
  std::string out = "# configuration\n";
  out += serialize_config(config);
  return out + "\n";
}

std::string warnings_block(const std::vector<std::string>& warnings) {
  std::string out;
  for (const auto& w : warnings) out += fmt::format("warning: {}\n", w);
  return out;
}

std::string error_line(const ErrorRow& row) {
  return fmt::format("final time {:.6g}: l2_error = {:.6e}, linf_error = {:.6e}\n", row.time,
                     row.l2_error, row.linf_error);
}

int cmd_run(const RunConfig& config) {
  const Trajectory traj = run(config);
  const ErrorRow row = final_error(traj, config.dt);
  std::string report = config_block(config) + warnings_block(traj.warnings);
  report += fmt::format("form {}, h = {:.6g}, steps = {}, solver iterations = {}\n",
                        to_string(config.form), traj.mesh->h(), traj.norms.size() - 1,
                        traj.solver_iterations);
  report += error_line(row);
  emit_outputs(traj, config, {row}, report);
  fmt::print("{}", report);
  return 0;
}

int cmd_norms(const RunConfig& config) {
  const Trajectory traj = run(config);
  const auto& series = norm_timeseries(traj);
  std::string report = config_block(config) + warnings_block(traj.warnings);
  const double t_end = series.back().time;
  const double t_lo = config.form == Form::selfsimilar ? 0.0 : 1.0;
  if (t_end > t_lo) {
    try {
      const FitResult e = decay_fit(series, t_lo, t_end, FitKind::exponential);
      report += fmt::format("exponential fit of l2 on [{:.4g}, {:.4g}]: rate {:.6g}\n", t_lo,
                            t_end, e.exponent);
      if (t_lo > 0.0) {
        const FitResult p = decay_fit(series, t_lo, t_end, FitKind::power);
        report += fmt::format("power fit of l2 on [{:.4g}, {:.4g}]: exponent {:.6g}\n", t_lo,
                              t_end, p.exponent);
      }
    } catch (const std::invalid_argument& e) {
      report += fmt::format("decay fit skipped: {}\n", e.what());
    }
  }
  if (config.form == Form::selfsimilar) {
    const InitialData f0 = InitialData::gaussian();
    std::size_t peak = 0;
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (series[k].linf > series[peak].linf) peak = k;
    }
    report += fmt::format("linf maximum {:.6g} at s = {:.4g}\n", series[peak].linf,
                          series[peak].time);
    report += fmt::format("linf envelope respected (5% slack): {}\n",
                          envelope_check(series, f0.l1_norm(), f0.linf_norm()) ? "PASS" : "FAIL");
  }
  emit_outputs(traj, config, {}, report);
  fmt::print("{}", report);
  return 0;
}

int cmd_compare(const RunConfig& base) {
  std::vector<ErrorRow> rows;
  std::string table = "form,h,dt,time,l2_error,linf_error\n";
  std::string report = config_block(base);
  for (Form form : {Form::original, Form::lagrangian, Form::selfsimilar}) {
    RunConfig config = base;
    config.form = form;
    const Trajectory traj = run(config);
    const ErrorRow row = final_error(traj, config.dt);
    rows.push_back(row);
    table += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", to_string(form), row.h,
                         row.dt, row.time, row.l2_error, row.linf_error);
    report += warnings_block(traj.warnings);
    report += fmt::format("{:<12} ", to_string(form)) + error_line(row);
  }
  write_atomic(fs::path(base.output_dir) / "compare.csv", table);
  write_atomic(fs::path(base.output_dir) / "errors.csv", format_errors_csv(rows));
  write_atomic(fs::path(base.output_dir) / "report.txt", report);
  fmt::print("{}", report);
  return 0;
}

int cmd_convergence(const RunConfig& config, const Command& command) {
  const ConvergenceResult result = convergence_study(config, command.levels);
  std::string report = config_block(config);
  for (const auto& r : result.rows) {
    report += fmt::format("h = {:<8.4g} l2_error = {:.6e}", r.h, r.l2_error);
    if (r.order) report += fmt::format("  order = {:.4f}", *r.order);
    report += '\n';
  }
  report += fmt::format("power-law fit: error ~ {:.6g} * h^{:.6g}\n", result.fit.coefficient,
                        result.fit.exponent);
  write_atomic(fs::path(config.output_dir) / "errors.csv", format_errors_csv(result.rows));
  write_atomic(fs::path(config.output_dir) / "report.txt", report);
  fmt::print("{}", report);
  return 0;
}

int cmd_kernel_check(const RunConfig& config) {
  std::string table = "q,t,quadrature,closed_form,relative_error\n";
  std::string report;
  double worst = 0.0;
  for (double q : {1.0, 2.0, 3.0, kInfNorm}) {
    for (double t : {0.5, 1.0, 2.0}) {
      const double quad = kernel_Lq_norm_quadrature(t, q);
      const double exact = kernel_Lq_norm(t, q);
      const double rel = std::abs(quad - exact) / exact;
      worst = std::max(worst, rel);
      const std::string qs = std::isinf(q) ? "inf" : fmt::format("{:g}", q);
      table += fmt::format("{},{:g},{:.17g},{:.17g},{:.17g}\n", qs, t, quad, exact, rel);
    }
  }
  report += fmt::format("worst relative deviation {:.3e}: {}\n", worst,
                        worst <= 1e-6 ? "PASS" : "FAIL");
  write_atomic(fs::path(config.output_dir) / "kernel.csv", table);
  write_atomic(fs::path(config.output_dir) / "report.txt", report);
  fmt::print("{}", report);
  return worst <= 1e-6 ? 0 : 3;
}

int cmd_poincare(const RunConfig& config, const Command& command) {
  const TriMesh mesh(config.domain, config.n);
  std::string table = "t,worst_ratio,evaluated,skipped\n";
  double worst = 0.0;
  for (double t : command.t_grid) {
    const PoincareResult r = poincare_check(mesh, t, command.trials, config.seed);
    worst = std::max(worst, r.worst_ratio);
    table += fmt::format("{:.17g},{:.17g},{},{}\n", t, r.worst_ratio, r.evaluated, r.skipped);
  }
  const std::string report = config_block(config) +
                             fmt::format("worst ratio {:.6f}: {}\n", worst,
                                         worst <= 1.0 ? "PASS" : "FAIL");
  write_atomic(fs::path(config.output_dir) / "poincare.csv", table);
  write_atomic(fs::path(config.output_dir) / "report.txt", report);
  fmt::print("{}", report);
  return 0;
}

int cmd_nested(const RunConfig& config, const Command& command) {
  const RectDomain inner = RectDomain::centered_square(2.0);
  const NestedDomainResult r = nested_domain_study(config, command.scales, inner);
  std::string table = "scale_a,scale_b,discrepancy\n";
  for (std::size_t i = 0; i < r.discrepancies.size(); ++i) {
    table += fmt::format("{:.17g},{:.17g},{:.17g}\n", r.scales[i], r.scales[i + 1],
                         r.discrepancies[i]);
  }
  std::string report = config_block(config) + warnings_block(r.warnings);
  report += fmt::format("discrepancies strictly decreasing: {}\n", r.decreasing() ? "yes" : "no");
  write_atomic(fs::path(config.output_dir) / "nested.csv", table);
  write_atomic(fs::path(config.output_dir) / "report.txt", report);
  fmt::print("{}", report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Invocation inv;
  try {
    inv = parse_config(argc, argv);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return 2;
  }
  if (inv.help) {
    fmt::print("{}", *inv.help);
    return 0;
  }
  try {
    switch (inv.command.kind) {
      case CommandKind::run: return cmd_run(inv.config);
      case CommandKind::norms: return cmd_norms(inv.config);
      case CommandKind::compare: return cmd_compare(inv.config);
      case CommandKind::convergence: return cmd_convergence(inv.config, inv.command);
      case CommandKind::kernel_check: return cmd_kernel_check(inv.config);
      case CommandKind::poincare_check: return cmd_poincare(inv.config, inv.command);
      case CommandKind::nested_domains: return cmd_nested(inv.config, inv.command);
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  }
  return 3;
}
