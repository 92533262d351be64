#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kfp/mesh.hpp"
#include "kfp/solvers.hpp"

namespace kfp {

/// L² distance between a P1 field and a reference, 3-midpoint rule per element.
double l2_error(const Field& field, const ScalarFunction& reference);
/// Largest nodal deviation |uₕ(xₖ) − ref(xₖ)|.
double linf_error(const Field& field, const ScalarFunction& reference);
/// L² norm of a P1 field over the whole mesh (boundary nodes included).
double field_l2_norm(const Field& field);

/// Nodal field 100·|uₕ − ref| / ‖I_h ref‖, where I_h ref is the nodal
/// interpolant of the reference. Its L² norm is the percent difference of the
/// interpolated fields. Throws std::invalid_argument for a zero reference.
Field percent_diff(const Field& field, const ScalarFunction& reference);

struct FitResult {
  double coefficient = 0.0;  // C
  double exponent = 0.0;     // p (power law) or rate (exponential)
  double residual = 0.0;     // RMS of the log-space residual
};

/// Least squares log y = log C + p·log x. Needs ≥ 3 positive points.
FitResult power_law_fit(const std::vector<double>& x, const std::vector<double>& y);
/// Least squares log y = log C + p·x. Needs ≥ 3 positive points.
FitResult exponential_fit(const std::vector<double>& x, const std::vector<double>& y);

enum class FitKind { power, exponential };

/// Fit the L² column of `series` for t in [t_lo, t_hi].
FitResult decay_fit(const std::vector<NormRecord>& series, double t_lo, double t_hi,
                    FitKind kind, bool use_linf = false);

/// log(Eᵢ/Eᵢ₊₁)/log(hᵢ/hᵢ₊₁) for consecutive levels.
std::vector<double> pairwise_orders(const std::vector<double>& h,
                                    const std::vector<double>& errors);

struct ErrorRow {
  double h = 0.0;
  double dt = 0.0;
  double time = 0.0;
  double l2_error = 0.0;
  double linf_error = 0.0;
  std::optional<double> order;
};

struct ConvergenceResult {
  std::vector<ErrorRow> rows;
  FitResult fit;
};

/// Builds the report from precomputed per-level errors.
ConvergenceResult convergence_report(const std::vector<ErrorRow>& rows);

/// Self-similar runs for each h (n = |Ω₁|/h), errors against the exact
/// self-similar solution at the final s, pairwise orders and power-law fit.
ConvergenceResult convergence_study(const RunConfig& base, const std::vector<double>& h_levels);

/// Error of a finished run against the closed-form Gaussian solution.
ErrorRow final_error(const Trajectory& traj, double dt);

/// Per-step norm series of a trajectory.
const std::vector<NormRecord>& norm_timeseries(const Trajectory& traj);

/// True iff L∞(s) ≤ slack·envelope(s) for every recorded s > 0.
bool envelope_check(const std::vector<NormRecord>& series, double l1, double linf,
                    double slack = 1.05);

struct PoincareResult {
  double worst_ratio = 0.0;
  int evaluated = 0;
  int skipped = 0;
};

/// ‖g‖ / (C·‖∂ᵥg + t∂_z g‖) with C = |Ω₁|/(√2 C_Ω(t)) over random
/// zero-boundary P1 fields (uniform(−1, 1) interior values).
PoincareResult poincare_check(const TriMesh& mesh, double t, int trials,
                              std::uint64_t seed = 1234);

/// Same ratio for one given interior coefficient vector; nullopt when the
/// directional derivative vanishes.
std::optional<double> poincare_ratio(const TriMesh& mesh, double t,
                                     std::span<const double> interior);

/// L² norm of (a − b) over `region`, integrating on a structured mesh of the
/// region with spacing `h`.
double region_l2_difference(const Field& a, const Field& b, const RectDomain& region,
                            double h);

struct NestedDomainResult {
  std::vector<double> scales;
  std::vector<bool> condition_ok;      // per scale
  std::vector<double> discrepancies;   // between scales i and i+1
  std::vector<std::string> warnings;

  /// Strictly decreasing over consecutive pairs whose scales both satisfy the
  /// domain condition.
  bool decreasing() const;
};

/// Self-similar runs on scale·[−1, 1]² at the mesh spacing of `config`,
/// compared on the fixed inner region at the final time.
NestedDomainResult nested_domain_study(const RunConfig& config,
                                       const std::vector<double>& scales,
                                       const RectDomain& inner);

}  // namespace kfp
