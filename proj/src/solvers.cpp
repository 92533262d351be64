#include "kfp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/core.h>

#include "kfp/assembly.hpp"

namespace kfp {

void RunConfig::validate() const {
  if (!(n >= 1)) throw std::invalid_argument("n: must be a positive integer");
  if (!(dt > 0.0)) throw std::invalid_argument("dt: must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("t-end: must be positive");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta: must lie in [0, 1]");
  if (!(sigma1 <= 1.0)) throw std::invalid_argument("sigma1: must be <= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol: must be positive");
  if (!(max_iter >= 1)) throw std::invalid_argument("max-iter: must be >= 1");
  if (snapshot_stride < 0) throw std::invalid_argument("snapshot-stride: must be >= 0");
}

double RunConfig::end_time() const {
  return form == Form::selfsimilar ? std::log1p(horizon) : horizon;
}

Field project_initial(const MeshPtr& mesh, const ScalarFunction& f0, Form form) {
  Field field{mesh, std::vector<double>(mesh->num_nodes(), 0.0), 0.0, form};
  for (int k = 0; k < static_cast<int>(mesh->num_nodes()); ++k) {
    if (mesh->is_boundary(k)) continue;
    const Point& p = mesh->node(k);
    field.values[static_cast<std::size_t>(k)] = f0(p.v, p.z);
  }
  return field;
}

Field project_initial(const MeshPtr& mesh, const InitialData& f0, Form form) {
  return project_initial(mesh, [&f0](double v, double x) { return f0(v, x); }, form);
}

NormRecord discrete_norms(const SparseMatrix& mass, std::span<const double> interior,
                          double time) {
  NormRecord rec;
  rec.time = time;
  rec.l2 = std::sqrt(std::max(0.0, mass.bilinear(interior, interior)));
  for (double x : interior) rec.linf = std::max(rec.linf, std::abs(x));
  return rec;
}

std::vector<double> theta_step(const SparseMatrix& M, const SparseMatrix& A,
                               std::span<const double> x, double dt, double theta,
                               const SolverOptions& options) {
  const SparseMatrix lhs = linear_combination({{1.0, &M}, {theta * dt, &A}});
  const SparseMatrix rhs = linear_combination({{1.0, &M}, {-(1.0 - theta) * dt, &A}});
  auto [next, stats] = solve(lhs, rhs.matvec(x), options, x);
  if (!stats.converged) {
    throw SolverError(fmt::format(
        "linear solver did not converge: residual {:.3e} after {} iterations",
        stats.residual, stats.iterations));
  }
  return next;
}

std::vector<double> transport_step(const TriMesh& mesh, std::span<const double> nodal,
                                   double dt) {
  std::vector<double> out(mesh.num_nodes(), 0.0);
  for (int k : mesh.dof_nodes()) {
    const Point& p = mesh.node(k);
    out[static_cast<std::size_t>(k)] = mesh.interpolate(nodal, {p.v, p.z + p.v * dt});
  }
  return out;
}

std::vector<double> step_sizes(double end, double dt) {
  if (!(dt > 0.0) || !(end >= 0.0)) throw std::invalid_argument("step_sizes: bad arguments");
  const auto full = static_cast<std::size_t>(std::floor(end / dt + 1e-9));
  std::vector<double> steps(full, dt);
  const double remainder = end - static_cast<double>(full) * dt;
  if (remainder > 1e-9 * dt) steps.push_back(remainder);
  return steps;
}

namespace {

/// Shared time loop. `advance(x, t, dt)` returns the new interior vector.
template <class Advance>
Trajectory march(const RunConfig& config, const InitialData& f0, Form form,
                 const SparseMatrix& mass, const MeshPtr& mesh, Advance&& advance) {
  Trajectory traj;
  traj.form = form;
  traj.mesh = mesh;

  Field initial = project_initial(mesh, f0, form);
  std::vector<double> x = mesh->restrict_to_dofs(initial.values);
  traj.snapshots.push_back({0.0, std::move(initial)});
  traj.norms.push_back(discrete_norms(mass, x, 0.0));

  const auto steps = step_sizes(config.end_time(), config.dt);
  double time = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    x = advance(x, time, steps[k]);
    // Full steps land on exact multiples of dt; the remainder ends at end_time.
    time = (k + 1 == steps.size()) ? config.end_time() : static_cast<double>(k + 1) * config.dt;
    traj.norms.push_back(discrete_norms(mass, x, time));
    const bool last = (k + 1 == steps.size());
    const bool stride_hit =
        config.snapshot_stride > 0 && (k + 1) % static_cast<std::size_t>(config.snapshot_stride) == 0;
    if (last || stride_hit) {
      traj.snapshots.push_back({time, Field{mesh, mesh->expand(x), time, form}});
    }
  }
  return traj;
}

SolverOptions solver_options(const RunConfig& config) {
  return {config.tol, config.max_iter};
}

void require_form(const RunConfig& config, Form form) {
  if (config.form != form) {
    throw std::invalid_argument(fmt::format("run_{}: config.form is {}", to_string(form),
                                            to_string(config.form)));
  }
}

}  // namespace

Trajectory run_original(const RunConfig& config, const InitialData& f0) {
  require_form(config, Form::original);
  config.validate();
  const MeshPtr mesh = build_structured_mesh(config.domain, config.n);
  const SparseMatrix M = assemble_mass(*mesh);
  const SparseMatrix A = assemble_heat_v(*mesh);
  const SolverOptions opts = solver_options(config);

  // Step matrices depend only on dt; rebuild for the shorter final step.
  double cached_dt = -1.0;
  SparseMatrix lhs, rhs;
  int iterations = 0;
  auto traj = march(config, f0, Form::original, M, mesh,
                    [&](const std::vector<double>& x, double, double dt) {
                      if (dt != cached_dt) {
                        lhs = linear_combination({{1.0, &M}, {config.theta * dt, &A}});
                        rhs = linear_combination({{1.0, &M}, {-(1.0 - config.theta) * dt, &A}});
                        cached_dt = dt;
                      }
                      auto [heat, stats] = solve(lhs, rhs.matvec(x), opts, x);
                      if (!stats.converged) {
                        throw SolverError(fmt::format(
                            "original form: heat step did not converge (residual {:.3e})",
                            stats.residual));
                      }
                      iterations += stats.iterations;
                      const auto moved = transport_step(*mesh, mesh->expand(heat), dt);
                      return mesh->restrict_to_dofs(moved);
                    });
  traj.solver_iterations = iterations;
  return traj;
}

Trajectory run_lagrangian(const RunConfig& config, const InitialData& f0) {
  require_form(config, Form::lagrangian);
  config.validate();
  const MeshPtr mesh = build_structured_mesh(config.domain, config.n);
  const SparseMatrix M = assemble_mass(*mesh);
  const DiffusionBlocks blocks = assemble_diffusion_blocks(*mesh);
  const SolverOptions opts = solver_options(config);

  int iterations = 0;
  auto traj = march(config, f0, Form::lagrangian, M, mesh,
                    [&](const std::vector<double>& x, double t, double dt) {
                      const SparseMatrix A = blocks.directional(t + 0.5 * dt);
                      const SparseMatrix lhs =
                          linear_combination({{1.0, &M}, {config.theta * dt, &A}});
                      const SparseMatrix rhs =
                          linear_combination({{1.0, &M}, {-(1.0 - config.theta) * dt, &A}});
                      auto [next, stats] = solve(lhs, rhs.matvec(x), opts, x);
                      if (!stats.converged) {
                        throw SolverError(fmt::format(
                            "lagrangian form: step at t={} did not converge (residual {:.3e})",
                            t, stats.residual));
                      }
                      iterations += stats.iterations;
                      return next;
                    });
  traj.solver_iterations = iterations;
  return traj;
}

Trajectory run_selfsimilar(const RunConfig& config, const InitialData& f0) {
  require_form(config, Form::selfsimilar);
  config.validate();
  const SplitParams split = SplitParams::make(config.sigma1, config.theta);
  const MeshPtr mesh = build_structured_mesh(config.domain, config.n);
  const SelfSimilarOperators ops(*mesh);
  const SparseMatrix& M = ops.mass();
  const SolverOptions opts = solver_options(config);

  // The form assembled at s_{n+1} for the implicit side is the explicit side
  // of the next step.
  double cached_s = 0.0;
  SparseMatrix form_at_s = ops.k1_form(0.0, split.sigma1);
  int iterations = 0;
  auto traj = march(
      config, f0, Form::selfsimilar, M, mesh,
      [&](const std::vector<double>& x, double s, double ds) {
        if (s != cached_s) form_at_s = ops.k1_form(s, split.sigma1);
        const SparseMatrix form_next = ops.k1_form(s + ds, split.sigma1);
        const SparseMatrix lhs = linear_combination({{1.0, &M}, {split.theta * ds, &form_next}});
        const SparseMatrix rhs =
            linear_combination({{1.0, &M}, {-(1.0 - split.theta) * ds, &form_at_s}});
        auto [half, stats] = solve(lhs, rhs.matvec(x), opts, x);
        if (!stats.converged) {
          throw SolverError(fmt::format(
              "selfsimilar form: step at s={} did not converge (residual {:.3e})", s,
              stats.residual));
        }
        iterations += stats.iterations;
        form_at_s = form_next;
        cached_s = s + ds;
        const double growth = std::exp(split.sigma2 * ds);
        for (double& value : half) value *= growth;
        return half;
      });
  traj.solver_iterations = iterations;
  if (!domain_condition(config.domain)) {
    traj.warnings.push_back(fmt::format(
        "domain [{}, {}] x [{}, {}] violates the size condition; the truncated "
        "self-similar solution is expected to decay to zero",
        config.domain.v_min(), config.domain.v_max(), config.domain.z_min(),
        config.domain.z_max()));
  }
  return traj;
}

Trajectory run(const RunConfig& config, const InitialData& f0) {
  switch (config.form) {
    case Form::original: return run_original(config, f0);
    case Form::lagrangian: return run_lagrangian(config, f0);
    case Form::selfsimilar: return run_selfsimilar(config, f0);
  }
  throw std::invalid_argument("run: unknown formulation");
}

SplittingCheck exact_splitting_difference(const DenseMatrix& K, double dt, double sigma2) {
  const DenseMatrix shifted = K + DenseMatrix::identity(K.rows()).scaled(sigma2);
  const DenseMatrix combined = expm(shifted.scaled(dt));
  const DenseMatrix split = expm(K.scaled(dt));
  const DenseMatrix factored = split.scaled(std::exp(sigma2 * dt));
  return {(combined - factored).norm_frobenius(), split.norm_frobenius()};
}

SplittingCheck exact_splitting_unit_check(int dim, double dt, double sigma2,
                                          std::uint64_t seed) {
  if (dim < 1 || dim > 20) {
    throw std::invalid_argument("exact_splitting_unit_check: dim must be in [1, 20]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix K(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < K.rows(); ++i) {
    for (std::size_t j = 0; j < K.cols(); ++j) K(i, j) = dist(rng);
  }
  return exact_splitting_difference(K, dt, sigma2);
}

}  // namespace kfp
