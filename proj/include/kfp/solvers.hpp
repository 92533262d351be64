#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kfp/analytic.hpp"
#include "kfp/dense.hpp"
#include "kfp/mesh.hpp"
#include "kfp/sparse.hpp"

namespace kfp {

/// Everything needed to reproduce one run.
struct RunConfig {
  Form form = Form::selfsimilar;
  RectDomain domain = RectDomain::centered_square(10.0);
  int n = 128;
  double dt = 0.01;        // Δt, or Δs for the self-similar form
  double horizon = 10.0;   // final physical time t
  double theta = 0.5;
  double sigma1 = 1.0;
  double tol = 1e-10;
  int max_iter = 1000;
  int snapshot_stride = 0;
  std::string output_dir = "out";
  std::uint64_t seed = 42;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;

  /// End of the integration interval in the formulation's own time variable.
  double end_time() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct NormRecord {
  double time = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

struct Snapshot {
  double time = 0.0;
  Field field;
};

/// Output of a run. snapshots.front() is the projected initial condition and
/// snapshots.back() the final state; intermediate ones follow the stride.
struct Trajectory {
  Form form = Form::original;
  MeshPtr mesh;
  std::vector<Snapshot> snapshots;
  std::vector<NormRecord> norms;
  std::vector<std::string> warnings;
  int solver_iterations = 0;

  const Field& final_field() const { return snapshots.back().field; }
  double final_time() const { return snapshots.back().time; }
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ScalarFunction = std::function<double(double, double)>;

/// Nodal interpolation of f0 with boundary values forced to zero.
Field project_initial(const MeshPtr& mesh, const ScalarFunction& f0,
                      Form form = Form::original);
Field project_initial(const MeshPtr& mesh, const InitialData& f0,
                      Form form = Form::original);

/// Discrete L² (√(xᵀMx)) and max-norm of interior coefficients.
NormRecord discrete_norms(const SparseMatrix& mass, std::span<const double> interior,
                          double time);

/// One θ-step of M·ẋ + A·x = 0:
///   (M + θΔt·A)·x⁺ = (M − (1−θ)Δt·A)·x.
/// Throws SolverError if the linear solve does not converge.
std::vector<double> theta_step(const SparseMatrix& M, const SparseMatrix& A,
                               std::span<const double> x, double dt, double theta,
                               const SolverOptions& options);

/// Characteristics step for ∂ₜφ = v∂ₓφ over dt on full nodal values:
/// φ⁺(vᵢ, xⱼ) = φ(vᵢ, xⱼ + vᵢ·dt), zero for feet outside the domain.
std::vector<double> transport_step(const TriMesh& mesh, std::span<const double> nodal,
                                   double dt);

/// Step sizes covering [0, end]: full steps of dt and one shorter remainder.
std::vector<double> step_sizes(double end, double dt);

Trajectory run_original(const RunConfig& config, const InitialData& f0);
Trajectory run_lagrangian(const RunConfig& config, const InitialData& f0);
Trajectory run_selfsimilar(const RunConfig& config, const InitialData& f0);

/// Dispatch on config.form.
Trajectory run(const RunConfig& config, const InitialData& f0 = InitialData::gaussian());

struct SplittingCheck {
  double difference = 0.0;      // ‖expm(dt(K+σ₂I)) − e^{σ₂dt}expm(dtK)‖_F
  double reference_norm = 0.0;  // ‖expm(dtK)‖_F
};

SplittingCheck exact_splitting_difference(const DenseMatrix& K, double dt, double sigma2);

/// Random K with uniform(−1, 1) entries; dim ≤ 20.
SplittingCheck exact_splitting_unit_check(int dim, double dt, double sigma2,
                                          std::uint64_t seed = 7);

}  // namespace kfp
