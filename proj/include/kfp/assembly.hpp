#pragma once

#include "kfp/mesh.hpp"
#include "kfp/sparse.hpp"

namespace kfp {

/// Whether boundary nodes are eliminated (homogeneous Dirichlet) or kept.
enum class Boundary { dirichlet, natural };

/// Consistent P1 mass matrix.
SparseMatrix assemble_mass(const TriMesh& mesh, Boundary bc = Boundary::dirichlet);

/// Gradient-pairing blocks of a P1 space:
///   vv(i,j)    = (∂ᵥφⱼ, ∂ᵥφᵢ)
///   cross(i,j) = (∂ᵥφⱼ, ∂_zφᵢ) + (∂_zφⱼ, ∂ᵥφᵢ)
///   zz(i,j)    = (∂_zφⱼ, ∂_zφᵢ)
/// so that the form ((∂ᵥ + c∂_z)u, (∂ᵥ + c∂_z)w) is vv + c·cross + c²·zz.
struct DiffusionBlocks {
  SparseMatrix vv;
  SparseMatrix cross;
  SparseMatrix zz;

  SparseMatrix directional(double c) const;
};

DiffusionBlocks assemble_diffusion_blocks(const TriMesh& mesh,
                                          Boundary bc = Boundary::dirichlet);

/// a_t(g, χ) = (∂ᵥg, ∂ᵥχ) + t²(∂_zg, ∂_zχ) + t[(∂ᵥg, ∂_zχ) + (∂_zg, ∂ᵥχ)]
SparseMatrix assemble_lagrangian(const TriMesh& mesh, double t);

/// (∂ᵥφ, ∂ᵥχ), the velocity-diffusion step of the original-form splitting.
SparseMatrix assemble_heat_v(const TriMesh& mesh);

/// B(i,j) = ((ṽ/2)∂ᵥφⱼ + (3z̃/2)∂_zφⱼ, φᵢ)
SparseMatrix assemble_advection(const TriMesh& mesh);

/// Coefficient A(s) = 1 − e^{−s} of the rescaled diffusion direction.
double selfsimilar_direction(double s);

/// Weak form of −K₁,ₛ:
///   ((∂ᵥ + A∂_z)u, (∂ᵥ + A∂_z)w) − (b·∇u, w) − σ₁(u, w).
/// Throws std::invalid_argument for σ₁ > 1 (coercivity is lost).
SparseMatrix assemble_selfsimilar_K1(const TriMesh& mesh, double s, double sigma1);

/// Splitting parameters of the self-similar scheme.
struct SplitParams {
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double theta = 0.5;

  static SplitParams make(double sigma1, double theta);
};

/// Mesh-dependent pieces assembled once; s-dependent recombination per step.
class SelfSimilarOperators {
 public:
  explicit SelfSimilarOperators(const TriMesh& mesh);

  const SparseMatrix& mass() const { return mass_; }
  SparseMatrix k1_form(double s, double sigma1) const;

 private:
  SparseMatrix mass_;
  DiffusionBlocks blocks_;
  SparseMatrix advection_;
};

/// Mass matrix plus the formulation's spatial form at a given time.
struct OperatorSet {
  SparseMatrix M;
  SparseMatrix A;
  double time = 0.0;
  Form form = Form::original;
};

}  // namespace kfp
