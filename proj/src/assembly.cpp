#include "kfp/assembly.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace kfp {

namespace {

using Local = std::array<std::array<double, 3>, 3>;

/// Element loop: kernel(e, local) fills the 3×3 element matrix, local(a, b)
/// pairing test function a with trial function b.
template <class Kernel>
SparseMatrix assemble(const TriMesh& mesh, Boundary bc, Kernel&& kernel) {
  const bool reduce = (bc == Boundary::dirichlet);
  const int size = reduce ? static_cast<int>(mesh.num_dofs())
                          : static_cast<int>(mesh.num_nodes());
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.num_elements() * 9);
  Local local{};
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    for (auto& row : local) row.fill(0.0);
    kernel(e, local);
    const auto& el = mesh.element(e);
    for (int a = 0; a < 3; ++a) {
      const int i = reduce ? mesh.dof_of(el[a]) : el[a];
      if (i < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int j = reduce ? mesh.dof_of(el[b]) : el[b];
        if (j < 0) continue;
        triplets.push_back({i, j, local[a][b]});
      }
    }
  }
  return SparseMatrix::from_triplets(size, size, triplets);
}

// Barycentric coordinates at the three edge midpoints (p0p1, p1p2, p2p0).
constexpr double kMidBary[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};

}  // namespace

SparseMatrix assemble_mass(const TriMesh& mesh, Boundary bc) {
  return assemble(mesh, bc, [&](std::size_t e, Local& local) {
    const auto quad = mesh.element_quadrature(e);
    for (int q = 0; q < 3; ++q) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          local[a][b] += quad[q].weight * kMidBary[q][a] * kMidBary[q][b];
        }
      }
    }
  });
}

SparseMatrix DiffusionBlocks::directional(double c) const {
  return linear_combination({{1.0, &vv}, {c, &cross}, {c * c, &zz}});
}

DiffusionBlocks assemble_diffusion_blocks(const TriMesh& mesh, Boundary bc) {
  auto gradient_pairing = [&](auto pick) {
    return assemble(mesh, bc, [&](std::size_t e, Local& local) {
      const double area = mesh.element_area(e);
      const auto grad = mesh.basis_gradients(e);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) local[a][b] = area * pick(grad[b], grad[a]);
      }
    });
  };
  DiffusionBlocks blocks;
  blocks.vv = gradient_pairing([](const Point& trial, const Point& test) {
    return trial.v * test.v;
  });
  blocks.cross = gradient_pairing([](const Point& trial, const Point& test) {
    return trial.v * test.z + trial.z * test.v;
  });
  blocks.zz = gradient_pairing([](const Point& trial, const Point& test) {
    return trial.z * test.z;
  });
  return blocks;
}

SparseMatrix assemble_lagrangian(const TriMesh& mesh, double t) {
  if (t < 0.0) throw std::invalid_argument("assemble_lagrangian: t must be >= 0");
  return assemble_diffusion_blocks(mesh).directional(t);
}

SparseMatrix assemble_heat_v(const TriMesh& mesh) {
  return assemble_diffusion_blocks(mesh).vv;
}

SparseMatrix assemble_advection(const TriMesh& mesh) {
  return assemble(mesh, Boundary::dirichlet, [&](std::size_t e, Local& local) {
    const auto quad = mesh.element_quadrature(e);
    const auto grad = mesh.basis_gradients(e);
    for (int q = 0; q < 3; ++q) {
      const Point& x = quad[q].point;
      const double bv = 0.5 * x.v;
      const double bz = 1.5 * x.z;
      for (int b = 0; b < 3; ++b) {
        const double transport = bv * grad[b].v + bz * grad[b].z;
        for (int a = 0; a < 3; ++a) {
          local[a][b] += quad[q].weight * transport * kMidBary[q][a];
        }
      }
    }
  });
}

double selfsimilar_direction(double s) { return -std::expm1(-s); }

SparseMatrix assemble_selfsimilar_K1(const TriMesh& mesh, double s, double sigma1) {
  if (s < 0.0) throw std::invalid_argument("assemble_selfsimilar_K1: s must be >= 0");
  if (sigma1 > 1.0) {
    throw std::invalid_argument("assemble_selfsimilar_K1: sigma1 must be <= 1");
  }
  return SelfSimilarOperators(mesh).k1_form(s, sigma1);
}

SplitParams SplitParams::make(double sigma1, double theta) {
  if (!(sigma1 <= 1.0)) throw std::invalid_argument("SplitParams: sigma1 must be <= 1");
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("SplitParams: theta must lie in [0, 1]");
  }
  return {sigma1, 2.0 - sigma1, theta};
}

SelfSimilarOperators::SelfSimilarOperators(const TriMesh& mesh)
    : mass_(assemble_mass(mesh)),
      blocks_(assemble_diffusion_blocks(mesh)),
      advection_(assemble_advection(mesh)) {}

SparseMatrix SelfSimilarOperators::k1_form(double s, double sigma1) const {
  if (sigma1 > 1.0) throw std::invalid_argument("k1_form: sigma1 must be <= 1");
  const double a = selfsimilar_direction(s);
  return linear_combination({{1.0, &blocks_.vv},
                             {a, &blocks_.cross},
                             {a * a, &blocks_.zz},
                             {-1.0, &advection_},
                             {-sigma1, &mass_}});
}

}  // namespace kfp
