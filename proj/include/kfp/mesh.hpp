#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace kfp {

/// A point of the computational plane. The first coordinate is the velocity
/// (v or ṽ); the second is x, z or z̃ depending on the formulation.
struct Point {
  double v = 0.0;
  double z = 0.0;
};

/// Axis-aligned rectangle Ω = Ω₁ × Ω₂.
class RectDomain {
 public:
  RectDomain(double v_min, double v_max, double z_min, double z_max);

  /// Symmetric square [-half, half]².
  static RectDomain centered_square(double half_width);

  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }

  /// |Ω₁|
  double length_v() const { return v_max_ - v_min_; }
  /// |Ω₂|
  double length_z() const { return z_max_ - z_min_; }
  double area() const { return length_v() * length_z(); }

  bool contains(const Point& p, double slack = 0.0) const;

  friend bool operator==(const RectDomain&, const RectDomain&) = default;

 private:
  double v_min_, v_max_, z_min_, z_max_;
};

struct QuadPoint {
  Point point;
  double weight = 0.0;
};

/// Edge-midpoint rule on the triangle (p0, p1, p2): exact for total degree ≤ 2.
/// Throws std::invalid_argument for a degenerate triangle.
std::array<QuadPoint, 3> triangle_quadrature(const Point& p0, const Point& p1,
                                             const Point& p2);

/// Signed area, positive for counter-clockwise vertex order.
double signed_area(const Point& p0, const Point& p1, const Point& p2);

/// Structured triangulation of a rectangle: (n+1)² nodes on a uniform grid,
/// every cell cut along its lower-left to upper-right diagonal.
///
/// Node (i, j) (i along v, j along z) has index j·(n+1) + i. Cell (i, j)
/// produces elements 2·(j·n + i) (lower-right triangle) and 2·(j·n + i) + 1
/// (upper-left triangle), both counter-clockwise.
class TriMesh {
 public:
  using Element = std::array<int, 3>;

  TriMesh(const RectDomain& domain, int n);

  const RectDomain& domain() const { return domain_; }
  int n() const { return n_; }
  /// Characteristic element size: the longer of the two cell sides.
  double h() const { return h_; }
  double hv() const { return hv_; }
  double hz() const { return hz_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_elements() const { return elements_.size(); }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Element>& elements() const { return elements_; }
  const Point& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Element& element(std::size_t e) const { return elements_[e]; }

  bool is_boundary(int node) const {
    return boundary_[static_cast<std::size_t>(node)] != 0;
  }

  int node_index(int i, int j) const { return j * (n_ + 1) + i; }

  double element_area(std::size_t e) const;
  std::array<QuadPoint, 3> element_quadrature(std::size_t e) const;

  /// Gradients of the three barycentric basis functions of element e.
  std::array<Point, 3> basis_gradients(std::size_t e) const;

  /// Interior (Dirichlet-free) unknowns. dof_of(node) is -1 on the boundary.
  std::size_t num_dofs() const { return dof_nodes_.size(); }
  int dof_of(int node) const { return node_dof_[static_cast<std::size_t>(node)]; }
  const std::vector<int>& dof_nodes() const { return dof_nodes_; }

  /// Scatter interior coefficients into a full nodal vector (boundary = 0).
  std::vector<double> expand(std::span<const double> interior) const;
  /// Gather the interior coefficients of a full nodal vector.
  std::vector<double> restrict_to_dofs(std::span<const double> nodal) const;

  /// Value of the P1 function with the given nodal values at p; zero outside
  /// the domain. Points within 1e-12·h of the boundary count as inside.
  double interpolate(std::span<const double> nodal, const Point& p) const;

 private:
  RectDomain domain_;
  int n_;
  double hv_, hz_, h_;
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<char> boundary_;
  std::vector<int> node_dof_;
  std::vector<int> dof_nodes_;
};

using MeshPtr = std::shared_ptr<const TriMesh>;

MeshPtr build_structured_mesh(const RectDomain& domain, int n);

enum class Form { original, lagrangian, selfsimilar };

const char* to_string(Form form);
Form form_from_string(const std::string& name);

/// Nodal coefficients of a P1 function bound to a mesh.
struct Field {
  MeshPtr mesh;
  std::vector<double> values;
  double time = 0.0;
  Form form = Form::original;

  double operator()(const Point& p) const {
    return mesh->interpolate(values, p);
  }
};

}  // namespace kfp
