#include "kfp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kfp {

RectDomain::RectDomain(double v_min, double v_max, double z_min, double z_max)
    : v_min_(v_min), v_max_(v_max), z_min_(z_min), z_max_(z_max) {
  if (!(v_min < v_max) || !(z_min < z_max)) {
    throw std::invalid_argument("RectDomain: bounds must satisfy min < max");
  }
}

RectDomain RectDomain::centered_square(double half_width) {
  return RectDomain(-half_width, half_width, -half_width, half_width);
}

bool RectDomain::contains(const Point& p, double slack) const {
  return p.v >= v_min_ - slack && p.v <= v_max_ + slack &&
         p.z >= z_min_ - slack && p.z <= z_max_ + slack;
}

double signed_area(const Point& p0, const Point& p1, const Point& p2) {
  return 0.5 * ((p1.v - p0.v) * (p2.z - p0.z) - (p2.v - p0.v) * (p1.z - p0.z));
}

std::array<QuadPoint, 3> triangle_quadrature(const Point& p0, const Point& p1,
                                             const Point& p2) {
  const double area = std::abs(signed_area(p0, p1, p2));
  const double scale = std::max({std::abs(p1.v - p0.v), std::abs(p1.z - p0.z),
                                 std::abs(p2.v - p0.v), std::abs(p2.z - p0.z)});
  if (!(area > 1e-14 * scale * scale)) {
    throw std::invalid_argument("triangle_quadrature: degenerate triangle");
  }
  const double w = area / 3.0;
  auto mid = [](const Point& a, const Point& b) {
    return Point{0.5 * (a.v + b.v), 0.5 * (a.z + b.z)};
  };
  return {QuadPoint{mid(p0, p1), w}, QuadPoint{mid(p1, p2), w},
          QuadPoint{mid(p2, p0), w}};
}

TriMesh::TriMesh(const RectDomain& domain, int n) : domain_(domain), n_(n) {
  if (n < 1) {
    throw std::invalid_argument("TriMesh: subdivisions per side must be >= 1");
  }
  hv_ = domain.length_v() / n;
  hz_ = domain.length_z() / n;
  h_ = std::max(hv_, hz_);

  const int np = n + 1;
  nodes_.reserve(static_cast<std::size_t>(np) * np);
  boundary_.reserve(static_cast<std::size_t>(np) * np);
  for (int j = 0; j < np; ++j) {
    // Pin the last row/column to the exact bounds.
    const double z = (j == n) ? domain.z_max() : domain.z_min() + j * hz_;
    for (int i = 0; i < np; ++i) {
      const double v = (i == n) ? domain.v_max() : domain.v_min() + i * hv_;
      nodes_.push_back({v, z});
      boundary_.push_back(i == 0 || j == 0 || i == n || j == n ? 1 : 0);
    }
  }

  elements_.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = node_index(i, j);
      const int b = node_index(i + 1, j);
      const int c = node_index(i + 1, j + 1);
      const int d = node_index(i, j + 1);
      elements_.push_back({a, b, c});
      elements_.push_back({a, c, d});
    }
  }

  node_dof_.assign(nodes_.size(), -1);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!boundary_[k]) {
      node_dof_[k] = static_cast<int>(dof_nodes_.size());
      dof_nodes_.push_back(static_cast<int>(k));
    }
  }
}

double TriMesh::element_area(std::size_t e) const {
  const auto& el = elements_[e];
  return signed_area(node(el[0]), node(el[1]), node(el[2]));
}

std::array<QuadPoint, 3> TriMesh::element_quadrature(std::size_t e) const {
  const auto& el = elements_[e];
  return triangle_quadrature(node(el[0]), node(el[1]), node(el[2]));
}

std::array<Point, 3> TriMesh::basis_gradients(std::size_t e) const {
  const auto& el = elements_[e];
  const Point& p0 = node(el[0]);
  const Point& p1 = node(el[1]);
  const Point& p2 = node(el[2]);
  const double two_area = 2.0 * signed_area(p0, p1, p2);
  // ∇λ_k = (z_{k+1} - z_{k+2}, v_{k+2} - v_{k+1}) / 2|T|
  return {Point{(p1.z - p2.z) / two_area, (p2.v - p1.v) / two_area},
          Point{(p2.z - p0.z) / two_area, (p0.v - p2.v) / two_area},
          Point{(p0.z - p1.z) / two_area, (p1.v - p0.v) / two_area}};
}

std::vector<double> TriMesh::expand(std::span<const double> interior) const {
  if (interior.size() != dof_nodes_.size()) {
    throw std::invalid_argument("TriMesh::expand: size mismatch");
  }
  std::vector<double> nodal(nodes_.size(), 0.0);
  for (std::size_t k = 0; k < dof_nodes_.size(); ++k) {
    nodal[static_cast<std::size_t>(dof_nodes_[k])] = interior[k];
  }
  return nodal;
}

std::vector<double> TriMesh::restrict_to_dofs(std::span<const double> nodal) const {
  if (nodal.size() != nodes_.size()) {
    throw std::invalid_argument("TriMesh::restrict_to_dofs: size mismatch");
  }
  std::vector<double> interior(dof_nodes_.size());
  for (std::size_t k = 0; k < dof_nodes_.size(); ++k) {
    interior[k] = nodal[static_cast<std::size_t>(dof_nodes_[k])];
  }
  return interior;
}

double TriMesh::interpolate(std::span<const double> nodal, const Point& p) const {
  if (!domain_.contains(p, 1e-12 * h_)) return 0.0;

  const double sv = (p.v - domain_.v_min()) / hv_;
  const double sz = (p.z - domain_.z_min()) / hz_;
  const int i = std::clamp(static_cast<int>(std::floor(sv)), 0, n_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(sz)), 0, n_ - 1);
  const double xi = std::clamp(sv - i, 0.0, 1.0);
  const double eta = std::clamp(sz - j, 0.0, 1.0);

  const double ua = nodal[static_cast<std::size_t>(node_index(i, j))];
  const double uc = nodal[static_cast<std::size_t>(node_index(i + 1, j + 1))];
  if (xi >= eta) {
    const double ub = nodal[static_cast<std::size_t>(node_index(i + 1, j))];
    return (1.0 - xi) * ua + (xi - eta) * ub + eta * uc;
  }
  const double ud = nodal[static_cast<std::size_t>(node_index(i, j + 1))];
  return (1.0 - eta) * ua + xi * uc + (eta - xi) * ud;
}

MeshPtr build_structured_mesh(const RectDomain& domain, int n) {
  return std::make_shared<const TriMesh>(domain, n);
}

const char* to_string(Form form) {
  switch (form) {
    case Form::original: return "original";
    case Form::lagrangian: return "lagrangian";
    case Form::selfsimilar: return "selfsimilar";
  }
  return "unknown";
}

Form form_from_string(const std::string& name) {
  if (name == "original") return Form::original;
  if (name == "lagrangian") return Form::lagrangian;
  if (name == "selfsimilar") return Form::selfsimilar;
  throw std::invalid_argument("unknown formulation '" + name + "'");
}

}  // namespace kfp
