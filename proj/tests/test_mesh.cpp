#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "kfp/mesh.hpp"
#include "test_support.hpp"

using namespace kfp;

namespace {
const RectDomain kUnit(0.0, 1.0, 0.0, 1.0);

int count_boundary(const TriMesh& m) {
  int c = 0;
  for (int k = 0; k < static_cast<int>(m.num_nodes()); ++k) c += m.is_boundary(k) ? 1 : 0;
  return c;
}
}  // namespace

TEST_CASE("rect domain rejects empty sides") {
  CHECK_THROWS_AS(RectDomain(1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RectDomain(0.0, 1.0, 2.0, -1.0), std::invalid_argument);
  const auto sq = RectDomain::centered_square(10.0);
  CHECK(sq.length_v() == 20.0);
  CHECK(sq.area() == 400.0);
}

TEST_CASE("smallest meshes have the expected counts") {
  const TriMesh m1(kUnit, 1);
  CHECK(m1.num_nodes() == 4);
  CHECK(m1.num_elements() == 2);
  CHECK(count_boundary(m1) == 4);
  CHECK(m1.num_dofs() == 0);

  const TriMesh m2(kUnit, 2);
  CHECK(m2.num_nodes() == 9);
  CHECK(m2.num_elements() == 8);
  CHECK(count_boundary(m2) == 8);
  CHECK(m2.num_dofs() == 1);
  CHECK(m2.dof_nodes().front() == m2.node_index(1, 1));

  CHECK_THROWS_AS(TriMesh(kUnit, 0), std::invalid_argument);
}

TEST_CASE("element areas partition the rectangle") {
  for (auto [dom, n] : {std::pair{kUnit, 3}, std::pair{RectDomain(-2.0, 5.0, 1.0, 1.5), 17},
                        std::pair{RectDomain::centered_square(10.0), 64}}) {
    const TriMesh m(dom, n);
    double total = 0.0;
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
      const auto& el = m.element(e);
      const double a = signed_area(m.node(el[0]), m.node(el[1]), m.node(el[2]));
      CHECK(a > 0.0);
      total += m.element_area(e);
    }
    CHECK(total == doctest::Approx(dom.area()).epsilon(1e-12));
    CHECK(m.h() == doctest::Approx(std::max(dom.length_v(), dom.length_z()) / n));
  }
}

TEST_CASE("node valence: 6 for interior nodes, 1 or 2 at corners") {
  const TriMesh m(RectDomain(-1.0, 2.0, 0.0, 4.0), 7);
  std::map<int, int> valence;
  for (const auto& el : m.elements()) {
    for (int k : el) ++valence[k];
  }
  for (int k = 0; k < static_cast<int>(m.num_nodes()); ++k) {
    if (!m.is_boundary(k)) CHECK(valence[k] == 6);
  }
  for (int corner : {m.node_index(0, 0), m.node_index(7, 0), m.node_index(0, 7), m.node_index(7, 7)}) {
    CHECK(valence[corner] >= 1);
    CHECK(valence[corner] <= 2);
  }
}

TEST_CASE("boundary mask marks exactly the nodes on the rectangle edge") {
  const RectDomain d(-3.0, 1.0, 2.0, 5.0);
  const TriMesh m(d, 9);
  for (int k = 0; k < static_cast<int>(m.num_nodes()); ++k) {
    const Point& p = m.node(k);
    const bool edge = p.v == d.v_min() || p.v == d.v_max() || p.z == d.z_min() || p.z == d.z_max();
    CHECK(m.is_boundary(k) == edge);
    CHECK((m.dof_of(k) < 0) == edge);
  }
}

TEST_CASE("interpolation reproduces linear functions and nodal values") {
  const TriMesh m(RectDomain(-2.0, 3.0, -1.0, 4.0), 13);
  std::vector<double> u(m.num_nodes());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = m.nodes()[k].v + m.nodes()[k].z;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dv(-2.0, 3.0), dz(-1.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const Point p{dv(rng), dz(rng)};
    CHECK(m.interpolate(u, p) == doctest::Approx(p.v + p.z).epsilon(1e-13));
  }
  const auto w = testing::random_vector(m.num_nodes(), 11);
  for (int k = 0; k < static_cast<int>(m.num_nodes()); ++k) {
    CHECK(m.interpolate(w, m.node(k)) == doctest::Approx(w[static_cast<std::size_t>(k)]).epsilon(1e-14));
  }
}

TEST_CASE("interpolation is zero outside and tolerant at the boundary") {
  const TriMesh m(kUnit, 4);
  const std::vector<double> ones(m.num_nodes(), 1.0);
  CHECK(m.interpolate(ones, {1.5, 0.5}) == 0.0);
  CHECK(m.interpolate(ones, {0.5, -0.01}) == 0.0);
  CHECK(m.interpolate(ones, {1.0 + 1e-14, 0.5}) == doctest::Approx(1.0));
  CHECK(m.interpolate(ones, {1.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("expand and restrict are inverse on interior values") {
  const TriMesh m(kUnit, 6);
  const auto x = testing::random_vector(m.num_dofs(), 5);
  const auto nodal = m.expand(x);
  for (int k = 0; k < static_cast<int>(m.num_nodes()); ++k) {
    if (m.is_boundary(k)) CHECK(nodal[static_cast<std::size_t>(k)] == 0.0);
  }
  CHECK(m.restrict_to_dofs(nodal) == x);
}

TEST_CASE("midpoint quadrature on the reference triangle") {
  const Point a{0, 0}, b{1, 0}, c{0, 1};
  const auto q = triangle_quadrature(a, b, c);
  double one = 0, xx = 0, xy = 0;
  for (const auto& qp : q) {
    one += qp.weight;
    xx += qp.weight * qp.point.v * qp.point.v;
    xy += qp.weight * qp.point.v * qp.point.z;
  }
  CHECK(one == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(xx == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(xy == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
  CHECK_THROWS_AS(triangle_quadrature(a, b, Point{2, 0}), std::invalid_argument);
}

TEST_CASE("midpoint quadrature is exact for degree two on random triangles") {
  // Reference: integral of v^i z^j over a triangle via the affine map and the
  // moments of the reference simplex, expanded with exact small binomials.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  int checked = 0;
  while (checked < 100) {
    const Point p0{d(rng), d(rng)}, p1{d(rng), d(rng)}, p2{d(rng), d(rng)};
    const double area = std::abs(signed_area(p0, p1, p2));
    if (area < 1e-2) continue;
    ++checked;
    const auto q = triangle_quadrature(p0, p1, p2);
    auto integrate = [&](auto f) {
      double s = 0;
      for (const auto& qp : q) s += qp.weight * f(qp.point);
      return s;
    };
    // Exact: ∫ λ_a λ_b = |T|(1+δ_ab)/12, ∫ λ_a = |T|/3, with a linear function
    // ℓ(p) = Σ ℓ(p_a) λ_a.
    auto exact_product = [&](auto l1, auto l2) {
      const double u[3] = {l1(p0), l1(p1), l1(p2)}, w[3] = {l2(p0), l2(p1), l2(p2)};
      double s = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += u[a] * w[b] * area * (a == b ? 2.0 : 1.0) / 12.0;
      return s;
    };
    auto V = [](const Point& p) { return p.v; };
    auto Z = [](const Point& p) { return p.z; };
    auto One = [](const Point&) { return 1.0; };
    CHECK(integrate([](const Point& p) { return p.v * p.v; }) ==
          doctest::Approx(exact_product(V, V)).epsilon(1e-12));
    CHECK(integrate([](const Point& p) { return p.v * p.z; }) ==
          doctest::Approx(exact_product(V, Z)).epsilon(1e-12));
    CHECK(integrate([](const Point& p) { return p.z * p.z; }) ==
          doctest::Approx(exact_product(Z, Z)).epsilon(1e-12));
    CHECK(integrate([](const Point& p) { return p.z; }) ==
          doctest::Approx(exact_product(Z, One)).epsilon(1e-12));
    CHECK(integrate([](const Point&) { return 1.0; }) == doctest::Approx(area).epsilon(1e-12));
  }
}

TEST_CASE("basis gradients sum to zero and reproduce linears") {
  const TriMesh m(RectDomain(0.0, 2.0, -1.0, 1.0), 5);
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    const auto g = m.basis_gradients(e);
    CHECK(g[0].v + g[1].v + g[2].v == doctest::Approx(0.0).epsilon(1e-12));
    const auto& el = m.element(e);
    double dv = 0, dz = 0;
    for (int a = 0; a < 3; ++a) {
      const Point& p = m.node(el[a]);
      dv += (2 * p.v - 3 * p.z) * g[a].v;
      dz += (2 * p.v - 3 * p.z) * g[a].z;
    }
    CHECK(dv == doctest::Approx(2.0));
    CHECK(dz == doctest::Approx(-3.0));
  }
}

TEST_CASE("form names round trip") {
  for (Form f : {Form::original, Form::lagrangian, Form::selfsimilar}) {
    CHECK(form_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(form_from_string("rotating"), std::invalid_argument);
}
