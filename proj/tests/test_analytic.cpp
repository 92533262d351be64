#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kfp/analytic.hpp"
#include "test_support.hpp"

using namespace kfp;
using std::numbers::pi;

namespace {
const double kS3 = std::sqrt(3.0);
}

TEST_CASE("formulation time round trips") {
  for (double t : {0.0, 0.3, 1.0, 10.0, 1e4}) {
    CHECK(FormulationTime::from_s(FormulationTime::from_t(t).s).t == doctest::Approx(t).epsilon(1e-14));
  }
  CHECK(FormulationTime::from_t(1.0).s == doctest::Approx(std::log(2.0)));
}

TEST_CASE("kernel values and symmetry") {
  CHECK(kernel_G(1.0, 0.0, 0.0) == doctest::Approx(kS3 / (2 * pi)).epsilon(1e-15));
  CHECK(kernel_G(1.0, 0.0, 0.0) == doctest::Approx(0.2756644).epsilon(1e-7));
  CHECK_THROWS_AS(kernel_G(0.0, 1.0, 1.0), std::invalid_argument);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-3, 3), dt(0.1, 4);
  for (int i = 0; i < 100; ++i) {
    const double t = dt(rng), v = d(rng), z = d(rng);
    CHECK(kernel_G(t, -v, -z) == doctest::Approx(kernel_G(t, v, z)).epsilon(1e-15));
    // Scaling structure G_t(v,z) = t^{-2} G_1(v t^{-1/2}, z t^{-3/2}).
    CHECK(kernel_G(t, v, z) ==
          doctest::Approx(kernel_G(1.0, v / std::sqrt(t), z / std::pow(t, 1.5)) / (t * t)).epsilon(1e-12));
  }
}

TEST_CASE("kernel integrates to one (independent box quadrature)") {
  for (double t : {0.5, 1.0, 2.0}) {
    const double hv = 12 * std::sqrt(2 * t), hz = 12 * std::sqrt(2 * t * t * t / 3);
    const double mass = testing::box_integral([t](double v, double z) { return kernel_G(t, v, z); },
                                              -hv, hv, -hz, hz, 160);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("kernel norm closed form") {
  CHECK(kernel_Lq_norm(0.7, 1.0) == doctest::Approx(1.0));
  CHECK(kernel_Lq_norm(1.0, kInfNorm) == doctest::Approx(0.2756644).epsilon(1e-7));
  CHECK(kernel_Lq_norm(1.0, 2.0) == doctest::Approx(std::sqrt(0.5 * kS3 / (2 * pi))).epsilon(1e-14));
  CHECK(kernel_Lq_norm(1.0, 2.0) == doctest::Approx(0.371258).epsilon(1e-6));
  CHECK_THROWS_AS(kernel_Lq_norm(1.0, 0.5), std::invalid_argument);
  // Cross-check q=2 with the independent box rule on G_1².
  const double hv = 12 * std::sqrt(2.0), hz = 12 * std::sqrt(2.0 / 3);
  const double sq = testing::box_integral([](double v, double z) { return std::pow(kernel_G(1, v, z), 2); },
                                          -hv, hv, -hz, hz, 160);
  CHECK(std::sqrt(sq) == doctest::Approx(kernel_Lq_norm(1.0, 2.0)).epsilon(1e-8));
}

TEST_CASE("kernel norm quadrature agrees with the closed form") {
  for (double q : {1.0, 2.0, 3.0, kInfNorm}) {
    for (double t : {0.5, 1.0, 2.0}) {
      CHECK(kernel_Lq_norm_quadrature(t, q) == doctest::Approx(kernel_Lq_norm(t, q)).epsilon(1e-6));
    }
  }
}

TEST_CASE("kernel covariance matches second moments") {
  const double t = 1.5;
  const double hv = 12 * std::sqrt(2 * t), hz = 12 * std::sqrt(2 * t * t * t / 3);
  auto moment = [&](auto f) {
    return testing::box_integral([&](double v, double z) { return f(v, z) * kernel_G(t, v, z); },
                                 -hv, hv, -hz, hz, 120);
  };
  const auto c = kernel_covariance(t);
  CHECK(moment([](double v, double) { return v * v; }) == doctest::Approx(c.vv).epsilon(1e-8));
  CHECK(moment([](double v, double z) { return v * z; }) == doctest::Approx(c.vz).epsilon(1e-8));
  CHECK(moment([](double, double z) { return z * z; }) == doctest::Approx(c.zz).epsilon(1e-8));
}

TEST_CASE("gaussian initial data") {
  const auto f0 = InitialData::gaussian();
  CHECK(f0(0, 0) == 1.0);
  CHECK(f0.mass() == doctest::Approx(pi));
  CHECK(f0.l1_norm() == doctest::Approx(pi));
  CHECK(f0.linf_norm() == 1.0);
  CHECK(f0(0.3, -1.2) == doctest::Approx(std::exp(-0.09 - 1.44)));
  CHECK(f0.scaled(2.0)(0.3, 0.1) == doctest::Approx(2 * f0(0.3, 0.1)));
  CHECK(InitialData::zero().empty());
  CHECK(InitialData::zero()(1, 1) == 0.0);
}

TEST_CASE("exact solutions: initial values and the t=1 example") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const double v = d(rng), x = d(rng);
    CHECK(exact_original(0, v, x) == doctest::Approx(std::exp(-v * v - x * x)).epsilon(1e-15));
    CHECK(exact_lagrangian(0, v, x) == doctest::Approx(std::exp(-v * v - x * x)).epsilon(1e-15));
    CHECK(exact_selfsimilar(0, v, x) == doctest::Approx(std::exp(-v * v - x * x)).epsilon(1e-14));
  }
  CHECK(exact_original(1, 0, 0) == doctest::Approx(1 / std::sqrt(1 + 4 + 4.0 / 3 + 4.0 / 3)).epsilon(1e-14));
  CHECK(exact_original(1, 0, 0) == doctest::Approx(0.361158).epsilon(1e-6));
}

TEST_CASE("lagrangian exact solution equals the covariance construction") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-4, 4), dt(0, 12);
  for (int i = 0; i < 200; ++i) {
    const double t = dt(rng), v = d(rng), z = d(rng) * (1 + t);
    CHECK(exact_lagrangian(t, v, z) ==
          doctest::Approx(testing::lagrangian_gaussian(t, v, z)).epsilon(1e-12));
    // Original form through z = x + tv.
    CHECK(exact_original(t, v, z - t * v) ==
          doctest::Approx(testing::lagrangian_gaussian(t, v, z)).epsilon(1e-12));
  }
}

TEST_CASE("self-similar exact solution is the rescaled lagrangian one") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-3, 3), ds(0, 6);
  for (int i = 0; i < 100; ++i) {
    const double s = ds(rng), vt = d(rng), zt = d(rng);
    const double t = std::expm1(s);
    const double ref = std::exp(2 * s) * exact_lagrangian(t, std::exp(s / 2) * vt, std::exp(1.5 * s) * zt);
    CHECK(exact_selfsimilar(s, vt, zt) == doctest::Approx(ref).epsilon(1e-10));
  }
  CHECK(exact_solution(Form::selfsimilar, 0.5, {0.1, 0.2}) == exact_selfsimilar(0.5, 0.1, 0.2));
  CHECK(exact_solution(Form::original, 0.5, {0.1, 0.2}) == exact_original(0.5, 0.1, 0.2));
  CHECK(exact_solution(Form::lagrangian, 0.5, {0.1, 0.2}) == exact_lagrangian(0.5, 0.1, 0.2));
}

TEST_CASE("steady state") {
  CHECK(steady_state(0, 0) == doctest::Approx(kS3 / 2).epsilon(1e-15));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int i = 0; i < 100; ++i) {
    const double a = d(rng), b = d(rng);
    CHECK(steady_state(a, b) == doctest::Approx(pi * kernel_G(1, a, b)).epsilon(1e-12));
    CHECK(steady_state(a, b) > 0.0);
  }
  CHECK(steady_state(30, 0) < 1e-300);
}

TEST_CASE("steady state is approached in sup norm") {
  auto dist = [](double s) {
    return testing::sampled_sup([s](double a, double b) { return exact_selfsimilar(s, a, b) - steady_state(a, b); },
                                -10, 10, -10, 10, 401);
  };
  double prev = dist(1.0);
  for (double s : {2.0, 3.0, 4.0}) {
    const double cur = dist(s);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(dist(8.0) <= 1e-3);
}

TEST_CASE("linf envelope branches and crossing") {
  CHECK_THROWS_AS(linf_envelope(0.0, pi, 1.0), std::invalid_argument);
  CHECK(linf_envelope(60.0, pi, 1.0) == doctest::Approx(kS3 / (2 * pi) * pi));
  CHECK(linf_envelope(0.01, pi, 1.0) == doctest::Approx(std::exp(0.02)));
  const double cross = testing::bisect(
      [](double s) { return std::exp(2 * s) * std::pow(1 - std::exp(-s), 2) - kS3 / 2; }, 0.01, 3.0);
  CHECK(cross == doctest::Approx(std::log(1 + std::pow(0.75, 0.25))).epsilon(1e-10));
  CHECK(linf_envelope(cross - 1e-3, pi, 1) == doctest::Approx(std::exp(2 * (cross - 1e-3))));
  CHECK(linf_envelope(cross + 1e-3, pi, 1) < std::exp(2 * (cross + 1e-3)));
}

TEST_CASE("exact self-similar sup stays below the envelope") {
  for (int k = 1; k <= 20; ++k) {
    const double s = 0.25 * k;
    const double sup = testing::sampled_sup([s](double a, double b) { return exact_selfsimilar(s, a, b); },
                                            -10, 10, -10, 10, 401);
    CHECK(sup <= linf_envelope(s, pi, 1.0) * (1 + 1e-12));
  }
}

TEST_CASE("convolution oracle reproduces the closed form") {
  const auto f0 = InitialData::gaussian();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(-3, 3);
  for (double t : {0.5, 1.0, 5.0}) {
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({d(rng), d(rng) * (1 + t)});
    const auto vals = convolution_oracle(f0, t, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(std::abs(vals[i] - exact_original(t, pts[i].v, pts[i].z)) <= 1e-6);
    }
  }
}

TEST_CASE("convolution oracle is linear in the datum") {
  const InitialData two({{1.0, 0.5, -0.5, 1.0, 0.7}, {0.5, -1.0, 1.0, 0.6, 1.2}});
  const InitialData a({{1.0, 0.5, -0.5, 1.0, 0.7}});
  const InitialData b({{0.5, -1.0, 1.0, 0.6, 1.2}});
  for (Point p : {Point{0.2, 0.3}, Point{-1, 2}}) {
    CHECK(convolution_oracle(two, 0.8, p) ==
          doctest::Approx(convolution_oracle(a, 0.8, p) + convolution_oracle(b, 0.8, p)).epsilon(1e-8));
  }
}

TEST_CASE("oracle preserves mass at t=1") {
  const auto f0 = InitialData::gaussian();
  // Outer quadrature over the oracle on a box holding the mass; the original
  // solution's covariance at t=1 has variances about 2.5 (v) and 1.7 (x).
  const auto rule_v = testing::box_integral(
      [&](double v, double x) { return convolution_oracle(f0, 1.0, {v, x}); }, -9, 9, -9, 9, 12);
  CHECK(rule_v == doctest::Approx(pi).epsilon(1e-5));
}

TEST_CASE("whole-space sup decays at least like the kernel bound") {
  const auto f0 = InitialData::gaussian();
  for (double t : {2.0, 5.0, 10.0}) {
    const double half = 3 * std::sqrt(2 * t) + 1;
    const double sup = testing::sampled_sup([t](double v, double x) { return exact_original(t, v, x); },
                                            -half, half, -half * t, half * t, 401);
    // The closed form is the oracle (checked above); sample it for speed.
    CHECK(sup <= kS3 / (2 * pi * t * t) * pi);
    CHECK(convolution_oracle(f0, t, {0, 0}) <= kS3 / (2 * pi * t * t) * pi);
  }
}

TEST_CASE("oracle reports failure when refinement cannot stabilise") {
  OracleOptions opts;
  opts.max_panels = 4;
  opts.stop_tol = 1e-300;
  CHECK_THROWS_AS(convolution_oracle(InitialData::gaussian(), 1.0, {0.0, 0.0}, opts), OracleError);
}

TEST_CASE("variable maps") {
  for (auto dir : {MapDirection::original_to_lagrangian, MapDirection::lagrangian_to_original,
                   MapDirection::lagrangian_to_selfsimilar, MapDirection::selfsimilar_to_lagrangian}) {
    const auto m = map_variables(dir, 0.0, {0.4, -0.7});
    CHECK(m.point.v == doctest::Approx(0.4));
    CHECK(m.point.z == doctest::Approx(-0.7));
    CHECK(m.amplitude == 1.0);
  }
  const auto to_ss = map_variables(MapDirection::lagrangian_to_selfsimilar, 1.0, {1.0, 1.0});
  CHECK(to_ss.time == doctest::Approx(std::log(2.0)));
  CHECK(to_ss.amplitude == doctest::Approx(4.0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-5, 5), dt(0, 8);
  for (int i = 0; i < 100; ++i) {
    const double t = dt(rng);
    const Point p{d(rng), d(rng)};
    const auto a = map_variables(MapDirection::original_to_lagrangian, t, p);
    const auto b = map_variables(MapDirection::lagrangian_to_original, a.time, a.point);
    CHECK(b.point.v == doctest::Approx(p.v).epsilon(1e-12));
    CHECK(b.point.z == doctest::Approx(p.z).epsilon(1e-12));
    const auto c = map_variables(MapDirection::lagrangian_to_selfsimilar, t, p);
    const auto e = map_variables(MapDirection::selfsimilar_to_lagrangian, c.time, c.point);
    CHECK(e.time == doctest::Approx(t).epsilon(1e-12));
    CHECK(e.point.v == doctest::Approx(p.v).epsilon(1e-12));
    CHECK(e.point.z == doctest::Approx(p.z).epsilon(1e-12));
    CHECK(c.amplitude * e.amplitude == doctest::Approx(1.0).epsilon(1e-12));
    // The self-similar solution is the mapped lagrangian one.
    CHECK(c.amplitude * exact_lagrangian(t, p.v, p.z) ==
          doctest::Approx(exact_selfsimilar(c.time, c.point.v, c.point.z)).epsilon(1e-10));
  }
}

TEST_CASE("poincare constant and domain condition") {
  const auto sq = RectDomain::centered_square(10.0);
  CHECK(poincare_constant(sq, 0.0) == 1.0);
  CHECK(poincare_constant(sq, 3.0) == doctest::Approx(3.0));
  CHECK(poincare_constant(sq, 1.0) == doctest::Approx(1.0));
  CHECK(poincare_constant(sq, 1.0 + 1e-12) == doctest::Approx(1.0));
  CHECK(poincare_inequality_constant(sq, 0.0) == doctest::Approx(20.0 / std::sqrt(2.0)));
  CHECK(domain_condition(sq));
  CHECK_FALSE(domain_condition(RectDomain(0, 1, 0, 1)));
  CHECK(domain_condition(RectDomain(0, 2, 0, 10)));
  CHECK_FALSE(domain_condition(RectDomain::centered_square(0.5)));
}
