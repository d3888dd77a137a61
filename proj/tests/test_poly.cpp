#include "quadcurl/poly.hpp"
#include "quadcurl/quadrature.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace quadcurl;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int_T x^a y^b over the reference triangle.
double monomial_integral(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double integrate_reference(const Poly& p, int degree)
{
  const QuadratureRule q = quadrature_rule(degree);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * p(q.points[i]);
  return s;
}

}  // namespace

TEST_CASE("operator conventions")
{
  PolyVec xperp{-Poly::monomial(0, 1), Poly::monomial(1, 0)};
  CHECK(rot(xperp).max_abs() == doctest::Approx(2.0));
  CHECK((rot(xperp) - Poly::constant(2.0)).max_abs() == 0.0);

  const Poly p = Poly::monomial(2, 1);  // x^2 y
  const PolyVec c = curl(p);
  CHECK((c.x - Poly::monomial(2, 0)).max_abs() == 0.0);
  CHECK((c.y + Poly::monomial(1, 1, 2.0)).max_abs() == 0.0);
}

TEST_CASE("complex identities up to degree 8")
{
  std::mt19937 rng(1);
  for (int d = 0; d <= 8; ++d) {
    const Poly p = test::random_poly(d, rng);
    CHECK(rot(grad(p)).max_abs() < 1e-12);
    CHECK(div(curl(p)).max_abs() < 1e-12);
    CHECK((rot(curl(p)) + laplacian(p)).max_abs() < 1e-12);
  }
}

TEST_CASE("perp_scale")
{
  const PolyVec one = perp_scale(Poly::constant(1.0));
  CHECK((one.x + Poly::monomial(0, 1)).max_abs() == 0.0);
  CHECK((one.y - Poly::monomial(1, 0)).max_abs() == 0.0);

  std::mt19937 rng(2);
  const PolyVec x{Poly::monomial(1, 0), Poly::monomial(0, 1)};
  for (int trial = 0; trial < 5; ++trial) {
    const Poly p = test::random_poly(3, rng);
    const Poly rhs = dot(x, grad(p)) + 2.0 * p;
    CHECK((rot(perp_scale(p)) - rhs).max_abs() < 1e-13);
  }
  for (int m = 0; m <= 5; ++m) {
    const Poly h = Poly::monomial(m, 0, 0.3) + Poly::monomial(0, m, -1.7);
    CHECK((rot(perp_scale(h)) - (m + 2.0) * h).max_abs() < 1e-12);
  }
}

TEST_CASE("poincare operator")
{
  const PolyVec half = poincare(Poly::constant(1.0));
  CHECK((half.x + 0.5 * Poly::monomial(0, 1)).max_abs() < 1e-15);
  CHECK((half.y - 0.5 * Poly::monomial(1, 0)).max_abs() < 1e-15);

  std::mt19937 rng(3);
  for (int d = 0; d <= 6; ++d) {
    const Poly p = test::random_poly(d, rng);
    CHECK((rot(poincare(p)) - p).max_abs() < 1e-13);
  }

  const Poly l1 = Poly::affine(1.0, -1.0, -1.0), l2 = Poly::affine(0.0, 1.0, 0.0),
             l3 = Poly::affine(0.0, 0.0, 1.0);
  const Poly bubble = l1 * l2 * l3;
  const PolyVec pb = poincare(bubble);
  CHECK(pb.degree() == 4);
  CHECK((rot(pb) - bubble).max_abs() < 1e-14);
}

TEST_CASE("element integration by parts for rot and curl")
{
  // (rot u, phi)_K - (u, curl phi)_K = int_dK (u . tau) phi on the reference triangle.
  std::mt19937 rng(4);
  const Eigen::Vector2d V[3] = {{0, 0}, {1, 0}, {0, 1}};
  const Rule1D g = gauss_legendre(8);
  for (int trial = 0; trial < 5; ++trial) {
    const PolyVec u = test::random_polyvec(4, rng);
    const Poly phi = test::random_poly(4, rng);
    const double lhs = integrate_reference(rot(u) * phi, 10) - integrate_reference(dot(u, curl(phi)), 10);
    double rhs = 0.0;
    for (int e = 0; e < 3; ++e) {
      const Eigen::Vector2d a = V[e], b = V[(e + 1) % 3];
      const Eigen::Vector2d tau = b - a;  // length-scaled, ds = |b - a| dt
      for (std::size_t i = 0; i < g.points.size(); ++i) {
        const Eigen::Vector2d x = a + g.points[i] * (b - a);
        rhs += g.weights[i] * u(x).dot(tau) * phi(x);
      }
    }
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("quadrature rules")
{
  const QuadratureRule c = quadrature_rule(1);
  REQUIRE(c.size() == 1);
  CHECK(c.weights[0] == doctest::Approx(0.5));
  CHECK(c.points[0].x() == doctest::Approx(1.0 / 3.0));

  CHECK(integrate_reference(Poly::monomial(6, 4), 10) ==
        doctest::Approx(factorial(4) * factorial(6) / factorial(12)).epsilon(1e-14));

  for (int d = 1; d <= 20; ++d) {
    const QuadratureRule q = quadrature_rule(d);
    CHECK(q.exactness >= d);
    double sum = 0.0;
    for (double w : q.weights) sum += w;
    CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
    double worst = 0.0;
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        const double exact = monomial_integral(a, b);
        worst = std::max(worst, std::abs(integrate_reference(Poly::monomial(a, b), d) - exact) / exact);
      }
    CHECK(worst < 1e-13);
  }
  CHECK_THROWS_AS(quadrature_rule(0), std::invalid_argument);
  CHECK_THROWS_AS(quadrature_rule(21), std::invalid_argument);
}

TEST_CASE("edge moments")
{
  const Eigen::VectorXd one = edge_moments([](double) { return 1.0; }, 1.0, 0);
  REQUIRE(one.size() == 1);
  CHECK(one(0) == doctest::Approx(1.0));

  // Odd about the midpoint: even Legendre modes vanish.
  const Eigen::VectorXd odd = edge_moments([](double t) { return std::pow(t - 0.5, 3); }, 2.0, 4);
  CHECK(std::abs(odd(0)) < 1e-15);
  CHECK(std::abs(odd(2)) < 1e-15);
  CHECK(std::abs(odd(4)) < 1e-15);
  CHECK(std::abs(odd(1)) > 1e-3);

  auto trace = [](double t) { return 1.0 - 2.0 * t + 3.0 * t * t * t - 0.5 * std::pow(t, 5); };
  const double len = 0.7;
  const Eigen::VectorXd m = edge_moments(trace, len, 5);
  for (double t : {0.0, 0.13, 0.5, 0.91, 1.0}) CHECK(trace_from_moments(m, len, t) == doctest::Approx(trace(t)).epsilon(1e-12));
}

TEST_CASE("polynomial arithmetic")
{
  const Poly a = Poly::affine(1.0, 2.0, -1.0);
  const Poly b = a * a;
  CHECK(b.degree() == 2);
  CHECK(b(0.3, -0.2) == doctest::Approx(std::pow(1.0 + 0.6 + 0.2, 2)));
  CHECK(Poly::dimension(4) == 15);
  CHECK((a - a).effective_degree() == 0);
}
