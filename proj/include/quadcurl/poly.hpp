#pragma once

// Dense bivariate polynomials in the monomial basis x^a y^b, a + b <= degree,
// with the differential operators of the grad-rot complex.
//
// Sign conventions used throughout the library:
//   grad p = (dp/dx, dp/dy)
//   curl p = (dp/dy, -dp/dx)
//   rot  v = dv2/dx - dv1/dy
//   div  v = dv1/dx + dv2/dy
//   x_perp = (-y, x)
// so that rot(grad p) = 0, div(curl p) = 0 and rot(curl p) = -lap(p).

#include <Eigen/Core>

#include <algorithm>
#include <vector>

namespace quadcurl {

class Poly {
public:
  Poly() = default;
  explicit Poly(int degree);

  static Poly constant(double c);
  static Poly monomial(int a, int b, double c = 1.0);
  /// Affine function c0 + cx*x + cy*y.
  static Poly affine(double c0, double cx, double cy);

  /// Storage degree (coefficients may still vanish above the true degree).
  int degree() const { return degree_; }
  /// Largest total degree carrying a coefficient with |c| > tol.
  int effective_degree(double tol = 0.0) const;

  static int index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }
  static int dimension(int degree) { return (degree + 1) * (degree + 2) / 2; }

  double coeff(int a, int b) const;
  void set_coeff(int a, int b, double c);
  void add_to_coeff(int a, int b, double c);
  const std::vector<double>& coeffs() const { return c_; }

  double operator()(double x, double y) const;
  double operator()(const Eigen::Vector2d& p) const { return (*this)(p.x(), p.y()); }

  Poly dx() const;
  Poly dy() const;

  /// Composition with an affine change of variables
  /// x = ox + axx*s + axy*t, y = oy + ayx*s + ayy*t.
  Poly compose_affine(const Eigen::Vector2d& origin, const Eigen::Matrix2d& jac) const;

  /// Max absolute coefficient.
  double max_abs() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(double s);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= -1.0; }
  friend Poly operator*(Poly a, double s) { return a *= s; }
  friend Poly operator*(double s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b);

private:
  void grow(int degree);

  int degree_ = 0;
  std::vector<double> c_ = std::vector<double>(1, 0.0);
};

struct PolyVec {
  Poly x;
  Poly y;

  Eigen::Vector2d operator()(double px, double py) const { return {x(px, py), y(px, py)}; }
  Eigen::Vector2d operator()(const Eigen::Vector2d& p) const { return (*this)(p.x(), p.y()); }
  int degree() const { return std::max(x.degree(), y.degree()); }
  double max_abs() const { return std::max(x.max_abs(), y.max_abs()); }

  PolyVec& operator+=(const PolyVec& o) { x += o.x; y += o.y; return *this; }
  PolyVec& operator-=(const PolyVec& o) { x -= o.x; y -= o.y; return *this; }
  PolyVec& operator*=(double s) { x *= s; y *= s; return *this; }
  friend PolyVec operator+(PolyVec a, const PolyVec& b) { return a += b; }
  friend PolyVec operator-(PolyVec a, const PolyVec& b) { return a -= b; }
  friend PolyVec operator*(PolyVec a, double s) { return a *= s; }
  friend PolyVec operator*(double s, PolyVec a) { return a *= s; }
};

PolyVec grad(const Poly& p);
PolyVec curl(const Poly& p);
Poly rot(const PolyVec& v);
Poly div(const PolyVec& v);
Poly laplacian(const Poly& p);
Poly dot(const PolyVec& a, const PolyVec& b);

/// p * x_perp = (-y p, x p).  rot(p x_perp) = x . grad p + 2 p.
PolyVec perp_scale(const Poly& p);

/// Poincare operator  P p(x) = int_0^1 p(t x) t x_perp dt.
/// On a homogeneous part of degree m this is p x_perp / (m + 2); rot(P p) = p.
PolyVec poincare(const Poly& p);

}  // namespace quadcurl
