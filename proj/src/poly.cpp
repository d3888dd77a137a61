#include "quadcurl/poly.hpp"

#include <algorithm>
#include <cmath>

namespace quadcurl {

Poly::Poly(int degree) : degree_(degree), c_(dimension(degree), 0.0) {}

Poly Poly::constant(double c)
{
  Poly p(0);
  p.c_[0] = c;
  return p;
}

Poly Poly::monomial(int a, int b, double c)
{
  Poly p(a + b);
  p.c_[index(a, b)] = c;
  return p;
}

Poly Poly::affine(double c0, double cx, double cy)
{
  Poly p(1);
  p.c_[index(0, 0)] = c0;
  p.c_[index(1, 0)] = cx;
  p.c_[index(0, 1)] = cy;
  return p;
}

int Poly::effective_degree(double tol) const
{
  for (int d = degree_; d > 0; --d)
    for (int b = 0; b <= d; ++b)
      if (std::abs(c_[index(d - b, b)]) > tol) return d;
  return 0;
}

double Poly::coeff(int a, int b) const
{
  if (a < 0 || b < 0 || a + b > degree_) return 0.0;
  return c_[index(a, b)];
}

void Poly::set_coeff(int a, int b, double c)
{
  grow(a + b);
  c_[index(a, b)] = c;
}

void Poly::add_to_coeff(int a, int b, double c)
{
  grow(a + b);
  c_[index(a, b)] += c;
}

void Poly::grow(int degree)
{
  if (degree <= degree_) return;
  degree_ = degree;
  c_.resize(dimension(degree), 0.0);
}

double Poly::operator()(double x, double y) const
{
  // Horner in y within each power of x.
  double result = 0.0;
  double xp = 1.0;
  for (int a = 0; a <= degree_; ++a) {
    double inner = 0.0;
    for (int b = degree_ - a; b >= 0; --b) inner = inner * y + c_[index(a, b)];
    result += xp * inner;
    xp *= x;
  }
  return result;
}

Poly Poly::dx() const
{
  Poly r(std::max(degree_ - 1, 0));
  for (int d = 1; d <= degree_; ++d)
    for (int b = 0; b < d; ++b) {
      const int a = d - b;
      r.c_[index(a - 1, b)] += a * c_[index(a, b)];
    }
  return r;
}

Poly Poly::dy() const
{
  Poly r(std::max(degree_ - 1, 0));
  for (int d = 1; d <= degree_; ++d)
    for (int b = 1; b <= d; ++b) {
      const int a = d - b;
      r.c_[index(a, b - 1)] += b * c_[index(a, b)];
    }
  return r;
}

Poly Poly::compose_affine(const Eigen::Vector2d& origin, const Eigen::Matrix2d& jac) const
{
  const Poly xs = affine(origin.x(), jac(0, 0), jac(0, 1));
  const Poly ys = affine(origin.y(), jac(1, 0), jac(1, 1));
  std::vector<Poly> xpow{constant(1.0)}, ypow{constant(1.0)};
  for (int i = 1; i <= degree_; ++i) {
    xpow.push_back(xpow.back() * xs);
    ypow.push_back(ypow.back() * ys);
  }
  Poly r(degree_);
  for (int d = 0; d <= degree_; ++d)
    for (int b = 0; b <= d; ++b) {
      const double c = c_[index(d - b, b)];
      if (c != 0.0) r += c * (xpow[d - b] * ypow[b]);
    }
  return r;
}

double Poly::max_abs() const
{
  double m = 0.0;
  for (double c : c_) m = std::max(m, std::abs(c));
  return m;
}

Poly& Poly::operator+=(const Poly& o)
{
  grow(o.degree_);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Poly& Poly::operator-=(const Poly& o)
{
  grow(o.degree_);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Poly& Poly::operator*=(double s)
{
  for (double& c : c_) c *= s;
  return *this;
}

Poly operator*(const Poly& p, const Poly& q)
{
  Poly r(p.degree_ + q.degree_);
  for (int d1 = 0; d1 <= p.degree_; ++d1)
    for (int b1 = 0; b1 <= d1; ++b1) {
      const double c1 = p.c_[Poly::index(d1 - b1, b1)];
      if (c1 == 0.0) continue;
      for (int d2 = 0; d2 <= q.degree_; ++d2)
        for (int b2 = 0; b2 <= d2; ++b2) {
          const double c2 = q.c_[Poly::index(d2 - b2, b2)];
          r.c_[Poly::index(d1 - b1 + d2 - b2, b1 + b2)] += c1 * c2;
        }
    }
  return r;
}

PolyVec grad(const Poly& p) { return {p.dx(), p.dy()}; }

PolyVec curl(const Poly& p) { return {p.dy(), -p.dx()}; }

Poly rot(const PolyVec& v) { return v.y.dx() - v.x.dy(); }

Poly div(const PolyVec& v) { return v.x.dx() + v.y.dy(); }

Poly laplacian(const Poly& p) { return p.dx().dx() + p.dy().dy(); }

Poly dot(const PolyVec& a, const PolyVec& b) { return a.x * b.x + a.y * b.y; }

PolyVec perp_scale(const Poly& p)
{
  return {-1.0 * (Poly::monomial(0, 1) * p), Poly::monomial(1, 0) * p};
}

PolyVec poincare(const Poly& p)
{
  // Split into homogeneous parts; int_0^1 t^m * t dt = 1/(m+2).
  Poly scaled(p.degree());
  for (int d = 0; d <= p.degree(); ++d)
    for (int b = 0; b <= d; ++b)
      scaled.set_coeff(d - b, b, p.coeff(d - b, b) / (d + 2));
  return perp_scale(scaled);
}

}  // namespace quadcurl
