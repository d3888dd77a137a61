#include "quadcurl/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace quadcurl {

double TrigScalar::operator()(const Eigen::Vector2d& p) const
{
  const double pi = std::numbers::pi;
  double s = 0.0;
  for (const auto& t : terms_) {
    const double fx = t.sin_x ? std::sin(t.m * pi * p.x()) : std::cos(t.m * pi * p.x());
    const double fy = t.sin_y ? std::sin(t.n * pi * p.y()) : std::cos(t.n * pi * p.y());
    s += t.c * fx * fy;
  }
  return s;
}

TrigScalar TrigScalar::dx() const
{
  const double pi = std::numbers::pi;
  std::vector<TrigTerm> out;
  for (auto t : terms_) {
    // d/dx sin(a x) = a cos(a x), d/dx cos(a x) = -a sin(a x)
    t.c *= (t.sin_x ? 1.0 : -1.0) * t.m * pi;
    t.sin_x = !t.sin_x;
    if (t.c != 0.0) out.push_back(t);
  }
  return TrigScalar(out);
}

TrigScalar TrigScalar::dy() const
{
  const double pi = std::numbers::pi;
  std::vector<TrigTerm> out;
  for (auto t : terms_) {
    t.c *= (t.sin_y ? 1.0 : -1.0) * t.n * pi;
    t.sin_y = !t.sin_y;
    if (t.c != 0.0) out.push_back(t);
  }
  return TrigScalar(out);
}

TrigScalar& TrigScalar::operator+=(const TrigScalar& o)
{
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

TrigScalar& TrigScalar::operator*=(double s)
{
  for (auto& t : terms_) t.c *= s;
  return *this;
}

TrigVec grad(const TrigScalar& p) { return {p.dx(), p.dy()}; }
TrigVec curl(const TrigScalar& p) { return {p.dy(), -1.0 * p.dx()}; }
TrigScalar rot(const TrigVec& v) { return v.y.dx() - v.x.dy(); }
TrigScalar div(const TrigVec& v) { return v.x.dx() + v.y.dy(); }
TrigScalar laplacian(const TrigScalar& p) { return p.dx().dx() + p.dy().dy(); }
TrigVec operator+(const TrigVec& a, const TrigVec& b) { return {a.x + b.x, a.y + b.y}; }
TrigVec operator*(double s, const TrigVec& a) { return {s * a.x, s * a.y}; }

Manufactured manufactured_from(const TrigScalar& psi, const TrigScalar& phi)
{
  Manufactured m;
  m.u = curl(psi) + grad(phi);
  m.rot_u = rot(m.u);
  m.grad_rot_u = grad(m.rot_u);
  m.sigma = -1.0 * div(m.u);
  m.grad_sigma = grad(m.sigma);
  // f = -curl lap rot u - grad div u
  m.f = (-1.0 * curl(laplacian(m.rot_u))) + grad(m.sigma);
  return m;
}

Manufactured default_manufactured()
{
  return manufactured_from(TrigScalar::term(1.0, true, 1, true, 2), TrigScalar());
}

Manufactured gradient_manufactured()
{
  return manufactured_from(TrigScalar(), TrigScalar::term(1.0, false, 1, false, 1));
}

}  // namespace quadcurl
