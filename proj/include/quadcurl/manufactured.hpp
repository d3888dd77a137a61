#pragma once

#include <Eigen/Core>

#include <vector>

namespace quadcurl {

/// c * F(m pi x) * G(n pi y) with F, G in {sin, cos}.
struct TrigTerm {
  double c = 0.0;
  bool sin_x = true;
  int m = 0;
  bool sin_y = true;
  int n = 0;
};

/// Finite sum of trigonometric products with exact differentiation.
class TrigScalar {
public:
  TrigScalar() = default;
  explicit TrigScalar(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {}
  static TrigScalar term(double c, bool sin_x, int m, bool sin_y, int n)
  {
    return TrigScalar({TrigTerm{c, sin_x, m, sin_y, n}});
  }

  double operator()(const Eigen::Vector2d& p) const;
  TrigScalar dx() const;
  TrigScalar dy() const;
  const std::vector<TrigTerm>& terms() const { return terms_; }

  TrigScalar& operator+=(const TrigScalar& o);
  TrigScalar& operator*=(double s);
  friend TrigScalar operator+(TrigScalar a, const TrigScalar& b) { return a += b; }
  friend TrigScalar operator-(TrigScalar a, const TrigScalar& b) { return a += (-1.0 * b); }
  friend TrigScalar operator*(double s, TrigScalar a) { return a *= s; }

private:
  std::vector<TrigTerm> terms_;
};

struct TrigVec {
  TrigScalar x, y;
  Eigen::Vector2d operator()(const Eigen::Vector2d& p) const { return {x(p), y(p)}; }
};

TrigVec grad(const TrigScalar& p);
TrigVec curl(const TrigScalar& p);
TrigScalar rot(const TrigVec& v);
TrigScalar div(const TrigVec& v);
TrigScalar laplacian(const TrigScalar& p);
TrigVec operator+(const TrigVec& a, const TrigVec& b);
TrigVec operator*(double s, const TrigVec& a);

/// Exact solution data of -curl lap rot u - grad div u = f, sigma = -div u.
struct Manufactured {
  TrigVec u;
  TrigScalar rot_u;
  TrigVec grad_rot_u;
  TrigScalar sigma;
  TrigVec grad_sigma;
  TrigVec f;
};

/// u = curl psi + grad phi.
Manufactured manufactured_from(const TrigScalar& psi, const TrigScalar& phi);

/// u = curl psi with psi = sin(pi x) sin(2 pi y); psi, lap psi and lap^2 psi
/// vanish on the boundary of the unit square.
Manufactured default_manufactured();

/// u = grad phi with phi = cos(pi x) cos(pi y).
Manufactured gradient_manufactured();

}  // namespace quadcurl
