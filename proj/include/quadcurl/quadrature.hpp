#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace quadcurl {

/// Gauss-Legendre rule on [0, 1] with n points (exact to degree 2n - 1).
struct Rule1D {
  std::vector<double> points;
  std::vector<double> weights;
};

Rule1D gauss_legendre(int n);

/// Rule on the reference triangle (0,0), (1,0), (0,1).
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;   // reference coordinates
  std::vector<Eigen::Vector3d> bary;     // barycentric coordinates
  std::vector<double> weights;           // sum to 1/2
  int exactness = 0;

  std::size_t size() const { return weights.size(); }
};

/// Collapsed (Duffy) Gauss-Legendre rule exact for total degree d; d = 1
/// returns the centroid rule.  Throws std::invalid_argument outside 1..20.
QuadratureRule quadrature_rule(int d);

/// Normalized Legendre polynomial on [0, 1]: q_j(t) with int_0^1 q_i q_j dt = delta_ij.
double legendre01(int j, double t);

/// Moments int_e f q_j ds, j = 0..up_to, where q_j are the arc-length
/// orthonormal Legendre polynomials on an edge of the given length and
/// trace(t) is the restriction parametrized by t in [0, 1].
Eigen::VectorXd edge_moments(const std::function<double(double)>& trace, double length,
                             int up_to);

/// Inverse of edge_moments for a polynomial trace of degree <= up_to.
double trace_from_moments(const Eigen::VectorXd& moments, double length, double t);

}  // namespace quadcurl
