#pragma once

#include "quadcurl/mesh.hpp"
#include "quadcurl/poly.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace quadcurl {

enum class SpaceKind {
  LagrangeScalar,
  ArgyrisScalar,
  GradRotR,      // grad P_k + P_{k-1} x_perp
  StokesRotW,    // grad P_5 + P_1 x_perp + poincare(bubble), k = 4
  ArgyrisVector  // Argyris in each component
};

std::string to_string(SpaceKind kind);
bool is_vector_kind(SpaceKind kind);

/// Local coordinates xi = (x - center) / h.  Polynomials of a LocalBasis live
/// in xi; physical derivatives pick up a factor 1/h per order.
struct Frame {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double h = 1.0;

  Eigen::Vector2d to_local(const Eigen::Vector2d& x) const { return (x - center) / h; }
  Eigen::Vector2d to_physical(const Eigen::Vector2d& xi) const { return center + h * xi; }
};

Frame element_frame(const Mesh& mesh, int t);

/// Barycentric coordinate lambda_i of triangle t as a polynomial in the local frame.
Poly barycentric(const Mesh& mesh, int t, int i, const Frame& frame);

struct LocalBasis {
  SpaceKind kind = SpaceKind::LagrangeScalar;
  int k = 0;
  int triangle = -1;
  Frame frame;
  std::vector<Poly> scalar;
  std::vector<PolyVec> vector;

  bool is_vector() const { return is_vector_kind(kind); }
  int dim() const
  {
    return static_cast<int>(is_vector() ? vector.size() : scalar.size());
  }
  /// Basis whose j-th member is sum_i C(i, j) * (member i).
  LocalBasis combine(const Eigen::MatrixXd& C) const;
};

/// Dimension of the local space.  Throws std::invalid_argument for unsupported (kind, k).
int local_dimension(SpaceKind kind, int k);
void check_supported(SpaceKind kind, int k);

/// Constructive spanning set in the element frame.
LocalBasis local_space(SpaceKind kind, int k, const Mesh& mesh, int t);

/// Number of degrees of freedom attached to each vertex, edge and element interior.
struct EntityDofs {
  int per_vertex = 0;
  int per_edge = 0;
  int interior = 0;
};
EntityDofs entity_dofs(SpaceKind kind, int k);

/// Rows: functionals of local vertex 0, 1, 2, then of the edges opposite
/// vertex 0, 1, 2 (edge orientation is the global one).  Columns: members of `basis`.
///   Lagrange     vertex: value;               edge: value moments 0..k-2
///   Argyris      vertex: u, grad u, Hessian;  edge: moment 0 of du/dn
///   GradRotR     vertex: rot u;               edge: u.tau moments 0..k-1, rot u moments 0..k-3
///   StokesRotW   vertex: u, grad u1, grad u2; edge: moment 0 of u1, u2
///   ArgyrisVector vertex: Argyris of u1, u2;  edge: moment 0 of du1/dn, du2/dn
Eigen::MatrixXd functional_matrix(const LocalBasis& basis, const Mesh& mesh);

/// Coefficients (w.r.t. the generators) of the nodal basis: the first columns are
/// dual to functional_matrix, the remaining ones span its null space.
/// Throws std::runtime_error when the functionals are not independent.
Eigen::MatrixXd nodal_coefficients(const LocalBasis& generators, const Mesh& mesh);

}  // namespace quadcurl
