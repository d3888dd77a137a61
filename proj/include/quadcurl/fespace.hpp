#pragma once

#include "quadcurl/local_space.hpp"
#include "quadcurl/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace quadcurl {

struct BcFlags {
  bool rot0 = false;       // rot u = 0 on the boundary
  bool normal0 = false;    // u . n = 0 on the boundary
  bool dirichlet = false;  // scalar trace = 0 on the boundary

  bool any() const { return rot0 || normal0 || dirichlet; }
};

using SparseRowMajor = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// One linear constraint sum_j c_j x_j = 0 over global nodal dofs.
struct ConstraintRow {
  std::vector<std::pair<int, double>> entries;
};

/// Global conforming space.  Row t * local_dim + j of T holds the coefficients
/// of global basis functions on local nodal function j of element t.
class FESpace {
public:
  SpaceKind kind = SpaceKind::LagrangeScalar;
  int k = 0;
  BcFlags bc;
  std::shared_ptr<const Mesh> mesh;
  EntityDofs dofs;
  int local_dim = 0;
  int nodal_dim = 0;
  std::vector<LocalBasis> local;                 // nodal basis per element
  std::vector<Eigen::MatrixXd> generator_coeffs; // nodal = generators * C
  SparseRowMajor T;

  int global_dim() const { return static_cast<int>(T.cols()); }
  bool is_vector() const { return is_vector_kind(kind); }

  /// Global nodal index of local nodal function j on element t.
  int nodal_index(int t, int j) const;

  /// Local nodal coefficients of global vector x on element t.
  Eigen::VectorXd local_coeffs(const Eigen::VectorXd& x, int t) const;

  /// T expressed in the concatenated generator coordinates (dense; small meshes only).
  Eigen::MatrixXd generator_transform() const;
};

FESpace build_conforming_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int k,
                               BcFlags bc = {});

/// Eliminates constraints from the column space of R (nodal x current):
/// returns R Q where the columns of Q span the null space of rows * R.
/// Constraints are grouped into independent blocks that are reduced by dense SVD.
SparseRowMajor reduce_constraints(const SparseRowMajor& R, const std::vector<ConstraintRow>& rows,
                                  double rel_tol = 1e-10);

/// Values of a field (or of a single basis function) at physical points of element t.
struct FieldSample {
  Eigen::Vector2d value = Eigen::Vector2d::Zero();  // scalar spaces use value.x()
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();   // scalar gradient
  double rot = 0.0;
  double div = 0.0;
  Eigen::Vector2d grad_rot = Eigen::Vector2d::Zero();
};

std::vector<FieldSample> eval_field(const FESpace& space, const Eigen::VectorXd& coeffs, int t,
                                    const std::vector<Eigen::Vector2d>& points);

/// Largest jump across interior edges of the traces the space is conforming for,
/// relative to the largest sampled trace or interior field value.  Traces: value
/// (Lagrange), value and gradient (Argyris), tangential component and rot
/// (GradRotR), vector and rot (StokesRotW), vector, rot and div (vector Argyris).
double max_interface_jump(const FESpace& space, const Eigen::VectorXd& coeffs, int samples = 20);

/// Largest boundary residual of the imposed conditions (rot, normal component or
/// scalar value), relative to the largest field magnitude sampled on edges and interiors.
double max_boundary_residual(const FESpace& space, const Eigen::VectorXd& coeffs, int samples = 20);

/// Reference construction by dense SVD of the interelement trace-matching
/// constraints (plus vertex supersmoothness where the space requires it).
/// Returns an orthonormal basis in concatenated generator coordinates.
struct ReferenceSpace {
  Eigen::MatrixXd basis;
  Eigen::MatrixXd constraints;
  std::vector<LocalBasis> generators;
};
ReferenceSpace reference_conforming_space(const Mesh& mesh, SpaceKind kind, int k, BcFlags bc,
                                          bool vertex_supersmoothness = true);

}  // namespace quadcurl
