#pragma once

#include "quadcurl/fespace.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <string>

namespace quadcurl {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class FormKind {
  GradRotGradRot,  // (grad rot u, grad rot v)
  DivDiv,          // (div u, div v)
  MassVec,         // (u, v)
  GradCoupling,    // row vector v, column scalar s: (grad s, v)
  MassScalar,      // (s, r)
  StiffScalar      // (grad s, grad r)
};

/// Quadrature degree used for a space pair: 2 * (max polynomial degree) + 2.
int quadrature_degree(const FESpace& a, const FESpace& b);

/// A_global = sum_K T_row,K^T A_K T_col,K.  Throws std::invalid_argument for
/// incompatible spaces.
SparseMatrix assemble(const FESpace& row, const FESpace& col, FormKind form);
inline SparseMatrix assemble(const FESpace& space, FormKind form)
{
  return assemble(space, space, form);
}

using VectorFunction = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;
using ScalarFunction = std::function<double(const Eigen::Vector2d&)>;

/// b_i = int f . phi_i for a vector space.
Eigen::VectorXd assemble_load(const FESpace& space, const VectorFunction& f);
Eigen::VectorXd assemble_load(const FESpace& space, const Eigen::Vector2d& f);
/// b_i = int f phi_i for a scalar space.
Eigen::VectorXd assemble_load(const FESpace& space, const ScalarFunction& f);

/// max |A - A^T| / max |A|.
double symmetry_defect(const SparseMatrix& A);

/// Writes a MatrixMarket coordinate file.
void export_matrix_market(const SparseMatrix& A, const std::string& path);

/// Physical quadrature points and weights on element t.
struct ElementQuadrature {
  std::vector<Eigen::Vector2d> points;
  Eigen::VectorXd weights;
};
ElementQuadrature element_quadrature(const Mesh& mesh, int t, int degree);

}  // namespace quadcurl
