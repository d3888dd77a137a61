#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadcurl {

using SparseMatrix = Eigen::SparseMatrix<double>;

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, int kernel_dim = -1)
      : std::runtime_error(what), kernel_dimension(kernel_dim)
  {
  }
  int kernel_dimension;
};

struct EigResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // M-orthonormal columns
  int zero_count = 0;
  double zero_threshold = 1e-6;
  Eigen::VectorXd residuals;     // ||K x - lambda M x|| / (||K|| ||x||)
  std::string method;
};

struct SourceResult {
  Eigen::VectorXd u;
  Eigen::VectorXd sigma;
  double residual = 0.0;  // relative residual of the linear system
  std::map<std::string, double> diagnostics;
};

enum class EigMethod { Auto, Dense, Iterative };

struct EigOptions {
  EigMethod method = EigMethod::Auto;
  int dense_limit = 1200;       // Auto uses the dense solver up to this size
  double zero_threshold = 1e-6;
  double shift = 1.0;           // factorizes K + shift M
  int block_size = 4;
  unsigned seed = 20240531u;
  double tolerance = 1e-8;      // Ritz residual, relative to the Ritz value
  int max_basis = 400;
};

/// Symmetric generalized eigenproblem K x = lambda M x, K applied implicitly.
struct Pencil {
  int n = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_K;
  const SparseMatrix* M = nullptr;
  /// Solves (K + shift M) x = y.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> solve_shifted;
  /// Dense K for the reference path (only called when n is small).
  std::function<Eigen::MatrixXd()> dense_K;
};

/// zero_count: eigenvalues below threshold * lambda_ref, where lambda_ref is the
/// smallest eigenvalue above threshold * max(|lambda|, 1).
int count_zero_eigenvalues(const Eigen::VectorXd& eigenvalues, double threshold);

EigResult solve_pencil(const Pencil& pencil, int num, const EigOptions& opts = {});

/// (A + alpha G Msig^{-1} G^T) u = lambda M u, via the factorization of
/// [[A + s M, G], [G^T, -Msig / alpha]].
EigResult eig_mixed(const SparseMatrix& A, const SparseMatrix& G, const SparseMatrix& Msig,
                    const SparseMatrix& M, int num, const EigOptions& opts = {}, double alpha = 1.0);

/// K u = lambda M u.
EigResult eig_primal(const SparseMatrix& K, const SparseMatrix& M, int num,
                     const EigOptions& opts = {});

/// Solves [[A, G], [G^T, -Msig]] [u; sigma] = [b; 0].  With a harmonic basis H
/// (M-orthonormal columns) the right-hand side is projected, b - M H H^T b, and
/// u is constrained M-orthogonal to H.
SourceResult solve_saddle(const SparseMatrix& A, const SparseMatrix& G, const SparseMatrix& Msig,
                          const Eigen::VectorXd& b, const SparseMatrix* M = nullptr,
                          const Eigen::MatrixXd* H = nullptr);

/// Solves K u = b for symmetric positive definite K.
SourceResult solve_spd(const SparseMatrix& K, const Eigen::VectorXd& b);

/// 2-norm estimate of a symmetric operator by power iteration.
double operator_norm_estimate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
                              int n, unsigned seed = 7u, int iterations = 30);

}  // namespace quadcurl
