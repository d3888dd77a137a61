#include "quadcurl/solve.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

namespace quadcurl {

EigResult solve_pencil_iterative(const Pencil& pencil, int num, const EigOptions& opts,
                                 double knorm);

int count_zero_eigenvalues(const Eigen::VectorXd& ev, double threshold)
{
  if (ev.size() == 0) return 0;
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  double ref = scale;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > threshold * scale) {
      ref = ev(i);
      break;
    }
  int zeros = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) < threshold * ref) ++zeros;
  return zeros;
}

double operator_norm_estimate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
                              int n, unsigned seed, int iterations)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = normal(rng);
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd y = op(x);
    est = y.norm();
    if (est == 0.0) return 0.0;
    x = y / est;
  }
  return est;
}

EigResult solve_pencil(const Pencil& pencil, int num, const EigOptions& opts)
{
  const int n = pencil.n;
  num = std::max(0, std::min(num, n));
  EigResult res;
  res.zero_threshold = opts.zero_threshold;
  if (num == 0) {
    res.eigenvectors.resize(n, 0);
    return res;
  }
  const double knorm = std::max(operator_norm_estimate(pencil.apply_K, n), 1e-300);

  const bool dense = opts.method == EigMethod::Dense ||
                     (opts.method == EigMethod::Auto && n <= opts.dense_limit && pencil.dense_K);
  if (dense) {
    if (!pencil.dense_K) throw SolverError("dense eigensolver needs an explicit matrix");
    const Eigen::MatrixXd K = pencil.dense_K();
    const Eigen::MatrixXd M = Eigen::MatrixXd(*pencil.M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()), M);
    if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
    res.eigenvalues = es.eigenvalues().head(num);
    res.eigenvectors = es.eigenvectors().leftCols(num);
    res.residuals.resize(num);
    for (int j = 0; j < num; ++j) {
      const Eigen::VectorXd x = res.eigenvectors.col(j);
      res.residuals(j) =
          (K * x - res.eigenvalues(j) * (M * x)).norm() / (knorm * x.norm());
    }
    res.method = "dense";
  } else {
    res = solve_pencil_iterative(pencil, num, opts, knorm);
    res.zero_threshold = opts.zero_threshold;
  }
  res.zero_count = count_zero_eigenvalues(res.eigenvalues, opts.zero_threshold);
  return res;
}

namespace {

// Symmetric quasi-definite or indefinite factorization with a residual check
// and an LU fallback.
class SymmetricSolver {
public:
  explicit SymmetricSolver(const SparseMatrix& K) : K_(K)
  {
    ldlt_.compute(K_);
    if (ldlt_.info() == Eigen::Success && accurate()) return;
    use_lu_ = true;
    lu_.analyzePattern(K_);
    lu_.factorize(K_);
    if (lu_.info() != Eigen::Success) throw SolverError("sparse factorization failed");
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const
  {
    return use_lu_ ? Eigen::VectorXd(lu_.solve(b)) : Eigen::VectorXd(ldlt_.solve(b));
  }

private:
  bool accurate()
  {
    std::mt19937 rng(3);
    std::normal_distribution<double> normal;
    Eigen::VectorXd b(K_.rows());
    for (int i = 0; i < b.size(); ++i) b(i) = normal(rng);
    const Eigen::VectorXd x = ldlt_.solve(b);
    return x.allFinite() && (K_ * x - b).norm() <= 1e-10 * b.norm();
  }

  SparseMatrix K_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  mutable Eigen::SparseLU<SparseMatrix> lu_;
  bool use_lu_ = false;
};

SparseMatrix block2(const SparseMatrix& A, const SparseMatrix& G, const SparseMatrix& C)
{
  const int n = static_cast<int>(A.rows()), m = static_cast<int>(C.rows());
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < G.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(G, k); it; ++it) {
      trip.emplace_back(it.row(), n + it.col(), it.value());
      trip.emplace_back(n + it.col(), it.row(), it.value());
    }
  for (int k = 0; k < C.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(C, k); it; ++it)
      trip.emplace_back(n + it.row(), n + it.col(), it.value());
  SparseMatrix B(n + m, n + m);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

// rhs - B x accumulated in long double.
Eigen::VectorXd extended_residual(const SparseMatrix& B, const Eigen::VectorXd& x, const Eigen::VectorXd& rhs)
{
  std::vector<long double> r(rhs.data(), rhs.data() + rhs.size());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it)
      r[it.row()] -= static_cast<long double>(it.value()) * x(it.col());
  Eigen::VectorXd out(rhs.size());
  for (int i = 0; i < out.size(); ++i) out(i) = static_cast<double>(r[i]);
  return out;
}

}  // namespace

EigResult eig_mixed(const SparseMatrix& A, const SparseMatrix& G, const SparseMatrix& Msig,
                    const SparseMatrix& M, int num, const EigOptions& opts, double alpha)
{
  const int n = static_cast<int>(A.rows());
  auto msig = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(Msig);
  if (msig->info() != Eigen::Success) throw SolverError("scalar mass matrix is not positive definite");

  Pencil pencil;
  pencil.n = n;
  pencil.M = &M;
  pencil.apply_K = [&A, &G, msig, alpha](const Eigen::VectorXd& x) {
    const Eigen::VectorXd s = msig->solve(G.transpose() * x);
    return Eigen::VectorXd(A * x + alpha * (G * s));
  };
  pencil.dense_K = [&A, &G, msig, alpha]() {
    const Eigen::MatrixXd S = msig->solve(Eigen::MatrixXd(G.transpose()));
    return Eigen::MatrixXd(Eigen::MatrixXd(A) + alpha * (Eigen::MatrixXd(G) * S));
  };

  std::shared_ptr<SymmetricSolver> block;
  const bool dense = opts.method == EigMethod::Dense ||
                     (opts.method == EigMethod::Auto && n <= opts.dense_limit);
  if (!dense) {
    const SparseMatrix shifted = A + opts.shift * M;
    const SparseMatrix C = (-1.0 / alpha) * Msig;
    block = std::make_shared<SymmetricSolver>(block2(shifted, G, C));
  }
  const int ns = static_cast<int>(Msig.rows());
  pencil.solve_shifted = [block, n, ns](const Eigen::VectorXd& y) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + ns);
    rhs.head(n) = y;
    return Eigen::VectorXd(block->solve(rhs).head(n));
  };
  return solve_pencil(pencil, num, opts);
}

EigResult eig_primal(const SparseMatrix& K, const SparseMatrix& M, int num, const EigOptions& opts)
{
  const int n = static_cast<int>(K.rows());
  Pencil pencil;
  pencil.n = n;
  pencil.M = &M;
  pencil.apply_K = [&K](const Eigen::VectorXd& x) { return Eigen::VectorXd(K * x); };
  pencil.dense_K = [&K]() { return Eigen::MatrixXd(K); };
  std::shared_ptr<SymmetricSolver> solver;
  const bool dense = opts.method == EigMethod::Dense ||
                     (opts.method == EigMethod::Auto && n <= opts.dense_limit);
  if (!dense) solver = std::make_shared<SymmetricSolver>(SparseMatrix(K + opts.shift * M));
  pencil.solve_shifted = [solver](const Eigen::VectorXd& y) { return solver->solve(y); };
  return solve_pencil(pencil, num, opts);
}

SourceResult solve_saddle(const SparseMatrix& A, const SparseMatrix& G, const SparseMatrix& Msig,
                          const Eigen::VectorXd& b, const SparseMatrix* M, const Eigen::MatrixXd* H)
{
  const int n = static_cast<int>(A.rows()), ns = static_cast<int>(Msig.rows());
  const int d = (H && M) ? static_cast<int>(H->cols()) : 0;

  SparseMatrix Gx = G;
  SparseMatrix C = -Msig;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + ns + d);
  rhs.head(n) = b;
  if (d > 0) {
    // Append columns M h_l to G and zero diagonal entries for the multipliers.
    const Eigen::MatrixXd MH = (*M) * (*H);
    rhs.head(n) -= MH * (H->transpose() * b);
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < G.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(G, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < n; ++i)
        if (MH(i, l) != 0.0) trip.emplace_back(i, ns + l, MH(i, l));
    Gx.resize(n, ns + d);
    Gx.setFromTriplets(trip.begin(), trip.end());
    SparseMatrix Cx(ns + d, ns + d);
    std::vector<Eigen::Triplet<double>> ct;
    for (int k = 0; k < C.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(C, k); it; ++it) ct.emplace_back(it.row(), it.col(), it.value());
    Cx.setFromTriplets(ct.begin(), ct.end());
    C = Cx;
  }
  const SparseMatrix B = block2(A, Gx, C);
  // Symmetric diagonal equilibration; the blocks differ by powers of h.
  Eigen::VectorXd dscale = Eigen::VectorXd::Zero(B.rows());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) dscale(k) = std::max(dscale(k), std::abs(it.value()));
  for (int i = 0; i < dscale.size(); ++i) dscale(i) = dscale(i) > 0.0 ? 1.0 / std::sqrt(dscale(i)) : 1.0;
  const SparseMatrix Bs = dscale.asDiagonal() * B * dscale.asDiagonal();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(Bs);
  lu.factorize(Bs);
  if (lu.info() != Eigen::Success) {
    int kernel = -1;
    if (B.rows() <= 3000) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(B)};
      const auto& s = svd.singularValues();
      kernel = 0;
      for (int i = 0; i < s.size(); ++i) kernel += s(i) < 1e-10 * s(0);
    }
    throw SolverError("saddle-point system is singular", kernel);
  }
  Eigen::VectorXd x = dscale.cwiseProduct(lu.solve(dscale.cwiseProduct(rhs)));
  for (int step = 0; step < 3; ++step)
    x += dscale.cwiseProduct(lu.solve(dscale.cwiseProduct(extended_residual(B, x, rhs))));
  SourceResult out;
  out.residual = (B * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!x.allFinite() || out.residual > 1e-8)
    throw SolverError("saddle-point solve inaccurate (relative residual " +
                      std::to_string(out.residual) + ")");
  out.u = x.head(n);
  out.sigma = x.segment(n, ns);
  if (d > 0) out.diagnostics["deflation_multiplier"] = x.tail(d).norm();
  return out;
}

SourceResult solve_spd(const SparseMatrix& K, const Eigen::VectorXd& b)
{
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw SolverError("factorization of the primal operator failed");
  SourceResult out;
  out.u = ldlt.solve(b);
  out.residual = (K * out.u - b).norm() / std::max(b.norm(), 1e-300);
  if (!out.u.allFinite() || out.residual > 1e-8)
    throw SolverError("primal solve inaccurate (relative residual " + std::to_string(out.residual) + ")");
  return out;
}

}  // namespace quadcurl
