#include "quadcurl/solve.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace quadcurl {

namespace {

// Block Krylov subspace for the M-symmetric operator (K + sM)^{-1} M with
// Rayleigh-Ritz extraction and thick restarts.  Stores Op(V) so that Ritz
// vectors carry their images and restarts need no extra solves.
class KrylovSpace {
public:
  KrylovSpace(const Pencil& p, int capacity)
      : pencil_(p), V_(p.n, capacity), MV_(p.n, capacity), AV_(p.n, capacity),
        H_(capacity, capacity)
  {
  }

  using Block = Eigen::Block<const Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true>;
  Block V() const { return V_.leftCols(m_); }
  Block MV() const { return MV_.leftCols(m_); }
  Block AV() const { return AV_.leftCols(m_); }

  int size() const { return m_; }
  int capacity() const { return static_cast<int>(V_.cols()); }

  // Appends the M-orthonormalized part of X that is new to the space.
  int expand(const Eigen::MatrixXd& X)
  {
    int added = 0;
    for (int c = 0; c < X.cols() && m_ < capacity(); ++c) {
      Eigen::VectorXd x = X.col(c);
      const double start = m_norm(x);
      if (start == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass)
        if (m_ > 0) x -= V() * (MV().transpose() * x);
      const double nrm = m_norm(x);
      if (nrm < 1e-10 * start) continue;
      x /= nrm;
      V_.col(m_) = x;
      MV_.col(m_) = (*pencil_.M) * x;
      AV_.col(m_) = pencil_.solve_shifted(MV_.col(m_));
      ++m_;
      const Eigen::VectorXd h = MV().transpose() * AV_.col(m_ - 1);
      H_.row(m_ - 1).head(m_) = h.transpose();
      H_.col(m_ - 1).head(m_) = h;
      ++added;
    }
    return added;
  }

  // Ritz pairs of the operator, ordered by decreasing theta.
  void rayleigh_ritz(Eigen::VectorXd& theta, Eigen::MatrixXd& Y) const
  {
    Eigen::MatrixXd H = H_.topLeftCorner(m_, m_);
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    theta = es.eigenvalues().reverse();
    Y = es.eigenvectors().rowwise().reverse();
  }

  void restart(const Eigen::MatrixXd& Y)
  {
    const int k = static_cast<int>(Y.cols());
    const Eigen::MatrixXd v = V() * Y, mv = MV() * Y, av = AV() * Y;
    const Eigen::MatrixXd h = Y.transpose() * H_.topLeftCorner(m_, m_) * Y;
    m_ = k;
    V_.leftCols(k) = v;
    MV_.leftCols(k) = mv;
    AV_.leftCols(k) = av;
    H_.topLeftCorner(k, k) = h;
  }

  double m_norm(const Eigen::VectorXd& x) const
  {
    return std::sqrt(std::max(0.0, x.dot((*pencil_.M) * x)));
  }

private:
  const Pencil& pencil_;
  int m_ = 0;
  Eigen::MatrixXd V_, MV_, AV_, H_;
};

}  // namespace

EigResult solve_pencil_iterative(const Pencil& pencil, int num, const EigOptions& opts,
                                 double knorm)
{
  const int n = pencil.n;
  const int p = std::max(1, std::min(opts.block_size, n));
  const int want = std::min(num, n);
  const int keep = std::min(n, want + 2 * p);
  const int max_basis = std::max(opts.max_basis, keep + 2 * p);

  KrylovSpace space(pencil, std::min(n, max_basis));
  std::mt19937 rng(opts.seed);
  std::normal_distribution<double> normal;
  auto random_block = [&](int cols) {
    Eigen::MatrixXd X(n, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < n; ++i) X(i, j) = normal(rng);
    return X;
  };
  space.expand(random_block(p));

  EigResult res;
  res.method = "shift-invert block Krylov";
  const double tol = opts.tolerance;
  // Ritz residuals stall at the accuracy of the shifted solves; a pair whose
  // residual is below kLooseTol and has not halved for kPatience steps is kept.
  constexpr double kLooseTol = 1e-5;
  constexpr int kPatience = 5;
  std::vector<double> best(want, std::numeric_limits<double>::infinity());
  std::vector<int> stalled(want, 0);
  Eigen::VectorXd theta;
  Eigen::MatrixXd Y;
  bool converged = false;
  for (int iter = 0; iter < 5000 && !converged; ++iter) {
    space.rayleigh_ritz(theta, Y);
    const int m = space.size();
    const int track = std::min(m, want + p);
    Eigen::MatrixXd X = space.V() * Y.leftCols(track);
    Eigen::MatrixXd R = space.AV() * Y.leftCols(track) - X * theta.head(track).asDiagonal();
    std::vector<int> open;
    bool done = m >= want || m == n;
    for (int j = 0; j < track; ++j) {
      const double r = space.m_norm(R.col(j)) / std::abs(theta(j));
      if (j < want) {
        if (r < 0.5 * best[j]) {
          best[j] = r;
          stalled[j] = 0;
        } else {
          ++stalled[j];
        }
        if (r <= tol || (r <= kLooseTol && stalled[j] >= kPatience)) continue;
        done = m == n;
        open.push_back(j);
      } else if (r > tol && static_cast<int>(open.size()) < p) {
        open.push_back(j);
      }
    }

    if (done) {
      res.eigenvalues.resize(want);
      res.eigenvectors = X.leftCols(want);
      res.residuals.resize(want);
      for (int j = 0; j < want; ++j) {
        const double lambda = 1.0 / theta(j) - opts.shift;
        const Eigen::VectorXd x = res.eigenvectors.col(j);
        const Eigen::VectorXd r = pencil.apply_K(x) - lambda * ((*pencil.M) * x);
        res.eigenvalues(j) = lambda;
        res.residuals(j) = r.norm() / (knorm * x.norm());
      }
      converged = true;
      continue;
    }

    if (m + p > space.capacity() && space.capacity() < n) {
      space.restart(Y.leftCols(keep));
      continue;
    }
    Eigen::MatrixXd E(n, 0);
    for (int j : open) {
      E.conservativeResize(n, E.cols() + 1);
      E.col(E.cols() - 1) = R.col(j);
      if (E.cols() == p) break;
    }
    if (E.cols() == 0 || space.expand(E) == 0) space.expand(random_block(p));
  }

  if (!converged) throw SolverError("iterative eigensolver did not converge");
  // ascending order
  std::vector<int> order(want);
  for (int j = 0; j < want; ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return res.eigenvalues(a) < res.eigenvalues(b); });
  EigResult sorted = res;
  for (int j = 0; j < want; ++j) {
    sorted.eigenvalues(j) = res.eigenvalues(order[j]);
    sorted.eigenvectors.col(j) = res.eigenvectors.col(order[j]);
    sorted.residuals(j) = res.residuals(order[j]);
  }
  return sorted;
}

}  // namespace quadcurl
