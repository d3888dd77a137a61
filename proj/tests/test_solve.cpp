#include "quadcurl/assembly.hpp"
#include "quadcurl/solve.hpp"

#include "support.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

using namespace quadcurl;

namespace {

struct Mixed {
  SparseMatrix A, G, Msig, M;
};

Mixed mixed(DomainTag tag, int level, BcFlags vbc = {true, false, false})
{
  auto mesh = std::make_shared<const Mesh>(generate_domain(tag, level));
  const FESpace V = build_conforming_space(mesh, SpaceKind::GradRotR, 4, vbc);
  const FESpace S = build_conforming_space(mesh, SpaceKind::LagrangeScalar, 4);
  return {assemble(V, FormKind::GradRotGradRot), assemble(V, S, FormKind::GradCoupling),
          assemble(S, FormKind::MassScalar), assemble(V, FormKind::MassVec)};
}

Eigen::MatrixXd reduced_operator(const Mixed& m)
{
  const Eigen::MatrixXd G(m.G);
  return Eigen::MatrixXd(m.A) + G * Eigen::MatrixXd(m.Msig).ldlt().solve(G.transpose());
}

void check_pairs(const EigResult& r, const Eigen::MatrixXd& K, const SparseMatrix& M)
{
  const double knorm = K.norm();
  for (int i = 0; i < r.eigenvalues.size(); ++i) {
    const Eigen::VectorXd x = r.eigenvectors.col(i);
    const double res = (K * x - r.eigenvalues(i) * (M * x)).norm() / (knorm * x.norm());
    CHECK(res <= 1e-8);
    CHECK(r.residuals(i) <= 1e-8);
  }
  const Eigen::MatrixXd gram = r.eigenvectors.transpose() * (M * r.eigenvectors);
  CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-8);
}

}  // namespace

TEST_CASE("zero classification")
{
  Eigen::VectorXd l(5);
  l << -3e-14, 2e-13, 5.9, 6.1, 20.0;
  CHECK(count_zero_eigenvalues(l, 1e-6) == 2);
  l << 1.0, 1.0, 2.0, 4.0, 4.0;
  CHECK(count_zero_eigenvalues(l, 1e-6) == 0);
  l << 1e-12, 1e-3, 1.0, 2.0, 3.0;
  CHECK(count_zero_eigenvalues(l, 1e-6) == 1);
}

TEST_CASE("K = M has unit spectrum")
{
  const Mixed m = mixed(DomainTag::Omega1, 0);
  for (EigMethod method : {EigMethod::Dense, EigMethod::Iterative}) {
    EigOptions opts;
    opts.method = method;
    const EigResult r = eig_primal(m.M, m.M, 6, opts);
    REQUIRE(r.eigenvalues.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(r.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("mixed eigenproblem: dense and iterative paths agree")
{
  const Mixed m = mixed(DomainTag::Omega1, 0);
  const Eigen::MatrixXd K = reduced_operator(m);
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-10 * K.cwiseAbs().maxCoeff());

  EigOptions dense, iter;
  dense.method = EigMethod::Dense;
  iter.method = EigMethod::Iterative;
  const EigResult a = eig_mixed(m.A, m.G, m.Msig, m.M, 10, dense);
  const EigResult b = eig_mixed(m.A, m.G, m.Msig, m.M, 10, iter);
  REQUIRE(a.eigenvalues.size() == 10);
  REQUIRE(b.eigenvalues.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(a.eigenvalues(i) - b.eigenvalues(i)) <= 1e-8 * a.eigenvalues(i));
  check_pairs(a, K, m.M);
  check_pairs(b, K, m.M);
  CHECK(a.zero_count == 0);
  CHECK(a.eigenvalues(0) / (M_PI * M_PI) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("mixed eigenproblem on the domain with a hole has one zero mode")
{
  const Mixed m = mixed(DomainTag::Omega2, 0);
  EigOptions iter;
  iter.method = EigMethod::Iterative;
  const EigResult r = eig_mixed(m.A, m.G, m.Msig, m.M, 4, iter);
  CHECK(r.zero_count == 1);
  CHECK(std::abs(r.eigenvalues(0)) < 1e-6 * r.eigenvalues(1));
  check_pairs(r, reduced_operator(m), m.M);
}

TEST_CASE("primal eigenproblem: dense and iterative paths agree")
{
  auto mesh = std::make_shared<const Mesh>(generate_domain(DomainTag::Omega1, 0));
  const FESpace W = build_conforming_space(mesh, SpaceKind::StokesRotW, 4, {true, true, false});
  const SparseMatrix K = assemble(W, FormKind::GradRotGradRot) + assemble(W, FormKind::DivDiv);
  const SparseMatrix M = assemble(W, FormKind::MassVec);
  EigOptions dense, iter;
  dense.method = EigMethod::Dense;
  iter.method = EigMethod::Iterative;
  const EigResult a = eig_primal(K, M, 8, dense);
  const EigResult b = eig_primal(K, M, 8, iter);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(a.eigenvalues(i) - b.eigenvalues(i)) <= 1e-8 * a.eigenvalues(i));
  check_pairs(b, Eigen::MatrixXd(K), M);
}

TEST_CASE("saddle-point solves")
{
  const Mixed m = mixed(DomainTag::Omega1, 0);
  const SourceResult zero = solve_saddle(m.A, m.G, m.Msig, Eigen::VectorXd::Zero(m.A.rows()));
  CHECK(zero.u.norm() == 0.0);
  CHECK(zero.sigma.norm() == 0.0);

  std::mt19937 rng(12);
  const Eigen::VectorXd b = test::random_vector(static_cast<int>(m.A.rows()), rng);
  const SourceResult r = solve_saddle(m.A, m.G, m.Msig, b);
  CHECK(r.residual < 1e-10);
  CHECK((m.A * r.u + m.G * r.sigma - b).norm() < 1e-9 * b.norm());
  CHECK((m.G.transpose() * r.u - m.Msig * r.sigma).norm() < 1e-9 * b.norm());
}

TEST_CASE("saddle-point system with an undeflated harmonic form is singular")
{
  const Mixed m = mixed(DomainTag::Omega2, 0);
  std::mt19937 rng(13);
  const Eigen::VectorXd b = test::random_vector(static_cast<int>(m.A.rows()), rng);
  CHECK_THROWS_AS(solve_saddle(m.A, m.G, m.Msig, b), SolverError);

  EigOptions opts;
  const EigResult r = eig_mixed(m.A, m.G, m.Msig, m.M, 3, opts);
  REQUIRE(r.zero_count == 1);
  const Eigen::MatrixXd H = r.eigenvectors.leftCols(1);
  const SourceResult s = solve_saddle(m.A, m.G, m.Msig, b, &m.M, &H);
  CHECK(s.residual < 1e-10);
  CHECK(std::abs(H.col(0).dot(m.M * s.u)) < 1e-8 * s.u.norm());
}

TEST_CASE("SPD solve and norm estimate")
{
  const Mixed m = mixed(DomainTag::Omega1, 0);
  std::mt19937 rng(14);
  const Eigen::VectorXd b = test::random_vector(static_cast<int>(m.M.rows()), rng);
  const SourceResult r = solve_spd(m.M, b);
  CHECK(r.residual < 1e-10);
  const double est = operator_norm_estimate([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(m.M * x); },
                                            static_cast<int>(m.M.rows()), 7u, 200);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(m.M)};
  CHECK(est == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-3));
}
