#include "quadcurl/assembly.hpp"
#include "quadcurl/fespace.hpp"
#include "quadcurl/quadrature.hpp"

#include "support.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <filesystem>
#include <fstream>

using namespace quadcurl;

namespace {

std::shared_ptr<const Mesh> domain(DomainTag tag, int level = 0)
{
  return std::make_shared<const Mesh>(generate_domain(tag, level));
}

int kernel_dimension(const SparseMatrix& A, const SparseMatrix& M)
{
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(A), Eigen::MatrixXd(M)};
  const Eigen::VectorXd& l = es.eigenvalues();
  const double top = l.cwiseAbs().maxCoeff();
  int n = 0;
  for (int i = 0; i < l.size(); ++i) n += l(i) < 1e-8 * top;
  return n;
}

}  // namespace

TEST_CASE("assembled forms are symmetric and mass matrices positive definite")
{
  const auto mesh = domain(DomainTag::Omega3);
  const FESpace V = build_conforming_space(mesh, SpaceKind::GradRotR, 4, {true, false, false});
  const FESpace W = build_conforming_space(mesh, SpaceKind::StokesRotW, 4, {true, true, false});
  const FESpace S = build_conforming_space(mesh, SpaceKind::LagrangeScalar, 4);
  for (const FESpace* sp : {&V, &W}) {
    CHECK(symmetry_defect(assemble(*sp, FormKind::GradRotGradRot)) < 1e-12);
    CHECK(symmetry_defect(assemble(*sp, FormKind::DivDiv)) < 1e-12);
    CHECK(symmetry_defect(assemble(*sp, FormKind::MassVec)) < 1e-12);
  }
  CHECK(symmetry_defect(assemble(S, FormKind::MassScalar)) < 1e-12);
  CHECK(symmetry_defect(assemble(S, FormKind::StiffScalar)) < 1e-12);

  std::mt19937 rng(9);
  const SparseMatrix M = assemble(V, FormKind::MassVec);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd x = test::random_vector(V.global_dim(), rng);
    CHECK(x.dot(M * x) > 0.0);
  }
  CHECK(Eigen::SimplicialLLT<SparseMatrix>(M).info() == Eigen::Success);
}

TEST_CASE("gradients: grad rot kernel and mixed coupling identity")
{
  const auto mesh = domain(DomainTag::Omega1);
  const FESpace V = build_conforming_space(mesh, SpaceKind::GradRotR, 4, {true, false, false});
  const FESpace S = build_conforming_space(mesh, SpaceKind::LagrangeScalar, 4);
  const SparseMatrix A = assemble(V, FormKind::GradRotGradRot);
  const SparseMatrix M = assemble(V, FormKind::MassVec);
  const SparseMatrix G = assemble(V, S, FormKind::GradCoupling);
  const SparseMatrix Ks = assemble(S, FormKind::StiffScalar);
  std::mt19937 rng(10);
  const Eigen::VectorXd s = test::random_vector(S.global_dim(), rng);
  const Eigen::VectorXd c = Eigen::SimplicialLDLT<SparseMatrix>(M).solve(G * s);
  const Eigen::VectorXd Ac = A * c;
  CHECK(Ac.norm() < 1e-9 * Eigen::MatrixXd(A).norm() * c.norm());
  const Eigen::VectorXd lhs = G.transpose() * c, rhs = Ks * s;
  CHECK((lhs - rhs).norm() < 1e-10 * rhs.norm());
}

TEST_CASE("grad rot kernel has dimension dim S_h - 1 + betti1")
{
  for (DomainTag tag : {DomainTag::Omega1, DomainTag::Omega2}) {
    const auto mesh = domain(tag);
    const FESpace V = build_conforming_space(mesh, SpaceKind::GradRotR, 4, {true, false, false});
    const FESpace S = build_conforming_space(mesh, SpaceKind::LagrangeScalar, 4);
    const int betti = compute_topology(*mesh).betti1;
    CHECK(kernel_dimension(assemble(V, FormKind::GradRotGradRot), assemble(V, FormKind::MassVec)) ==
          S.global_dim() - 1 + betti);
  }
}

TEST_CASE("load vectors")
{
  const auto mesh = domain(DomainTag::Omega1);
  const FESpace V = build_conforming_space(mesh, SpaceKind::GradRotR, 4);
  const FESpace S = build_conforming_space(mesh, SpaceKind::LagrangeScalar, 4);
  CHECK(assemble_load(V, Eigen::Vector2d(0, 0)).norm() == 0.0);

  // (1,0) against grad s_h equals the boundary flux of s_h n_1.
  std::mt19937 rng(11);
  const Eigen::VectorXd s = test::random_vector(S.global_dim(), rng);
  const SparseMatrix M = assemble(V, FormKind::MassVec);
  const Eigen::VectorXd c = Eigen::SimplicialLDLT<SparseMatrix>(M).solve(assemble(V, S, FormKind::GradCoupling) * s);
  const double lhs = c.dot(assemble_load(V, Eigen::Vector2d(1, 0)));
  const Rule1D g = gauss_legendre(6);
  double rhs = 0.0;
  for (int e : mesh->boundary_edges()) {
    const Edge& ed = mesh->edges()[e];
    const Eigen::Vector2d a = mesh->vertices()[ed.v[0]], b = mesh->vertices()[ed.v[1]];
    std::vector<Eigen::Vector2d> pts;
    for (double t : g.points) pts.push_back(a + t * (b - a));
    const auto vals = eval_field(S, s, ed.tri[0], pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      rhs += g.weights[i] * mesh->edge_length(e) * vals[i].value.x() * mesh->outward_normal(e).x();
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // Function and constant overloads agree.
  const Eigen::VectorXd b1 = assemble_load(V, Eigen::Vector2d(1, 0));
  const Eigen::VectorXd b2 = assemble_load(V, VectorFunction([](const Eigen::Vector2d&) { return Eigen::Vector2d(1, 0); }));
  CHECK((b1 - b2).norm() < 1e-13 * b1.norm());
}

TEST_CASE("quadratic fields are integrated exactly at every level")
{
  for (int level = 0; level <= 1; ++level) {
    const auto mesh = domain(DomainTag::Omega1, level);
    const FESpace S = build_conforming_space(mesh, SpaceKind::LagrangeScalar, 2);
    const SparseMatrix Ms = assemble(S, FormKind::MassScalar);
    const Eigen::VectorXd b = assemble_load(S, ScalarFunction([](const Eigen::Vector2d& p) { return p.x() * p.x(); }));
    const Eigen::VectorXd c = Eigen::SimplicialLDLT<SparseMatrix>(Ms).solve(b);
    CHECK(c.dot(Ms * c) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(c.dot(assemble(S, FormKind::StiffScalar) * c) == doctest::Approx(4.0 / 3.0).epsilon(1e-11));
  }
}

TEST_CASE("incompatible spaces are rejected")
{
  const auto m0 = domain(DomainTag::Omega1), m1 = domain(DomainTag::Omega1, 1);
  const FESpace V = build_conforming_space(m0, SpaceKind::GradRotR, 4);
  const FESpace S = build_conforming_space(m0, SpaceKind::LagrangeScalar, 2);
  const FESpace S1 = build_conforming_space(m1, SpaceKind::LagrangeScalar, 2);
  CHECK_THROWS_AS(assemble(S, V, FormKind::GradCoupling), std::invalid_argument);
  CHECK_THROWS_AS(assemble(S, FormKind::GradRotGradRot), std::invalid_argument);
  CHECK_THROWS_AS(assemble(V, FormKind::MassScalar), std::invalid_argument);
  CHECK_THROWS_AS(assemble(S, S1, FormKind::MassScalar), std::invalid_argument);
  CHECK(quadrature_degree(V, V) == 10);
}

TEST_CASE("MatrixMarket export")
{
  const auto mesh = domain(DomainTag::Omega1);
  const SparseMatrix K = assemble(build_conforming_space(mesh, SpaceKind::LagrangeScalar, 1), FormKind::StiffScalar);
  const auto path = std::filesystem::temp_directory_path() / "quadcurl_stiff.mtx";
  export_matrix_market(K, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("%%MatrixMarket matrix coordinate", 0) == 0);
  CHECK(header.find("real") != std::string::npos);
  std::filesystem::remove(path);
}
