#include "quadcurl/assembly.hpp"

#include "quadcurl/quadrature.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <stdexcept>

namespace quadcurl {

namespace {

int poly_degree(const FESpace& s)
{
  switch (s.kind) {
    case SpaceKind::ArgyrisScalar:
    case SpaceKind::ArgyrisVector: return 5;
    case SpaceKind::StokesRotW: return 4;
    default: return s.k;
  }
}

// Columns: local nodal functions; rows: quadrature points.
struct Tables {
  Eigen::MatrixXd vx, vy, rot, div, gx, gy;  // scalar spaces: vx = value, (gx, gy) = grad
};

Tables tables(const FESpace& sp, int t, const std::vector<Eigen::Vector2d>& pts)
{
  const LocalBasis& B = sp.local[t];
  const int nq = static_cast<int>(pts.size()), m = B.dim();
  const double h = B.frame.h;
  Tables tb;
  tb.vx.resize(nq, m);
  tb.gx.resize(nq, m);
  tb.gy.resize(nq, m);
  std::vector<Eigen::Vector2d> xi(nq);
  for (int q = 0; q < nq; ++q) xi[q] = B.frame.to_local(pts[q]);
  if (B.is_vector()) {
    tb.vy.resize(nq, m);
    tb.rot.resize(nq, m);
    tb.div.resize(nq, m);
    for (int j = 0; j < m; ++j) {
      const PolyVec& u = B.vector[j];
      const Poly r = rot(u), d = div(u), rx = r.dx(), ry = r.dy();
      for (int q = 0; q < nq; ++q) {
        tb.vx(q, j) = u.x(xi[q]);
        tb.vy(q, j) = u.y(xi[q]);
        tb.rot(q, j) = r(xi[q]) / h;
        tb.div(q, j) = d(xi[q]) / h;
        tb.gx(q, j) = rx(xi[q]) / (h * h);
        tb.gy(q, j) = ry(xi[q]) / (h * h);
      }
    }
  } else {
    for (int j = 0; j < m; ++j) {
      const Poly& p = B.scalar[j];
      const Poly px = p.dx(), py = p.dy();
      for (int q = 0; q < nq; ++q) {
        tb.vx(q, j) = p(xi[q]);
        tb.gx(q, j) = px(xi[q]) / h;
        tb.gy(q, j) = py(xi[q]) / h;
      }
    }
  }
  return tb;
}

void scatter(const FESpace& row, const FESpace& col, int t, const Eigen::MatrixXd& AK,
             std::vector<Eigen::Triplet<double>>& trip)
{
  const int mr = row.local_dim, mc = col.local_dim;
  for (int i = 0; i < mr; ++i)
    for (SparseRowMajor::InnerIterator ri(row.T, t * mr + i); ri; ++ri)
      for (int j = 0; j < mc; ++j) {
        const double a = AK(i, j) * ri.value();
        if (a == 0.0) continue;
        for (SparseRowMajor::InnerIterator ci(col.T, t * mc + j); ci; ++ci)
          trip.emplace_back(ri.col(), ci.col(), a * ci.value());
      }
}

}  // namespace

int quadrature_degree(const FESpace& a, const FESpace& b)
{
  return 2 * std::max(poly_degree(a), poly_degree(b)) + 2;
}

ElementQuadrature element_quadrature(const Mesh& mesh, int t, int degree)
{
  const QuadratureRule& rule = quadrature_rule(std::min(degree, 20));
  const auto& tri = mesh.triangles()[t];
  const Eigen::Vector2d p0 = mesh.vertices()[tri[0]];
  const Eigen::Vector2d e1 = mesh.vertices()[tri[1]] - p0, e2 = mesh.vertices()[tri[2]] - p0;
  const double jac = 2.0 * mesh.signed_area(t);
  ElementQuadrature eq;
  eq.weights.resize(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    eq.points.push_back(p0 + rule.points[q].x() * e1 + rule.points[q].y() * e2);
    eq.weights(q) = rule.weights[q] * jac;
  }
  return eq;
}

SparseMatrix assemble(const FESpace& row, const FESpace& col, FormKind form)
{
  if (row.mesh != col.mesh && row.mesh->num_triangles() != col.mesh->num_triangles())
    throw std::invalid_argument("assemble: spaces live on different meshes");
  const bool vec_row = row.is_vector(), vec_col = col.is_vector();
  switch (form) {
    case FormKind::GradRotGradRot:
    case FormKind::DivDiv:
    case FormKind::MassVec:
      if (!vec_row || !vec_col) throw std::invalid_argument("assemble: form needs vector spaces");
      break;
    case FormKind::GradCoupling:
      if (!vec_row || vec_col)
        throw std::invalid_argument("assemble: GradCoupling pairs a vector row space with a scalar column space");
      break;
    case FormKind::MassScalar:
    case FormKind::StiffScalar:
      if (vec_row || vec_col) throw std::invalid_argument("assemble: form needs scalar spaces");
      break;
  }

  const Mesh& mesh = *row.mesh;
  const int deg = quadrature_degree(row, col);
  std::vector<Eigen::Triplet<double>> trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementQuadrature eq = element_quadrature(mesh, t, deg);
    const Tables a = tables(row, t, eq.points);
    const Tables b = (&row == &col) ? a : tables(col, t, eq.points);
    const auto W = eq.weights.asDiagonal();
    Eigen::MatrixXd AK;
    switch (form) {
      case FormKind::GradRotGradRot:
        AK = a.gx.transpose() * W * b.gx + a.gy.transpose() * W * b.gy;
        break;
      case FormKind::DivDiv: AK = a.div.transpose() * W * b.div; break;
      case FormKind::MassVec: AK = a.vx.transpose() * W * b.vx + a.vy.transpose() * W * b.vy; break;
      case FormKind::GradCoupling:
        AK = a.vx.transpose() * W * b.gx + a.vy.transpose() * W * b.gy;
        break;
      case FormKind::MassScalar: AK = a.vx.transpose() * W * b.vx; break;
      case FormKind::StiffScalar:
        AK = a.gx.transpose() * W * b.gx + a.gy.transpose() * W * b.gy;
        break;
    }
    scatter(row, col, t, AK, trip);
  }
  SparseMatrix A(row.global_dim(), col.global_dim());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

Eigen::VectorXd assemble_load(const FESpace& space, const VectorFunction& f)
{
  if (!space.is_vector()) throw std::invalid_argument("assemble_load: vector load needs a vector space");
  const Mesh& mesh = *space.mesh;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.global_dim());
  const int deg = quadrature_degree(space, space);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementQuadrature eq = element_quadrature(mesh, t, deg);
    const Tables tb = tables(space, t, eq.points);
    Eigen::VectorXd fx(eq.points.size()), fy(eq.points.size());
    for (std::size_t q = 0; q < eq.points.size(); ++q) {
      const Eigen::Vector2d v = f(eq.points[q]);
      fx(q) = v.x() * eq.weights(q);
      fy(q) = v.y() * eq.weights(q);
    }
    const Eigen::VectorXd bl = tb.vx.transpose() * fx + tb.vy.transpose() * fy;
    for (int j = 0; j < space.local_dim; ++j)
      for (SparseRowMajor::InnerIterator it(space.T, t * space.local_dim + j); it; ++it)
        b(it.col()) += it.value() * bl(j);
  }
  return b;
}

Eigen::VectorXd assemble_load(const FESpace& space, const Eigen::Vector2d& f)
{
  return assemble_load(space, VectorFunction([f](const Eigen::Vector2d&) { return f; }));
}

Eigen::VectorXd assemble_load(const FESpace& space, const ScalarFunction& f)
{
  if (space.is_vector()) throw std::invalid_argument("assemble_load: scalar load needs a scalar space");
  const Mesh& mesh = *space.mesh;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.global_dim());
  const int deg = quadrature_degree(space, space);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementQuadrature eq = element_quadrature(mesh, t, deg);
    const Tables tb = tables(space, t, eq.points);
    Eigen::VectorXd fw(eq.points.size());
    for (std::size_t q = 0; q < eq.points.size(); ++q) fw(q) = f(eq.points[q]) * eq.weights(q);
    const Eigen::VectorXd bl = tb.vx.transpose() * fw;
    for (int j = 0; j < space.local_dim; ++j)
      for (SparseRowMajor::InnerIterator it(space.T, t * space.local_dim + j); it; ++it)
        b(it.col()) += it.value() * bl(j);
  }
  return b;
}

double symmetry_defect(const SparseMatrix& A)
{
  const SparseMatrix D = A - SparseMatrix(A.transpose());
  double dmax = 0.0, amax = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(D, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  return amax > 0 ? dmax / amax : 0.0;
}

void export_matrix_market(const SparseMatrix& A, const std::string& path)
{
  if (!Eigen::saveMarket(A, path)) throw std::runtime_error("cannot write " + path);
}

}  // namespace quadcurl
