#include "quadcurl/local_space.hpp"

#include "quadcurl/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace quadcurl {

std::string to_string(SpaceKind kind)
{
  switch (kind) {
    case SpaceKind::LagrangeScalar: return "LagrangeScalar";
    case SpaceKind::ArgyrisScalar: return "ArgyrisScalar";
    case SpaceKind::GradRotR: return "GradRotR";
    case SpaceKind::StokesRotW: return "StokesRotW";
    case SpaceKind::ArgyrisVector: return "ArgyrisVector";
  }
  return "?";
}

bool is_vector_kind(SpaceKind kind)
{
  return kind == SpaceKind::GradRotR || kind == SpaceKind::StokesRotW ||
         kind == SpaceKind::ArgyrisVector;
}

Frame element_frame(const Mesh& mesh, int t)
{
  return Frame{mesh.centroid(t), mesh.diameter(t)};
}

Poly barycentric(const Mesh& mesh, int t, int i, const Frame& frame)
{
  const auto& tri = mesh.triangles()[t];
  const Eigen::Vector2d p0 = mesh.vertices()[tri[0]];
  Eigen::Matrix2d J;
  J.col(0) = mesh.vertices()[tri[1]] - p0;
  J.col(1) = mesh.vertices()[tri[2]] - p0;
  const Eigen::Matrix2d Jinv = J.inverse();
  // (lambda_1, lambda_2) = Jinv (x - p0), lambda_0 = 1 - lambda_1 - lambda_2.
  Eigen::RowVector2d g;
  double c;
  if (i == 0) {
    g = -(Jinv.row(0) + Jinv.row(1));
    c = 1.0 - g.dot(p0);
  } else {
    g = Jinv.row(i - 1);
    c = -g.dot(p0);
  }
  // x = center + h xi
  return Poly::affine(c + g.dot(frame.center), frame.h * g(0), frame.h * g(1));
}

LocalBasis LocalBasis::combine(const Eigen::MatrixXd& C) const
{
  LocalBasis out;
  out.kind = kind;
  out.k = k;
  out.triangle = triangle;
  out.frame = frame;
  const int n = dim();
  for (int j = 0; j < C.cols(); ++j) {
    if (is_vector()) {
      PolyVec v;
      for (int i = 0; i < n; ++i)
        if (C(i, j) != 0.0) v += C(i, j) * vector[i];
      out.vector.push_back(v);
    } else {
      Poly p;
      for (int i = 0; i < n; ++i)
        if (C(i, j) != 0.0) p += C(i, j) * scalar[i];
      out.scalar.push_back(p);
    }
  }
  return out;
}

void check_supported(SpaceKind kind, int k)
{
  bool ok = false;
  switch (kind) {
    case SpaceKind::LagrangeScalar: ok = k >= 1 && k <= 6; break;
    case SpaceKind::ArgyrisScalar: ok = k == 5; break;
    case SpaceKind::GradRotR: ok = k >= 4 && k <= 6; break;
    case SpaceKind::StokesRotW: ok = k == 4; break;
    case SpaceKind::ArgyrisVector: ok = k == 5; break;
  }
  if (!ok)
    throw std::invalid_argument("unsupported element: " + to_string(kind) + " with k = " +
                                std::to_string(k));
}

int local_dimension(SpaceKind kind, int k)
{
  check_supported(kind, k);
  switch (kind) {
    case SpaceKind::LagrangeScalar: return Poly::dimension(k);
    case SpaceKind::ArgyrisScalar: return 21;
    case SpaceKind::GradRotR: return Poly::dimension(k) - 1 + Poly::dimension(k - 1);
    case SpaceKind::StokesRotW: return 24;
    case SpaceKind::ArgyrisVector: return 42;
  }
  return 0;
}

LocalBasis local_space(SpaceKind kind, int k, const Mesh& mesh, int t)
{
  check_supported(kind, k);
  if (t < 0 || t >= mesh.num_triangles()) throw std::out_of_range("triangle index");
  LocalBasis b;
  b.kind = kind;
  b.k = k;
  b.triangle = t;
  b.frame = element_frame(mesh, t);

  auto monomials = [](int lo, int hi, auto&& emit) {
    for (int d = lo; d <= hi; ++d)
      for (int j = 0; j <= d; ++j) emit(Poly::monomial(d - j, j));
  };

  switch (kind) {
    case SpaceKind::LagrangeScalar:
      monomials(0, k, [&](Poly p) { b.scalar.push_back(p); });
      break;
    case SpaceKind::ArgyrisScalar:
      monomials(0, 5, [&](Poly p) { b.scalar.push_back(p); });
      break;
    case SpaceKind::GradRotR:
      monomials(1, k, [&](Poly p) { b.vector.push_back(grad(p)); });
      monomials(0, k - 1, [&](Poly p) { b.vector.push_back(perp_scale(p)); });
      break;
    case SpaceKind::StokesRotW: {
      monomials(1, 5, [&](Poly p) { b.vector.push_back(grad(p)); });
      monomials(0, 1, [&](Poly p) { b.vector.push_back(perp_scale(p)); });
      const Poly bubble = barycentric(mesh, t, 0, b.frame) * barycentric(mesh, t, 1, b.frame) *
                          barycentric(mesh, t, 2, b.frame);
      b.vector.push_back(poincare(bubble));
      break;
    }
    case SpaceKind::ArgyrisVector:
      monomials(0, 5, [&](Poly p) { b.vector.push_back({p, Poly()}); });
      monomials(0, 5, [&](Poly p) { b.vector.push_back({Poly(), p}); });
      break;
  }
  return b;
}

EntityDofs entity_dofs(SpaceKind kind, int k)
{
  check_supported(kind, k);
  switch (kind) {
    case SpaceKind::LagrangeScalar: return {1, k - 1, (k - 1) * (k - 2) / 2};
    case SpaceKind::ArgyrisScalar: return {6, 1, 0};
    case SpaceKind::GradRotR: return {1, 2 * k - 2, (k - 1) * (k - 3)};
    case SpaceKind::StokesRotW: return {6, 2, 0};
    case SpaceKind::ArgyrisVector: return {12, 2, 0};
  }
  return {};
}

namespace {

struct Derivs {
  double v, x, y, xx, xy, yy;
};

Derivs derivs(const Poly& p, const Eigen::Vector2d& xi, double h)
{
  const Poly px = p.dx(), py = p.dy();
  return {p(xi),          px(xi) / h,          py(xi) / h,
          px.dx()(xi) / (h * h), px.dy()(xi) / (h * h), py.dy()(xi) / (h * h)};
}

void argyris_vertex(const Poly& p, const Eigen::Vector2d& xi, double h, std::vector<double>& out)
{
  const Derivs d = derivs(p, xi, h);
  out.insert(out.end(), {d.v, d.x, d.y, d.xx, d.xy, d.yy});
}

// Moments of a physical-space quantity along a globally oriented edge.
template <class F>
Eigen::VectorXd moments_on_edge(const Mesh& mesh, int e, const Frame& fr, int up_to, F&& f)
{
  const Eigen::Vector2d a = mesh.vertices()[mesh.edges()[e].v[0]];
  const Eigen::Vector2d b = mesh.vertices()[mesh.edges()[e].v[1]];
  return edge_moments([&](double t) { return f(fr.to_local(a + t * (b - a))); },
                      mesh.edge_length(e), up_to);
}

std::vector<double> column(const LocalBasis& B, int j, const Mesh& mesh)
{
  std::vector<double> out;
  const Frame& fr = B.frame;
  const double h = fr.h;
  const auto& tri = mesh.triangles()[B.triangle];
  const auto& tedges = mesh.tri_edges()[B.triangle];
  const int k = B.k;

  switch (B.kind) {
    case SpaceKind::LagrangeScalar: {
      const Poly& p = B.scalar[j];
      for (int i = 0; i < 3; ++i) out.push_back(p(fr.to_local(mesh.vertices()[tri[i]])));
      for (int i = 0; i < 3; ++i) {
        if (k < 2) break;
        const auto m = moments_on_edge(mesh, tedges[i], fr, k - 2,
                                       [&](const Eigen::Vector2d& xi) { return p(xi); });
        out.insert(out.end(), m.data(), m.data() + m.size());
      }
      break;
    }
    case SpaceKind::ArgyrisScalar: {
      const Poly& p = B.scalar[j];
      for (int i = 0; i < 3; ++i) argyris_vertex(p, fr.to_local(mesh.vertices()[tri[i]]), h, out);
      const Poly px = p.dx(), py = p.dy();
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d n = mesh.edge_normal(tedges[i]);
        const auto m = moments_on_edge(mesh, tedges[i], fr, 0, [&](const Eigen::Vector2d& xi) {
          return (n.x() * px(xi) + n.y() * py(xi)) / h;
        });
        out.push_back(m(0));
      }
      break;
    }
    case SpaceKind::GradRotR: {
      const PolyVec& v = B.vector[j];
      const Poly r = rot(v);
      for (int i = 0; i < 3; ++i) out.push_back(r(fr.to_local(mesh.vertices()[tri[i]])) / h);
      for (int i = 0; i < 3; ++i) {
        const int e = tedges[i];
        const Eigen::Vector2d tau = mesh.edge_tangent(e);
        const auto mt = moments_on_edge(mesh, e, fr, k - 1, [&](const Eigen::Vector2d& xi) {
          return tau.x() * v.x(xi) + tau.y() * v.y(xi);
        });
        out.insert(out.end(), mt.data(), mt.data() + mt.size());
        if (k >= 3) {
          const auto mr = moments_on_edge(mesh, e, fr, k - 3,
                                          [&](const Eigen::Vector2d& xi) { return r(xi) / h; });
          out.insert(out.end(), mr.data(), mr.data() + mr.size());
        }
      }
      break;
    }
    case SpaceKind::StokesRotW: {
      const PolyVec& v = B.vector[j];
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d xi = fr.to_local(mesh.vertices()[tri[i]]);
        const Derivs a = derivs(v.x, xi, h), b = derivs(v.y, xi, h);
        out.insert(out.end(), {a.v, b.v, a.x, a.y, b.x, b.y});
      }
      for (int i = 0; i < 3; ++i) {
        const int e = tedges[i];
        out.push_back(moments_on_edge(mesh, e, fr, 0, [&](const Eigen::Vector2d& xi) {
                        return v.x(xi);
                      })(0));
        out.push_back(moments_on_edge(mesh, e, fr, 0, [&](const Eigen::Vector2d& xi) {
                        return v.y(xi);
                      })(0));
      }
      break;
    }
    case SpaceKind::ArgyrisVector: {
      const PolyVec& v = B.vector[j];
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d xi = fr.to_local(mesh.vertices()[tri[i]]);
        argyris_vertex(v.x, xi, h, out);
        argyris_vertex(v.y, xi, h, out);
      }
      const Poly ax = v.x.dx(), ay = v.x.dy(), bx = v.y.dx(), by = v.y.dy();
      for (int i = 0; i < 3; ++i) {
        const int e = tedges[i];
        const Eigen::Vector2d n = mesh.edge_normal(e);
        out.push_back(moments_on_edge(mesh, e, fr, 0, [&](const Eigen::Vector2d& xi) {
                        return (n.x() * ax(xi) + n.y() * ay(xi)) / h;
                      })(0));
        out.push_back(moments_on_edge(mesh, e, fr, 0, [&](const Eigen::Vector2d& xi) {
                        return (n.x() * bx(xi) + n.y() * by(xi)) / h;
                      })(0));
      }
      break;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd functional_matrix(const LocalBasis& basis, const Mesh& mesh)
{
  const EntityDofs ed = entity_dofs(basis.kind, basis.k);
  const int nf = 3 * ed.per_vertex + 3 * ed.per_edge;
  Eigen::MatrixXd D(nf, basis.dim());
  for (int j = 0; j < basis.dim(); ++j) {
    const std::vector<double> c = column(basis, j, mesh);
    if (static_cast<int>(c.size()) != nf) throw std::logic_error("functional count mismatch");
    D.col(j) = Eigen::Map<const Eigen::VectorXd>(c.data(), nf);
  }
  return D;
}

Eigen::MatrixXd nodal_coefficients(const LocalBasis& generators, const Mesh& mesh)
{
  const Eigen::MatrixXd D = functional_matrix(generators, mesh);
  const int nf = static_cast<int>(D.rows()), m = static_cast<int>(D.cols());
  if (nf > m) throw std::runtime_error("more functionals than local functions");

  // Row scaling leaves the dual basis unchanged and makes the rank test scale free.
  Eigen::VectorXd s(nf);
  for (int i = 0; i < nf; ++i) s(i) = 1.0 / std::max(D.row(i).norm(), 1e-300);
  const Eigen::MatrixXd Ds = s.asDiagonal() * D;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ds, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (nf > 0 && sv(nf - 1) < 1e-10 * sv(0))
    throw std::runtime_error("element functionals of " + to_string(generators.kind) +
                             " are not unisolvent on triangle " +
                             std::to_string(generators.triangle));

  Eigen::MatrixXd C(m, m);
  const Eigen::MatrixXd& U = svd.matrixU();
  const Eigen::MatrixXd& V = svd.matrixV();
  // Ds^+ = V_r diag(1/s) U^T; the dual basis of D is Ds^+ diag(s).
  C.leftCols(nf) = V.leftCols(nf) * sv.head(nf).cwiseInverse().asDiagonal() * U.transpose() *
                   s.asDiagonal();
  C.rightCols(m - nf) = V.rightCols(m - nf);
  return C;
}

}  // namespace quadcurl
