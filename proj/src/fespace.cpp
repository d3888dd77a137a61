#include "quadcurl/fespace.hpp"

#include "quadcurl/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace quadcurl {

int FESpace::nodal_index(int t, int j) const
{
  const int pv = dofs.per_vertex, pe = dofs.per_edge;
  if (j < 3 * pv) return mesh->triangles()[t][j / pv] * pv + j % pv;
  j -= 3 * pv;
  const int nv = mesh->num_vertices();
  if (j < 3 * pe) return nv * pv + mesh->tri_edges()[t][j / pe] * pe + j % pe;
  j -= 3 * pe;
  return nv * pv + mesh->num_edges() * pe + t * dofs.interior + j;
}

Eigen::VectorXd FESpace::local_coeffs(const Eigen::VectorXd& x, int t) const
{
  if (x.size() != global_dim()) throw std::invalid_argument("coefficient length mismatch");
  Eigen::VectorXd c(local_dim);
  for (int j = 0; j < local_dim; ++j) {
    double s = 0.0;
    for (SparseRowMajor::InnerIterator it(T, t * local_dim + j); it; ++it)
      s += it.value() * x(it.col());
    c(j) = s;
  }
  return c;
}

Eigen::MatrixXd FESpace::generator_transform() const
{
  const Eigen::MatrixXd Td = Eigen::MatrixXd(T);
  Eigen::MatrixXd G(Td.rows(), Td.cols());
  for (int t = 0; t < mesh->num_triangles(); ++t)
    G.middleRows(t * local_dim, local_dim) =
        generator_coeffs[t] * Td.middleRows(t * local_dim, local_dim);
  return G;
}

SparseRowMajor reduce_constraints(const SparseRowMajor& R, const std::vector<ConstraintRow>& rows,
                                  double rel_tol)
{
  const int n = static_cast<int>(R.cols());

  std::vector<std::map<int, double>> mapped;
  for (const auto& row : rows) {
    std::map<int, double> acc;
    for (const auto& [j, c] : row.entries)
      for (SparseRowMajor::InnerIterator it(R, j); it; ++it) acc[it.col()] += c * it.value();
    double mx = 0.0;
    for (const auto& [col, v] : acc) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) continue;
    for (auto it = acc.begin(); it != acc.end();)
      it = std::abs(it->second) <= 1e-13 * mx ? acc.erase(it) : std::next(it);
    mapped.push_back(std::move(acc));
  }

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& row : mapped) {
    const int first = row.begin()->first;
    for (const auto& [col, v] : row) parent[find(col)] = find(first);
  }

  std::map<int, std::vector<int>> comp_rows;
  for (int r = 0; r < static_cast<int>(mapped.size()); ++r)
    comp_rows[find(mapped[r].begin()->first)].push_back(r);

  std::vector<bool> touched(n, false);
  std::map<int, std::vector<int>> comp_cols;
  for (const auto& row : mapped)
    for (const auto& [col, v] : row) touched[col] = true;
  for (int c = 0; c < n; ++c)
    if (touched[c]) comp_cols[find(c)].push_back(c);

  std::map<int, Eigen::MatrixXd> null_spaces;
  for (const auto& [root, cols] : comp_cols) {
    const auto& rlist = comp_rows[root];
    std::map<int, int> pos;
    for (int i = 0; i < static_cast<int>(cols.size()); ++i) pos[cols[i]] = i;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rlist.size(), cols.size());
    for (int i = 0; i < static_cast<int>(rlist.size()); ++i) {
      for (const auto& [col, v] : mapped[rlist[i]]) A(i, pos[col]) = v;
      A.row(i).normalize();
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    int rank = 0;
    while (rank < s.size() && s(rank) > rel_tol * s(0)) ++rank;
    null_spaces[root] = svd.matrixV().rightCols(cols.size() - rank);
  }

  std::vector<Eigen::Triplet<double>> trip;
  int next = 0;
  for (int c = 0; c < n; ++c) {
    if (!touched[c]) {
      trip.emplace_back(c, next++, 1.0);
      continue;
    }
    const int root = find(c);
    const auto& cols = comp_cols[root];
    if (cols.front() != c) continue;
    const Eigen::MatrixXd& N = null_spaces[root];
    for (int l = 0; l < N.cols(); ++l, ++next)
      for (int i = 0; i < N.rows(); ++i)
        if (std::abs(N(i, l)) > 1e-15) trip.emplace_back(cols[i], next, N(i, l));
  }
  Eigen::SparseMatrix<double> Q(n, next);
  Q.setFromTriplets(trip.begin(), trip.end());
  SparseRowMajor out = R * Q;
  out.prune(0.0);
  return out;
}

namespace {

struct BoundaryIncidence {
  std::vector<std::vector<int>> edges_at_vertex;
};

BoundaryIncidence boundary_incidence(const Mesh& mesh)
{
  BoundaryIncidence b;
  b.edges_at_vertex.assign(mesh.num_vertices(), {});
  for (int e : mesh.boundary_edges())
    for (int v : mesh.edges()[e].v) b.edges_at_vertex[v].push_back(e);
  return b;
}

// Generic moments of a trace quantity over boundary edges, written in nodal
// coordinates of the adjacent element.
std::vector<ConstraintRow> generic_trace_rows(const FESpace& sp, int up_to, bool normal, bool rot_trace,
                                              bool value)
{
  std::vector<ConstraintRow> rows;
  const Mesh& mesh = *sp.mesh;
  for (int e : mesh.boundary_edges()) {
    const int t = mesh.edges()[e].tri[0];
    const LocalBasis& B = sp.local[t];
    const Eigen::Vector2d a = mesh.vertices()[mesh.edges()[e].v[0]];
    const Eigen::Vector2d b = mesh.vertices()[mesh.edges()[e].v[1]];
    const Eigen::Vector2d n = mesh.edge_normal(e);
    const double L = mesh.edge_length(e);
    std::vector<Eigen::VectorXd> mom;
    for (int j = 0; j < B.dim(); ++j) {
      std::function<double(double)> f;
      if (normal) {
        const PolyVec& v = B.vector[j];
        f = [&, v](double s) {
          const Eigen::Vector2d xi = B.frame.to_local(a + s * (b - a));
          return n.dot(v(xi));
        };
      } else if (rot_trace) {
        const Poly r = rot(B.vector[j]);
        f = [&, r](double s) { return r(B.frame.to_local(a + s * (b - a))) / B.frame.h; };
      } else if (value) {
        const Poly p = B.scalar[j];
        f = [&, p](double s) { return p(B.frame.to_local(a + s * (b - a))); };
      }
      mom.push_back(edge_moments(f, L, up_to));
    }
    for (int q = 0; q <= up_to; ++q) {
      ConstraintRow row;
      for (int j = 0; j < B.dim(); ++j)
        if (mom[j](q) != 0.0) row.entries.emplace_back(sp.nodal_index(t, j), mom[j](q));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void boundary_rows(const FESpace& sp, std::vector<ConstraintRow>& vertex_rows,
                   std::vector<ConstraintRow>& edge_rows)
{
  const Mesh& mesh = *sp.mesh;
  const BoundaryIncidence inc = boundary_incidence(mesh);
  const int nv = mesh.num_vertices();
  const int pv = sp.dofs.per_vertex, pe = sp.dofs.per_edge;
  auto vdof = [&](int v, int c) { return v * pv + c; };
  auto edof = [&](int e, int c) { return nv * pv + e * pe + c; };

  switch (sp.kind) {
    case SpaceKind::LagrangeScalar:
      if (sp.bc.dirichlet) {
        for (int v = 0; v < nv; ++v)
          if (mesh.boundary_vertex()[v]) vertex_rows.push_back({{{vdof(v, 0), 1.0}}});
        for (int e : mesh.boundary_edges())
          for (int c = 0; c < pe; ++c) edge_rows.push_back({{{edof(e, c), 1.0}}});
      }
      break;

    case SpaceKind::GradRotR:
      if (sp.bc.rot0) {
        for (int v = 0; v < nv; ++v)
          if (mesh.boundary_vertex()[v]) vertex_rows.push_back({{{vdof(v, 0), 1.0}}});
        for (int e : mesh.boundary_edges())
          for (int c = sp.k; c < pe; ++c) edge_rows.push_back({{{edof(e, c), 1.0}}});
      }
      if (sp.bc.normal0) {
        auto rows = generic_trace_rows(sp, sp.k, true, false, false);
        edge_rows.insert(edge_rows.end(), rows.begin(), rows.end());
      }
      break;

    case SpaceKind::StokesRotW:
      // Vertex layout: u1, u2, du1/dx, du1/dy, du2/dx, du2/dy.  Edge layout: moments of u1, u2.
      for (int v = 0; v < nv; ++v) {
        if (!mesh.boundary_vertex()[v]) continue;
        if (sp.bc.rot0) vertex_rows.push_back({{{vdof(v, 4), 1.0}, {vdof(v, 3), -1.0}}});
        if (sp.bc.normal0)
          for (int e : inc.edges_at_vertex[v]) {
            const Eigen::Vector2d n = mesh.edge_normal(e), t = mesh.edge_tangent(e);
            vertex_rows.push_back({{{vdof(v, 0), n.x()}, {vdof(v, 1), n.y()}}});
            vertex_rows.push_back({{{vdof(v, 2), n.x() * t.x()},
                                    {vdof(v, 3), n.x() * t.y()},
                                    {vdof(v, 4), n.y() * t.x()},
                                    {vdof(v, 5), n.y() * t.y()}}});
          }
      }
      if (sp.bc.normal0)
        for (int e : mesh.boundary_edges()) {
          const Eigen::Vector2d n = mesh.edge_normal(e);
          edge_rows.push_back({{{edof(e, 0), n.x()}, {edof(e, 1), n.y()}}});
        }
      break;

    case SpaceKind::ArgyrisVector:
      // Vertex layout per component: u, ux, uy, uxx, uxy, uyy (component 2 offset 6).
      for (int v = 0; v < nv; ++v) {
        if (!mesh.boundary_vertex()[v]) continue;
        if (sp.bc.rot0) vertex_rows.push_back({{{vdof(v, 7), 1.0}, {vdof(v, 2), -1.0}}});
        for (int e : inc.edges_at_vertex[v]) {
          const Eigen::Vector2d n = mesh.edge_normal(e), t = mesh.edge_tangent(e);
          if (sp.bc.normal0) {
            vertex_rows.push_back({{{vdof(v, 0), n.x()}, {vdof(v, 6), n.y()}}});
            vertex_rows.push_back({{{vdof(v, 1), n.x() * t.x()},
                                    {vdof(v, 2), n.x() * t.y()},
                                    {vdof(v, 7), n.y() * t.x()},
                                    {vdof(v, 8), n.y() * t.y()}}});
            ConstraintRow hess;
            for (int c = 0; c < 2; ++c) {
              const double nc = c == 0 ? n.x() : n.y();
              hess.entries.emplace_back(vdof(v, 6 * c + 3), nc * t.x() * t.x());
              hess.entries.emplace_back(vdof(v, 6 * c + 4), nc * 2.0 * t.x() * t.y());
              hess.entries.emplace_back(vdof(v, 6 * c + 5), nc * t.y() * t.y());
            }
            vertex_rows.push_back(hess);
          }
          if (sp.bc.rot0) {
            // tau . grad(du2/dx - du1/dy)
            vertex_rows.push_back({{{vdof(v, 9), t.x()},
                                    {vdof(v, 4), -t.x()},
                                    {vdof(v, 10), t.y()},
                                    {vdof(v, 5), -t.y()}}});
          }
        }
      }
      if (sp.bc.rot0)
        for (int e : mesh.boundary_edges()) {
          // int_e rot u q0 = tau . m - q0 (n.u(v1) - n.u(v0)),  q0 = 1/sqrt(L)
          const Eigen::Vector2d n = mesh.edge_normal(e), t = mesh.edge_tangent(e);
          const double q0 = 1.0 / std::sqrt(mesh.edge_length(e));
          const int v0 = mesh.edges()[e].v[0], v1 = mesh.edges()[e].v[1];
          edge_rows.push_back({{{edof(e, 0), t.x()},
                                {edof(e, 1), t.y()},
                                {vdof(v1, 0), -q0 * n.x()},
                                {vdof(v1, 6), -q0 * n.y()},
                                {vdof(v0, 0), q0 * n.x()},
                                {vdof(v0, 6), q0 * n.y()}}});
        }
      break;

    case SpaceKind::ArgyrisScalar:
      if (sp.bc.dirichlet) {
        auto rows = generic_trace_rows(sp, 5, false, false, true);
        edge_rows.insert(edge_rows.end(), rows.begin(), rows.end());
      }
      break;
  }

  const bool vector_flags = sp.bc.rot0 || sp.bc.normal0;
  if (!sp.is_vector() && vector_flags)
    throw std::invalid_argument("rot0/normal0 flags need a vector space");
  if (sp.is_vector() && sp.bc.dirichlet)
    throw std::invalid_argument("dirichlet flag needs a scalar space");
}

}  // namespace

FESpace build_conforming_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int k,
                               BcFlags bc)
{
  check_supported(kind, k);
  FESpace sp;
  sp.kind = kind;
  sp.k = k;
  sp.bc = bc;
  sp.mesh = mesh;
  sp.dofs = entity_dofs(kind, k);
  sp.local_dim = local_dimension(kind, k);
  const int nt = mesh->num_triangles();
  sp.nodal_dim = mesh->num_vertices() * sp.dofs.per_vertex + mesh->num_edges() * sp.dofs.per_edge +
                 nt * sp.dofs.interior;

  sp.local.reserve(nt);
  sp.generator_coeffs.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    const LocalBasis gen = local_space(kind, k, *mesh, t);
    Eigen::MatrixXd C = nodal_coefficients(gen, *mesh);
    sp.local.push_back(gen.combine(C));
    sp.generator_coeffs.push_back(std::move(C));
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nt) * sp.local_dim);
  for (int t = 0; t < nt; ++t)
    for (int j = 0; j < sp.local_dim; ++j) trip.emplace_back(t * sp.local_dim + j, sp.nodal_index(t, j), 1.0);
  SparseRowMajor T(static_cast<Eigen::Index>(nt) * sp.local_dim, sp.nodal_dim);
  T.setFromTriplets(trip.begin(), trip.end());

  if (bc.any()) {
    std::vector<ConstraintRow> vrows, erows;
    boundary_rows(sp, vrows, erows);
    // Rows index nodal dofs; apply them in stages through the accumulated reduction.
    const int nd = sp.nodal_dim;
    SparseRowMajor R(nd, nd);
    R.setIdentity();
    R = reduce_constraints(R, vrows);
    R = reduce_constraints(R, erows);
    T = T * R;
  }
  sp.T = std::move(T);
  return sp;
}

std::vector<FieldSample> eval_field(const FESpace& space, const Eigen::VectorXd& coeffs, int t,
                                    const std::vector<Eigen::Vector2d>& points)
{
  if (t < 0 || t >= space.mesh->num_triangles()) throw std::out_of_range("element index");
  const Eigen::VectorXd c = space.local_coeffs(coeffs, t);
  const LocalBasis& B = space.local[t];
  const double h = B.frame.h;
  std::vector<FieldSample> out;
  out.reserve(points.size());
  if (B.is_vector()) {
    PolyVec u;
    for (int j = 0; j < B.dim(); ++j)
      if (c(j) != 0.0) u += c(j) * B.vector[j];
    const Poly r = rot(u), d = div(u), rx = r.dx(), ry = r.dy();
    for (const auto& x : points) {
      const Eigen::Vector2d xi = B.frame.to_local(x);
      FieldSample s;
      s.value = u(xi);
      s.rot = r(xi) / h;
      s.div = d(xi) / h;
      s.grad_rot = Eigen::Vector2d(rx(xi), ry(xi)) / (h * h);
      out.push_back(s);
    }
  } else {
    Poly p;
    for (int j = 0; j < B.dim(); ++j)
      if (c(j) != 0.0) p += c(j) * B.scalar[j];
    const Poly px = p.dx(), py = p.dy();
    for (const auto& x : points) {
      const Eigen::Vector2d xi = B.frame.to_local(x);
      FieldSample s;
      s.value = Eigen::Vector2d(p(xi), 0.0);
      s.grad = Eigen::Vector2d(px(xi), py(xi)) / h;
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace quadcurl
