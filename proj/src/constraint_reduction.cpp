#include "quadcurl/fespace.hpp"
#include "quadcurl/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <functional>

namespace quadcurl {

namespace {

using Quantity = std::function<double(const LocalBasis&, int, const Eigen::Vector2d& xi)>;

struct TraceSpec {
  Quantity q;
  int up_to;
};

Quantity component(int c)
{
  return [c](const LocalBasis& B, int j, const Eigen::Vector2d& xi) {
    return c == 0 ? B.vector[j].x(xi) : B.vector[j].y(xi);
  };
}

Quantity scalar_value()
{
  return [](const LocalBasis& B, int j, const Eigen::Vector2d& xi) { return B.scalar[j](xi); };
}

Quantity rot_value()
{
  return [](const LocalBasis& B, int j, const Eigen::Vector2d& xi) {
    return rot(B.vector[j])(xi) / B.frame.h;
  };
}

Quantity along(const Eigen::Vector2d& dir)
{
  return [dir](const LocalBasis& B, int j, const Eigen::Vector2d& xi) {
    return dir.dot(B.vector[j](xi));
  };
}

// Directional derivative of a scalar (c < 0) or of vector component c.
Quantity derivative(const Eigen::Vector2d& dir, int c)
{
  return [dir, c](const LocalBasis& B, int j, const Eigen::Vector2d& xi) {
    const Poly& p = c < 0 ? B.scalar[j] : (c == 0 ? B.vector[j].x : B.vector[j].y);
    return (dir.x() * p.dx()(xi) + dir.y() * p.dy()(xi)) / B.frame.h;
  };
}

std::vector<TraceSpec> interface_traces(SpaceKind kind, int k, const Eigen::Vector2d& tau,
                                        const Eigen::Vector2d& n)
{
  switch (kind) {
    case SpaceKind::LagrangeScalar: return {{scalar_value(), k}};
    case SpaceKind::ArgyrisScalar: return {{scalar_value(), 5}, {derivative(n, -1), 4}};
    case SpaceKind::GradRotR: return {{along(tau), k}, {rot_value(), k - 1}};
    case SpaceKind::StokesRotW: return {{component(0), k}, {component(1), k}, {rot_value(), k - 1}};
    case SpaceKind::ArgyrisVector:
      return {{component(0), 5}, {derivative(n, 0), 4}, {component(1), 5}, {derivative(n, 1), 4}};
  }
  return {};
}

std::vector<TraceSpec> boundary_traces(SpaceKind kind, int k, const BcFlags& bc,
                                       const Eigen::Vector2d& n)
{
  std::vector<TraceSpec> out;
  const int deg = (kind == SpaceKind::ArgyrisVector || kind == SpaceKind::ArgyrisScalar) ? 5 : k;
  if (bc.rot0) out.push_back({rot_value(), deg - 1});
  if (bc.normal0) out.push_back({along(n), deg});
  if (bc.dirichlet) out.push_back({scalar_value(), deg});
  return out;
}

Eigen::VectorXd trace_moments(const Mesh& mesh, int e, const LocalBasis& B, int j,
                              const TraceSpec& spec)
{
  const Eigen::Vector2d a = mesh.vertices()[mesh.edges()[e].v[0]];
  const Eigen::Vector2d b = mesh.vertices()[mesh.edges()[e].v[1]];
  return edge_moments(
      [&](double s) { return spec.q(B, j, B.frame.to_local(a + s * (b - a))); },
      mesh.edge_length(e), spec.up_to);
}

// Vertex quantities whose continuity goes beyond the edge traces.
std::vector<Quantity> vertex_supersmooth(SpaceKind kind)
{
  const Eigen::Vector2d ex(1, 0), ey(0, 1);
  auto second = [](int c, int a, int b) -> Quantity {
    return [c, a, b](const LocalBasis& B, int j, const Eigen::Vector2d& xi) {
      Poly p = c < 0 ? B.scalar[j] : (c == 0 ? B.vector[j].x : B.vector[j].y);
      p = a == 0 ? p.dx() : p.dy();
      p = b == 0 ? p.dx() : p.dy();
      return p(xi) / (B.frame.h * B.frame.h);
    };
  };
  switch (kind) {
    case SpaceKind::StokesRotW:
      return {derivative(ex, 0), derivative(ey, 0), derivative(ex, 1), derivative(ey, 1)};
    case SpaceKind::ArgyrisScalar: return {second(-1, 0, 0), second(-1, 0, 1), second(-1, 1, 1)};
    case SpaceKind::ArgyrisVector:
      return {second(0, 0, 0), second(0, 0, 1), second(0, 1, 1),
              second(1, 0, 0), second(1, 0, 1), second(1, 1, 1)};
    default: return {};
  }
}

}  // namespace

ReferenceSpace reference_conforming_space(const Mesh& mesh, SpaceKind kind, int k, BcFlags bc,
                                          bool vertex_supersmoothness)
{
  ReferenceSpace ref;
  const int nt = mesh.num_triangles();
  for (int t = 0; t < nt; ++t) ref.generators.push_back(local_space(kind, k, mesh, t));
  const int m = ref.generators[0].dim();
  const int ncols = nt * m;

  std::vector<Eigen::VectorXd> rows;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edges()[e];
    const Eigen::Vector2d tau = mesh.edge_tangent(e), n = mesh.edge_normal(e);
    if (!ed.on_boundary()) {
      for (const TraceSpec& spec : interface_traces(kind, k, tau, n)) {
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(spec.up_to + 1, ncols);
        for (int side = 0; side < 2; ++side) {
          const int t = ed.tri[side];
          const double sign = side == 0 ? 1.0 : -1.0;
          for (int j = 0; j < m; ++j)
            block.col(t * m + j) += sign * trace_moments(mesh, e, ref.generators[t], j, spec);
        }
        for (int r = 0; r < block.rows(); ++r) rows.push_back(block.row(r).transpose());
      }
    } else {
      const int t = ed.tri[0];
      for (const TraceSpec& spec : boundary_traces(kind, k, bc, n)) {
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(spec.up_to + 1, ncols);
        for (int j = 0; j < m; ++j)
          block.col(t * m + j) = trace_moments(mesh, e, ref.generators[t], j, spec);
        for (int r = 0; r < block.rows(); ++r) rows.push_back(block.row(r).transpose());
      }
    }
  }

  if (vertex_supersmoothness) {
    const auto quantities = vertex_supersmooth(kind);
    const Topology top = compute_topology(mesh);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const auto& star = top.vertex_star[v];
      for (std::size_t s = 1; s < star.size(); ++s)
        for (const Quantity& q : quantities) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(ncols);
          for (int side = 0; side < 2; ++side) {
            const int t = side == 0 ? star[0] : star[s];
            const LocalBasis& B = ref.generators[t];
            const Eigen::Vector2d xi = B.frame.to_local(mesh.vertices()[v]);
            for (int j = 0; j < m; ++j) row(t * m + j) += (side == 0 ? 1.0 : -1.0) * q(B, j, xi);
          }
          rows.push_back(row);
        }
    }
  }

  // Moments above the trace degree vanish identically; normalizing their
  // rounding noise would invent constraints.
  double largest = 0.0;
  for (const auto& r : rows) largest = std::max(largest, r.norm());
  std::vector<Eigen::VectorXd> kept;
  for (auto& r : rows)
    if (r.norm() > 1e-11 * largest) kept.push_back(r / r.norm());
  rows.swap(kept);
  ref.constraints.resize(rows.size(), ncols);
  for (std::size_t r = 0; r < rows.size(); ++r) ref.constraints.row(r) = rows[r].transpose();

  if (rows.empty()) {
    ref.basis = Eigen::MatrixXd::Identity(ncols, ncols);
    return ref;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(ref.constraints, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  while (rank < s.size() && s(rank) > 1e-10 * s(0)) ++rank;
  ref.basis = svd.matrixV().rightCols(ncols - rank);
  return ref;
}

}  // namespace quadcurl
