#include "quadcurl/fespace.hpp"
#include "quadcurl/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace quadcurl {

namespace {

// Trace quantities compared across an edge with unit tangent tau.
std::vector<double> traces(SpaceKind kind, const FieldSample& s, const Eigen::Vector2d& tau)
{
  switch (kind) {
    case SpaceKind::LagrangeScalar: return {s.value.x()};
    case SpaceKind::ArgyrisScalar: return {s.value.x(), s.grad.x(), s.grad.y()};
    case SpaceKind::GradRotR: return {s.value.dot(tau), s.rot};
    case SpaceKind::StokesRotW: return {s.value.x(), s.value.y(), s.rot};
    case SpaceKind::ArgyrisVector:
      return {s.value.x(), s.value.y(), s.rot, s.div};
  }
  return {};
}

std::vector<Eigen::Vector2d> edge_points(const Mesh& mesh, int e, int samples)
{
  const Rule1D rule = gauss_legendre(samples);
  const Edge& edge = mesh.edges()[e];
  const Eigen::Vector2d a = mesh.vertices()[edge.v[0]], b = mesh.vertices()[edge.v[1]];
  std::vector<Eigen::Vector2d> pts;
  for (double t : rule.points) pts.push_back(a + t * (b - a));
  return pts;
}

// Largest field magnitude at element quadrature points, so that fields whose
// traces vanish (interior bubbles) still get a meaningful reference.
double interior_scale(const FESpace& space, const Eigen::VectorXd& coeffs)
{
  const Mesh& mesh = *space.mesh;
  const QuadratureRule q = quadrature_rule(4);
  double scale = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles()[t];
    std::vector<Eigen::Vector2d> pts;
    for (const auto& b : q.bary)
      pts.push_back(b(0) * mesh.vertices()[v[0]] + b(1) * mesh.vertices()[v[1]] + b(2) * mesh.vertices()[v[2]]);
    for (const auto& s : eval_field(space, coeffs, t, pts))
      scale = std::max({scale, s.value.norm(), std::abs(s.rot)});
  }
  return scale;
}

}  // namespace

double max_interface_jump(const FESpace& space, const Eigen::VectorXd& coeffs, int samples)
{
  const Mesh& mesh = *space.mesh;
  double jump = 0.0, scale = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges()[e];
    const auto pts = edge_points(mesh, e, samples);
    const Eigen::Vector2d tau = mesh.edge_tangent(e);
    const auto left = eval_field(space, coeffs, edge.tri[0], pts);
    if (edge.on_boundary()) {
      for (const auto& s : left)
        for (double v : traces(space.kind, s, tau)) scale = std::max(scale, std::abs(v));
      continue;
    }
    const auto right = eval_field(space, coeffs, edge.tri[1], pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto a = traces(space.kind, left[i], tau), b = traces(space.kind, right[i], tau);
      for (std::size_t q = 0; q < a.size(); ++q) {
        jump = std::max(jump, std::abs(a[q] - b[q]));
        scale = std::max({scale, std::abs(a[q]), std::abs(b[q])});
      }
    }
  }
  scale = std::max(scale, interior_scale(space, coeffs));
  return scale > 0.0 ? jump / scale : jump;
}

double max_boundary_residual(const FESpace& space, const Eigen::VectorXd& coeffs, int samples)
{
  const Mesh& mesh = *space.mesh;
  double res = 0.0, scale = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto pts = edge_points(mesh, e, samples);
    const auto fs = eval_field(space, coeffs, mesh.edges()[e].tri[0], pts);
    for (const auto& s : fs) scale = std::max({scale, s.value.norm(), std::abs(s.rot)});
    if (!mesh.edges()[e].on_boundary()) continue;
    const Eigen::Vector2d n = mesh.outward_normal(e);
    for (const auto& s : fs) {
      if (space.bc.rot0) res = std::max(res, std::abs(s.rot));
      if (space.bc.normal0) res = std::max(res, std::abs(s.value.dot(n)));
      if (space.bc.dirichlet) res = std::max(res, std::abs(s.value.x()));
    }
  }
  scale = std::max(scale, interior_scale(space, coeffs));
  return scale > 0.0 ? res / scale : res;
}

}  // namespace quadcurl
