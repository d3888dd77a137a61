#include "quadcurl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace quadcurl {

std::string to_string(DomainTag tag)
{
  switch (tag) {
    case DomainTag::Omega1: return "omega1";
    case DomainTag::Omega2: return "omega2";
    case DomainTag::Omega3: return "omega3";
    case DomainTag::External: return "external";
  }
  return "external";
}

DomainTag domain_from_string(const std::string& name)
{
  if (name == "omega1") return DomainTag::Omega1;
  if (name == "omega2") return DomainTag::Omega2;
  if (name == "omega3") return DomainTag::Omega3;
  throw std::invalid_argument("unknown domain tag: " + name);
}

std::string to_string(BoundaryMarker m)
{
  switch (m) {
    case BoundaryMarker::Outer: return "outer";
    case BoundaryMarker::Hole: return "hole";
    case BoundaryMarker::Interior: return "interior";
  }
  return "interior";
}

Mesh::Mesh(std::vector<Eigen::Vector2d> vertices, std::vector<std::array<int, 3>> triangles,
           DomainTag tag, int refine_level)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), tag_(tag),
      level_(refine_level)
{
  for (int t = 0; t < num_triangles(); ++t) {
    for (int i : triangles_[t])
      if (i < 0 || i >= num_vertices())
        throw MeshError("triangle " + std::to_string(t) + " references a missing vertex");
    if (signed_area(t) <= 0.0)
      throw MeshError("triangle " + std::to_string(t) + " is not counterclockwise");
  }
  build_topology();
  mark_boundary();
}

void Mesh::build_topology()
{
  std::map<std::pair<int, int>, int> index;
  tri_edges_.assign(triangles_.size(), {-1, -1, -1});
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = index.emplace(key, num_edges());
      if (inserted) {
        Edge e;
        e.v = {key.first, key.second};
        e.tri[0] = t;
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.tri[1] >= 0)
          throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") is shared by more than two triangles");
        if (orientation(e.tri[0], it->second) == (a < b ? 1 : -1))
          throw MeshError("triangles " + std::to_string(e.tri[0]) + " and " + std::to_string(t) +
                          " induce the same orientation on a shared edge");
        e.tri[1] = t;
      }
      tri_edges_[t][i] = it->second;
    }
  }

  boundary_vertex_.assign(vertices_.size(), false);
  for (int e = 0; e < num_edges(); ++e)
    if (edges_[e].on_boundary()) {
      boundary_edges_.push_back(e);
      boundary_vertex_[edges_[e].v[0]] = boundary_vertex_[edges_[e].v[1]] = true;
    }

  // A vertex in the relative interior of a boundary edge is a hanging node.
  for (int e : boundary_edges_) {
    const Eigen::Vector2d a = vertices_[edges_[e].v[0]];
    const Eigen::Vector2d b = vertices_[edges_[e].v[1]];
    const double len2 = (b - a).squaredNorm();
    for (int f : boundary_edges_)
      for (int w : edges_[f].v) {
        if (w == edges_[e].v[0] || w == edges_[e].v[1]) continue;
        const Eigen::Vector2d p = vertices_[w];
        const double s = (p - a).dot(b - a) / len2;
        const double cross = (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x();
        if (s > 1e-12 && s < 1 - 1e-12 && std::abs(cross) < 1e-12 * len2)
          throw MeshError("hanging node " + std::to_string(w) + " on edge (" +
                          std::to_string(edges_[e].v[0]) + "," + std::to_string(edges_[e].v[1]) +
                          ")");
      }
  }
}

void Mesh::mark_boundary()
{
  // Walk boundary loops in the direction induced by the adjacent triangle
  // (domain on the left).  Counterclockwise loops bound the outside.
  std::map<int, std::vector<int>> starting;
  for (int e : boundary_edges_) {
    const int s = orientation(edges_[e].tri[0], e) > 0 ? edges_[e].v[0] : edges_[e].v[1];
    starting[s].push_back(e);
  }
  std::vector<bool> seen(edges_.size(), false);
  for (int e0 : boundary_edges_) {
    if (seen[e0]) continue;
    std::vector<int> loop;
    double area2 = 0.0;
    int e = e0;
    while (!seen[e]) {
      seen[e] = true;
      loop.push_back(e);
      const bool fwd = orientation(edges_[e].tri[0], e) > 0;
      const int s = fwd ? edges_[e].v[0] : edges_[e].v[1];
      const int d = fwd ? edges_[e].v[1] : edges_[e].v[0];
      area2 += vertices_[s].x() * vertices_[d].y() - vertices_[d].x() * vertices_[s].y();
      int next = -1;
      for (int cand : starting[d])
        if (!seen[cand]) { next = cand; break; }
      if (next < 0) break;
      e = next;
    }
    const BoundaryMarker m = area2 > 0 ? BoundaryMarker::Outer : BoundaryMarker::Hole;
    for (int f : loop) edges_[f].marker = m;
  }
}

double Mesh::signed_area(int t) const
{
  const auto& tri = triangles_[t];
  const Eigen::Vector2d a = vertices_[tri[1]] - vertices_[tri[0]];
  const Eigen::Vector2d b = vertices_[tri[2]] - vertices_[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double Mesh::total_area() const
{
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += signed_area(t);
  return s;
}

double Mesh::diameter(int t) const
{
  const auto& tri = triangles_[t];
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    d = std::max(d, (vertices_[tri[i]] - vertices_[tri[(i + 1) % 3]]).norm());
  return d;
}

Eigen::Vector2d Mesh::centroid(int t) const
{
  const auto& tri = triangles_[t];
  return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

double Mesh::edge_length(int e) const
{
  return (vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]]).norm();
}

Eigen::Vector2d Mesh::edge_tangent(int e) const
{
  return (vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]]).normalized();
}

Eigen::Vector2d Mesh::edge_normal(int e) const
{
  const Eigen::Vector2d t = edge_tangent(e);
  return {t.y(), -t.x()};
}

Eigen::Vector2d Mesh::outward_normal(int e) const
{
  // Counterclockwise traversal has the triangle on the left, so the outward
  // normal is the tangent rotated clockwise.
  return orientation(edges_[e].tri[0], e) * edge_normal(e);
}

int Mesh::orientation(int t, int e) const
{
  const auto& tri = triangles_[t];
  for (int i = 0; i < 3; ++i) {
    const int a = tri[i], b = tri[(i + 1) % 3];
    if (a == edges_[e].v[0] && b == edges_[e].v[1]) return 1;
    if (a == edges_[e].v[1] && b == edges_[e].v[0]) return -1;
  }
  throw std::invalid_argument("edge not on triangle");
}

double Mesh::mesh_size() const
{
  double h = 0.0;
  for (int t = 0; t < num_triangles(); ++t) h = std::max(h, diameter(t));
  return h;
}

namespace {

// Axis-aligned grid; every kept cell is split along its SW-NE diagonal.
Mesh structured(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::vector<std::pair<int, int>>& holes, DomainTag tag)
{
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  auto is_hole = [&](int i, int j) {
    return std::find(holes.begin(), holes.end(), std::make_pair(i, j)) != holes.end();
  };
  std::vector<int> id(nx * ny, -1);
  std::vector<Eigen::Vector2d> verts;
  auto vid = [&](int i, int j) {
    int& v = id[j * nx + i];
    if (v < 0) {
      v = static_cast<int>(verts.size());
      verts.emplace_back(xs[i], ys[j]);
    }
    return v;
  };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      if (is_hole(i, j)) continue;
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  return Mesh(std::move(verts), std::move(tris), tag, 0);
}

std::vector<double> linspace(double a, double b, int n)
{
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = a + (b - a) * i / n;
  return v;
}

}  // namespace

Mesh coarse_mesh(DomainTag tag)
{
  switch (tag) {
    case DomainTag::Omega1:
      return structured(linspace(0, 1, 4), linspace(0, 1, 4), {}, tag);
    case DomainTag::Omega2:
      return structured({0.0, 1.0 / 3.0, 0.75, 1.0}, {0.0, 0.25, 2.0 / 3.0, 1.0}, {{1, 1}}, tag);
    case DomainTag::Omega3:
      return structured(linspace(-1, 1, 4), linspace(-1, 1, 4), {{2, 0}, {3, 0}, {2, 1}, {3, 1}},
                        tag);
    case DomainTag::External: break;
  }
  throw std::invalid_argument("unknown domain tag");
}

Mesh generate_domain(DomainTag tag, int refine_level)
{
  if (refine_level < 0) throw std::invalid_argument("refine_level must be >= 0");
  Mesh m = coarse_mesh(tag);
  for (int i = 0; i < refine_level; ++i) m = refine_uniform(m);
  return m;
}

Mesh refine_uniform(const Mesh& mesh)
{
  std::vector<Eigen::Vector2d> verts = mesh.vertices();
  std::vector<int> mid(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges()[e];
    mid[e] = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[ed.v[0]] + verts[ed.v[1]]));
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles()[t];
    const auto& e = mesh.tri_edges()[t];
    const int m0 = mid[e[0]], m1 = mid[e[1]], m2 = mid[e[2]];
    tris.push_back({v[0], m2, m1});
    tris.push_back({m2, v[1], m0});
    tris.push_back({m1, m0, v[2]});
    tris.push_back({m0, m1, m2});
  }
  return Mesh(std::move(verts), std::move(tris), mesh.domain_tag(), mesh.refine_level() + 1);
}

Topology compute_topology(const Mesh& mesh)
{
  Topology top;
  const int nv = mesh.num_vertices();

  // Connectivity through edges.
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : mesh.edges()) parent[find(e.v[0])] = find(e.v[1]);
  int components = 0;
  for (int v = 0; v < nv; ++v) components += (find(v) == v);
  if (components != 1) throw MeshError("mesh is not connected");

  top.euler = nv - mesh.num_edges() + mesh.num_triangles();
  top.betti1 = 1 - top.euler;

  // Boundary loops.
  std::iota(parent.begin(), parent.end(), 0);
  for (int e : mesh.boundary_edges()) {
    const auto& ed = mesh.edges()[e];
    parent[find(ed.v[0])] = find(ed.v[1]);
  }
  for (int v = 0; v < nv; ++v)
    if (mesh.boundary_vertex()[v] && find(v) == v) ++top.boundary_components;

  top.vertex_star.assign(nv, {});
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int v : mesh.triangles()[t]) top.vertex_star[v].push_back(t);

  top.edge_sign.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges()[e];
    top.edge_sign[e] = {mesh.orientation(ed.tri[0], e),
                        ed.tri[1] >= 0 ? mesh.orientation(ed.tri[1], e) : 0};
  }
  return top;
}

double domain_area(DomainTag tag)
{
  switch (tag) {
    case DomainTag::Omega1: return 1.0;
    case DomainTag::Omega2: return 1.0 - (0.75 - 1.0 / 3.0) * (2.0 / 3.0 - 0.25);
    case DomainTag::Omega3: return 3.0;
    case DomainTag::External: break;
  }
  throw std::invalid_argument("no analytic area for external meshes");
}

}  // namespace quadcurl
