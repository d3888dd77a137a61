#pragma once

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadcurl {

enum class DomainTag { Omega1, Omega2, Omega3, External };
enum class BoundaryMarker { Interior, Outer, Hole };

std::string to_string(DomainTag tag);
DomainTag domain_from_string(const std::string& name);
std::string to_string(BoundaryMarker m);

struct Edge {
  std::array<int, 2> v{};          // v[0] < v[1]; global orientation runs v[0] -> v[1]
  std::array<int, 2> tri{-1, -1};  // adjacent triangles, tri[1] = -1 on the boundary
  BoundaryMarker marker = BoundaryMarker::Interior;

  bool on_boundary() const { return tri[1] < 0; }
};

class Mesh {
public:
  Mesh() = default;
  /// Builds edge topology.  Triangles must be counterclockwise and conforming.
  /// Boundary markers are derived from boundary loops (the loop enclosing the
  /// largest area is outer).
  Mesh(std::vector<Eigen::Vector2d> vertices, std::vector<std::array<int, 3>> triangles,
       DomainTag tag = DomainTag::External, int refine_level = 0);

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// tri_edges()[t][i] is the edge opposite local vertex i.
  const std::vector<std::array<int, 3>>& tri_edges() const { return tri_edges_; }
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }
  const std::vector<bool>& boundary_vertex() const { return boundary_vertex_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  DomainTag domain_tag() const { return tag_; }
  int refine_level() const { return level_; }

  double signed_area(int t) const;
  double total_area() const;
  /// Longest edge of triangle t.
  double diameter(int t) const;
  Eigen::Vector2d centroid(int t) const;
  double edge_length(int e) const;
  /// Unit tangent from v[0] to v[1].
  Eigen::Vector2d edge_tangent(int e) const;
  /// Unit normal (tau_y, -tau_x); outward on boundary edges of counterclockwise loops
  /// only when the edge orientation agrees with the loop, see outward_normal().
  Eigen::Vector2d edge_normal(int e) const;
  /// Outward unit normal of a boundary edge.
  Eigen::Vector2d outward_normal(int e) const;
  /// +1 if the counterclockwise traversal of triangle t runs along edge e from v[0] to v[1].
  int orientation(int t, int e) const;
  /// Maximum diameter over triangles.
  double mesh_size() const;

private:
  void build_topology();
  void mark_boundary();

  std::vector<Eigen::Vector2d> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<int> boundary_edges_;
  std::vector<bool> boundary_vertex_;
  DomainTag tag_ = DomainTag::External;
  int level_ = 0;
};

struct Topology {
  int betti1 = 0;
  int boundary_components = 0;
  int euler = 0;  // #V - #E + #F
  std::vector<std::vector<int>> vertex_star;
  /// edge_sign[e] = {sign in tri[0], sign in tri[1] (0 if absent)}.
  std::vector<std::array<int, 2>> edge_sign;
};

class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

Mesh generate_domain(DomainTag tag, int refine_level);
Mesh coarse_mesh(DomainTag tag);
Mesh refine_uniform(const Mesh& mesh);
Topology compute_topology(const Mesh& mesh);

/// Analytic area of the generated domains.
double domain_area(DomainTag tag);

void save_mesh(const Mesh& mesh, const std::string& path);
/// Parses the text format.  Clockwise triangles are reoriented and reported in
/// `warnings`; malformed input throws MeshError with the offending line number.
Mesh load_mesh(const std::string& path, std::vector<std::string>* warnings = nullptr);
Mesh parse_mesh(const std::string& text, std::vector<std::string>* warnings = nullptr);

}  // namespace quadcurl
