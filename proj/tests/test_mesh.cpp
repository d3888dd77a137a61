#include "quadcurl/mesh.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <stdexcept>

using namespace quadcurl;

namespace {

const DomainTag kDomains[] = {DomainTag::Omega1, DomainTag::Omega2, DomainTag::Omega3};

Mesh two_triangle_square()
{
  return Mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{{0, 1, 2}}, {{0, 2, 3}}});
}

}  // namespace

TEST_CASE("generated domains are conforming, counterclockwise and fill the domain")
{
  for (DomainTag tag : kDomains)
    for (int level = 0; level <= 2; ++level) {
      CAPTURE(to_string(tag));
      CAPTURE(level);
      const Mesh m = generate_domain(tag, level);
      CHECK(m.refine_level() == level);
      CHECK(m.domain_tag() == tag);
      double area = 0.0;
      for (int t = 0; t < m.num_triangles(); ++t) {
        CHECK(m.signed_area(t) > 0.0);
        area += m.signed_area(t);
      }
      CHECK(std::abs(area - domain_area(tag)) < 1e-12);

      const Topology top = compute_topology(m);
      for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        if (ed.on_boundary()) continue;
        REQUIRE(ed.tri[1] >= 0);
        // Interior edges are traversed in opposite directions by their two triangles.
        CHECK(top.edge_sign[e][0] == -top.edge_sign[e][1]);
      }
    }
}

TEST_CASE("betti numbers and Euler characteristic")
{
  const int expected[] = {0, 1, 0};
  for (int i = 0; i < 3; ++i)
    for (int level = 0; level <= 2; ++level) {
      const Mesh m = generate_domain(kDomains[i], level);
      const Topology top = compute_topology(m);
      CHECK(top.betti1 == expected[i]);
      CHECK(top.boundary_components == expected[i] + 1);
      CHECK(top.euler == m.num_vertices() - m.num_edges() + m.num_triangles());
      CHECK(top.euler == 1 - top.betti1);
    }
  const Mesh o2 = generate_domain(DomainTag::Omega2, 1);
  CHECK(o2.num_vertices() - o2.num_edges() + o2.num_triangles() == 0);
}

TEST_CASE("Omega2 hole corners are mesh vertices")
{
  const Mesh m = generate_domain(DomainTag::Omega2, 0);
  for (double x : {1.0 / 3.0, 0.75})
    for (double y : {0.25, 2.0 / 3.0}) {
      bool found = false;
      for (const auto& v : m.vertices()) found = found || (v - Eigen::Vector2d(x, y)).norm() < 1e-15;
      CHECK(found);
    }
  int hole_edges = 0;
  for (int e : m.boundary_edges()) hole_edges += m.edges()[e].marker == BoundaryMarker::Hole;
  CHECK(hole_edges > 0);
}

TEST_CASE("uniform refinement")
{
  const Mesh sq = two_triangle_square();
  const Mesh r1 = refine_uniform(sq);
  CHECK(r1.num_triangles() == 8);
  CHECK(refine_uniform(r1).num_triangles() == 32);
  // Red refinement: children are similar to the parent, so the diameter halves.
  for (int t = 0; t < r1.num_triangles(); ++t) CHECK(r1.diameter(t) == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(compute_topology(refine_uniform(generate_domain(DomainTag::Omega2, 1))).betti1 == 1);
  CHECK_THROWS_AS(generate_domain(DomainTag::Omega1, -1), std::invalid_argument);
  CHECK_THROWS_AS(domain_from_string("omega4"), std::invalid_argument);
}

TEST_CASE("outward normals point away from the triangle")
{
  const Mesh m = generate_domain(DomainTag::Omega3, 0);
  for (int e : m.boundary_edges()) {
    const Edge& ed = m.edges()[e];
    const Eigen::Vector2d mid = 0.5 * (m.vertices()[ed.v[0]] + m.vertices()[ed.v[1]]);
    CHECK((mid - m.centroid(ed.tri[0])).dot(m.outward_normal(e)) > 0.0);
  }
}

TEST_CASE("mesh file round trip")
{
  const auto path = std::filesystem::temp_directory_path() / "quadcurl_mesh_roundtrip.txt";
  for (DomainTag tag : kDomains) {
    const Mesh m = generate_domain(tag, 1);
    save_mesh(m, path.string());
    std::vector<std::string> warnings;
    const Mesh back = load_mesh(path.string(), &warnings);
    CHECK(warnings.empty());
    CHECK(back.domain_tag() == tag);
    CHECK(back.refine_level() == 1);
    REQUIRE(back.num_vertices() == m.num_vertices());
    REQUIRE(back.num_triangles() == m.num_triangles());
    for (int v = 0; v < m.num_vertices(); ++v) CHECK((back.vertices()[v] - m.vertices()[v]).norm() == 0.0);
    CHECK(back.triangles() == m.triangles());
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_mesh("/nonexistent/quadcurl.mesh"), MeshError);
}

TEST_CASE("mesh parser repairs orientation and rejects malformed input")
{
  std::vector<std::string> warnings;
  const Mesh m = parse_mesh(
      "# clockwise second triangle\n"
      "4 2 4\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 3 2\n"
      "0 1 outer\n1 2 outer\n2 3 outer\n3 0 outer\n",
      &warnings);
  CHECK(warnings.size() == 1);
  for (int t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) > 0.0);

  // Vertex 3 sits on the hypotenuse of triangle 0.
  const std::string hanging =
      "5 3 0\n0 0\n2 0\n0 2\n1 1\n2 2\n0 1 2\n1 4 3\n3 4 2\n";
  try {
    parse_mesh(hanging);
    FAIL("hanging node accepted");
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).find("hanging node") != std::string::npos);
  }

  try {
    parse_mesh("3 1 0\n0 0\n1 zero\n0 1\n0 1 2\n");
    FAIL("bad number accepted");
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).rfind("line 3", 0) == 0);
  }
  CHECK_THROWS_AS(parse_mesh(""), MeshError);
  CHECK_THROWS_AS(parse_mesh("3 1 0\n0 0\n1 0\n0 1\n0 1 7\n"), MeshError);
  CHECK_THROWS_AS(parse_mesh("3 1 0\n0 0\n1 0\n2 0\n0 1 2\n"), MeshError);
  CHECK_THROWS_AS(parse_mesh("4 2 0\n0 0\n1 0\n0 1\n5 5\n0 1 2\n0 1 2\n"), MeshError);
}

TEST_CASE("disconnected meshes are rejected by compute_topology")
{
  const Mesh m({{0, 0}, {1, 0}, {0, 1}, {3, 0}, {4, 0}, {3, 1}}, {{{0, 1, 2}}, {{3, 4, 5}}});
  CHECK_THROWS_AS(compute_topology(m), MeshError);
}
