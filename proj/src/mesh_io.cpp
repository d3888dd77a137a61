#include "quadcurl/mesh.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace quadcurl {

void save_mesh(const Mesh& mesh, const std::string& path)
{
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open " + path + " for writing");
  out << "# domain: " << to_string(mesh.domain_tag()) << "\n";
  out << "# level: " << mesh.refine_level() << "\n";
  out << mesh.num_vertices() << " " << mesh.num_triangles() << " "
      << mesh.boundary_edges().size() << "\n";
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << v.x() << " " << v.y() << "\n";
  for (const auto& t : mesh.triangles()) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (int e : mesh.boundary_edges()) {
    const auto& ed = mesh.edges()[e];
    out << ed.v[0] << " " << ed.v[1] << " " << to_string(ed.marker) << "\n";
  }
  if (!out) throw MeshError("write failed for " + path);
}

Mesh load_mesh(const std::string& path, std::vector<std::string>* warnings)
{
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mesh(ss.str(), warnings);
}

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

[[noreturn]] void fail(int line, const std::string& what)
{
  throw MeshError("line " + std::to_string(line) + ": " + what);
}

double to_double(const Line& l, const std::string& s)
{
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(l.number, "expected a number, got '" + s + "'");
  }
}

int to_index(const Line& l, const std::string& s, int bound)
{
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    if (v < 0 || v >= bound) fail(l.number, "index " + s + " out of range");
    return static_cast<int>(v);
  } catch (const MeshError&) {
    throw;
  } catch (const std::exception&) {
    fail(l.number, "expected an index, got '" + s + "'");
  }
}

}  // namespace

Mesh parse_mesh(const std::string& text, std::vector<std::string>* warnings)
{
  std::vector<Line> lines;
  DomainTag tag = DomainTag::External;
  int level = 0;
  {
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) {
        std::istringstream c(raw.substr(hash + 1));
        std::string key, value;
        c >> key >> value;
        if (key == "domain:" && value != "external") {
          try {
            tag = domain_from_string(value);
          } catch (const std::invalid_argument&) {
            fail(number, "unknown domain '" + value + "'");
          }
        }
        if (key == "level:") level = std::atoi(value.c_str());
        raw.erase(hash);
      }
      std::istringstream tok(raw);
      Line l{number, {}};
      std::string s;
      while (tok >> s) l.tokens.push_back(s);
      if (!l.tokens.empty()) lines.push_back(std::move(l));
    }
  }
  if (lines.empty()) throw MeshError("line 1: empty mesh file");

  const Line& head = lines[0];
  if (head.tokens.size() != 3) fail(head.number, "header must be '#V #T #BE'");
  const int nv = to_index(head, head.tokens[0], 1 << 30);
  const int nt = to_index(head, head.tokens[1], 1 << 30);
  const int nb = to_index(head, head.tokens[2], 1 << 30);
  if (static_cast<int>(lines.size()) != 1 + nv + nt + nb) {
    const int last = lines.back().number;
    fail(last, "expected " + std::to_string(nv + nt + nb) + " data lines, found " +
                   std::to_string(lines.size() - 1));
  }

  std::vector<Eigen::Vector2d> verts;
  for (int i = 0; i < nv; ++i) {
    const Line& l = lines[1 + i];
    if (l.tokens.size() != 2) fail(l.number, "vertex line needs 'x y'");
    verts.emplace_back(to_double(l, l.tokens[0]), to_double(l, l.tokens[1]));
  }

  std::vector<std::array<int, 3>> tris;
  std::map<std::pair<int, int>, std::pair<int, int>> edge_use;  // edge -> (count, line)
  for (int i = 0; i < nt; ++i) {
    const Line& l = lines[1 + nv + i];
    if (l.tokens.size() != 3) fail(l.number, "triangle line needs 'i j k'");
    std::array<int, 3> t{to_index(l, l.tokens[0], nv), to_index(l, l.tokens[1], nv),
                         to_index(l, l.tokens[2], nv)};
    const Eigen::Vector2d a = verts[t[1]] - verts[t[0]], b = verts[t[2]] - verts[t[0]];
    const double area = a.x() * b.y() - a.y() * b.x();
    if (std::abs(area) < 1e-14 * (a.squaredNorm() + b.squaredNorm()))
      fail(l.number, "degenerate triangle");
    if (area < 0) {
      std::swap(t[1], t[2]);
      if (warnings)
        warnings->push_back("line " + std::to_string(l.number) +
                            ": clockwise triangle reoriented");
    }
    for (int k = 0; k < 3; ++k) {
      const int p = t[k], q = t[(k + 1) % 3];
      auto& use = edge_use[{std::min(p, q), std::max(p, q)}];
      if (use.first == 0) use.second = l.number;
      if (++use.first > 2) fail(l.number, "edge shared by more than two triangles");
    }
    tris.push_back(t);
  }

  for (const auto& [edge, use] : edge_use) {
    if (use.first != 1) continue;
    const Eigen::Vector2d a = verts[edge.first], b = verts[edge.second];
    const double len2 = (b - a).squaredNorm();
    for (int w = 0; w < nv; ++w) {
      if (w == edge.first || w == edge.second) continue;
      const Eigen::Vector2d p = verts[w];
      const double s = (p - a).dot(b - a) / len2;
      const double cross = (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x();
      if (s > 1e-12 && s < 1 - 1e-12 && std::abs(cross) < 1e-12 * len2)
        fail(use.second, "hanging node: vertex " + std::to_string(w) + " lies on edge (" +
                             std::to_string(edge.first) + "," + std::to_string(edge.second) + ")");
    }
  }

  Mesh mesh(std::move(verts), std::move(tris), tag, level);

  std::map<std::pair<int, int>, int> boundary;
  for (int e : mesh.boundary_edges()) boundary[{mesh.edges()[e].v[0], mesh.edges()[e].v[1]}] = e;
  std::set<int> listed;
  for (int i = 0; i < nb; ++i) {
    const Line& l = lines[1 + nv + nt + i];
    if (l.tokens.size() != 3) fail(l.number, "boundary line needs 'i j marker'");
    const int p = to_index(l, l.tokens[0], nv), q = to_index(l, l.tokens[1], nv);
    const std::string& marker = l.tokens[2];
    if (marker != "outer" && marker != "hole") fail(l.number, "marker must be outer or hole");
    auto it = boundary.find({std::min(p, q), std::max(p, q)});
    if (it == boundary.end()) fail(l.number, "listed edge is not a boundary edge");
    if (to_string(mesh.edges()[it->second].marker) != marker)
      fail(l.number, "marker '" + marker + "' disagrees with the boundary loop orientation");
    listed.insert(it->second);
  }
  if (static_cast<int>(listed.size()) != static_cast<int>(mesh.boundary_edges().size()))
    fail(lines.back().number, "boundary edge list is incomplete");
  return mesh;
}

}  // namespace quadcurl
