#include "quadcurl/cli.hpp"

#include "quadcurl/schemes.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace quadcurl {

namespace {

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

std::string fixed6(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Writes to --out only after the whole result exists, so failures leave no file.
int emit(const RunConfig& cfg, const std::string& text, std::ostream& out, std::ostream& err)
{
  if (cfg.out.empty()) {
    out << text;
    return kExitOk;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) {
    err << "error: cannot open " << cfg.out << " for writing\n";
    return kExitUsage;
  }
  file << text;
  return kExitOk;
}

BcFamily parse_bc(const std::string& s)
{
  try {
    return bc_family_from_string(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void check_common(const RunConfig& cfg)
{
  if (cfg.refine < 0 || cfg.refine > 6) throw UsageError("--refine must be in 0..6");
  if (cfg.num < 0) throw UsageError("--num must be >= 0");
  parse_bc(cfg.bc);
  // Fails early on unknown names; file meshes are read later.
  if (!cfg.domain.empty() && cfg.domain.rfind("file:", 0) != 0) {
    try {
      domain_from_string(cfg.domain);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
}

// Point values at mesh vertices, averaged over the adjacent elements.
struct VertexField {
  std::vector<Eigen::Vector2d> u;
  std::vector<double> rot;
};

VertexField sample_vertices(const FESpace& V, const Eigen::VectorXd& x)
{
  const Mesh& mesh = *V.mesh;
  VertexField vf;
  vf.u.assign(mesh.num_vertices(), Eigen::Vector2d::Zero());
  vf.rot.assign(mesh.num_vertices(), 0.0);
  std::vector<int> count(mesh.num_vertices(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    std::vector<Eigen::Vector2d> pts;
    for (int v : tri) pts.push_back(mesh.vertices()[v]);
    const auto s = eval_field(V, x, t, pts);
    for (int i = 0; i < 3; ++i) {
      vf.u[tri[i]] += s[i].value;
      vf.rot[tri[i]] += s[i].rot;
      ++count[tri[i]];
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (count[v] > 0) {
      vf.u[v] /= count[v];
      vf.rot[v] /= count[v];
    }
  return vf;
}

std::string write_vtk(const Mesh& mesh, const VertexField& vf, const std::string& title)
{
  std::ostringstream os;
  os << std::setprecision(12);
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.vertices()) os << p.x() << ' ' << p.y() << " 0\n";
  os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
  os << "POINT_DATA " << mesh.num_vertices() << '\n';
  os << "VECTORS u_h double\n";
  for (const auto& u : vf.u) os << u.x() << ' ' << u.y() << " 0\n";
  os << "SCALARS rot_u_h double 1\nLOOKUP_TABLE default\n";
  for (double r : vf.rot) os << r << '\n';
  return os.str();
}

int guarded(const std::function<int()>& body, std::ostream& err)
{
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MeshError& e) {
    err << "error: mesh: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what();
    if (e.kernel_dimension >= 0) err << " (numerical kernel dimension " << e.kernel_dimension << ")";
    err << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace

Eigen::Vector2d parse_vector_literal(const std::string& text)
{
  std::istringstream is(text);
  double a = 0.0, b = 0.0;
  char comma = 0;
  if (!(is >> a >> comma >> b) || comma != ',' || !(is >> std::ws).eof())
    throw std::invalid_argument("expected a vector literal \"a,b\", got \"" + text + "\"");
  return {a, b};
}

std::shared_ptr<const Mesh> domain_mesh(const std::string& domain, int level)
{
  if (domain.rfind("file:", 0) == 0) {
    Mesh m = load_mesh(domain.substr(5));
    for (int i = 0; i < level; ++i) m = refine_uniform(m);
    return std::make_shared<const Mesh>(std::move(m));
  }
  return std::make_shared<const Mesh>(generate_domain(domain_from_string(domain), level));
}

int cmd_eig(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  return guarded(
      [&] {
        check_common(cfg);
        const int scheme = cfg.scheme == 0 ? 5 : cfg.scheme;
        if (scheme < 5 || scheme > 8) throw UsageError("eig needs --scheme in 5..8");
        const std::string format = cfg.format.empty() ? "csv" : cfg.format;
        if (format != "csv" && format != "text") throw UsageError("eig writes csv or text");
        const std::string domain = cfg.domain.empty() ? "omega1" : cfg.domain;

        std::ostringstream os;
        if (format == "csv") {
          os << "n";
          for (int i = 1; i <= cfg.num; ++i) os << ",lambda_" << i;
          os << ",zero_count\n";
        } else {
          os << "scheme " << scheme << ", " << domain << ", bc " << cfg.bc
             << ", eigenvalues / pi^2\n";
        }
        if (cfg.num == 0) return emit(cfg, os.str(), out, err);

        for (int level = 0; level <= cfg.refine; ++level) {
          SchemeSpec spec;
          spec.scheme_id = scheme;
          spec.bc = parse_bc(cfg.bc);
          spec.k = cfg.k;
          spec.num_eigenvalues = cfg.num;
          spec.mesh = domain_mesh(domain, level);
          const SchemeEig r = run_eig(spec);
          if (format == "csv") {
            os << level;
            for (int i = 0; i < cfg.num; ++i)
              os << ',' << (i < r.normalized.size() ? fixed6(r.normalized(i)) : std::string());
            os << ',' << r.eig.zero_count << '\n';
          } else {
            os << "level " << level << " (dim " << r.spaces.V->global_dim() << ", zeros "
               << r.eig.zero_count << "):";
            for (int i = 0; i < r.normalized.size(); ++i) os << ' ' << fixed6(r.normalized(i));
            os << '\n';
          }
        }
        return emit(cfg, os.str(), out, err);
      },
      err);
}

int cmd_source(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  return guarded(
      [&] {
        check_common(cfg);
        const int scheme = cfg.scheme == 0 ? 1 : cfg.scheme;
        if (scheme < 1 || scheme > 4) throw UsageError("source needs --scheme in 1..4");
        const std::string format = cfg.format.empty() ? "vtk" : cfg.format;
        if (format != "csv" && format != "vtk" && format != "text")
          throw UsageError("unknown --format " + format);
        const Eigen::Vector2d f = parse_vector_literal(cfg.f);
        SchemeSpec spec;
        spec.scheme_id = scheme;
        spec.bc = parse_bc(cfg.bc);
        spec.k = cfg.k;
        spec.mesh = domain_mesh(cfg.domain.empty() ? "omega1" : cfg.domain, cfg.refine);
        spec.f = [f](const Eigen::Vector2d&) { return f; };
        const SchemeSource r = run_source(spec);

        for (const auto& [key, value] : r.result.diagnostics) err << key << " = " << value << '\n';
        const VertexField vf = sample_vertices(*r.spaces.V, r.result.u);
        std::ostringstream os;
        os << std::setprecision(12);
        if (format == "vtk") {
          os << write_vtk(*spec.mesh, vf, "scheme " + std::to_string(scheme) + " source field");
        } else if (format == "csv") {
          os << "x,y,u1,u2,rot\n";
          for (int v = 0; v < spec.mesh->num_vertices(); ++v) {
            const auto& p = spec.mesh->vertices()[v];
            os << p.x() << ',' << p.y() << ',' << vf.u[v].x() << ',' << vf.u[v].y() << ','
               << vf.rot[v] << '\n';
          }
        } else {
          const SparseMatrix M = assemble(*r.spaces.V, FormKind::MassVec);
          os << "scheme " << scheme << " on " << (cfg.domain.empty() ? "omega1" : cfg.domain)
             << " level " << cfg.refine << "\n";
          os << "dim V_h = " << r.spaces.V->global_dim() << "\n";
          os << "||u_h|| = " << std::sqrt(r.result.u.dot(M * r.result.u)) << "\n";
          os << "relative residual = " << r.result.residual << "\n";
          for (const auto& [key, value] : r.result.diagnostics) os << key << " = " << value << "\n";
        }
        return emit(cfg, os.str(), out, err);
      },
      err);
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  return guarded(
      [&] {
        const auto results = run_verify_suite(cfg.filter, cfg.domain);
        bool ok = true;
        for (const auto& r : results) {
          out << (r.pass ? "PASS " : "FAIL ") << r.group << '/' << r.name;
          if (!r.detail.empty()) out << ": " << r.detail;
          out << '\n';
          ok = ok && r.pass;
        }
        if (results.empty()) err << "no checks match filter '" << cfg.filter << "'\n";
        return ok ? kExitOk : kExitCheckFailed;
      },
      err);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Fourth-order curl problems: mixed and primal finite element schemes"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--domain", cfg.domain, "omega1 | omega2 | omega3 | file:PATH");
    sub->add_option("--refine", cfg.refine, "uniform refinement level");
    sub->add_option("--scheme", cfg.scheme, "scheme id");
    sub->add_option("--bc", cfg.bc, "rot0 | natural");
    sub->add_option("--k", cfg.k, "degree of V_h and S_h for schemes 1 and 5");
    sub->add_option("--out", cfg.out, "output file (default: standard output)");
    sub->add_option("--format", cfg.format, "csv | vtk | text");
  };
  CLI::App* eig = app.add_subcommand("eig", "eigenvalue table, one row per level");
  add_common(eig);
  eig->add_option("--num", cfg.num, "number of eigenvalues");
  CLI::App* source = app.add_subcommand("source", "source problem field");
  add_common(source);
  source->add_option("--f", cfg.f, "constant right-hand side \"a,b\"");
  CLI::App* verify = app.add_subcommand("verify", "invariant suite");
  verify->add_option("--filter", cfg.filter, "run checks whose group or name contains this");
  verify->add_option("--domain", cfg.domain, "file:PATH replaces the generated meshes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (eig->parsed()) return cmd_eig(cfg, out, err);
  if (source->parsed()) return cmd_source(cfg, out, err);
  return cmd_verify(cfg, out, err);
}

}  // namespace quadcurl
