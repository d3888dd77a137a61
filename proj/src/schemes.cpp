#include "quadcurl/schemes.hpp"

#include "quadcurl/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quadcurl {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

int expected_harmonic_dimension(const Mesh& mesh, BcFamily bc)
{
  return compute_topology(mesh).betti1 + (bc == BcFamily::Natural ? 1 : 0);
}

std::shared_ptr<const FESpace> make_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int k,
                                          BcFlags bc)
{
  return std::make_shared<const FESpace>(build_conforming_space(std::move(mesh), kind, k, bc));
}

struct MixedMatrices {
  SparseMatrix A, G, Msig, M;
};

MixedMatrices mixed_matrices(const SchemeSpaces& sp)
{
  MixedMatrices m;
  m.A = assemble(*sp.V, FormKind::GradRotGradRot);
  m.G = assemble(*sp.V, *sp.S, FormKind::GradCoupling);
  m.Msig = assemble(*sp.S, FormKind::MassScalar);
  m.M = assemble(*sp.V, FormKind::MassVec);
  return m;
}

// Gauss points on boundary edges paired with the adjacent element.
struct BoundarySamples {
  std::vector<int> element;
  std::vector<std::vector<Eigen::Vector2d>> points;
  std::vector<Eigen::Vector2d> normal;
  std::vector<double> length;
  Rule1D rule;
};

BoundarySamples boundary_samples(const Mesh& mesh, int npts)
{
  BoundarySamples bs;
  bs.rule = gauss_legendre(npts);
  for (int e : mesh.boundary_edges()) {
    const Edge& edge = mesh.edges()[e];
    const Eigen::Vector2d a = mesh.vertices()[edge.v[0]], b = mesh.vertices()[edge.v[1]];
    std::vector<Eigen::Vector2d> pts;
    for (double s : bs.rule.points) pts.push_back(a + s * (b - a));
    bs.element.push_back(edge.tri[0]);
    bs.points.push_back(pts);
    bs.normal.push_back(mesh.outward_normal(e));
    bs.length.push_back(mesh.edge_length(e));
  }
  return bs;
}

Eigen::VectorXd spd_solve(const SparseMatrix& K, const Eigen::VectorXd& b)
{
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw SolverError("mass matrix factorization failed");
  return ldlt.solve(b);
}

}  // namespace

std::string to_string(BcFamily bc) { return bc == BcFamily::Rot0 ? "rot0" : "natural"; }

BcFamily bc_family_from_string(const std::string& name)
{
  if (name == "rot0") return BcFamily::Rot0;
  if (name == "natural") return BcFamily::Natural;
  throw std::invalid_argument("unknown boundary condition family '" + name + "'");
}

bool is_mixed_scheme(int id) { return id == 1 || id == 2 || id == 5 || id == 6; }

void validate(const SchemeSpec& spec)
{
  if (spec.scheme_id < 1 || spec.scheme_id > 8)
    throw std::invalid_argument("scheme id must be in 1..8");
  if (!spec.mesh) throw std::invalid_argument("scheme needs a mesh");
  if (spec.scheme_id == 1 || spec.scheme_id == 5) {
    check_supported(SpaceKind::GradRotR, spec.k);
    check_supported(SpaceKind::LagrangeScalar, spec.k);
  }
  if (spec.num_eigenvalues < 0) throw std::invalid_argument("number of eigenvalues must be >= 0");
}

SchemeSpaces mixed_spaces(std::shared_ptr<const Mesh> mesh, int k, BcFamily bc)
{
  SchemeSpaces sp;
  sp.V = make_space(mesh, SpaceKind::GradRotR, k, {bc == BcFamily::Rot0, false, false});
  sp.S = make_space(mesh, SpaceKind::LagrangeScalar, k, {});
  return sp;
}

SchemeSpaces scheme_spaces(const SchemeSpec& spec)
{
  validate(spec);
  const bool rot0 = spec.bc == BcFamily::Rot0;
  SchemeSpaces sp;
  switch (spec.scheme_id) {
    case 1:
    case 5: return mixed_spaces(spec.mesh, spec.k, spec.bc);
    case 2:
    case 6:
      sp.V = make_space(spec.mesh, SpaceKind::StokesRotW, 4, {rot0, false, false});
      sp.S = make_space(spec.mesh, SpaceKind::ArgyrisScalar, 5, {});
      break;
    case 3:
    case 7: sp.V = make_space(spec.mesh, SpaceKind::StokesRotW, 4, {rot0, true, false}); break;
    default: sp.V = make_space(spec.mesh, SpaceKind::ArgyrisVector, 5, {rot0, true, false}); break;
  }
  return sp;
}

SchemeEig run_eig(const SchemeSpec& spec)
{
  if (spec.scheme_id < 5 || spec.scheme_id > 8)
    throw std::invalid_argument("eigenvalue schemes are 5..8");
  SchemeEig out;
  out.spaces = scheme_spaces(spec);
  const int n = out.spaces.V->global_dim();
  const int num = std::min(spec.num_eigenvalues, n);
  if (is_mixed_scheme(spec.scheme_id)) {
    const MixedMatrices m = mixed_matrices(out.spaces);
    out.eig = eig_mixed(m.A, m.G, m.Msig, m.M, num, spec.eig);
  } else {
    const SparseMatrix K = SparseMatrix(assemble(*out.spaces.V, FormKind::GradRotGradRot) +
                                        assemble(*out.spaces.V, FormKind::DivDiv));
    const SparseMatrix M = assemble(*out.spaces.V, FormKind::MassVec);
    out.eig = eig_primal(K, M, num, spec.eig);
  }
  out.normalized = out.eig.eigenvalues / kPi2;
  return out;
}

SchemeSource run_source(const SchemeSpec& spec)
{
  if (spec.scheme_id < 1 || spec.scheme_id > 4) throw std::invalid_argument("source schemes are 1..4");
  SchemeSource out;
  out.spaces = scheme_spaces(spec);
  const FESpace& V = *out.spaces.V;
  const Eigen::VectorXd b = assemble_load(V, spec.f);
  if (is_mixed_scheme(spec.scheme_id)) {
    const MixedMatrices m = mixed_matrices(out.spaces);
    const int hdim = expected_harmonic_dimension(*spec.mesh, spec.bc);
    if (hdim > 0) {
      const HarmonicBasis H = harmonic_basis(out.spaces, spec.bc, spec.eig);
      if (!H.matches())
        throw SolverError("discrete harmonic dimension " + std::to_string(H.dimension) +
                              " differs from the topological count " + std::to_string(H.expected),
                          H.dimension);
      out.result = solve_saddle(m.A, m.G, m.Msig, b, &m.M, &H.columns);
    } else {
      out.result = solve_saddle(m.A, m.G, m.Msig, b);
    }
    out.result.diagnostics["harmonic_dimension"] = hdim;
  } else {
    const SparseMatrix K =
        SparseMatrix(assemble(V, FormKind::GradRotGradRot) + assemble(V, FormKind::DivDiv));
    out.result = solve_spd(K, b);
  }

  const Mesh& mesh = *spec.mesh;
  if (out.spaces.S) {
    double err2 = 0.0;
    const int deg = quadrature_degree(V, *out.spaces.S);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const ElementQuadrature q = element_quadrature(mesh, t, deg);
      const auto fu = eval_field(V, out.result.u, t, q.points);
      const auto fs = eval_field(*out.spaces.S, out.result.sigma, t, q.points);
      for (std::size_t i = 0; i < q.points.size(); ++i)
        err2 += q.weights(i) * std::pow(fs[i].value.x() + fu[i].div, 2);
    }
    out.result.diagnostics["sigma_plus_div"] = std::sqrt(err2);
  }
  const BoundarySamples bs = boundary_samples(mesh, 6);
  double max_rot = 0.0, max_normal = 0.0;
  for (std::size_t e = 0; e < bs.element.size(); ++e) {
    const auto fu = eval_field(V, out.result.u, bs.element[e], bs.points[e]);
    for (const auto& s : fu) {
      max_rot = std::max(max_rot, std::abs(s.rot));
      max_normal = std::max(max_normal, std::abs(s.value.dot(bs.normal[e])));
    }
  }
  out.result.diagnostics["max_boundary_rot"] = max_rot;
  out.result.diagnostics["max_boundary_normal"] = max_normal;
  return out;
}

HarmonicBasis harmonic_basis(const SchemeSpaces& spaces, BcFamily bc, const EigOptions& opts)
{
  HarmonicBasis hb;
  hb.expected = expected_harmonic_dimension(*spaces.V->mesh, bc);
  const MixedMatrices m = mixed_matrices(spaces);
  const EigResult r = eig_mixed(m.A, m.G, m.Msig, m.M, hb.expected + 4, opts);
  hb.dimension = r.zero_count;
  hb.columns = r.eigenvectors.leftCols(r.zero_count);
  return hb;
}

HarmonicBasis harmonic_basis(std::shared_ptr<const Mesh> mesh, int k, BcFamily bc)
{
  return harmonic_basis(mixed_spaces(std::move(mesh), k, bc), bc);
}

HarmonicField harmonic_form_natural(std::shared_ptr<const Mesh> mesh, int k)
{
  const FESpace S = build_conforming_space(mesh, SpaceKind::LagrangeScalar, k, {false, false, true});
  HarmonicField out;
  out.V = make_space(mesh, SpaceKind::GradRotR, k, {});
  const SparseMatrix Ks = assemble(S, FormKind::StiffScalar);
  const Eigen::VectorXd load = assemble_load(S, ScalarFunction([](const Eigen::Vector2d&) { return 1.0; }));
  // (grad p, grad q) = -(1, q) is the weak form of Delta p = 1.
  const Eigen::VectorXd p = solve_spd(Ks, -load).u;
  const SparseMatrix G = assemble(*out.V, S, FormKind::GradCoupling);
  const SparseMatrix M = assemble(*out.V, FormKind::MassVec);
  out.u = spd_solve(M, G * p);
  return out;
}

HodgeParts hodge_decompose(const Eigen::VectorXd& f, const SchemeSpaces& spaces,
                           const HarmonicBasis& harmonic)
{
  const FESpace& S = *spaces.S;
  const SparseMatrix Ks = assemble(S, FormKind::StiffScalar);
  const SparseMatrix G = assemble(*spaces.V, S, FormKind::GradCoupling);
  const SparseMatrix M = assemble(*spaces.V, FormKind::MassVec);
  const Eigen::VectorXd ones =
      assemble_load(S, ScalarFunction([](const Eigen::Vector2d&) { return 1.0; }));

  // Neumann problem (grad p, grad q) = (f, grad q) with a mean-value multiplier.
  const int ns = static_cast<int>(Ks.rows());
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < Ks.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(Ks, c); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < ns; ++i)
    if (ones(i) != 0.0) {
      trip.emplace_back(i, ns, ones(i));
      trip.emplace_back(ns, i, ones(i));
    }
  SparseMatrix B(ns + 1, ns + 1);
  B.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SparseMatrix> lu(B);
  if (lu.info() != Eigen::Success) throw SolverError("Neumann problem factorization failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ns + 1);
  rhs.head(ns) = G.transpose() * f;
  const Eigen::VectorXd p = Eigen::VectorXd(lu.solve(rhs)).head(ns);

  HodgeParts parts;
  parts.grad_part = spd_solve(M, G * p);
  parts.harmonic_part = harmonic.columns * (harmonic.columns.transpose() * (M * f));
  parts.curldiv_part = f - parts.grad_part - parts.harmonic_part;
  return parts;
}

HodgeParts hodge_decompose(const Eigen::VectorXd& f, std::shared_ptr<const Mesh> mesh, int k,
                           BcFamily bc)
{
  const SchemeSpaces sp = mixed_spaces(std::move(mesh), k, bc);
  return hodge_decompose(f, sp, harmonic_basis(sp, bc));
}

int cohomology_dimension(std::shared_ptr<const Mesh> mesh, int k, BcFamily bc)
{
  const SchemeSpaces sp = mixed_spaces(std::move(mesh), k, bc);
  const MixedMatrices m = mixed_matrices(sp);
  const SparseMatrix Ks = assemble(*sp.S, FormKind::StiffScalar);
  auto kernel = [](const SparseMatrix& K, const SparseMatrix& M) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(K), Eigen::MatrixXd(M),
                                                                  Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    const double tol = 1e-8 * ev.cwiseAbs().maxCoeff();
    return static_cast<int>((ev.array() < tol).count());
  };
  const int ker_a = kernel(m.A, m.M);
  const int grad_dim = static_cast<int>(Ks.rows()) - kernel(Ks, m.Msig);
  return ker_a - grad_dim;
}

double discrete_poincare_constant(std::shared_ptr<const Mesh> mesh, int k)
{
  const SchemeSpaces sp = mixed_spaces(mesh, k, BcFamily::Rot0);
  const MixedMatrices m = mixed_matrices(sp);
  const int hdim = expected_harmonic_dimension(*mesh, BcFamily::Rot0);
  // Penalize grad S_h until the lowest nonzero mode is divergence-free in the
  // discrete sense (no grad component).
  for (double alpha = 1.0; alpha <= 1e8; alpha *= 10.0) {
    const EigResult r = eig_mixed(m.A, m.G, m.Msig, m.M, hdim + 3, {}, alpha);
    const int j = r.zero_count;
    if (j >= r.eigenvalues.size()) break;
    const Eigen::VectorXd u = r.eigenvectors.col(j);
    const double lambda = r.eigenvalues(j);
    const double ratio = u.dot(m.A * u) / (lambda * u.dot(m.M * u));
    if (ratio > 1.0 - 1e-6) return std::sqrt(1.0 + 1.0 / lambda);
  }
  throw SolverError("could not separate the gradient modes");
}

double verify_integration_by_parts(const PolyVec& u, const PolyVec& w, const Mesh& mesh)
{
  const PolyVec cdw = curl(div(w));
  const PolyVec grot = grad(rot(u));
  const Poly ru = rot(u), dw = div(w);
  const int deg = std::min(20, u.degree() + w.degree() + 1);
  double lhs = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementQuadrature q = element_quadrature(mesh, t, deg);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const Eigen::Vector2d& p = q.points[i];
      lhs += q.weights(i) * (u(p).dot(cdw(p)) + grot(p).dot(w(p)));
    }
  }
  const BoundarySamples bs = boundary_samples(mesh, deg / 2 + 2);
  double rhs = 0.0;
  for (std::size_t e = 0; e < bs.element.size(); ++e) {
    const Eigen::Vector2d n = bs.normal[e];
    const Eigen::Vector2d tau(-n.y(), n.x());
    for (std::size_t i = 0; i < bs.points[e].size(); ++i) {
      const Eigen::Vector2d& p = bs.points[e][i];
      rhs += bs.rule.weights[i] * bs.length[e] * (w(p).dot(n) * ru(p) - u(p).dot(tau) * dw(p));
    }
  }
  return std::abs(lhs - rhs);
}

double boundary_violation(const Manufactured& exact, const Mesh& mesh)
{
  const TrigScalar lap_rot = laplacian(exact.rot_u);
  const BoundarySamples bs = boundary_samples(mesh, 5);
  double worst = 0.0;
  for (std::size_t e = 0; e < bs.element.size(); ++e)
    for (const auto& p : bs.points[e]) {
      worst = std::max({worst, std::abs(exact.rot_u(p)), std::abs(exact.u(p).dot(bs.normal[e])),
                        std::abs(lap_rot(p))});
    }
  return worst;
}

std::vector<ConvergenceRow> convergence_study(DomainTag domain, const std::vector<int>& levels,
                                              const Manufactured& exact, int k)
{
  std::vector<ConvergenceRow> rows;
  for (int level : levels) {
    auto mesh = std::make_shared<const Mesh>(generate_domain(domain, level));
    if (rows.empty()) {
      double scale = 1.0;
      for (const auto& v : mesh->vertices()) scale = std::max(scale, exact.f(v).norm());
      const double viol = boundary_violation(exact, *mesh);
      if (viol > 1e-9 * scale)
        throw std::invalid_argument("manufactured solution violates the boundary conditions (" +
                                    std::to_string(viol) + ")");
    }
    SchemeSpec spec;
    spec.scheme_id = 1;
    spec.k = k;
    spec.mesh = mesh;
    spec.f = [&exact](const Eigen::Vector2d& p) { return exact.f(p); };
    const SchemeSource src = run_source(spec);
    const FESpace& V = *src.spaces.V;
    const FESpace& S = *src.spaces.S;
    const int deg = std::min(20, quadrature_degree(V, S) + 4);
    double eu = 0.0, erot = 0.0, egr = 0.0, es = 0.0;
    for (int t = 0; t < mesh->num_triangles(); ++t) {
      const ElementQuadrature q = element_quadrature(*mesh, t, deg);
      const auto fu = eval_field(V, src.result.u, t, q.points);
      const auto fs = eval_field(S, src.result.sigma, t, q.points);
      for (std::size_t i = 0; i < q.points.size(); ++i) {
        const Eigen::Vector2d& p = q.points[i];
        const double w = q.weights(i);
        eu += w * (exact.u(p) - fu[i].value).squaredNorm();
        erot += w * std::pow(exact.rot_u(p) - fu[i].rot, 2);
        egr += w * (exact.grad_rot_u(p) - fu[i].grad_rot).squaredNorm();
        es += w * (std::pow(exact.sigma(p) - fs[i].value.x(), 2) +
                   (exact.grad_sigma(p) - fs[i].grad).squaredNorm());
      }
    }
    ConvergenceRow row;
    row.level = level;
    row.h = mesh->mesh_size();
    row.err_u = std::sqrt(eu);
    row.err_grad_rot = std::sqrt(egr);
    row.err_hgr = std::sqrt(eu + erot + egr);
    row.err_sigma = std::sqrt(es);
    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      const double steps = std::log2(prev.h / row.h);
      auto rate = [steps](double a, double b) {
        return (a > 0.0 && b > 0.0) ? std::log2(a / b) / steps : 0.0;
      };
      row.rate_u = rate(prev.err_u, row.err_u);
      row.rate_hgr = rate(prev.err_hgr, row.err_hgr);
      row.rate_sigma = rate(prev.err_sigma, row.err_sigma);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace quadcurl
