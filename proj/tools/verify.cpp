#include "quadcurl/cli.hpp"

#include "quadcurl/schemes.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace quadcurl {

namespace {

using Rng = std::mt19937;

Poly random_poly(int degree, Rng& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Poly p(degree);
  for (int d = 0; d <= degree; ++d)
    for (int b = 0; b <= d; ++b) p.set_coeff(d - b, b, u(rng));
  return p;
}

PolyVec random_polyvec(int degree, Rng& rng)
{
  PolyVec v;
  v.x = random_poly(degree, rng);
  v.y = random_poly(degree, rng);
  return v;
}

Eigen::VectorXd random_vector(int n, Rng& rng)
{
  std::normal_distribution<double> g;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = g(rng);
  return x;
}

std::string sci(double v)
{
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << v;
  return os.str();
}

struct Suite {
  std::string filter;
  std::vector<CheckResult> results;

  bool wanted(const std::string& group, const std::string& name) const
  {
    return filter.empty() || group.find(filter) != std::string::npos ||
           name.find(filter) != std::string::npos;
  }

  // fn returns (pass, detail); exceptions count as failures.
  void run(const std::string& group, const std::string& name,
           const std::function<std::pair<bool, std::string>()>& fn)
  {
    if (!wanted(group, name)) return;
    CheckResult r{group, name, false, ""};
    try {
      auto [pass, detail] = fn();
      r.pass = pass;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    results.push_back(r);
  }
};

std::pair<bool, std::string> below(double value, double tol)
{
  return {value < tol, sci(value) + " < " + sci(tol)};
}

void complex_checks(Suite& s)
{
  s.run("complex", "rot_grad_zero", [] {
    Rng rng(11);
    double worst = 0.0;
    for (int d = 1; d <= 8; ++d) worst = std::max(worst, rot(grad(random_poly(d, rng))).max_abs());
    return below(worst, 1e-12);
  });
  s.run("complex", "div_curl_zero", [] {
    Rng rng(12);
    double worst = 0.0;
    for (int d = 1; d <= 8; ++d) worst = std::max(worst, div(curl(random_poly(d, rng))).max_abs());
    return below(worst, 1e-12);
  });
  s.run("complex", "rot_curl_minus_laplacian", [] {
    Rng rng(13);
    double worst = 0.0;
    for (int d = 2; d <= 8; ++d) {
      const Poly p = random_poly(d, rng);
      worst = std::max(worst, (rot(curl(p)) + laplacian(p)).max_abs());
    }
    return below(worst, 1e-12);
  });
  s.run("complex", "rot_poincare_identity", [] {
    Rng rng(14);
    double worst = 0.0;
    for (int d = 0; d <= 6; ++d) {
      const Poly p = random_poly(d, rng);
      worst = std::max(worst, (rot(poincare(p)) - p).max_abs());
    }
    return below(worst, 1e-13);
  });
}

void conformity_checks(Suite& s, const std::string& domain)
{
  std::vector<std::string> domains = {"omega1", "omega2", "omega3"};
  if (domain.rfind("file:", 0) == 0) domains = {domain};
  struct Case {
    SpaceKind kind;
    int k;
    BcFlags bc;
  };
  const std::vector<Case> cases = {
      {SpaceKind::LagrangeScalar, 4, {false, false, true}}, {SpaceKind::ArgyrisScalar, 5, {}},
      {SpaceKind::GradRotR, 4, {true, false, false}},     {SpaceKind::GradRotR, 4, {false, true, false}},
      {SpaceKind::StokesRotW, 4, {true, false, false}},   {SpaceKind::StokesRotW, 4, {true, true, false}},
      {SpaceKind::ArgyrisVector, 5, {true, true, false}}};
  for (const auto& d : domains) {
    if (!s.wanted("conformity", d)) continue;
    std::shared_ptr<const Mesh> mesh;
    try {
      mesh = domain_mesh(d, 0);
    } catch (const std::exception& e) {
      s.results.push_back({"conformity", d, false, std::string("mesh rejected: ") + e.what()});
      continue;
    }
    for (const auto& c : cases) {
      std::string name = d + "/" + to_string(c.kind);
      if (c.bc.rot0) name += "+rot0";
      if (c.bc.normal0) name += "+normal0";
      if (c.bc.dirichlet) name += "+dirichlet";
      s.run("conformity", name, [&] {
        const FESpace sp = build_conforming_space(mesh, c.kind, c.k, c.bc);
        Rng rng(21);
        const Eigen::VectorXd x = random_vector(sp.global_dim(), rng);
        const double jump = max_interface_jump(sp, x), bnd = max_boundary_residual(sp, x);
        return std::make_pair(jump < 1e-10 && bnd < 1e-10,
                              "jump " + sci(jump) + ", boundary " + sci(bnd) + " (< 1e-10)");
      });
    }
  }
}

void embedding_checks(Suite& s)
{
  s.run("embedding", "grad_S_in_V", [] {
    auto mesh = std::make_shared<const Mesh>(generate_domain(DomainTag::Omega1, 0));
    const FESpace V = build_conforming_space(mesh, SpaceKind::GradRotR, 4, {true, false, false});
    const FESpace S = build_conforming_space(mesh, SpaceKind::LagrangeScalar, 4);
    Rng rng(31);
    const Eigen::VectorXd sh = random_vector(S.global_dim(), rng);
    const SparseMatrix M = assemble(V, FormKind::MassVec);
    const SparseMatrix G = assemble(V, S, FormKind::GradCoupling);
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(M);
    const Eigen::VectorXd c = ldlt.solve(G * sh);
    double diff = 0.0, scale = 0.0;
    for (int t = 0; t < mesh->num_triangles(); ++t) {
      const auto q = element_quadrature(*mesh, t, 6);
      const auto fs = eval_field(S, sh, t, q.points);
      const auto fv = eval_field(V, c, t, q.points);
      for (std::size_t i = 0; i < q.points.size(); ++i) {
        diff = std::max(diff, (fs[i].grad - fv[i].value).norm());
        scale = std::max(scale, fs[i].grad.norm());
      }
    }
    return below(diff / scale, 1e-10);
  });
}

void census_checks(Suite& s)
{
  struct Case {
    DomainTag d;
    BcFamily bc;
    int scheme;
    int expected;
  };
  const std::vector<Case> cases = {
      {DomainTag::Omega1, BcFamily::Rot0, 5, 0},    {DomainTag::Omega2, BcFamily::Rot0, 5, 1},
      {DomainTag::Omega3, BcFamily::Rot0, 5, 0},    {DomainTag::Omega1, BcFamily::Natural, 5, 1},
      {DomainTag::Omega2, BcFamily::Natural, 5, 2}, {DomainTag::Omega3, BcFamily::Natural, 5, 1},
      {DomainTag::Omega2, BcFamily::Rot0, 6, 1},    {DomainTag::Omega2, BcFamily::Natural, 6, 2},
      {DomainTag::Omega2, BcFamily::Rot0, 7, 0},    {DomainTag::Omega2, BcFamily::Rot0, 8, 0}};
  for (const auto& c : cases) {
    const std::string name = "scheme" + std::to_string(c.scheme) + "/" + to_string(c.d) + "/" +
                             to_string(c.bc);
    s.run("census", name, [&] {
      SchemeSpec spec;
      spec.scheme_id = c.scheme;
      spec.bc = c.bc;
      spec.mesh = std::make_shared<const Mesh>(generate_domain(c.d, 0));
      const SchemeEig r = run_eig(spec);
      return std::make_pair(r.eig.zero_count == c.expected,
                            "zero_count " + std::to_string(r.eig.zero_count) + ", expected " +
                                std::to_string(c.expected));
    });
  }
  for (auto d : {DomainTag::Omega1, DomainTag::Omega2, DomainTag::Omega3})
    for (auto bc : {BcFamily::Rot0, BcFamily::Natural}) {
      s.run("census", "dual_route/" + to_string(d) + "/" + to_string(bc), [&] {
        auto mesh = std::make_shared<const Mesh>(generate_domain(d, 0));
        const int dense = cohomology_dimension(mesh, 4, bc);
        const HarmonicBasis hb = harmonic_basis(mesh, 4, bc);
        return std::make_pair(dense == hb.dimension && hb.matches(),
                              "kernel count " + std::to_string(dense) + ", harmonic basis " +
                                  std::to_string(hb.dimension) + ", topology " +
                                  std::to_string(hb.expected));
      });
    }
}

void ibp_checks(Suite& s)
{
  s.run("ibp", "closed_form_pair", [] {
    PolyVec u, w;
    u.x = Poly::monomial(0, 2);
    u.y = Poly(0);
    w.x = Poly::monomial(1, 1);
    w.y = Poly::monomial(2, 0);
    const Mesh mesh = generate_domain(DomainTag::Omega1, 0);
    return below(verify_integration_by_parts(u, w, mesh), 1e-10);
  });
  for (auto d : {DomainTag::Omega1, DomainTag::Omega2, DomainTag::Omega3}) {
    s.run("ibp", "random_degree5/" + to_string(d), [d] {
      Rng rng(41);
      const Mesh mesh = generate_domain(d, 0);
      double worst = 0.0;
      for (int trial = 0; trial < 5; ++trial)
        worst = std::max(worst, verify_integration_by_parts(random_polyvec(5, rng),
                                                            random_polyvec(5, rng), mesh));
      return below(worst, 1e-10);
    });
  }
}

void poincare_checks(Suite& s)
{
  for (auto d : {DomainTag::Omega1, DomainTag::Omega3}) {
    s.run("poincare", "bounded/" + to_string(d), [d] {
      std::vector<double> c;
      for (int level = 0; level <= 2; ++level)
        c.push_back(discrete_poincare_constant(std::make_shared<const Mesh>(generate_domain(d, level)), 4));
      const double lo = *std::min_element(c.begin(), c.end());
      const double hi = *std::max_element(c.begin(), c.end());
      std::ostringstream os;
      os << "C = " << c[0] << ", " << c[1] << ", " << c[2] << "; max/min " << hi / lo << " < 1.5";
      return std::make_pair(lo >= 1.0 && hi / lo < 1.5, os.str());
    });
  }
}

void hodge_checks(Suite& s)
{
  s.run("hodge", "pythagoras/omega2", [] {
    auto mesh = std::make_shared<const Mesh>(generate_domain(DomainTag::Omega2, 0));
    const SchemeSpaces sp = mixed_spaces(mesh, 4, BcFamily::Rot0);
    const HarmonicBasis hb = harmonic_basis(sp, BcFamily::Rot0);
    Rng rng(51);
    const Eigen::VectorXd f = random_vector(sp.V->global_dim(), rng);
    const HodgeParts parts = hodge_decompose(f, sp, hb);
    const SparseMatrix M = assemble(*sp.V, FormKind::MassVec);
    auto sq = [&M](const Eigen::VectorXd& x) { return x.dot(M * x); };
    const double defect = std::abs(sq(f) - sq(parts.grad_part) - sq(parts.curldiv_part) -
                                   sq(parts.harmonic_part)) / sq(f);
    return below(defect, 1e-8);
  });
}

void table_checks(Suite& s)
{
  s.run("table", "omega1_scheme5_level1", [] {
    SchemeSpec spec;
    spec.scheme_id = 5;
    spec.mesh = std::make_shared<const Mesh>(generate_domain(DomainTag::Omega1, 1));
    const SchemeEig r = run_eig(spec);
    const double exact[8] = {1, 1, 2, 4, 4, 5, 5, 8};
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) worst = std::max(worst, std::abs(r.normalized(i) - exact[i]));
    return below(worst, 1e-4);
  });
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const std::string& filter, const std::string& domain)
{
  Suite s;
  s.filter = filter;
  complex_checks(s);
  conformity_checks(s, domain);
  embedding_checks(s);
  census_checks(s);
  ibp_checks(s);
  poincare_checks(s);
  hodge_checks(s);
  table_checks(s);
  return s.results;
}

}  // namespace quadcurl
