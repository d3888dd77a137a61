#pragma once

#include "quadcurl/assembly.hpp"
#include "quadcurl/fespace.hpp"
#include "quadcurl/manufactured.hpp"
#include "quadcurl/poly.hpp"
#include "quadcurl/solve.hpp"

#include <memory>
#include <string>
#include <vector>

namespace quadcurl {

/// rot0: rot u = 0 and u . n = 0 on the boundary.  natural: the rot condition is dropped.
enum class BcFamily { Rot0, Natural };

std::string to_string(BcFamily bc);
BcFamily bc_family_from_string(const std::string& name);

/// Schemes 1-4 are source problems, 5-8 eigenproblems.  1,5 and 2,6 are mixed
/// (V_h with S_h, W with Argyris); 3,7 and 4,8 are primal (W, vector Argyris).
struct SchemeSpec {
  int scheme_id = 5;
  BcFamily bc = BcFamily::Rot0;
  int k = 4;  // degree of V_h / S_h for schemes 1 and 5
  std::shared_ptr<const Mesh> mesh;
  int num_eigenvalues = 8;
  VectorFunction f = [](const Eigen::Vector2d&) { return Eigen::Vector2d(1.0, 0.0); };
  EigOptions eig;
};

bool is_mixed_scheme(int scheme_id);
/// Throws std::invalid_argument for ids outside 1..8 or unsupported degrees.
void validate(const SchemeSpec& spec);

struct SchemeSpaces {
  std::shared_ptr<const FESpace> V;
  std::shared_ptr<const FESpace> S;  // null for primal schemes
};
SchemeSpaces scheme_spaces(const SchemeSpec& spec);

/// V_h (GradRotR of degree k) and S_h (Lagrange of degree k) for the family.
SchemeSpaces mixed_spaces(std::shared_ptr<const Mesh> mesh, int k, BcFamily bc);

struct SchemeEig {
  EigResult eig;
  Eigen::VectorXd normalized;  // eigenvalues / pi^2
  SchemeSpaces spaces;
};
SchemeEig run_eig(const SchemeSpec& spec);

struct SchemeSource {
  SourceResult result;  // sigma is empty for primal schemes
  SchemeSpaces spaces;
};
/// Diagnostics: "sigma_plus_div" (mixed), "max_boundary_rot", "max_boundary_normal",
/// "harmonic_dimension".
SchemeSource run_source(const SchemeSpec& spec);

struct HarmonicBasis {
  Eigen::MatrixXd columns;  // M-orthonormal
  int dimension = 0;
  int expected = 0;  // betti1 (rot0) or betti1 + 1 (natural)
  bool matches() const { return dimension == expected; }
};

/// Kernel of A + G Msig^{-1} G^T on V_h.
HarmonicBasis harmonic_basis(const SchemeSpaces& spaces, BcFamily bc, const EigOptions& opts = {});
HarmonicBasis harmonic_basis(std::shared_ptr<const Mesh> mesh, int k, BcFamily bc);

/// u_h = grad p_h with Delta p = 1, p = 0 on the boundary, as a field of V_h
/// without boundary conditions.
struct HarmonicField {
  std::shared_ptr<const FESpace> V;
  Eigen::VectorXd u;
};
HarmonicField harmonic_form_natural(std::shared_ptr<const Mesh> mesh, int k);

struct HodgeParts {
  Eigen::VectorXd grad_part;
  Eigen::VectorXd curldiv_part;
  Eigen::VectorXd harmonic_part;
};
HodgeParts hodge_decompose(const Eigen::VectorXd& f, const SchemeSpaces& spaces,
                           const HarmonicBasis& harmonic);
HodgeParts hodge_decompose(const Eigen::VectorXd& f, std::shared_ptr<const Mesh> mesh, int k,
                           BcFamily bc);

/// dim ker(A) - dim grad S_h from dense spectra; independent of harmonic_basis.
int cohomology_dimension(std::shared_ptr<const Mesh> mesh, int k, BcFamily bc);

/// sup ||v||_{M+A} / ||v||_A over the M-orthogonal complement of grad S_h and
/// the harmonic forms in the rot0 space.
double discrete_poincare_constant(std::shared_ptr<const Mesh> mesh, int k);

/// |(u, curl div w) + (grad rot u, w) - <w . n, rot u> + <u . tau, div w>| with the
/// counterclockwise boundary tangent.
double verify_integration_by_parts(const PolyVec& u, const PolyVec& w, const Mesh& mesh);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double err_u = 0.0;         // ||u - u_h||
  double err_grad_rot = 0.0;  // ||grad rot (u - u_h)||
  double err_hgr = 0.0;       // ||u - u_h||_{H(grad rot)}
  double err_sigma = 0.0;     // ||sigma - sigma_h||_1
  double rate_u = 0.0;        // log2 of successive error ratios (0 on the first row)
  double rate_hgr = 0.0;
  double rate_sigma = 0.0;
};

/// Mixed Scheme 1 on uniform refinements of `domain`.  Throws
/// std::invalid_argument if the exact solution violates rot u = 0, u . n = 0 or
/// Delta rot u = 0 on the boundary.
std::vector<ConvergenceRow> convergence_study(DomainTag domain, const std::vector<int>& levels,
                                              const Manufactured& exact, int k = 4);

/// Max over boundary samples of |rot u|, |u . n| and |Delta rot u|.
double boundary_violation(const Manufactured& exact, const Mesh& mesh);

}  // namespace quadcurl
