#pragma once

#include "quadcurl/mesh.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace quadcurl {

struct RunConfig {
  std::string command;
  std::string domain;  // omega1 | omega2 | omega3 | file:PATH; empty means the command default
  int refine = 0;
  int scheme = 0;      // 0: 5 for eig, 1 for source
  std::string bc = "rot0";
  int k = 4;
  int num = 8;
  std::string f = "1,0";
  std::string out;
  std::string format;  // empty: csv for eig, vtk for source
  std::string filter;
};

enum ExitCode { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitSolver = 3 };

/// Parses argv and dispatches.  Results go to `out` (or --out), messages to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_eig(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_source(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// "a,b" -> (a, b); throws std::invalid_argument.
Eigen::Vector2d parse_vector_literal(const std::string& text);

/// Mesh for a --domain value refined `level` times.
std::shared_ptr<const Mesh> domain_mesh(const std::string& domain, int level);

struct CheckResult {
  std::string group;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Invariant suite behind `verify`.  Checks whose group or name does not contain
/// `filter` are skipped.  A file: domain replaces the generated meshes in the
/// conformity group.
std::vector<CheckResult> run_verify_suite(const std::string& filter, const std::string& domain);

}  // namespace quadcurl
