#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pxlap/problems.hpp"
#include "pxlap/solver.hpp"

namespace pxl {

struct DomainConfig {
  int dimension = 1;
  double ax = 0.0;
  double bx = 1.0;
  double ay = 0.0;
  double by = 1.0;
  int nx = 64;
  int ny = 64;
};

struct ProblemConfig {
  ProblemKind kind = ProblemKind::kProblem1;
  ReactionKind reaction = ReactionKind::kPower;
  std::string h = "1";
  std::string q = "1.5";
  std::optional<std::string> l;
  std::optional<std::string> Q;
  std::optional<double> m0;
  std::optional<double> m_inf;
};

struct CheckConfig {
  int n = 64;
  int dimension = 1;
  std::optional<std::size_t> samples;
};

struct SweepConfig {
  std::string parameter;
  std::vector<double> values;
};

struct OutputConfig {
  std::string solution = "solution.csv";
  std::string report = "report.json";
};

/// Everything one command needs. Expressions stay as text until a mesh is
/// built; build_problem samples them at the nodes.
struct RunConfig {
  DomainConfig domain;
  std::string p = "2";
  double r = 2.0;
  AnisotropyKind anisotropy = AnisotropyKind::kIsotropic;
  std::vector<std::string> weights;
  ProblemConfig problem;
  SolverOptions solver;
  bool override_validation = false;
  CheckConfig check;
  std::optional<SweepConfig> sweep;
  std::optional<std::uint64_t> seed;
  OutputConfig output;
};

/// Parses the JSON document. Unknown keys, wrong types, a missing required
/// block and incomplete problem terms throw kConfig; bad expressions throw
/// kSyntax.
RunConfig parse_config(std::string_view json_text);
/// Reads and parses a file; an unreadable file throws kConfig.
RunConfig load_config(const std::string& path);

/// Inverse of parse_config up to formatting: parse_config(to_json(c)) == c.
std::string to_json(const RunConfig& config);

MeshPtr build_mesh(const RunConfig& config);
ProblemSpec build_problem(const RunConfig& config, const MeshPtr& mesh);
/// The solver block with the seed applied. A random init without a seed
/// throws kConfig.
SolverOptions solver_options(const RunConfig& config);

}  // namespace pxl
