#pragma once

#include <string>
#include <vector>

#include "pxlap/config.hpp"
#include "pxlap/suites.hpp"

namespace pxl {

enum class Outcome { kPass = 0, kCheckFailed = 1, kNonConverged = 3 };
const char* to_string(Outcome o);

/// What a command produced: a JSON report, an optional CSV table and a
/// one-line summary. Identical inputs give byte-identical strings.
struct CommandResult {
  Outcome outcome = Outcome::kPass;
  std::string report;
  std::string table;
  std::string summary;
};

/// Validates, solves and writes the solution table "x[,y],u". Failed
/// hypotheses without the override give kCheckFailed with the validation
/// report; a solve that misses the tolerance gives kNonConverged.
CommandResult run_solve(const RunConfig& config);

/// Hypothesis reports and the regime; kCheckFailed when one fails.
CommandResult run_validate(const RunConfig& config);

enum class SuiteKind { kConvexity, kDiazSaa, kComparison };
const char* to_string(SuiteKind k);
/// 200 for the inequality suites, 20 for the comparison suite.
std::size_t default_samples(SuiteKind k);

CommandResult run_check(SuiteKind kind, const SuiteParams& params);

struct EigParams {
  double r = 2.0;
  /// Refinement ladder n, 2n, ..., 2^(levels-1) n.
  int levels = 3;
  int n = 64;
  double a = 0.0;
  double b = 1.0;
};

/// first_eigenpair on each level, Richardson extrapolation in h^2 then h^4
/// (needs levels >= 3 for the second pass), and a table of (n, h, lambda).
/// For r = 2 the report also carries the exact value pi^2 / (b-a)^2.
CommandResult run_eig(const EigParams& params);

/// Parameters: h_scale, l_scale (multiply the coefficient fields), m0,
/// m_inf (Kirchhoff constants) and r. One solve per value; the table has one
/// row per point.
CommandResult run_sweep(const RunConfig& config, const std::string& parameter, const std::vector<double>& values);

/// Solution table with 17 significant digits.
std::string solution_table(const NodeField& u);

}  // namespace pxl
