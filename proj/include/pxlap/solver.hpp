#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pxlap/energy.hpp"
#include "pxlap/problems.hpp"
#include "pxlap/validation.hpp"

namespace pxl {

enum class InitKind { kBump, kRandom, kProvided };
const char* to_string(InitKind k);

struct SolverOptions {
  double eps0 = 1e-2;
  double eps_min = 1e-8;
  double continuation = 0.1;
  /// Stationarity: max over interior nodes of |gradient_j| / lumped_measure_j.
  double grad_tol = 1e-9;
  int max_iters = 5000;
  double armijo = 1e-4;
  double shrink = 0.5;
  InitKind init = InitKind::kBump;
  std::uint64_t seed = 0;
  /// Used when init == kProvided.
  std::optional<NodeField> initial;
  bool abs_polish = true;

  /// Throws kInvalidArgument on inconsistent settings.
  void check() const;
};

struct StageTrace {
  double eps = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct SolveReport {
  NodeField solution;
  double energy = 0.0;
  /// Unregularized stationarity measure at the returned iterate.
  double residual_max = 0.0;
  std::vector<StageTrace> stages;
  int iterations = 0;
  bool converged = false;
  bool positivity_ok = false;
  double hopf_margin = 0.0;
  bool negative_energy = false;
  double init_scale = 1.0;
  bool init_negative_found = false;
  /// Largest energy increase over an accepted step (rounding level when nonzero).
  double max_energy_increase = 0.0;
  /// Largest energy increase caused by replacing u with |u|.
  double max_polish_increase = 0.0;
  std::optional<double> kirchhoff_M0;
  std::optional<double> kirchhoff_consistency;
  std::optional<Regime> regime;
  ValidationReport validation;
  bool validation_overridden = false;
};

/// 4 (x-a)(b-x)/(b-a)^2 on an interval, the product of two such profiles on
/// a rectangle. Maximum 1, zero on the boundary.
NodeField bump(const MeshPtr& mesh);

struct InitialGuess {
  NodeField field;
  double scale = 1.0;
  bool negative_found = false;
  double energy = 0.0;
};

/// Bump or seeded random profile phi, scaled by the t on a log grid in
/// [1e-4, 10] minimizing E(t phi). When no t gives negative energy the flag
/// stays false and t = 1. A provided field passes through unchanged.
InitialGuess initial_guess(const EnergyModel& model, const SolverOptions& opts);

/// Preconditioned descent with backtracking and eps-continuation
/// eps0, eps0 * continuation, ..., eps_min, then a final stage at eps = 0.
/// The direction solves P d = -g with P the regularized flux Jacobian
/// (times M for the Kirchhoff model) plus the lumped absorption slope.
/// An exhausted budget returns the last iterate with converged = false.
SolveReport minimize_energy(const EnergyModel& model, const SolverOptions& opts);

/// Max over interior nodes of |g_j| / lumped_measure_j with g the
/// unregularized Gateaux gradient.
double weak_residual(const NodeField& u, const EnergyModel& model);
double weak_residual(const NodeField& u, const ProblemSpec& spec);

/// Min over boundary nodes of (u at the inward neighbour - u) / distance.
double hopf_diagnostic(const NodeField& u);

/// Sum f(u) u * measure over sum a(grad u) . grad u * measure: the value of
/// M that makes u satisfy the weak form tested with u itself.
double kirchhoff_multiplier_estimate(const NodeField& u, const EnergyModel& model);

/// Validates (throws kInadmissible listing the failed hypotheses unless
/// overridden), minimizes, and attaches the regime and validation report.
SolveReport solve(const ProblemSpec& spec, const SolverOptions& opts, bool override_validation = false);
SolveReport solve_problem1(const ProblemSpec& spec, const SolverOptions& opts, bool override_validation = false);
SolveReport solve_problem2(const ProblemSpec& spec, const SolverOptions& opts, bool override_validation = false);
SolveReport solve_kirchhoff(const ProblemSpec& spec, const SolverOptions& opts, bool override_validation = false);

struct EigenOptions {
  /// Relative stationarity: max |gradient_j| / (r * lambda * lumped_measure_j).
  double tol = 1e-11;
  /// Accepted instead of tol once the quotient stops decreasing at rounding level.
  double stall_tol = 1e-8;
  int max_iters = 5000;
};

struct EigenResult {
  double lambda = 0.0;
  NodeField phi;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

/// Minimizes sum |grad u|^r * measure / sum |u_q|^r * measure (u_q the cell
/// average) from the bump by preconditioned descent; phi >= 0 is normalized
/// so that sum |phi_q|^r * measure = 1 and lambda is the quotient at phi.
/// Throws kNonConvergence when the budget is exhausted.
EigenResult first_eigenpair(const MeshPtr& mesh, double r, const EigenOptions& opts = {});

struct UniquenessReport {
  std::size_t runs = 0;
  std::size_t converged_runs = 0;
  double max_distance = 0.0;
  /// Max of |gap| / scale over pairs of positive solutions.
  double max_relative_gap = 0.0;
  std::size_t gap_pairs = 0;
  std::vector<double> energies;
  std::vector<double> sup_norms;
  Regime regime = Regime::kUnclassified;
  /// unique, not-unique, expected-multiplicity or inconclusive.
  std::string tag;
  bool passed = false;
};

/// Runs the bump init and n_inits seeded random inits.
UniquenessReport uniqueness_experiment(const ProblemSpec& spec, const SolverOptions& opts, int n_inits,
                                       std::uint64_t seed, double tol);

}  // namespace pxl
