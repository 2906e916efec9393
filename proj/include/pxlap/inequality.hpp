#pragma once

#include <string>
#include <vector>

#include "pxlap/energy.hpp"

namespace pxl {

struct SolverOptions;

/// Slack of the chord inequality (1-t) Phi(0) + t Phi(1) - Phi(t) over a
/// theta grid, with the equality diagnosis of ray-strict convexity: equality
/// is expected exactly when v2/v1 is constant and p = r everywhere (or v1 = v2).
struct ConvexityReport {
  std::vector<double> thetas;
  std::vector<double> slacks;
  double phi0 = 0.0;
  double phi1 = 0.0;
  double scale = 0.0;
  double min_slack = 0.0;
  double max_abs_slack = 0.0;
  bool proportional = false;
  bool p_equals_r = false;
  bool equality_expected = false;
  /// theta values whose slack is within 1e-10 * scale of zero.
  std::size_t equality_count = 0;
  bool convex = false;
  /// equality found only where expected, and everywhere where expected.
  bool classification_ok = false;
};

ConvexityReport check_ray_convexity(const NodeField& v1, const NodeField& v2, LineFunctional which,
                                    const EnergyModel& model, const std::vector<double>& thetas);

enum class EqualityClass { kDistinct, kProportional, kIdentical };
const char* to_string(EqualityClass c);

/// Nodewise relation between two fields: identical to relative 1e-12, or a
/// constant ratio on interior nodes to relative 1e-8 (boundary zeros shared).
EqualityClass classify_pair(const NodeField& a, const NodeField& b);

struct RatioBound {
  double sup12 = 0.0;
  double sup21 = 0.0;
  double cap = 1e6;
  bool admissible = false;
};

/// Max over interior nodes of u1/u2 and u2/u1. Throws kInadmissible on a
/// zero or negative interior value.
RatioBound ratio_bound(const NodeField& u1, const NodeField& u2, double cap = 1e6);

struct GapReport {
  double gap = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double scale = 0.0;
  EqualityClass equality_class = EqualityClass::kDistinct;
  double ratio_sup = 0.0;
  double inv_ratio_sup = 0.0;
};

/// gap = i1 - i2 with
///   i1 = sum a(grad w1) . grad(w1 - w2^r / w1^{r-1}) * measure,
///   i2 = sum a(grad w2) . grad(w1^r / w2^{r-1} - w2) * measure,
/// which is Phi'(1) - Phi'(0) along the segment between w1^r and w2^r.
/// Quotients are formed nodewise; the test functions vanish on the boundary.
/// Throws kInadmissible if the ratio bound exceeds the cap.
GapReport diaz_saa_gap(const NodeField& w1, const NodeField& w2, const EnergyModel& model,
                       double ratio_cap = 1e6);

struct ComparisonVerdict {
  double max_excess = 0.0;
  bool f_ordered = false;
  bool f1_nonnegative = false;
  bool positive = false;
  bool ratio_ok = false;
  double ratio_sup = 0.0;
  double inv_ratio_sup = 0.0;
  /// Fraction of quadrature points with p - r > 1e-12 (must be > 0).
  double p_above_r_fraction = 0.0;
  bool hypothesis_ok = false;
  bool conclusion_ok = false;
  /// Max over interior nodes of the u1 residual (<= 0 for a subsolution) and
  /// min of the u2 residual (>= 0 for a supersolution), both per lumped measure.
  double sub_residual = 0.0;
  double super_residual = 0.0;
  bool residual_signs_ok = false;
  double tol = 0.0;
};

/// Compares solutions (or sub/supersolutions) of -div a(x, grad u) = f_i(x) u^{r-1}.
/// Hypothesis violations are flags, never exceptions.
ComparisonVerdict comparison_check(const NodeField& u1, const NodeField& u2, const NodeField& f1,
                                   const NodeField& f2, const EnergyModel& model, double tol,
                                   double residual_tol = 1e-8);

/// The model with reaction f(x, s) = f(x) s^{r-1}, the right-hand side of the
/// comparison problem.
EnergyModel comparison_model(const EnergyModel& model, const NodeField& f);

/// Solves the comparison problem for f1 and f2 and compares the minimizers.
/// Throws kNonConvergence if a solve does not converge.
ComparisonVerdict weak_comparison_experiment(const EnergyModel& model, const NodeField& f1,
                                             const NodeField& f2, const SolverOptions& opts,
                                             double tol);

}  // namespace pxl
