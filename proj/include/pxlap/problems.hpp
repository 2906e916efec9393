#pragma once

#include <vector>

#include "pxlap/energy.hpp"
#include "pxlap/validation.hpp"

namespace pxl {

enum class ProblemKind { kProblem1, kProblem2, kKirchhoff };
const char* to_string(ProblemKind k);

/// -div a(x, grad u) = f(x, u)                      (problem 1)
/// -div a(x, grad u) + g(x, u) = f(x, u)           (problem 2)
/// -M(D(u)) div a(x, grad u) = f(x, u)             (Kirchhoff)
/// with u = 0 on the boundary. The terms live in `model`.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::kProblem1;
  EnergyModel model;
};

/// Checks that the model carries the terms its kind needs (reaction always,
/// absorption for problem 2, Kirchhoff for the Kirchhoff problem, and nothing
/// extra). Throws kConfig otherwise.
ProblemSpec make_problem(ProblemKind kind, EnergyModel model);

/// 200 log-spaced points in [1e-6, 1e3].
std::vector<double> default_s_grid();
/// 0, 0.1, ..., 100.
std::vector<double> default_t_grid();

/// (f1) f >= 0 and f(x, 0) = 0; (f2) s -> f(x, s)/s^{r-1} strictly
/// decreasing; (f3) that ratio tends to +inf at 0 and to 0 at infinity.
/// Decided in closed form from the nodal coefficients.
ValidationReport validate_f(const ReactionTerm& term, double r, const std::vector<double>& s_grid);

/// (g1) g > 0 for s > 0 and g(x, 0) = 0; (g2) s -> g(x, s)/s^{r-1}
/// nondecreasing (Q >= r); (g3) 1 < Q < p* nodewise. The entry
/// "(g) bound near 0" carries C0 with g(x, s) <= C0 s^{r-1} on (0, 1].
ValidationReport validate_g(const AbsorptionTerm& term, double r, const ExponentField& p, int dimension,
                            const std::vector<double>& s_grid);

/// (M1) M(0) > 0; (M2) M nondecreasing; (M3) M bounded; and the sandwich
/// M(0) t <= M_hat(t) <= M(inf) t on the grid.
ValidationReport validate_M(const KirchhoffTerm& term, const std::vector<double>& t_grid);

/// 1 <= q_minus <= q_plus < r < p_minus <= p_plus and r <= Q_minus.
ValidationReport validate_corollary_chain(const NodeField& q, const NodeField& Q, double r,
                                          const ExponentField& p);

/// Exponent hypothesis plus the validators the problem kind requires.
ValidationReport validate_problem(const ProblemSpec& spec);

enum class Regime { kUniqueFull, kUniquePartialC, kUniquePartialD, kDegenerateEigen, kUnclassified };
const char* to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::kUnclassified;
  /// Fractions of quadrature points with p > r and with q < r.
  double p_above_r_fraction = 0.0;
  double q_below_r_fraction = 0.0;
};

/// Checked in this order:
///   degenerate-eigen   p and q constant, q = r = p;
///   unique-partial-c   r = p_minus, q_plus <= r, p > r on some cells;
///   unique-partial-d   p = r everywhere, q_plus <= r, q < r on some cells;
///   unique-full        q_plus < r <= p_minus;
/// anything else is unclassified.
RegimeReport sharpness_regime(const ProblemSpec& spec);

}  // namespace pxl
