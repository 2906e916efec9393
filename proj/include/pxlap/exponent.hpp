#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "pxlap/mesh.hpp"
#include "pxlap/validation.hpp"

namespace pxl {

/// Stand-in for p*(x) = +infinity.
inline constexpr double kInfiniteExponent = std::numeric_limits<double>::max();

/// Variable exponent p(x) sampled at the nodes, with its grid extrema and the
/// comparison constant r. Construction requires p > 1 at every node and
/// r >= 1; the relation r <= p_minus is reported by
/// validate_exponent_hypothesis rather than enforced.
class ExponentField {
 public:
  ExponentField(NodeField p, double r);

  const NodeField& values() const { return p_; }
  const MeshPtr& mesh_ptr() const { return p_.mesh_ptr(); }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  double r() const { return r_; }

  /// p at the quadrature point of cell c (mean of its nodal values).
  double at_cell(std::size_t c) const { return cell_p_[c]; }

  /// Fraction of quadrature points with p - r > 1e-12.
  double fraction_above_r() const;

 private:
  NodeField p_;
  double r_;
  double p_minus_;
  double p_plus_;
  std::vector<double> cell_p_;
};

/// (min, max) of nodal p; throws kInvalidArgument if some value is <= 1.
std::pair<double, double> exponent_bounds(const NodeField& p);

/// (i) p_minus > 1, (ii) r <= p_minus, (iii) empirical Hoelder quotient
/// max |p(x)-p(x')| / |x-x'|^alpha over node pairs (a finite surrogate).
ValidationReport validate_exponent_hypothesis(const ExponentField& p, double holder_alpha = 0.5);

/// Sum over cells of |u_q|^{p_q} * measure, with u_q, p_q the cell averages.
double modular(const NodeField& u, const ExponentField& p);

/// Luxemburg norm inf{lambda > 0 : modular(u / lambda) <= 1}, by bisection.
double luxemburg_norm(const NodeField& u, const ExponentField& p);

/// Nodewise N p / (N - p) where p < N, kInfiniteExponent elsewhere.
NodeField sobolev_conjugate(const ExponentField& p, int dimension);

}  // namespace pxl
