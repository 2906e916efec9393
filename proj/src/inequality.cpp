#include "pxlap/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pxlap/error.hpp"
#include "pxlap/solver.hpp"

namespace pxl {

const char* to_string(EqualityClass c) {
  switch (c) {
    case EqualityClass::kDistinct: return "distinct";
    case EqualityClass::kProportional: return "proportional";
    case EqualityClass::kIdentical: return "identical";
  }
  return "?";
}

EqualityClass classify_pair(const NodeField& a, const NodeField& b) {
  require_same_mesh(a, b);
  const double big = std::max(a.max_abs(), b.max_abs());
  bool identical = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * big) identical = false;
  }
  if (identical) return EqualityClass::kIdentical;

  const Mesh& m = a.mesh();
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (m.is_boundary(i)) {
      if ((a[i] == 0.0) != (b[i] == 0.0)) return EqualityClass::kDistinct;
      if (a[i] == 0.0) continue;
    }
    if (!(a[i] > 0.0) || !(b[i] > 0.0)) return EqualityClass::kDistinct;
    const double q = b[i] / a[i];
    lo = first ? q : std::min(lo, q);
    hi = first ? q : std::max(hi, q);
    first = false;
  }
  if (first) return EqualityClass::kDistinct;
  return hi - lo <= 1e-8 * hi ? EqualityClass::kProportional : EqualityClass::kDistinct;
}

ConvexityReport check_ray_convexity(const NodeField& v1, const NodeField& v2, LineFunctional which,
                                    const EnergyModel& model, const std::vector<double>& thetas) {
  if (thetas.empty()) throw Error(ErrorCode::kInvalidArgument, "theta grid is empty");
  for (double t : thetas) {
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kInvalidArgument, "theta values must lie in (0, 1)");
  }
  ConvexityReport rep;
  rep.thetas = thetas;
  rep.phi0 = phi_line(v1, v2, 0.0, which, model);
  rep.phi1 = phi_line(v1, v2, 1.0, which, model);
  rep.scale = std::abs(rep.phi0) + std::abs(rep.phi1);
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (double t : thetas) {
    const double s = (1.0 - t) * rep.phi0 + t * rep.phi1 - phi_line(v1, v2, t, which, model);
    rep.slacks.push_back(s);
    rep.min_slack = std::min(rep.min_slack, s);
    rep.max_abs_slack = std::max(rep.max_abs_slack, std::abs(s));
    if (std::abs(s) <= 1e-10 * rep.scale) ++rep.equality_count;
  }
  const EqualityClass cls = classify_pair(v1, v2);
  rep.proportional = cls != EqualityClass::kDistinct;
  rep.p_equals_r = model.exponent().fraction_above_r() == 0.0;
  rep.equality_expected = cls == EqualityClass::kIdentical || (rep.proportional && rep.p_equals_r);
  rep.convex = rep.min_slack >= -1e-10 * rep.scale;
  rep.classification_ok = rep.equality_expected ? rep.equality_count == thetas.size() : rep.equality_count == 0;
  return rep;
}

RatioBound ratio_bound(const NodeField& u1, const NodeField& u2, double cap) {
  require_same_mesh(u1, u2);
  const Mesh& m = u1.mesh();
  RatioBound rb;
  rb.cap = cap;
  for (std::size_t i : m.interior_nodes()) {
    if (!(u1[i] > 0.0) || !(u2[i] > 0.0)) {
      std::ostringstream os;
      os << "nonpositive interior value at node " << i;
      throw Error(ErrorCode::kInadmissible, os.str());
    }
    rb.sup12 = std::max(rb.sup12, u1[i] / u2[i]);
    rb.sup21 = std::max(rb.sup21, u2[i] / u1[i]);
  }
  rb.admissible = rb.sup12 <= cap && rb.sup21 <= cap;
  return rb;
}

namespace {

/// Nodewise a - b^r / a^{r-1}, zero on the boundary and where a = b.
std::vector<double> picone_test(const NodeField& a, const NodeField& b, double r) {
  const Mesh& m = a.mesh();
  std::vector<double> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (m.is_boundary(i) || a[i] == b[i]) {
      t[i] = 0.0;
    } else if (a[i] > 0.0) {
      t[i] = a[i] - std::pow(b[i], r) / std::pow(a[i], r - 1.0);
    } else {
      throw Error(ErrorCode::kInadmissible, "quotient undefined at an interior node");
    }
  }
  return t;
}

double flux_pairing(const NodeField& w, const std::vector<double>& z, const EnergyModel& model) {
  const Mesh& m = model.mesh();
  double s = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const Vec2 a = model.anisotropy().at_cell(c).flux(cell_gradient(m, w.values(), c));
    const Vec2 dz = cell_gradient(m, z, c);
    s += (a[0] * dz[0] + a[1] * dz[1]) * m.cell_measure(c);
  }
  return s;
}

}  // namespace

GapReport diaz_saa_gap(const NodeField& w1, const NodeField& w2, const EnergyModel& model, double ratio_cap) {
  require_same_mesh(w1, w2);
  require_same_mesh(w1, model.exponent().values());
  const RatioBound rb = ratio_bound(w1, w2, ratio_cap);
  if (!rb.admissible) {
    std::ostringstream os;
    os << "ratio bound exceeds cap " << ratio_cap << " (sup w1/w2 = " << rb.sup12 << ", sup w2/w1 = " << rb.sup21
       << ")";
    throw Error(ErrorCode::kInadmissible, os.str());
  }
  const double r = model.r();
  GapReport g;
  g.ratio_sup = rb.sup12;
  g.inv_ratio_sup = rb.sup21;
  g.i1 = flux_pairing(w1, picone_test(w1, w2, r), model);
  // w1^r / w2^{r-1} - w2 = -(w2 - w1^r / w2^{r-1})
  g.i2 = -flux_pairing(w2, picone_test(w2, w1, r), model);
  g.gap = g.i1 - g.i2;
  g.scale = std::abs(g.i1) + std::abs(g.i2);
  g.equality_class = classify_pair(w1, w2);
  return g;
}

EnergyModel comparison_model(const EnergyModel& model, const NodeField& f) {
  require_same_mesh(f, model.exponent().values());
  EnergyModel out(model.anisotropy());
  out.with_eps(model.eps());
  out.with_reaction(ReactionTerm::power(f, NodeField(f.mesh_ptr(), model.r())));
  return out;
}

ComparisonVerdict comparison_check(const NodeField& u1, const NodeField& u2, const NodeField& f1,
                                   const NodeField& f2, const EnergyModel& model, double tol,
                                   double residual_tol) {
  require_same_mesh(u1, u2);
  require_same_mesh(f1, f2);
  require_same_mesh(u1, f1);
  require_same_mesh(u1, model.exponent().values());
  const Mesh& m = model.mesh();
  ComparisonVerdict v;
  v.tol = tol;
  v.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u1.size(); ++i) v.max_excess = std::max(v.max_excess, u1[i] - u2[i]);

  v.f_ordered = true;
  v.f1_nonnegative = true;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    if (f1[i] > f2[i]) v.f_ordered = false;
    if (f1[i] < 0.0) v.f1_nonnegative = false;
  }
  try {
    const RatioBound rb = ratio_bound(u1, u2);
    v.positive = true;
    v.ratio_ok = rb.admissible;
    v.ratio_sup = rb.sup12;
    v.inv_ratio_sup = rb.sup21;
  } catch (const Error&) {
    v.positive = false;
    v.ratio_ok = false;
  }
  v.p_above_r_fraction = model.exponent().fraction_above_r();
  v.hypothesis_ok = v.f_ordered && v.f1_nonnegative && v.positive && v.ratio_ok && v.p_above_r_fraction > 0.0;
  v.conclusion_ok = v.max_excess <= tol;

  if (v.f1_nonnegative) {
    std::vector<double> g;
    const std::vector<std::size_t> interior = m.interior_nodes();
    gateaux_gradient(comparison_model(model, f1), u1.values(), g);
    v.sub_residual = -std::numeric_limits<double>::infinity();
    for (std::size_t i : interior) v.sub_residual = std::max(v.sub_residual, g[i] / m.lumped_measure(i));
    bool f2_nonnegative = true;
    for (std::size_t i = 0; i < f2.size(); ++i) f2_nonnegative = f2_nonnegative && f2[i] >= 0.0;
    if (f2_nonnegative) {
      gateaux_gradient(comparison_model(model, f2), u2.values(), g);
      v.super_residual = std::numeric_limits<double>::infinity();
      for (std::size_t i : interior) v.super_residual = std::min(v.super_residual, g[i] / m.lumped_measure(i));
      v.residual_signs_ok = v.sub_residual <= residual_tol && v.super_residual >= -residual_tol;
    }
  }
  return v;
}

ComparisonVerdict weak_comparison_experiment(const EnergyModel& model, const NodeField& f1, const NodeField& f2,
                                             const SolverOptions& opts, double tol) {
  SolveReport s1 = minimize_energy(comparison_model(model, f1), opts);
  if (!s1.converged) throw Error(ErrorCode::kNonConvergence, "comparison solve for f1 did not converge");
  SolveReport s2 = minimize_energy(comparison_model(model, f2), opts);
  if (!s2.converged) throw Error(ErrorCode::kNonConvergence, "comparison solve for f2 did not converge");
  return comparison_check(s1.solution, s2.solution, f1, f2, model, tol, 10.0 * opts.grad_tol);
}

}  // namespace pxl
