#include "pxlap/suites.hpp"

#include <cmath>
#include <sstream>

#include "pxlap/error.hpp"
#include "pxlap/inequality.hpp"
#include "pxlap/random.hpp"
#include "pxlap/solver.hpp"

namespace pxl {

namespace {

MeshPtr suite_mesh(const SuiteParams& sp) {
  if (sp.n < 2) throw Error(ErrorCode::kInvalidArgument, "suite resolution must be at least 2");
  if (sp.samples == 0) throw Error(ErrorCode::kInvalidArgument, "suite needs at least one sample");
  if (sp.dimension == 1) return Mesh::interval(0.0, 1.0, sp.n);
  if (sp.dimension == 2) return Mesh::rectangle(0.0, 1.0, 0.0, 1.0, sp.n, sp.n);
  throw Error(ErrorCode::kInvalidArgument, "suite dimension must be 1 or 2");
}

EnergyModel isotropic_model(const MeshPtr& m, const std::string& p, double r) {
  return EnergyModel(AnisotropyModel::isotropic(ExponentField(interpolate(m, ScalarExpr::parse(p)), r)));
}

NodeField random_cone(const MeshPtr& m, Rng& rng, bool zero_boundary) {
  std::vector<double> v(m->node_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = zero_boundary && m->is_boundary(i) ? 0.0 : std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
  }
  return NodeField(m, std::move(v));
}

/// Smooth positive profile: the boundary bump (or 1 when the boundary is
/// kept positive) times exp of a random low-frequency modulation.
NodeField smooth_cone(const MeshPtr& m, Rng& rng, bool zero_boundary) {
  const NodeField b = bump(m);
  const double a1 = rng.uniform(-1.0, 1.0), a2 = rng.uniform(-0.5, 0.5), k = rng.uniform(1.0, 4.0);
  std::vector<double> v(m->node_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& x = m->node(i);
    const double mod = std::exp(a1 * std::sin(k * (x[0] + 0.5 * x[1])) + a2 * std::cos(2.0 * k * x[0]));
    v[i] = (zero_boundary ? b[i] : 1.0) * mod;
  }
  return NodeField(m, std::move(v));
}

NodeField scaled(const NodeField& u, double c) {
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x *= c;
  return NodeField(u.mesh_ptr(), std::move(v));
}

void record(SuiteSummary& s, SuiteSample rec, bool lower_is_worse) {
  const bool worse = s.records.empty() || (lower_is_worse ? rec.value < s.worst : rec.value > s.worst);
  if (worse) {
    s.worst = rec.value;
    s.worst_index = rec.index;
  }
  if (!rec.ok) ++s.failures;
  s.records.push_back(std::move(rec));
}

void finish(SuiteSummary& s) {
  s.samples = s.records.size();
  s.passed = s.failures == 0;
}

}  // namespace

SuiteSummary convexity_suite(const SuiteParams& sp) {
  const MeshPtr m = suite_mesh(sp);
  const std::vector<std::string> ps = sp.dimension == 1
                                          ? std::vector<std::string>{"2", "2+x", "1.5+0.4*sin(6*x)^2"}
                                          : std::vector<std::string>{"2", "2+x*y"};
  const double rs[] = {1.0, 1.5, 2.0};
  Rng rng(sp.seed);
  SuiteSummary s;
  s.name = "convexity";
  s.tolerance = 1e-10;
  for (std::size_t k = 0; k < sp.samples; ++k) {
    const std::string& p = ps[k % ps.size()];
    double r = rs[(k / ps.size()) % 3];
    if (r > isotropic_model(m, p, 1.0).exponent().p_minus()) r = 1.0;
    const EnergyModel model = isotropic_model(m, p, r);
    const bool smooth = k % 4 >= 2;
    const NodeField v1 = smooth ? smooth_cone(m, rng, false) : random_cone(m, rng, false);
    const NodeField v2 = smooth ? smooth_cone(m, rng, false) : random_cone(m, rng, false);
    const LineFunctional which = k % 2 ? LineFunctional::kW : LineFunctional::kWA;
    const ConvexityReport rep = check_ray_convexity(v1, v2, which, model, {0.5});
    SuiteSample rec{k, p, r, rep.min_slack / rep.scale, rep.scale, rep.convex && rep.classification_ok};
    if (model.exponent().fraction_above_r() == 0.0) {
      const ConvexityReport flat = check_ray_convexity(v1, scaled(v1, 4.0), which, model, {0.25, 0.5, 0.75});
      rec.ok = rec.ok && flat.max_abs_slack <= 1e-12 * flat.scale;
    }
    record(s, std::move(rec), true);
  }
  finish(s);
  return s;
}

SuiteSummary diaz_saa_suite(const SuiteParams& sp) {
  const MeshPtr m = suite_mesh(sp);
  const std::vector<std::string> ps = sp.dimension == 1
                                          ? std::vector<std::string>{"2", "2+x", "1.5+0.4*sin(6*x)^2", "3-x"}
                                          : std::vector<std::string>{"2", "2+x*y"};
  Rng rng(sp.seed);
  SuiteSummary s;
  s.name = "diaz-saa";
  s.tolerance = sp.dimension == 1 ? 1e-10 : 1e-8;
  for (std::size_t k = 0; k < sp.samples; ++k) {
    const std::string& p = ps[k % ps.size()];
    const double r = rng.uniform(1.0, isotropic_model(m, p, 1.0).exponent().p_minus());
    const EnergyModel model = isotropic_model(m, p, r);
    const bool smooth = k % 2 == 1;
    const NodeField w1 = smooth ? smooth_cone(m, rng, true) : random_cone(m, rng, true);
    const NodeField w2 = smooth ? smooth_cone(m, rng, true) : random_cone(m, rng, true);
    const GapReport g = diaz_saa_gap(w1, w2, model);
    const double rel = g.scale > 0.0 ? g.gap / g.scale : 0.0;
    record(s, {k, p, r, rel, g.scale, rel >= -s.tolerance}, true);
  }
  finish(s);
  return s;
}

SuiteSummary comparison_suite(const SuiteParams& sp) {
  const MeshPtr m = suite_mesh(sp);
  Rng rng(sp.seed);
  SuiteSummary s;
  s.name = "comparison";
  s.tolerance = 1e-6;
  for (std::size_t k = 0; k < sp.samples; ++k) {
    const double a = rng.uniform(0.2, 1.0);
    const double r = rng.uniform(1.0, 1.9);
    std::ostringstream p;
    p.precision(17);
    p << "2+" << a << "*x";
    const EnergyModel model = isotropic_model(m, p.str(), r);
    const double c0 = rng.uniform(0.5, 2.0);
    const double c1 = rng.uniform(0.0, 1.0);
    const double freq = rng.uniform(1.0, 6.0);
    const double d0 = rng.uniform(0.0, 1.0);
    const double d1 = rng.uniform(0.0, 1.0);
    std::vector<double> f1(m->node_count());
    std::vector<double> f2(m->node_count());
    for (std::size_t i = 0; i < f1.size(); ++i) {
      const Point& x = m->node(i);
      const double sn = std::sin(freq * (x[0] + x[1]));
      f1[i] = c0 + c1 * sn * sn;
      f2[i] = f1[i] + d0 + d1 * x[0];
    }
    const ComparisonVerdict v = weak_comparison_experiment(model, NodeField(m, std::move(f1)),
                                                           NodeField(m, std::move(f2)), SolverOptions{}, s.tolerance);
    record(s, {k, p.str(), r, v.max_excess, v.ratio_sup, v.hypothesis_ok && v.conclusion_ok}, false);
  }
  finish(s);
  return s;
}

}  // namespace pxl
