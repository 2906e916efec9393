#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pxlap/error.hpp"
#include "pxlap/solver.hpp"

using namespace pxl;

namespace {

NodeField field(const MeshPtr& m, const char* expr) { return interpolate(m, ScalarExpr::parse(expr)); }

EnergyModel power_model(const MeshPtr& m, const char* p, double r, const char* h, const char* q) {
  EnergyModel model(AnisotropyModel::isotropic(ExponentField(field(m, p), r)));
  model.with_reaction(ReactionTerm::power(field(m, h), field(m, q)));
  return model;
}

EnergyModel source_model(const MeshPtr& m, const char* h) {
  EnergyModel model(AnisotropyModel::isotropic(ExponentField(NodeField(m, 2.0), 1.0)));
  model.with_reaction(ReactionTerm::source(field(m, h)));
  return model;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Max of |P1 interpolant - exact| over nodes and cell midpoints.
double p1_error(const NodeField& u, double (*exact)(double)) {
  const Mesh& m = u.mesh();
  double e = 0.0;
  for (std::size_t i = 0; i < m.node_count(); ++i) e = std::max(e, std::abs(u[i] - exact(m.node(i)[0])));
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    e = std::max(e, std::abs(u.cell_average(c) - exact(m.quad_point(c)[0])));
  }
  return e;
}

double quadratic(double x) { return 0.5 * x * (1.0 - x); }

}  // namespace

TEST_CASE("solver options are checked") {
  SolverOptions o;
  CHECK_NOTHROW(o.check());
  auto expect_invalid = [](SolverOptions bad) {
    try {
      bad.check();
      FAIL("expected kInvalidArgument");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidArgument);
    }
  };
  SolverOptions a = o;
  a.grad_tol = 0;
  expect_invalid(a);
  SolverOptions b = o;
  b.continuation = 1.0;
  expect_invalid(b);
  SolverOptions c = o;
  c.init = InitKind::kProvided;
  expect_invalid(c);
  SolverOptions d = o;
  d.max_iters = 0;
  expect_invalid(d);
}

TEST_CASE("linear source problem reproduces the closed form at O(h^2)") {
  std::vector<double> ns, errs;
  for (int n : {32, 64, 128, 256}) {
    auto m = Mesh::interval(0, 1, n);
    SolveReport rep = minimize_energy(source_model(m, "1"), SolverOptions{});
    CHECK(rep.converged);
    CHECK(rep.residual_max <= 1e-8);
    // P1 solutions of -u'' = const are exact at the nodes
    double nodal = 0.0;
    for (std::size_t i = 0; i < m->node_count(); ++i) {
      nodal = std::max(nodal, std::abs(rep.solution[i] - quadratic(m->node(i)[0])));
    }
    CHECK(nodal <= 1e-12);
    double e = p1_error(rep.solution, quadratic);
    CHECK(e <= 5.0 / (n * n));
    CHECK(e == doctest::Approx(1.0 / (8.0 * n * n)).epsilon(1e-6));
    ns.push_back(n);
    errs.push_back(e);
  }
  CHECK(oracle::loglog_slope(ns, errs) >= 1.9);
}

TEST_CASE("variable source matches the tridiagonal oracle") {
  auto m = Mesh::interval(0, 1, 100);
  SolveReport rep = minimize_energy(source_model(m, "1+sin(3*x)^2"), SolverOptions{});
  std::vector<double> fmid(m->cell_count());
  NodeField h = field(m, "1+sin(3*x)^2");
  for (std::size_t c = 0; c < fmid.size(); ++c) fmid[c] = h.cell_average(c);
  std::vector<double> ref = oracle::linear_p1(fmid, 1.0);
  CHECK(max_diff(rep.solution.values(), ref) <= 1e-12);
  CHECK(weak_residual(NodeField(m, ref), source_model(m, "1+sin(3*x)^2")) <= 1e-10);
}

TEST_CASE("sublinear power reaction matches the shooting oracle") {
  const int n = 256;
  auto m = Mesh::interval(0, 1, n);
  EnergyModel model = power_model(m, "2", 2.0, "1", "1.5");
  SolveReport rep = minimize_energy(model, SolverOptions{});
  CHECK(rep.converged);
  CHECK(rep.residual_max <= 10 * 1e-9);
  CHECK(rep.negative_energy);
  CHECK(rep.energy < 0.0);
  CHECK(rep.positivity_ok);
  CHECK(rep.hopf_margin > 0.0);
  CHECK(rep.init_negative_found);
  std::vector<double> ref = oracle::shoot_symmetric([](double u) { return -std::sqrt(std::max(u, 0.0)); }, 1.0, n,
                                                    1e-6, 1.0);
  double err = max_diff(rep.solution.values(), ref);
  CHECK(err <= 1e-3);
  CHECK(err <= 1e-6);
  CHECK(weak_residual(rep.solution, model) == doctest::Approx(rep.residual_max));
}

TEST_CASE("descent and polish never raise the energy beyond rounding") {
  auto m = Mesh::interval(0, 1, 128);
  const char* ps[] = {"2", "2+x", "1.6+0.3*sin(3*x)", "3"};
  const double rs[] = {2.0, 1.5, 1.5, 2.0};
  for (int k = 0; k < 4; ++k) {
    EnergyModel model = power_model(m, ps[k], rs[k], "1+x", "1.2");
    SolverOptions o;
    o.init = InitKind::kRandom;
    o.seed = 100 + k;
    SolveReport rep = minimize_energy(model, o);
    CAPTURE(k);
    CHECK(rep.converged);
    CHECK(rep.positivity_ok);
    CHECK(rep.max_energy_increase <= 1e-13 * (std::abs(rep.energy) + 1.0));
    CHECK(rep.max_polish_increase <= 0.0);
    CHECK(rep.residual_max <= 10 * o.grad_tol);
  }
}

TEST_CASE("subcritical eigen multiple collapses to zero") {
  auto m = Mesh::interval(0, 1, 128);
  EigenResult eig = first_eigenpair(m, 2.0);
  EnergyModel model(AnisotropyModel::isotropic(ExponentField(NodeField(m, 2.0), 2.0)));
  model.with_reaction(ReactionTerm::power(NodeField(m, 0.9 * eig.lambda), NodeField(m, 2.0)));
  SolveReport rep = minimize_energy(model, SolverOptions{});
  CHECK(rep.solution.max_abs() <= 1e-6);
  CHECK_FALSE(rep.init_negative_found);
}

TEST_CASE("weak residual examples") {
  auto m = Mesh::interval(0, 1, 64);
  CHECK(weak_residual(NodeField(m, 0.0), power_model(m, "2", 2.0, "1", "1.5")) == 0.0);
  NodeField exact = interpolate(m, ScalarExpr::parse("x*(1-x)/2"));
  CHECK(weak_residual(exact, source_model(m, "1")) <= 1e-12);
  ProblemSpec spec = make_problem(ProblemKind::kProblem1, power_model(m, "2", 2.0, "1", "1.5"));
  CHECK(weak_residual(exact, spec) > 1e-3);
}

TEST_CASE("initial guess") {
  auto m = Mesh::interval(0, 1, 64);
  SolverOptions o;
  InitialGuess g = initial_guess(power_model(m, "2", 2.0, "1", "1.5"), o);
  CHECK(g.negative_found);
  CHECK(g.energy < 0.0);
  CHECK(g.scale > 1e-4);
  CHECK(g.scale < 10.0);
  CHECK(g.field.max() == doctest::Approx(g.scale));

  InitialGuess flat = initial_guess(power_model(m, "2", 2.0, "1e-12", "2"), o);
  CHECK_FALSE(flat.negative_found);
  CHECK(flat.scale == 1.0);

  NodeField given = interpolate(m, ScalarExpr::parse("sin(3.141592653589793*x)"));
  o.init = InitKind::kProvided;
  o.initial = given;
  InitialGuess p = initial_guess(power_model(m, "2", 2.0, "1", "1.5"), o);
  CHECK(max_diff(p.field.values(), given.values()) == 0.0);

  SolverOptions rnd;
  rnd.init = InitKind::kRandom;
  rnd.seed = 42;
  InitialGuess r1 = initial_guess(power_model(m, "2", 2.0, "1", "1.5"), rnd);
  InitialGuess r2 = initial_guess(power_model(m, "2", 2.0, "1", "1.5"), rnd);
  CHECK(max_diff(r1.field.values(), r2.field.values()) == 0.0);
  CHECK(r1.field[0] == 0.0);
  CHECK(r1.field[64] == 0.0);
  CHECK(r1.field.min() >= 0.0);
}

TEST_CASE("bump profile") {
  auto m = Mesh::interval(0, 2, 4);
  NodeField b = bump(m);
  CHECK(b[0] == 0.0);
  CHECK(b[2] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(0.75));
  auto r = Mesh::rectangle(0, 1, 0, 1, 4, 4);
  NodeField b2 = bump(r);
  CHECK(b2.max() == doctest::Approx(1.0));
  CHECK(b2[12] == doctest::Approx(1.0));
  CHECK(b2[6] == doctest::Approx(0.75 * 0.75));
}

TEST_CASE("hopf diagnostic") {
  auto m = Mesh::interval(0, 1, 4);
  CHECK(hopf_diagnostic(interpolate(m, ScalarExpr::parse("x*(1-x)"))) == doctest::Approx(0.75));
  CHECK(hopf_diagnostic(NodeField(m, 0.0)) == 0.0);
  auto r = Mesh::rectangle(0, 1, 0, 1, 8, 8);
  CHECK(hopf_diagnostic(bump(r)) > 0.0);
}

TEST_CASE("first eigenpair of the r-Laplacian") {
  EigenResult e256 = first_eigenpair(Mesh::interval(0, 1, 256), 2.0);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(e256.lambda - pi2) / pi2 <= 5e-3);
  CHECK(e256.lambda == doctest::Approx(oracle::discrete_dirichlet_eigenvalue(1.0, 256)).epsilon(1e-10));
  CHECK(e256.phi.min() >= 0.0);
  double b = 0.0;
  const Mesh& m = e256.phi.mesh();
  for (std::size_t c = 0; c < m.cell_count(); ++c) b += std::pow(e256.phi.cell_average(c), 2.0) * m.cell_measure(c);
  CHECK(std::abs(b - 1.0) <= 1e-10);

  double l64 = first_eigenpair(Mesh::interval(0, 1, 64), 2.0).lambda;
  double l128 = first_eigenpair(Mesh::interval(0, 1, 128), 2.0).lambda;
  double ex = oracle::richardson_h2_h4(l64, l128, e256.lambda);
  CHECK(std::abs(ex - pi2) / pi2 <= 5e-4);

  double l2 = first_eigenpair(Mesh::interval(0, 2, 256), 2.0).lambda;
  CHECK(std::abs(l2 - e256.lambda / 4.0) / (e256.lambda / 4.0) <= 1e-3);
  CHECK(l2 == doctest::Approx(oracle::discrete_dirichlet_eigenvalue(2.0, 256)).epsilon(1e-10));

  // the first eigenfunction is the sine mode
  std::vector<double> s(m.node_count());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(std::numbers::pi * m.node(i)[0]);
  const double scale = e256.phi.max() / *std::max_element(s.begin(), s.end());
  for (double& x : s) x *= scale;
  CHECK(max_diff(e256.phi.values(), s) <= 1e-8);
}

TEST_CASE("eigenvalues for r != 2 decrease under refinement") {
  for (double r : {3.0, 1.5}) {
    double prev = INFINITY;
    for (int n : {64, 128, 256}) {
      EigenResult e = first_eigenpair(Mesh::interval(0, 1, n), r);
      CHECK(e.converged);
      CHECK(e.lambda < prev);
      prev = e.lambda;
      double b = 0.0;
      const Mesh& m = e.phi.mesh();
      for (std::size_t c = 0; c < m.cell_count(); ++c) b += std::pow(e.phi.cell_average(c), r) * m.cell_measure(c);
      CHECK(std::abs(b - 1.0) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(first_eigenpair(Mesh::interval(0, 1, 8), 1.0), Error);
}

TEST_CASE("eigenvalue on a square") {
  EigenResult e = first_eigenpair(Mesh::rectangle(0, 1, 0, 1, 32, 32), 2.0);
  const double target = 2.0 * std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(e.lambda - target) / target <= 2e-2);
  CHECK(e.lambda > target);
}

TEST_CASE("uniqueness experiment") {
  auto m = Mesh::interval(0, 1, 128);
  ProblemSpec spec = make_problem(ProblemKind::kProblem1, power_model(m, "2", 2.0, "1", "1.5"));
  UniquenessReport u = uniqueness_experiment(spec, SolverOptions{}, 4, 7, 1e-6);
  CHECK(u.runs == 5);
  CHECK(u.converged_runs == 5);
  CHECK(u.max_distance <= 1e-6);
  CHECK(u.tag == "unique");
  CHECK(u.passed);
  CHECK(u.gap_pairs == 4);
  CHECK(u.max_relative_gap <= 1e-6);

  EigenResult eig = first_eigenpair(m, 2.0);
  ProblemSpec degenerate = make_problem(ProblemKind::kProblem1, power_model(m, "2", 2.0, "1", "2"));
  degenerate.model = EnergyModel(AnisotropyModel::isotropic(ExponentField(NodeField(m, 2.0), 2.0)));
  degenerate.model.with_reaction(ReactionTerm::power(NodeField(m, eig.lambda), NodeField(m, 2.0)));
  SolverOptions o;
  o.max_iters = 50;
  UniquenessReport d = uniqueness_experiment(degenerate, o, 2, 3, 1e-6);
  CHECK(d.tag == "expected-multiplicity");
  CHECK(d.regime == Regime::kDegenerateEigen);
}

TEST_CASE("energy is flat along the discrete eigenray") {
  auto m = Mesh::interval(0, 1, 128);
  EigenResult eig = first_eigenpair(m, 2.0);
  EnergyModel model(AnisotropyModel::isotropic(ExponentField(NodeField(m, 2.0), 2.0)));
  model.with_reaction(ReactionTerm::power(NodeField(m, eig.lambda), NodeField(m, 2.0)));
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    std::vector<double> v(eig.phi.values().begin(), eig.phi.values().end());
    for (double& x : v) x *= t;
    EnergyParts e = energy_parts(v, model);
    CHECK(std::abs(e.total) <= 1e-9 * e.gradient);
  }
}

TEST_CASE("variable exponent problem 1") {
  auto m = Mesh::interval(0, 1, 128);
  ProblemSpec spec = make_problem(ProblemKind::kProblem1, power_model(m, "2+x", 1.5, "1", "1.2"));
  SolveReport rep = solve_problem1(spec, SolverOptions{});
  CHECK(rep.converged);
  CHECK(rep.positivity_ok);
  CHECK(rep.hopf_margin > 0.0);
  CHECK(rep.negative_energy);
  REQUIRE(rep.regime);
  CHECK(*rep.regime == Regime::kUniqueFull);
  CHECK(rep.validation.passed());
  CHECK_FALSE(rep.validation_overridden);
}

TEST_CASE("validation gate") {
  auto m = Mesh::interval(0, 1, 32);
  ProblemSpec bad = make_problem(ProblemKind::kProblem1, power_model(m, "2", 2.0, "1", "2"));
  try {
    solve(bad, SolverOptions{});
    FAIL("expected kInadmissible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInadmissible);
    CHECK(std::string(e.what()).find("(f2)") != std::string::npos);
  }
  SolverOptions o;
  o.max_iters = 20;
  SolveReport rep = solve(bad, o, true);
  CHECK(rep.validation_overridden);
  CHECK(*rep.regime == Regime::kDegenerateEigen);
  CHECK_THROWS_AS(solve_problem2(bad, o), Error);
  CHECK_THROWS_AS(solve_kirchhoff(bad, o), Error);
}

TEST_CASE("problem 2 matches the shooting oracle and uniqueness") {
  const int n = 256;
  auto m = Mesh::interval(0, 1, n);
  EnergyModel model = power_model(m, "2", 2.0, "2", "1.5");
  model.with_absorption(AbsorptionTerm(NodeField(m, 1.0), NodeField(m, 2.0)));
  ProblemSpec spec = make_problem(ProblemKind::kProblem2, model);
  SolveReport rep = solve_problem2(spec, SolverOptions{});
  CHECK(rep.converged);
  CHECK(rep.positivity_ok);
  CHECK(rep.negative_energy);
  std::vector<double> ref = oracle::shoot_symmetric(
      [](double u) { return u - 2.0 * std::sqrt(std::max(u, 0.0)); }, 1.0, n, 1e-8, 3.9);
  CHECK(max_diff(rep.solution.values(), ref) <= 1e-5);
}

TEST_CASE("problem 2 corollary instance") {
  auto m = Mesh::interval(0, 1, 128);
  auto build = [&](double l) {
    EnergyModel model = power_model(m, "2", 1.8, "2", "1.5");
    model.with_absorption(AbsorptionTerm(NodeField(m, l), NodeField(m, 2.0)));
    return make_problem(ProblemKind::kProblem2, model);
  };
  ProblemSpec spec = build(1.0);
  SolveReport rep = solve_problem2(spec, SolverOptions{});
  CHECK(rep.converged);
  CHECK(rep.positivity_ok);
  UniquenessReport u = uniqueness_experiment(spec, SolverOptions{}, 2, 9, 1e-6);
  CHECK(u.passed);
  SolveReport heavy = solve_problem2(build(100.0), SolverOptions{});
  CHECK(heavy.converged);
  CHECK(heavy.solution.max() < rep.solution.max());
  for (std::size_t i = 0; i < m->node_count(); ++i) CHECK(heavy.solution[i] <= rep.solution[i]);
}

TEST_CASE("Kirchhoff problem") {
  auto m = Mesh::interval(0, 1, 128);
  EnergyModel base = power_model(m, "2", 2.0, "1", "1.5");
  SolverOptions o;
  o.init = InitKind::kRandom;
  o.seed = 5;

  SolveReport p1 = solve_problem1(make_problem(ProblemKind::kProblem1, base), o);
  EnergyModel unit = base;
  unit.with_kirchhoff(KirchhoffTerm(1.0, 1.0));
  SolveReport k1 = solve_kirchhoff(make_problem(ProblemKind::kKirchhoff, unit), o);
  CHECK(max_diff(p1.solution.values(), k1.solution.values()) == 0.0);
  CHECK(p1.energy == k1.energy);

  EnergyModel sat = base;
  sat.with_kirchhoff(KirchhoffTerm(1.0, 2.0));
  SolveReport k = solve_kirchhoff(make_problem(ProblemKind::kKirchhoff, sat), SolverOptions{});
  CHECK(k.converged);
  REQUIRE(k.kirchhoff_M0);
  REQUIRE(k.kirchhoff_consistency);
  CHECK(*k.kirchhoff_consistency <= 1e-8);
  CHECK(*k.kirchhoff_M0 > 1.0);
  CHECK(*k.kirchhoff_M0 < 2.0);

  // -M0 u'' = u^{1/2} with u = c u1 gives M0 c = c^{1/2}, so c = M0^{-2} and
  // M0 = M(c^2 D(u1)) = M(M0^{-4} D(u1)).
  SolveReport u1 = minimize_energy(base, SolverOptions{});
  const double D1 = gradient_term(u1.solution.values(), base);
  KirchhoffTerm M(1.0, 2.0);
  double M0 = oracle::bisect([&](double x) { return x - M.M(std::pow(x, -4.0) * D1); }, 1.0, 2.0);
  double c = 1.0 / (M0 * M0);
  std::vector<double> scaled(u1.solution.values().begin(), u1.solution.values().end());
  for (double& x : scaled) x *= c;
  CHECK(max_diff(k.solution.values(), scaled) <= 1e-6);
  CHECK(*k.kirchhoff_M0 == doctest::Approx(M0).epsilon(1e-7));
}

TEST_CASE("two-dimensional problem 1") {
  auto m = Mesh::rectangle(0, 1, 0, 1, 16, 16);
  EnergyModel model(AnisotropyModel::isotropic(ExponentField(field(m, "2+0.5*x*y"), 1.8)));
  model.with_reaction(ReactionTerm::power(NodeField(m, 5.0), NodeField(m, 1.4)));
  SolveReport rep = minimize_energy(model, SolverOptions{});
  CHECK(rep.converged);
  CHECK(rep.positivity_ok);
  CHECK(rep.negative_energy);
  SolverOptions o;
  o.init = InitKind::kRandom;
  o.seed = 3;
  SolveReport other = minimize_energy(model, o);
  CHECK(max_diff(rep.solution.values(), other.solution.values()) <= 1e-6);
}

TEST_CASE("weighted anisotropy in 2D") {
  auto m = Mesh::rectangle(0, 2, 0, 1, 16, 8);
  std::vector<NodeField> w = {NodeField(m, 1.0), NodeField(m, 4.0)};
  EnergyModel model(AnisotropyModel::weighted(ExponentField(NodeField(m, 2.0), 2.0), w));
  model.with_reaction(ReactionTerm::power(NodeField(m, 1.0), NodeField(m, 1.5)));
  SolveReport rep = minimize_energy(model, SolverOptions{});
  CHECK(rep.converged);
  CHECK(rep.positivity_ok);
}
