#include <charconv>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "pxlap/commands.hpp"
#include "pxlap/config.hpp"
#include "pxlap/error.hpp"

using namespace pxl;
using json = nlohmann::json;

namespace {

const char* kProblem1 = R"({
  "domain": {"kind": "interval", "a": 0, "b": 1, "n": 64},
  "exponent": {"p": "2+x", "r": 1.5},
  "problem": {"kind": "problem1", "h": "1+x", "q": 1.2},
  "seed": 11
})";

const char* kProblem2 = R"({
  "domain": {"kind": "interval", "n": 64},
  "exponent": {"p": 2, "r": 1.8},
  "problem": {"kind": "problem2", "h": 1, "q": 1.5, "l": 1, "Q": 2}
})";

const char* kKirchhoff = R"({
  "domain": {"kind": "rectangle", "x": [0, 1], "y": [0, 2], "nx": 8, "ny": 16},
  "exponent": {"p": 2, "r": 2},
  "anisotropy": {"kind": "weighted", "weights": ["1", "2+y"]},
  "problem": {"kind": "kirchhoff", "h": 1, "q": 1.5, "m0": 1, "m_inf": 2},
  "solver": {"init": "random", "grad_tol": 1e-10},
  "check": {"n": 32, "samples": 10},
  "sweep": {"parameter": "m_inf", "values": [1.5, 3]},
  "seed": 3,
  "output": {"solution": "u.csv", "report": "r.json"}
})";

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error for " << text);
  return ErrorCode::kInvalidArgument;
}

std::string with(const std::string& base, const std::string& from, const std::string& to) {
  std::string s = base;
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("parse_config reads every block") {
  RunConfig c = parse_config(kKirchhoff);
  CHECK(c.domain.dimension == 2);
  CHECK(c.domain.by == 2.0);
  CHECK(c.domain.nx == 8);
  CHECK(c.domain.ny == 16);
  CHECK(c.anisotropy == AnisotropyKind::kWeightedQuadratic);
  REQUIRE(c.weights.size() == 2);
  CHECK(c.weights[1] == "2+y");
  CHECK(c.problem.kind == ProblemKind::kKirchhoff);
  CHECK(*c.problem.m_inf == 2.0);
  CHECK(c.solver.init == InitKind::kRandom);
  CHECK(c.solver.grad_tol == 1e-10);
  CHECK(c.check.n == 32);
  CHECK(*c.check.samples == 10);
  REQUIRE(c.sweep);
  CHECK(c.sweep->values == std::vector<double>{1.5, 3.0});
  CHECK(*c.seed == 3);
  CHECK(c.output.solution == "u.csv");

  RunConfig p = parse_config(kProblem1);
  CHECK(p.p == "2+x");
  CHECK(p.problem.q == "1.2");
  CHECK(p.solver.init == InitKind::kBump);
  CHECK(p.output.report == "report.json");
}

TEST_CASE("to_json re-parses to the same configuration") {
  for (const char* text : {kProblem1, kProblem2, kKirchhoff}) {
    RunConfig a = parse_config(text);
    std::string once = to_json(a);
    RunConfig b = parse_config(once);
    CHECK(to_json(b) == once);
    CHECK(b.r == a.r);
    CHECK(b.p == a.p);
    CHECK(b.problem.h == a.problem.h);
    CHECK(b.solver.eps0 == a.solver.eps0);
    CHECK(b.seed == a.seed);
  }
}

TEST_CASE("malformed and incomplete configs are config errors") {
  CHECK(code_of("{\"domain\": ") == ErrorCode::kConfig);
  CHECK(code_of("[]") == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"seed\": 11", "\"sead\": 11")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"seed\": 11", "\"seed\": -1")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "interval", "sphere")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"n\": 64", "\"n\": 0")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"r\": 1.5", "\"r\": 0.5")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"b\": 1", "\"b\": 0")) == ErrorCode::kConfig);
  // completeness per problem kind
  CHECK(code_of(with(kProblem2, ", \"Q\": 2", "")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"q\": 1.2", "\"q\": 1.2, \"l\": 1, \"Q\": 2")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"q\": 1.2", "\"q\": 1.2, \"m0\": 1")) == ErrorCode::kConfig);
  CHECK(code_of(with(kKirchhoff, ", \"m_inf\": 2", "")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"h\": \"1+x\", ", "")) == ErrorCode::kConfig);
  CHECK(code_of(with(kKirchhoff, "[\"1\", \"2+y\"]", "[\"1\"]")) == ErrorCode::kConfig);
  CHECK(code_of(with(kProblem1, "\"problem\": {", "\"solver\": {\"shrink\": 2}, \"problem\": {")) ==
        ErrorCode::kConfig);
  // expressions are checked at parse time
  CHECK(code_of(with(kProblem1, "2+x", "2+")) == ErrorCode::kSyntax);
  CHECK(code_of(with(kProblem1, "1+x", "1+z")) == ErrorCode::kSyntax);
  CHECK(code_of(with(kProblem1, "\"q\": 1.2", "\"q\": true")) == ErrorCode::kConfig);

  try {
    load_config("/nonexistent/config.json");
    FAIL("expected kConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
}

TEST_CASE("build_problem samples the expressions at the nodes") {
  RunConfig c = parse_config(kProblem1);
  MeshPtr m = build_mesh(c);
  CHECK(m->node_count() == 65);
  ProblemSpec spec = build_problem(c, m);
  CHECK(spec.kind == ProblemKind::kProblem1);
  CHECK(spec.model.exponent().values()[32] == 2.5);
  CHECK(spec.model.reaction()->h()[64] == 2.0);
  CHECK(spec.model.reaction()->q()[10] == 1.2);

  RunConfig k = parse_config(kKirchhoff);
  MeshPtr mk = build_mesh(k);
  CHECK(mk->dimension() == 2);
  ProblemSpec sk = build_problem(k, mk);
  CHECK(sk.model.kirchhoff()->m_inf() == 2.0);
  CHECK(sk.model.anisotropy().kind() == AnisotropyKind::kWeightedQuadratic);

  RunConfig g = parse_config(kProblem2);
  ProblemSpec sg = build_problem(g, build_mesh(g));
  CHECK(sg.model.absorption()->Q()[5] == 2.0);
}

TEST_CASE("solver_options applies the seed and demands one for random inits") {
  RunConfig k = parse_config(kKirchhoff);
  CHECK(solver_options(k).seed == 3);
  k.seed.reset();
  try {
    solver_options(k);
    FAIL("expected kConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
  RunConfig p = parse_config(kProblem2);
  CHECK(solver_options(p).init == InitKind::kBump);
}

TEST_CASE("solution_table prints 17 significant digits that read back exactly") {
  auto m = Mesh::interval(0, 1, 7);
  std::vector<double> v(8);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.3 + static_cast<double>(i)) / 3.0;
  NodeField u(m, v);
  std::string t = solution_table(u);
  std::istringstream in(t);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,u");
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    double x = 0.0, val = 0.0;
    std::from_chars(line.data(), line.data() + comma, x);
    std::from_chars(line.data() + comma + 1, line.data() + line.size(), val);
    CHECK(x == m->node(row)[0]);
    CHECK(val == v[row]);
    ++row;
  }
  CHECK(row == 8);
  CHECK(solution_table(NodeField(Mesh::rectangle(0, 1, 0, 1, 2, 2), 0.5)).rfind("x,y,u\n", 0) == 0);
  CHECK(t.find("0.10000000000000001") == std::string::npos);
  CHECK(solution_table(NodeField(Mesh::interval(0, 1, 10), 0.1)).find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("solve reports reproduce the solver's scalars exactly") {
  RunConfig c = parse_config(kProblem1);
  CommandResult r = run_solve(c);
  CHECK(r.outcome == Outcome::kPass);
  json j = json::parse(r.report);
  MeshPtr m = build_mesh(c);
  SolveReport s = solve(build_problem(c, m), solver_options(c));
  CHECK(j["result"]["energy"].get<double>() == s.energy);
  CHECK(j["result"]["residual_max"].get<double>() == s.residual_max);
  CHECK(j["result"]["hopf_margin"].get<double>() == s.hopf_margin);
  CHECK(j["result"]["iterations"].get<int>() == s.iterations);
  CHECK(j["regime"] == "unique-full");
  CHECK(j["seed"] == 11);
  CHECK(r.table == solution_table(s.solution));
  CHECK(run_solve(c).report == r.report);
}

TEST_CASE("solve outcomes") {
  RunConfig bad = parse_config(with(kProblem1, "\"q\": 1.2", "\"q\": 1.5"));
  CHECK(run_solve(bad).outcome == Outcome::kCheckFailed);
  CHECK(run_solve(bad).table.empty());
  bad.override_validation = true;
  CHECK(run_solve(bad).outcome == Outcome::kPass);

  RunConfig slow = parse_config(kProblem1);
  slow.solver.max_iters = 1;
  slow.solver.grad_tol = 1e-13;
  CommandResult r = run_solve(slow);
  CHECK(r.outcome == Outcome::kNonConverged);
  CHECK_FALSE(r.table.empty());
  CHECK(json::parse(r.report)["result"]["converged"] == false);
}

TEST_CASE("validate command") {
  CommandResult ok = run_validate(parse_config(kProblem2));
  CHECK(ok.outcome == Outcome::kPass);
  json j = json::parse(ok.report);
  CHECK(j["passed"] == true);
  CHECK(j["validation"].size() > 3);

  RunConfig eig = parse_config(with(kProblem1, "\"q\": 1.2", "\"q\": 2"));
  eig.p = "2";
  eig.r = 2.0;
  CommandResult fail = run_validate(eig);
  CHECK(fail.outcome == Outcome::kCheckFailed);
  CHECK(json::parse(fail.report)["regime"] == "degenerate-eigen");
}

TEST_CASE("check commands") {
  SuiteParams sp;
  sp.samples = 12;
  sp.seed = 4;
  for (SuiteKind k : {SuiteKind::kConvexity, SuiteKind::kDiazSaa}) {
    CommandResult r = run_check(k, sp);
    CHECK(r.outcome == Outcome::kPass);
    json j = json::parse(r.report);
    CHECK(j["samples"] == 12);
    CHECK(j["failures"] == 0);
    CHECK(std::count(r.table.begin(), r.table.end(), '\n') == 13);
    CHECK(run_check(k, sp).table == r.table);
  }
  sp.samples = 3;
  CommandResult c = run_check(SuiteKind::kComparison, sp);
  CHECK(c.outcome == Outcome::kPass);
  CHECK(json::parse(c.report)["max_excess"].get<double>() <= 1e-6);
  CHECK(default_samples(SuiteKind::kComparison) == 20);
}

TEST_CASE("eig command extrapolates over the ladder") {
  CommandResult r = run_eig({});
  json j = json::parse(r.report);
  CHECK(j["levels"].size() == 3);
  CHECK(j["richardson_h2"].size() == 2);
  CHECK(j["richardson_h4"].size() == 1);
  CHECK(j["relative_error"].get<double>() <= 5e-4);
  CHECK(r.table.rfind("n,h,lambda\n64,", 0) == 0);

  EigParams one;
  one.levels = 1;
  one.r = 3.0;
  json k = json::parse(run_eig(one).report);
  CHECK_FALSE(k.contains("exact"));
  CHECK(k["extrapolated"] == k["levels"][0]["lambda"]);

  EigParams bad;
  bad.levels = 0;
  CHECK_THROWS_AS(run_eig(bad), Error);
}

TEST_CASE("sweep command") {
  RunConfig c = parse_config(kProblem1);
  CommandResult r = run_sweep(c, "h_scale", {0.5, 1.0, 2.0});
  CHECK(r.outcome == Outcome::kPass);
  json j = json::parse(r.report);
  REQUIRE(j["points"].size() == 3);
  double prev = 0.0;
  for (const auto& pt : j["points"]) {
    const double sup = pt["result"]["sup_norm"].get<double>();
    CHECK(sup > prev);
    prev = sup;
  }
  CommandResult one = run_sweep(c, "h_scale", {1.0});
  CHECK(json::parse(one.report)["points"][0]["result"]["energy"] == json::parse(run_solve(c).report)["result"]["energy"]);

  CHECK(run_sweep(c, "r", {1.5, 3.0}).outcome == Outcome::kCheckFailed);
  for (const char* p : {"l_scale", "m0", "nonsense"}) {
    try {
      run_sweep(c, p, {1.0});
      FAIL("expected kConfig");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfig);
    }
  }
  RunConfig k = parse_config(kKirchhoff);
  k.domain.nx = 4;
  k.domain.ny = 4;
  CHECK(run_sweep(k, "m_inf", {1.5, 3.0}).outcome == Outcome::kPass);
}
