#include "pxlap/commands.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "pxlap/error.hpp"

namespace pxl {

namespace {

using json = nlohmann::ordered_json;

void put_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

void put_number(std::string& out, long long v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

json validation_json(const ValidationReport& rep) {
  json arr = json::array();
  for (const ValidationEntry& e : rep.entries) {
    arr.push_back({{"name", e.name}, {"status", to_string(e.status)}, {"witness", e.witness}, {"value", e.value}});
  }
  return arr;
}

json mesh_json(const Mesh& m) {
  const auto res = m.resolution();
  const auto b = m.bounds();
  json j = {{"dimension", m.dimension()}, {"nodes", m.node_count()}, {"cells", m.cell_count()}};
  if (m.dimension() == 1) {
    j["n"] = res[0];
    j["bounds"] = {b[0], b[1]};
  } else {
    j["nx"] = res[0];
    j["ny"] = res[1];
    j["bounds"] = {b[0], b[1], b[2], b[3]};
  }
  return j;
}

json solve_json(const SolveReport& s) {
  json stages = json::array();
  for (const StageTrace& t : s.stages) {
    stages.push_back(
        {{"eps", t.eps}, {"iterations", t.iterations}, {"residual", t.residual}, {"converged", t.converged}});
  }
  json j = {{"converged", s.converged},
            {"energy", s.energy},
            {"residual_max", s.residual_max},
            {"iterations", s.iterations},
            {"sup_norm", s.solution.max_abs()},
            {"positivity_ok", s.positivity_ok},
            {"hopf_margin", s.hopf_margin},
            {"negative_energy", s.negative_energy},
            {"init_scale", s.init_scale},
            {"init_negative_found", s.init_negative_found},
            {"max_energy_increase", s.max_energy_increase},
            {"max_polish_increase", s.max_polish_increase}};
  if (s.kirchhoff_M0) j["kirchhoff_M0"] = *s.kirchhoff_M0;
  if (s.kirchhoff_consistency) j["kirchhoff_consistency"] = *s.kirchhoff_consistency;
  j["stages"] = stages;
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string scaled_expr(const std::string& src, double factor) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << src << ")*(" << factor << ")";
  return os.str();
}

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kPass: return "pass";
    case Outcome::kCheckFailed: return "check-failed";
    case Outcome::kNonConverged: return "nonconverged";
  }
  return "?";
}

const char* to_string(SuiteKind k) {
  switch (k) {
    case SuiteKind::kConvexity: return "convexity";
    case SuiteKind::kDiazSaa: return "diaz-saa";
    case SuiteKind::kComparison: return "comparison";
  }
  return "?";
}

std::size_t default_samples(SuiteKind k) { return k == SuiteKind::kComparison ? 20 : 200; }

std::string solution_table(const NodeField& u) {
  const Mesh& m = u.mesh();
  std::string out = m.dimension() == 1 ? "x,u\n" : "x,y,u\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    put_number(out, m.node(i)[0]);
    out += ',';
    if (m.dimension() == 2) {
      put_number(out, m.node(i)[1]);
      out += ',';
    }
    put_number(out, u[i]);
    out += '\n';
  }
  return out;
}

CommandResult run_validate(const RunConfig& config) {
  const MeshPtr mesh = build_mesh(config);
  const ProblemSpec spec = build_problem(config, mesh);
  const ValidationReport rep = validate_problem(spec);
  const RegimeReport regime = sharpness_regime(spec);
  CommandResult out;
  out.outcome = rep.passed() ? Outcome::kPass : Outcome::kCheckFailed;
  json j = {{"command", "validate"},
            {"outcome", to_string(out.outcome)},
            {"problem", to_string(spec.kind)},
            {"passed", rep.passed()},
            {"regime", to_string(regime.regime)},
            {"p_above_r_fraction", regime.p_above_r_fraction},
            {"q_below_r_fraction", regime.q_below_r_fraction},
            {"mesh", mesh_json(*mesh)},
            {"validation", validation_json(rep)}};
  out.report = dump(j);
  std::ostringstream sum;
  sum << "validate: " << (rep.passed() ? "all hypotheses hold" : "hypotheses fail:");
  for (const ValidationEntry& e : rep.entries) {
    if (e.status == CheckStatus::kFail) sum << " " << e.name;
  }
  sum << " (regime " << to_string(regime.regime) << ")";
  out.summary = sum.str();
  return out;
}

CommandResult run_solve(const RunConfig& config) {
  const MeshPtr mesh = build_mesh(config);
  const ProblemSpec spec = build_problem(config, mesh);
  const SolverOptions opts = solver_options(config);
  const ValidationReport rep = validate_problem(spec);
  CommandResult out;
  json j = {{"command", "solve"}, {"outcome", ""}, {"problem", to_string(spec.kind)}, {"mesh", mesh_json(*mesh)}};
  if (config.seed) j["seed"] = *config.seed;
  j["init"] = to_string(opts.init);
  if (!rep.passed() && !config.override_validation) {
    out.outcome = Outcome::kCheckFailed;
    j["outcome"] = to_string(out.outcome);
    j["validation_passed"] = false;
    j["validation"] = validation_json(rep);
    out.report = dump(j);
    out.summary = "solve: hypotheses fail; set solver.override_validation to run anyway";
    return out;
  }
  const SolveReport s = solve(spec, opts, config.override_validation);
  out.outcome = s.converged ? Outcome::kPass : Outcome::kNonConverged;
  j["outcome"] = to_string(out.outcome);
  j["regime"] = s.regime ? to_string(*s.regime) : "unclassified";
  j["validation_passed"] = s.validation.passed();
  j["validation_overridden"] = s.validation_overridden;
  j["result"] = solve_json(s);
  j["validation"] = validation_json(s.validation);
  out.report = dump(j);
  out.table = solution_table(s.solution);
  std::ostringstream sum;
  sum.precision(6);
  sum << "solve: " << (s.converged ? "converged" : "did not converge") << " in " << s.iterations
      << " iterations, energy " << s.energy << ", sup u " << s.solution.max_abs() << ", residual " << s.residual_max;
  out.summary = sum.str();
  return out;
}

CommandResult run_check(SuiteKind kind, const SuiteParams& params) {
  SuiteSummary s;
  switch (kind) {
    case SuiteKind::kConvexity: s = convexity_suite(params); break;
    case SuiteKind::kDiazSaa: s = diaz_saa_suite(params); break;
    case SuiteKind::kComparison: s = comparison_suite(params); break;
  }
  CommandResult out;
  out.outcome = s.passed ? Outcome::kPass : Outcome::kCheckFailed;
  const char* worst_key = kind == SuiteKind::kConvexity  ? "min_relative_slack"
                          : kind == SuiteKind::kDiazSaa ? "min_relative_gap"
                                                        : "max_excess";
  json j = {{"command", std::string("check-") + to_string(kind)},
            {"outcome", to_string(out.outcome)},
            {"suite", s.name},
            {"n", params.n},
            {"dimension", params.dimension},
            {"seed", params.seed},
            {"samples", s.samples},
            {"failures", s.failures},
            {"tolerance", s.tolerance},
            {worst_key, s.worst},
            {"worst_index", s.worst_index},
            {"passed", s.passed}};
  out.report = dump(j);
  out.table = "index,p,r,value,scale,ok\n";
  for (const SuiteSample& rec : s.records) {
    put_number(out.table, static_cast<long long>(rec.index));
    out.table += "," + rec.p + ",";
    put_number(out.table, rec.r);
    out.table += ',';
    put_number(out.table, rec.value);
    out.table += ',';
    put_number(out.table, rec.scale);
    out.table += rec.ok ? ",1\n" : ",0\n";
  }
  std::ostringstream sum;
  sum.precision(6);
  sum << "check-" << to_string(kind) << ": " << s.samples - s.failures << "/" << s.samples << " samples pass, "
      << worst_key << " " << s.worst;
  out.summary = sum.str();
  return out;
}

CommandResult run_eig(const EigParams& ep) {
  if (ep.levels < 1 || ep.levels > 8) throw Error(ErrorCode::kInvalidArgument, "levels must lie in [1, 8]");
  if (ep.n < 2) throw Error(ErrorCode::kInvalidArgument, "base resolution must be at least 2");
  if (!(ep.a < ep.b)) throw Error(ErrorCode::kInvalidArgument, "empty interval");
  std::vector<double> lambdas;
  std::vector<int> ns;
  json levels = json::array();
  CommandResult out;
  out.table = "n,h,lambda\n";
  for (int k = 0; k < ep.levels; ++k) {
    const int n = ep.n << k;
    const MeshPtr mesh = Mesh::interval(ep.a, ep.b, n);
    const EigenResult e = first_eigenpair(mesh, ep.r);
    const double h = (ep.b - ep.a) / n;
    ns.push_back(n);
    lambdas.push_back(e.lambda);
    levels.push_back({{"n", n}, {"h", h}, {"lambda", e.lambda}, {"iterations", e.iterations}, {"residual", e.residual}});
    put_number(out.table, static_cast<long long>(n));
    out.table += ',';
    put_number(out.table, h);
    out.table += ',';
    put_number(out.table, e.lambda);
    out.table += '\n';
  }
  // halving h: error ~ c2 h^2 + c4 h^4
  std::vector<double> r2;
  for (std::size_t k = 1; k < lambdas.size(); ++k) r2.push_back((4.0 * lambdas[k] - lambdas[k - 1]) / 3.0);
  std::vector<double> r4;
  for (std::size_t k = 1; k < r2.size(); ++k) r4.push_back((16.0 * r2[k] - r2[k - 1]) / 15.0);
  const double best = !r4.empty() ? r4.back() : !r2.empty() ? r2.back() : lambdas.back();

  json j = {{"command", "eig"},
            {"outcome", "pass"},
            {"r", ep.r},
            {"interval", {ep.a, ep.b}},
            {"levels", levels},
            {"richardson_h2", r2},
            {"richardson_h4", r4},
            {"extrapolated", best}};
  std::ostringstream sum;
  sum.precision(10);
  sum << "eig: lambda_1 (r = " << ep.r << ") ~ " << best;
  if (ep.r == 2.0) {
    const double exact = std::numbers::pi * std::numbers::pi / ((ep.b - ep.a) * (ep.b - ep.a));
    j["exact"] = exact;
    j["relative_error"] = std::abs(best - exact) / exact;
    sum << " (exact " << exact << ", relative error " << std::abs(best - exact) / exact << ")";
  }
  out.report = dump(j);
  out.summary = sum.str();
  return out;
}

CommandResult run_sweep(const RunConfig& config, const std::string& parameter, const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::kConfig, "sweep needs at least one value");
  auto apply = [&](double v) {
    RunConfig c = config;
    if (parameter == "h_scale") {
      c.problem.h = scaled_expr(c.problem.h, v);
    } else if (parameter == "l_scale") {
      if (!c.problem.l) throw Error(ErrorCode::kConfig, "l_scale needs an absorption term");
      c.problem.l = scaled_expr(*c.problem.l, v);
    } else if (parameter == "m0" || parameter == "m_inf") {
      if (c.problem.kind != ProblemKind::kKirchhoff) throw Error(ErrorCode::kConfig, parameter + " needs a kirchhoff problem");
      (parameter == "m0" ? c.problem.m0 : c.problem.m_inf) = v;
    } else if (parameter == "r") {
      c.r = v;
    } else {
      throw Error(ErrorCode::kConfig, "unknown sweep parameter '" + parameter + "' (h_scale, l_scale, m0, m_inf, r)");
    }
    return c;
  };
  CommandResult out;
  out.table = "value,energy,sup_norm,residual_max,iterations,converged,validation_passed\n";
  json points = json::array();
  std::size_t failed_validation = 0;
  std::size_t nonconverged = 0;
  const MeshPtr mesh = build_mesh(config);
  for (double v : values) {
    const RunConfig c = apply(v);
    const ProblemSpec spec = build_problem(c, mesh);
    const ValidationReport rep = validate_problem(spec);
    json pt = {{"value", v}, {"validation_passed", rep.passed()}};
    put_number(out.table, v);
    if (!rep.passed() && !c.override_validation) {
      ++failed_validation;
      out.table += ",,,,,,0\n";
      points.push_back(pt);
      continue;
    }
    const SolveReport s = solve(spec, solver_options(c), c.override_validation);
    if (!s.converged) ++nonconverged;
    pt["regime"] = s.regime ? to_string(*s.regime) : "unclassified";
    pt["result"] = solve_json(s);
    points.push_back(pt);
    out.table += ',';
    put_number(out.table, s.energy);
    out.table += ',';
    put_number(out.table, s.solution.max_abs());
    out.table += ',';
    put_number(out.table, s.residual_max);
    out.table += ',';
    put_number(out.table, static_cast<long long>(s.iterations));
    out.table += s.converged ? ",1" : ",0";
    out.table += rep.passed() ? ",1\n" : ",0\n";
  }
  out.outcome = nonconverged ? Outcome::kNonConverged : failed_validation ? Outcome::kCheckFailed : Outcome::kPass;
  json j = {{"command", "sweep"},
            {"outcome", to_string(out.outcome)},
            {"parameter", parameter},
            {"problem", to_string(config.problem.kind)},
            {"mesh", mesh_json(*mesh)},
            {"failed_validation", failed_validation},
            {"nonconverged", nonconverged},
            {"points", points}};
  if (config.seed) j["seed"] = *config.seed;
  out.report = dump(j);
  std::ostringstream sum;
  sum << "sweep " << parameter << ": " << values.size() << " points, " << nonconverged << " nonconverged, "
      << failed_validation << " failed validation";
  out.summary = sum.str();
  return out;
}

}  // namespace pxl
