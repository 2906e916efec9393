#include "pxlap/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "pxlap/error.hpp"

namespace pxl {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfig, path + ": " + what);
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail(path, "unknown key '" + key + "'");
  }
}

const json& required(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < 1 || x > 1 << 24) fail(path, "out of range");
  return static_cast<int>(x);
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

/// A number or an expression string; validated by parsing.
std::string expression(const json& v, const std::string& path) {
  std::string src;
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    src = os.str();
  } else if (v.is_string()) {
    src = v.get<std::string>();
  } else {
    fail(path, "expected a number or an expression string");
  }
  try {
    ScalarExpr::parse(src);
  } catch (const Error& e) {
    throw Error(ErrorCode::kSyntax, path + ": " + e.what());
  }
  return src;
}

template <class F>
void optional_key(const json& obj, const std::string& path, const char* key, F&& set) {
  auto it = obj.find(key);
  if (it != obj.end()) set(*it, path + "." + key);
}

void parse_domain(const json& d, DomainConfig& out) {
  const std::string path = "domain";
  allow_keys(d, path, {"kind", "a", "b", "n", "x", "y", "nx", "ny"});
  const std::string kind = text(required(d, path, "kind"), path + ".kind");
  auto bounds = [](const json& v, const std::string& p) {
    if (!v.is_array() || v.size() != 2) fail(p, "expected [lo, hi]");
    return std::pair{number(v[0], p), number(v[1], p)};
  };
  if (kind == "interval") {
    allow_keys(d, path, {"kind", "a", "b", "n"});
    out.dimension = 1;
    optional_key(d, path, "a", [&](const json& v, const std::string& p) { out.ax = number(v, p); });
    optional_key(d, path, "b", [&](const json& v, const std::string& p) { out.bx = number(v, p); });
    optional_key(d, path, "n", [&](const json& v, const std::string& p) { out.nx = integer(v, p); });
    out.ny = 0;
  } else if (kind == "rectangle") {
    allow_keys(d, path, {"kind", "x", "y", "nx", "ny"});
    out.dimension = 2;
    optional_key(d, path, "x", [&](const json& v, const std::string& p) { std::tie(out.ax, out.bx) = bounds(v, p); });
    optional_key(d, path, "y", [&](const json& v, const std::string& p) { std::tie(out.ay, out.by) = bounds(v, p); });
    optional_key(d, path, "nx", [&](const json& v, const std::string& p) { out.nx = integer(v, p); });
    optional_key(d, path, "ny", [&](const json& v, const std::string& p) { out.ny = integer(v, p); });
  } else {
    fail(path + ".kind", "expected 'interval' or 'rectangle', got '" + kind + "'");
  }
  if (!(out.ax < out.bx) || (out.dimension == 2 && !(out.ay < out.by))) fail(path, "empty domain");
}

void parse_problem(const json& d, ProblemConfig& out) {
  const std::string path = "problem";
  allow_keys(d, path, {"kind", "reaction", "h", "q", "l", "Q", "m0", "m_inf"});
  const std::string kind = text(required(d, path, "kind"), path + ".kind");
  if (kind == "problem1") {
    out.kind = ProblemKind::kProblem1;
  } else if (kind == "problem2") {
    out.kind = ProblemKind::kProblem2;
  } else if (kind == "kirchhoff") {
    out.kind = ProblemKind::kKirchhoff;
  } else {
    fail(path + ".kind", "expected 'problem1', 'problem2' or 'kirchhoff', got '" + kind + "'");
  }
  optional_key(d, path, "reaction", [&](const json& v, const std::string& p) {
    const std::string r = text(v, p);
    if (r == "power") {
      out.reaction = ReactionKind::kPower;
    } else if (r == "source") {
      out.reaction = ReactionKind::kSource;
    } else {
      fail(p, "expected 'power' or 'source'");
    }
  });
  out.h = expression(required(d, path, "h"), path + ".h");
  if (out.reaction == ReactionKind::kPower) {
    out.q = expression(required(d, path, "q"), path + ".q");
  } else if (d.contains("q")) {
    fail(path + ".q", "the source reaction takes no exponent");
  }
  optional_key(d, path, "l", [&](const json& v, const std::string& p) { out.l = expression(v, p); });
  optional_key(d, path, "Q", [&](const json& v, const std::string& p) { out.Q = expression(v, p); });
  optional_key(d, path, "m0", [&](const json& v, const std::string& p) { out.m0 = number(v, p); });
  optional_key(d, path, "m_inf", [&](const json& v, const std::string& p) { out.m_inf = number(v, p); });

  const bool has_g = out.l || out.Q;
  const bool has_m = out.m0 || out.m_inf;
  if (out.kind == ProblemKind::kProblem2) {
    if (!out.l || !out.Q) fail(path, "problem2 needs both 'l' and 'Q'");
  } else if (has_g) {
    fail(path, kind + " takes no absorption term");
  }
  if (out.kind == ProblemKind::kKirchhoff) {
    if (!out.m0 || !out.m_inf) fail(path, "kirchhoff needs both 'm0' and 'm_inf'");
  } else if (has_m) {
    fail(path, kind + " takes no Kirchhoff term");
  }
}

void parse_solver(const json& d, SolverOptions& out, bool& override_validation) {
  const std::string path = "solver";
  allow_keys(d, path, {"eps0", "eps_min", "continuation", "grad_tol", "max_iters", "armijo", "shrink", "init",
                       "abs_polish", "override_validation"});
  optional_key(d, path, "eps0", [&](const json& v, const std::string& p) { out.eps0 = number(v, p); });
  optional_key(d, path, "eps_min", [&](const json& v, const std::string& p) { out.eps_min = number(v, p); });
  optional_key(d, path, "continuation", [&](const json& v, const std::string& p) { out.continuation = number(v, p); });
  optional_key(d, path, "grad_tol", [&](const json& v, const std::string& p) { out.grad_tol = number(v, p); });
  optional_key(d, path, "max_iters", [&](const json& v, const std::string& p) { out.max_iters = integer(v, p); });
  optional_key(d, path, "armijo", [&](const json& v, const std::string& p) { out.armijo = number(v, p); });
  optional_key(d, path, "shrink", [&](const json& v, const std::string& p) { out.shrink = number(v, p); });
  optional_key(d, path, "abs_polish", [&](const json& v, const std::string& p) { out.abs_polish = boolean(v, p); });
  optional_key(d, path, "override_validation",
               [&](const json& v, const std::string& p) { override_validation = boolean(v, p); });
  optional_key(d, path, "init", [&](const json& v, const std::string& p) {
    const std::string s = text(v, p);
    if (s == "bump") {
      out.init = InitKind::kBump;
    } else if (s == "random") {
      out.init = InitKind::kRandom;
    } else {
      fail(p, "expected 'bump' or 'random'");
    }
  });
  try {
    out.check();
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

void parse_check(const json& d, CheckConfig& out) {
  const std::string path = "check";
  allow_keys(d, path, {"n", "dimension", "samples"});
  optional_key(d, path, "n", [&](const json& v, const std::string& p) { out.n = integer(v, p); });
  optional_key(d, path, "dimension", [&](const json& v, const std::string& p) {
    out.dimension = integer(v, p);
    if (out.dimension != 1 && out.dimension != 2) fail(p, "expected 1 or 2");
  });
  optional_key(d, path, "samples",
               [&](const json& v, const std::string& p) { out.samples = static_cast<std::size_t>(integer(v, p)); });
}

void parse_sweep(const json& d, SweepConfig& out) {
  const std::string path = "sweep";
  allow_keys(d, path, {"parameter", "values"});
  out.parameter = text(required(d, path, "parameter"), path + ".parameter");
  const json& vals = required(d, path, "values");
  if (!vals.is_array() || vals.empty()) fail(path + ".values", "expected a nonempty array");
  for (const json& v : vals) out.values.push_back(number(v, path + ".values"));
}

NodeField sample(const MeshPtr& mesh, const std::string& src) { return interpolate(mesh, ScalarExpr::parse(src)); }

json expr_json(const std::string& src) { return src; }

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed JSON: ") + e.what());
  }
  allow_keys(doc, "config", {"domain", "exponent", "anisotropy", "problem", "solver", "check", "sweep", "seed",
                             "output"});
  RunConfig c;
  parse_domain(required(doc, "config", "domain"), c.domain);

  const json& ex = required(doc, "config", "exponent");
  allow_keys(ex, "exponent", {"p", "r"});
  c.p = expression(required(ex, "exponent", "p"), "exponent.p");
  c.r = number(required(ex, "exponent", "r"), "exponent.r");
  if (!(c.r >= 1.0)) fail("exponent.r", "must be >= 1");

  optional_key(doc, "config", "anisotropy", [&](const json& a, const std::string& path) {
    allow_keys(a, path, {"kind", "weights"});
    const std::string kind = text(required(a, path, "kind"), path + ".kind");
    if (kind == "isotropic") {
      if (a.contains("weights")) fail(path + ".weights", "the isotropic kind takes no weights");
      c.anisotropy = AnisotropyKind::kIsotropic;
    } else if (kind == "weighted") {
      c.anisotropy = AnisotropyKind::kWeightedQuadratic;
      const json& w = required(a, path, "weights");
      if (!w.is_array() || static_cast<int>(w.size()) != c.domain.dimension) {
        fail(path + ".weights", "expected one weight per coordinate axis");
      }
      for (const json& e : w) c.weights.push_back(expression(e, path + ".weights"));
    } else {
      fail(path + ".kind", "expected 'isotropic' or 'weighted'");
    }
  });

  parse_problem(required(doc, "config", "problem"), c.problem);
  optional_key(doc, "config", "solver",
               [&](const json& v, const std::string&) { parse_solver(v, c.solver, c.override_validation); });
  optional_key(doc, "config", "check", [&](const json& v, const std::string&) { parse_check(v, c.check); });
  optional_key(doc, "config", "sweep", [&](const json& v, const std::string&) {
    SweepConfig s;
    parse_sweep(v, s);
    c.sweep = std::move(s);
  });
  optional_key(doc, "config", "seed", [&](const json& v, const std::string& p) {
    if (!v.is_number_unsigned()) fail(p, "expected a nonnegative integer");
    c.seed = v.get<std::uint64_t>();
  });
  optional_key(doc, "config", "output", [&](const json& v, const std::string& path) {
    allow_keys(v, path, {"solution", "report"});
    optional_key(v, path, "solution", [&](const json& s, const std::string& p) { c.output.solution = text(s, p); });
    optional_key(v, path, "report", [&](const json& s, const std::string& p) { c.output.report = text(s, p); });
  });
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const RunConfig& c) {
  json doc;
  if (c.domain.dimension == 1) {
    doc["domain"] = {{"kind", "interval"}, {"a", c.domain.ax}, {"b", c.domain.bx}, {"n", c.domain.nx}};
  } else {
    doc["domain"] = {{"kind", "rectangle"},
                     {"x", {c.domain.ax, c.domain.bx}},
                     {"y", {c.domain.ay, c.domain.by}},
                     {"nx", c.domain.nx},
                     {"ny", c.domain.ny}};
  }
  doc["exponent"] = {{"p", expr_json(c.p)}, {"r", c.r}};
  if (c.anisotropy == AnisotropyKind::kIsotropic) {
    doc["anisotropy"] = {{"kind", "isotropic"}};
  } else {
    doc["anisotropy"] = {{"kind", "weighted"}, {"weights", c.weights}};
  }
  json pr = {{"kind", to_string(c.problem.kind)},
             {"reaction", c.problem.reaction == ReactionKind::kPower ? "power" : "source"},
             {"h", expr_json(c.problem.h)}};
  if (c.problem.reaction == ReactionKind::kPower) pr["q"] = expr_json(c.problem.q);
  if (c.problem.l) pr["l"] = expr_json(*c.problem.l);
  if (c.problem.Q) pr["Q"] = expr_json(*c.problem.Q);
  if (c.problem.m0) pr["m0"] = *c.problem.m0;
  if (c.problem.m_inf) pr["m_inf"] = *c.problem.m_inf;
  doc["problem"] = pr;
  const SolverOptions& s = c.solver;
  doc["solver"] = {{"eps0", s.eps0},
                   {"eps_min", s.eps_min},
                   {"continuation", s.continuation},
                   {"grad_tol", s.grad_tol},
                   {"max_iters", s.max_iters},
                   {"armijo", s.armijo},
                   {"shrink", s.shrink},
                   {"init", to_string(s.init)},
                   {"abs_polish", s.abs_polish},
                   {"override_validation", c.override_validation}};
  json ck = {{"n", c.check.n}, {"dimension", c.check.dimension}};
  if (c.check.samples) ck["samples"] = *c.check.samples;
  doc["check"] = ck;
  if (c.sweep) doc["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  if (c.seed) doc["seed"] = *c.seed;
  doc["output"] = {{"solution", c.output.solution}, {"report", c.output.report}};
  return doc.dump(2);
}

MeshPtr build_mesh(const RunConfig& c) {
  const DomainConfig& d = c.domain;
  if (d.dimension == 1) return Mesh::interval(d.ax, d.bx, d.nx);
  return Mesh::rectangle(d.ax, d.bx, d.ay, d.by, d.nx, d.ny);
}

ProblemSpec build_problem(const RunConfig& c, const MeshPtr& mesh) {
  ExponentField p(sample(mesh, c.p), c.r);
  AnisotropyModel a = [&] {
    if (c.anisotropy == AnisotropyKind::kIsotropic) return AnisotropyModel::isotropic(p);
    std::vector<NodeField> w;
    for (const std::string& src : c.weights) w.push_back(sample(mesh, src));
    return AnisotropyModel::weighted(p, std::move(w));
  }();
  EnergyModel model(std::move(a));
  const ProblemConfig& pc = c.problem;
  if (pc.reaction == ReactionKind::kPower) {
    model.with_reaction(ReactionTerm::power(sample(mesh, pc.h), sample(mesh, pc.q)));
  } else {
    model.with_reaction(ReactionTerm::source(sample(mesh, pc.h)));
  }
  if (pc.l && pc.Q) model.with_absorption(AbsorptionTerm(sample(mesh, *pc.l), sample(mesh, *pc.Q)));
  if (pc.m0 && pc.m_inf) model.with_kirchhoff(KirchhoffTerm(*pc.m0, *pc.m_inf));
  return make_problem(pc.kind, std::move(model));
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o = c.solver;
  if (c.seed) o.seed = *c.seed;
  if (o.init == InitKind::kRandom && !c.seed) throw Error(ErrorCode::kConfig, "a random init needs a seed");
  return o;
}

}  // namespace pxl
