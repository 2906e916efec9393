#include "pxlap/problems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "pxlap/error.hpp"

namespace pxl {

namespace {

constexpr double kTol = 1e-12;

std::string node_witness(const Mesh& m, std::size_t i, const char* what, double value) {
  std::ostringstream os;
  os << what << " = " << value << " at x = " << m.node(i)[0];
  if (m.dimension() == 2) os << ", y = " << m.node(i)[1];
  return os.str();
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t argmin(std::span<const double> v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::kProblem1: return "problem1";
    case ProblemKind::kProblem2: return "problem2";
    case ProblemKind::kKirchhoff: return "kirchhoff";
  }
  return "?";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::kUniqueFull: return "unique-full";
    case Regime::kUniquePartialC: return "unique-partial-c";
    case Regime::kUniquePartialD: return "unique-partial-d";
    case Regime::kDegenerateEigen: return "degenerate-eigen";
    case Regime::kUnclassified: return "unclassified";
  }
  return "?";
}

ProblemSpec make_problem(ProblemKind kind, EnergyModel model) {
  if (!model.reaction()) throw Error(ErrorCode::kConfig, "problem needs a reaction term");
  bool wants_g = kind == ProblemKind::kProblem2;
  bool wants_m = kind == ProblemKind::kKirchhoff;
  if (wants_g != model.absorption().has_value()) {
    throw Error(ErrorCode::kConfig, wants_g ? "problem2 needs an absorption term"
                                            : std::string(to_string(kind)) + " takes no absorption term");
  }
  if (wants_m != model.kirchhoff().has_value()) {
    throw Error(ErrorCode::kConfig, wants_m ? "kirchhoff problem needs M parameters"
                                            : std::string(to_string(kind)) + " takes no Kirchhoff term");
  }
  return {kind, std::move(model)};
}

std::vector<double> default_s_grid() {
  std::vector<double> s(200);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::pow(10.0, -6.0 + 9.0 * i / (s.size() - 1));
  return s;
}

std::vector<double> default_t_grid() {
  std::vector<double> t(1001);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.1 * i;
  return t;
}

ValidationReport validate_f(const ReactionTerm& term, double r, const std::vector<double>& s_grid) {
  ValidationReport rep;
  const NodeField& h = term.h();
  const NodeField& q = term.q();
  const Mesh& m = h.mesh();
  const bool source = term.kind() == ReactionKind::kSource;
  double s_max = s_grid.empty() ? 0.0 : *std::max_element(s_grid.begin(), s_grid.end());
  if (s_max < 10.0) {
    std::ostringstream os;
    os << "s grid reaches only " << s_max << " < 10";
    rep.add({"s grid", CheckStatus::kIndeterminate, os.str(), s_max});
  }

  // (f1)
  {
    double worst = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      for (double s : s_grid) {
        double f = term.at_node(i).value(s);
        if (f < worst) {
          worst = f;
          at = i;
        }
      }
    }
    if (worst < 0.0) {
      rep.add("(f1) f(x,0) = 0, f >= 0", false, node_witness(m, at, "f", worst), worst);
    } else if (source) {
      std::size_t i = argmax(h.values());
      rep.add("(f1) f(x,0) = 0, f >= 0", h[i] == 0.0, node_witness(m, i, "f(x,0) = h", h[i]), h[i]);
    } else {
      std::size_t i = argmin(q.values());
      rep.add("(f1) f(x,0) = 0, f >= 0", q[i] > 1.0, node_witness(m, i, "q", q[i]), q[i]);
    }
  }

  // (f2): f/s^{r-1} = h s^{q-r}
  {
    std::size_t i = argmax(q.values());
    double excess = q[i] - r;
    std::ostringstream w;
    w << node_witness(m, i, "q", q[i]) << ", r = " << r;
    bool ok = excess < 0.0 && h.min() > 0.0;
    if (excess < 0.0 && !ok) {
      std::size_t j = argmin(h.values());
      rep.add("(f2) f/s^(r-1) strictly decreasing", false, node_witness(m, j, "h", h[j]), h[j]);
    } else {
      rep.add("(f2) f/s^(r-1) strictly decreasing", ok, w.str(), excess);
    }
  }

  // (f3): h s^{q-r} -> inf at 0, -> 0 at inf, uniformly (continuous coefficients)
  {
    double qp = q.max();
    double hm = h.min();
    std::ostringstream w;
    w << "q_plus = " << qp << ", r = " << r << ", h_minus = " << hm;
    rep.add("(f3) limits of f/s^(r-1)", qp < r && hm > 0.0, w.str(), qp);
  }
  return rep;
}

ValidationReport validate_g(const AbsorptionTerm& term, double r, const ExponentField& p, int dimension,
                            const std::vector<double>& s_grid) {
  ValidationReport rep;
  const NodeField& l = term.l();
  const NodeField& Q = term.Q();
  const Mesh& m = l.mesh();
  double s_max = s_grid.empty() ? 0.0 : *std::max_element(s_grid.begin(), s_grid.end());
  if (s_max < 10.0) {
    std::ostringstream os;
    os << "s grid reaches only " << s_max << " < 10";
    rep.add({"s grid", CheckStatus::kIndeterminate, os.str(), s_max});
  }
  {
    std::size_t i = argmin(Q.values());
    std::size_t j = argmin(l.values());
    bool ok = Q[i] > 1.0 && l[j] > 0.0;
    std::string w = Q[i] > 1.0 ? node_witness(m, j, "l", l[j]) : node_witness(m, i, "Q", Q[i]);
    rep.add("(g1) g > 0 for s > 0, g(x,0) = 0", ok, w, Q[i]);
  }
  {
    std::size_t i = argmin(Q.values());
    std::ostringstream w;
    w << node_witness(m, i, "Q", Q[i]) << ", r = " << r;
    rep.add("(g2) g/s^(r-1) nondecreasing", Q[i] >= r, w.str(), Q[i] - r);
  }
  {
    NodeField pstar = sobolev_conjugate(p, dimension);
    double worst = -INFINITY;
    std::size_t at = 0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      double d = pstar[i] == kInfiniteExponent ? -INFINITY : Q[i] - pstar[i];
      if (d > worst || i == 0) {
        worst = d;
        at = i;
      }
    }
    bool ok = Q.min() > 1.0 && worst < 0.0;
    std::ostringstream w;
    w << node_witness(m, at, "Q", Q[at]) << ", p* = ";
    if (pstar[at] == kInfiniteExponent) w << "inf"; else w << pstar[at];
    rep.add("(g3) 1 < Q < p*", ok, w.str(), Q.max());
  }
  {
    // on (0, 1], s^{Q-1} <= s^{r-1} when Q >= r, so C0 = max l
    double c0 = l.max();
    std::ostringstream w;
    w << "C0 = " << c0 << " on (0, 1]";
    rep.add("(g) bound near 0", Q.min() >= r, w.str(), c0);
  }
  return rep;
}

ValidationReport validate_M(const KirchhoffTerm& term, const std::vector<double>& t_grid) {
  ValidationReport rep;
  {
    std::ostringstream w;
    w << "M(0) = " << term.M(0.0);
    rep.add("(M1) M(0) > 0", term.m0() > 0.0, w.str(), term.m0());
  }
  {
    std::ostringstream w;
    w << "m0 = " << term.m0() << ", m_inf = " << term.m_inf();
    rep.add("(M2) M nondecreasing", term.m_inf() >= term.m0(), w.str(), term.m_inf() - term.m0());
  }
  {
    std::ostringstream w;
    w << "sup M = " << std::max(term.m0(), term.m_inf());
    rep.add("(M3) M bounded", std::isfinite(term.m_inf()) && std::isfinite(term.m0()), w.str(), term.m_inf());
  }
  {
    double t_max = t_grid.empty() ? 0.0 : *std::max_element(t_grid.begin(), t_grid.end());
    double worst = 0.0;
    double at = 0.0;
    for (double t : t_grid) {
      if (t < 0.0) continue;
      double mh = term.M_hat(t);
      double slack = std::min(mh - term.m0() * t, term.m_inf() * t - mh);
      double tol = 1e-12 * std::max(1.0, std::fabs(mh));
      if (slack + tol < worst) {
        worst = slack + tol;
        at = t;
      }
    }
    std::ostringstream w;
    w << "worst slack " << worst << " at t = " << at << ", grid to " << t_max;
    if (t_max < 100.0) {
      rep.add({"M_hat sandwich", CheckStatus::kIndeterminate, w.str() + " (< 100)", worst});
    } else {
      rep.add("M_hat sandwich", worst >= 0.0, w.str(), worst);
    }
  }
  return rep;
}

ValidationReport validate_corollary_chain(const NodeField& q, const NodeField& Q, double r,
                                          const ExponentField& p) {
  ValidationReport rep;
  const double qm = q.min(), qp = q.max(), Qm = Q.min();
  auto put = [&](const char* name, bool ok, double a, double b) {
    std::ostringstream w;
    w << a << " vs " << b;
    rep.add(name, ok, w.str(), a);
  };
  put("1 <= q_minus", 1.0 <= qm, 1.0, qm);
  put("q_minus <= q_plus", qm <= qp, qm, qp);
  put("q_plus < r", qp < r, qp, r);
  put("r < p_minus", r < p.p_minus(), r, p.p_minus());
  put("p_minus <= p_plus", p.p_minus() <= p.p_plus(), p.p_minus(), p.p_plus());
  put("r <= Q_minus", r <= Qm, r, Qm);
  return rep;
}

ValidationReport validate_problem(const ProblemSpec& spec) {
  const EnergyModel& m = spec.model;
  ValidationReport rep = validate_exponent_hypothesis(m.exponent());
  auto append = [&](const ValidationReport& other) {
    for (const auto& e : other.entries) rep.add(e);
  };
  append(validate_f(*m.reaction(), m.r(), default_s_grid()));
  if (spec.kind == ProblemKind::kProblem2) {
    append(validate_g(*m.absorption(), m.r(), m.exponent(), m.mesh().dimension(), default_s_grid()));
  }
  if (spec.kind == ProblemKind::kKirchhoff) append(validate_M(*m.kirchhoff(), default_t_grid()));
  return rep;
}

RegimeReport sharpness_regime(const ProblemSpec& spec) {
  const EnergyModel& m = spec.model;
  const ExponentField& p = m.exponent();
  const double r = p.r();
  const NodeField& q = m.reaction()->q();
  const Mesh& mesh = m.mesh();

  RegimeReport rep;
  rep.p_above_r_fraction = p.fraction_above_r();
  std::size_t below = 0;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    if (r - q.cell_average(c) > kTol) ++below;
  }
  rep.q_below_r_fraction = static_cast<double>(below) / static_cast<double>(mesh.cell_count());

  const double qm = q.min(), qp = q.max();
  const bool p_const = p.p_plus() - p.p_minus() <= kTol;
  const bool q_const = qp - qm <= kTol;
  const bool p_is_r = std::fabs(p.p_plus() - r) <= kTol && std::fabs(p.p_minus() - r) <= kTol;

  if (p_const && q_const && std::fabs(qp - r) <= kTol && p_is_r) {
    rep.regime = Regime::kDegenerateEigen;
  } else if (std::fabs(r - p.p_minus()) <= kTol && qp <= r + kTol && rep.p_above_r_fraction > 0.0) {
    rep.regime = Regime::kUniquePartialC;
  } else if (p_is_r && qp <= r + kTol && rep.q_below_r_fraction > 0.0) {
    rep.regime = Regime::kUniquePartialD;
  } else if (qp < r && r <= p.p_minus()) {
    rep.regime = Regime::kUniqueFull;
  } else {
    rep.regime = Regime::kUnclassified;
  }
  return rep;
}

}  // namespace pxl
