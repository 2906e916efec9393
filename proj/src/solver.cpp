#include "pxlap/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pxlap/error.hpp"
#include "pxlap/inequality.hpp"
#include "pxlap/random.hpp"

namespace pxl {

const char* to_string(InitKind k) {
  switch (k) {
    case InitKind::kBump: return "bump";
    case InitKind::kRandom: return "random";
    case InitKind::kProvided: return "provided";
  }
  return "?";
}

void SolverOptions::check() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(eps0 >= 0.0) || !std::isfinite(eps0)) bad("eps0 must be finite and >= 0");
  if (!(eps_min > 0.0) || !std::isfinite(eps_min)) bad("eps_min must be finite and > 0");
  if (!(continuation > 0.0 && continuation < 1.0)) bad("continuation factor must lie in (0, 1)");
  if (!(grad_tol > 0.0)) bad("grad_tol must be > 0");
  if (max_iters < 1) bad("max_iters must be >= 1");
  if (!(armijo > 0.0 && armijo < 0.5)) bad("armijo constant must lie in (0, 0.5)");
  if (!(shrink > 0.0 && shrink < 1.0)) bad("shrink factor must lie in (0, 1)");
  if (init == InitKind::kProvided && !initial) bad("provided init requires an initial field");
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct DofMap {
  std::vector<std::size_t> interior;
  std::vector<long> index;  // -1 on the boundary
};

DofMap dof_map(const Mesh& m) {
  DofMap d;
  d.interior = m.interior_nodes();
  d.index.assign(m.node_count(), -1);
  for (std::size_t k = 0; k < d.interior.size(); ++k) d.index[d.interior[k]] = static_cast<long>(k);
  return d;
}

double scaled_max(const Mesh& m, const DofMap& dofs, const std::vector<double>& g) {
  double r = 0.0;
  for (std::size_t i : dofs.interior) r = std::max(r, std::abs(g[i]) / m.lumped_measure(i));
  return r;
}

/// Adds coef * B^T J B * measure for each cell, restricted to interior dofs.
template <class JacobianAt>
void add_stiffness(const Mesh& m, const DofMap& dofs, JacobianAt jac, std::vector<Eigen::Triplet<double>>& trip) {
  const int dim = m.dimension();
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const Mat2 J = jac(c);
    const double meas = m.cell_measure(c);
    for (int k = 0; k < dim; ++k) {
      const AxisStencil& sk = m.stencil(c, k);
      const std::uint32_t nk[2] = {sk.plus, sk.minus};
      for (int l = 0; l < dim; ++l) {
        const AxisStencil& sl = m.stencil(c, l);
        const std::uint32_t nl[2] = {sl.plus, sl.minus};
        const double v = J[k][l] * sk.inv_h * sl.inv_h * meas;
        if (v == 0.0) continue;
        for (int a = 0; a < 2; ++a) {
          const long ia = dofs.index[nk[a]];
          if (ia < 0) continue;
          for (int b = 0; b < 2; ++b) {
            const long ib = dofs.index[nl[b]];
            if (ib < 0) continue;
            trip.emplace_back(ia, ib, (a == b ? 1.0 : -1.0) * v);
          }
        }
      }
    }
  }
}

/// Factorizes K, adding a growing diagonal shift if the factorization fails.
class Preconditioner {
 public:
  void factor(SpMat K) {
    double dmax = 0.0;
    for (long k = 0; k < K.rows(); ++k) dmax = std::max(dmax, std::abs(K.coeff(k, k)));
    if (!(dmax > 0.0) || !std::isfinite(dmax)) dmax = 1.0;
    double shift = 0.0;
    for (int attempt = 0; attempt < 20; ++attempt) {
      SpMat A = K;
      if (shift > 0.0) {
        for (long k = 0; k < A.rows(); ++k) A.coeffRef(k, k) += shift;
      }
      if (attempt == 0) {
        ldlt_.analyzePattern(A);
      }
      ldlt_.factorize(A);
      if (ldlt_.info() == Eigen::Success && (ldlt_.vectorD().array() > 0.0).all()) return;
      shift = shift == 0.0 ? 1e-12 * dmax : shift * 100.0;
    }
    throw Error(ErrorCode::kNonConvergence, "preconditioner factorization failed");
  }
  Vec solve(const Vec& b) const { return ldlt_.solve(b); }

 private:
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

SpMat energy_preconditioner(const EnergyModel& model, const DofMap& dofs, std::span<const double> u, double eps) {
  const Mesh& m = model.mesh();
  const std::size_t n = dofs.interior.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.cell_count() * 9);
  double mfac = 1.0;
  if (model.kirchhoff()) {
    EnergyModel me = model;
    me.with_eps(eps);
    mfac = model.kirchhoff()->M(gradient_term(u, me));
  }
  add_stiffness(m, dofs, [&](std::size_t c) {
    Mat2 J = model.anisotropy().at_cell(c).flux_jacobian(cell_gradient(m, u, c), eps);
    for (auto& row : J) for (double& x : row) x *= mfac;
    return J;
  }, trip);
  if (model.absorption()) {
    const auto& g = model.absorption_cells();
    const double npc = static_cast<double>(m.nodes_per_cell());
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      double s = cell_mean(m, u, c);
      if (g[c].exponent < 2.0) s = std::max(s, 1e-3);
      const double t = g[c].slope(s) * m.cell_measure(c) / npc;
      if (!(t > 0.0) || !std::isfinite(t)) continue;
      for (auto nd : m.cell_nodes(c)) {
        const long i = dofs.index[nd];
        if (i >= 0) trip.emplace_back(i, i, t);
      }
    }
  }
  SpMat K(static_cast<long>(n), static_cast<long>(n));
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

std::vector<double> abs_values(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  return v;
}

double dot_interior(const DofMap& dofs, const std::vector<double>& g, const Vec& d) {
  double s = 0.0;
  for (std::size_t k = 0; k < dofs.interior.size(); ++k) s += g[dofs.interior[k]] * d[static_cast<long>(k)];
  return s;
}

std::vector<double> step(const DofMap& dofs, const std::vector<double>& u, const Vec& d, double alpha) {
  std::vector<double> t = u;
  for (std::size_t k = 0; k < dofs.interior.size(); ++k) t[dofs.interior[k]] += alpha * d[static_cast<long>(k)];
  return t;
}

double rounding_allowance(const EnergyParts& e) {
  return 1e-13 * (std::abs(e.total) + std::abs(e.gradient) + std::abs(e.reaction) + std::abs(e.absorption));
}

std::vector<double> random_profile(const Mesh& m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(m.node_count(), 0.0);
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    double x = std::exp(rng.uniform(-1.0, 1.0));
    if (!m.is_boundary(i)) v[i] = x;
  }
  return v;
}

}  // namespace

NodeField bump(const MeshPtr& mesh) {
  const Mesh& m = *mesh;
  const auto b = m.bounds();
  std::vector<double> v(m.node_count(), 0.0);
  auto profile = [](double x, double a, double c) { return 4.0 * (x - a) * (c - x) / ((c - a) * (c - a)); };
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.is_boundary(i)) continue;
    const Point& x = m.node(i);
    double val = profile(x[0], b[0], b[1]);
    if (m.dimension() == 2) val *= profile(x[1], b[2], b[3]);
    v[i] = val;
  }
  return NodeField(mesh, std::move(v));
}

InitialGuess initial_guess(const EnergyModel& model, const SolverOptions& opts) {
  opts.check();
  const MeshPtr& mp = model.mesh_ptr();
  InitialGuess out;
  if (opts.init == InitKind::kProvided) {
    require_same_mesh(*opts.initial, model.exponent().values());
    out.field = *opts.initial;
    out.energy = energy(out.field, model);
    out.negative_found = out.energy < 0.0;
    return out;
  }
  std::vector<double> phi;
  if (opts.init == InitKind::kBump) {
    const NodeField b = bump(mp);
    phi.assign(b.values().begin(), b.values().end());
  } else {
    phi = random_profile(*mp, opts.seed);
  }
  double best_t = 1.0;
  double best_e = std::numeric_limits<double>::infinity();
  std::vector<double> trial(phi.size());
  for (int k = 0; k <= 50; ++k) {
    const double t = std::pow(10.0, -4.0 + 0.1 * k);
    for (std::size_t i = 0; i < phi.size(); ++i) trial[i] = t * phi[i];
    const double e = energy(trial, model);
    if (e < best_e) {
      best_e = e;
      best_t = t;
    }
  }
  if (best_e < 0.0) {
    out.negative_found = true;
    out.scale = best_t;
  }
  for (double& x : phi) x *= out.scale;
  out.field = NodeField(mp, std::move(phi));
  out.energy = energy(out.field, model);
  return out;
}

double weak_residual(const NodeField& u, const EnergyModel& model) {
  require_same_mesh(u, model.exponent().values());
  EnergyModel m0 = model;
  m0.with_eps(0.0);
  std::vector<double> g;
  gateaux_gradient(m0, u.values(), g);
  return scaled_max(model.mesh(), dof_map(model.mesh()), g);
}

double weak_residual(const NodeField& u, const ProblemSpec& spec) { return weak_residual(u, spec.model); }

double hopf_diagnostic(const NodeField& u) {
  const Mesh& m = u.mesh();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (!m.is_boundary(i)) continue;
    auto [j, dist] = m.inward_neighbor(i);
    if (dist <= 0.0) continue;
    best = std::min(best, (u[j] - u[i]) / dist);
  }
  return std::isfinite(best) ? best : 0.0;
}

double kirchhoff_multiplier_estimate(const NodeField& u, const EnergyModel& model) {
  require_same_mesh(u, model.exponent().values());
  if (!model.reaction()) throw Error(ErrorCode::kInvalidArgument, "model has no reaction term");
  const Mesh& m = model.mesh();
  const auto& f = model.reaction_cells();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const double ub = u.cell_average(c);
    num += f[c].value(ub) * ub * m.cell_measure(c);
    const Vec2 xi = cell_gradient(m, u.values(), c);
    const Vec2 a = model.anisotropy().at_cell(c).flux(xi);
    den += (a[0] * xi[0] + (m.dimension() == 2 ? a[1] * xi[1] : 0.0)) * m.cell_measure(c);
  }
  if (!(den > 0.0)) throw Error(ErrorCode::kInvalidArgument, "field has zero gradient energy");
  return num / den;
}

SolveReport minimize_energy(const EnergyModel& model, const SolverOptions& opts) {
  opts.check();
  if (!model.reaction()) throw Error(ErrorCode::kInvalidArgument, "model has no reaction term");
  const Mesh& m = model.mesh();
  const DofMap dofs = dof_map(m);

  SolveReport rep;
  InitialGuess ig = initial_guess(model, opts);
  rep.init_scale = ig.scale;
  rep.init_negative_found = ig.negative_found;
  std::vector<double> u(ig.field.values().begin(), ig.field.values().end());
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.is_boundary(i)) u[i] = 0.0;
  }

  std::vector<double> eps_list;
  for (double e = opts.eps0; e >= opts.eps_min * (1.0 - 1e-12); e *= opts.continuation) eps_list.push_back(e);
  eps_list.push_back(0.0);

  std::vector<double> g;
  double final_residual = std::numeric_limits<double>::infinity();
  for (double eps : eps_list) {
    EnergyModel me = model;
    me.with_eps(eps);
    const double pre_eps = std::max(eps, opts.eps_min);
    StageTrace st;
    st.eps = eps;
    for (;;) {
      gateaux_gradient(me, u, g);
      st.residual = scaled_max(m, dofs, g);
      if (!std::isfinite(st.residual)) throw Error(ErrorCode::kModelDefect, "non-finite gradient");
      if (st.residual <= opts.grad_tol) {
        st.converged = true;
        break;
      }
      if (st.iterations >= opts.max_iters || dofs.interior.empty()) break;

      Vec rhs(static_cast<long>(dofs.interior.size()));
      for (std::size_t k = 0; k < dofs.interior.size(); ++k) rhs[static_cast<long>(k)] = -g[dofs.interior[k]];
      Preconditioner P;
      P.factor(energy_preconditioner(me, dofs, u, pre_eps));
      Vec d = P.solve(rhs);
      double slope = dot_interior(dofs, g, d);
      if (!(slope < 0.0) || !d.allFinite()) {
        for (std::size_t k = 0; k < dofs.interior.size(); ++k) {
          d[static_cast<long>(k)] = rhs[static_cast<long>(k)] / m.lumped_measure(dofs.interior[k]);
        }
        slope = dot_interior(dofs, g, d);
      }

      const EnergyParts e0 = energy_parts(u, me);
      const double allow = rounding_allowance(e0);
      double alpha = 1.0;
      bool accepted = false;
      std::vector<double> trial;
      double et = 0.0;
      while (alpha > 1e-14) {
        trial = step(dofs, u, d, alpha);
        et = energy(trial, me);
        if (std::isfinite(et) && et <= e0.total + opts.armijo * alpha * slope + allow) {
          accepted = true;
          break;
        }
        alpha *= opts.shrink;
      }
      if (!accepted) break;
      rep.max_energy_increase = std::max(rep.max_energy_increase, et - e0.total);
      if (opts.abs_polish) {
        std::vector<double> polished = abs_values(trial);
        const double ep = energy(polished, me);
        rep.max_polish_increase = std::max(rep.max_polish_increase, ep - et);
        trial = std::move(polished);
      }
      u = std::move(trial);
      ++st.iterations;
    }
    rep.iterations += st.iterations;
    rep.stages.push_back(st);
    final_residual = st.residual;
  }

  rep.solution = NodeField(model.mesh_ptr(), u);
  rep.residual_max = final_residual;
  rep.converged = final_residual <= 10.0 * opts.grad_tol;
  rep.energy = energy(rep.solution, model);
  rep.negative_energy = rep.energy < 0.0;
  rep.positivity_ok = !dofs.interior.empty();
  for (std::size_t i : dofs.interior) {
    if (!(u[i] > 0.0)) rep.positivity_ok = false;
  }
  rep.hopf_margin = hopf_diagnostic(rep.solution);
  if (model.kirchhoff() && rep.solution.max_abs() > 0.0) {
    EnergyModel m0 = model;
    m0.with_eps(0.0);
    const double M0 = model.kirchhoff()->M(gradient_term(u, m0));
    rep.kirchhoff_M0 = M0;
    rep.kirchhoff_consistency = std::abs(kirchhoff_multiplier_estimate(rep.solution, m0) - M0);
  }
  return rep;
}

SolveReport solve(const ProblemSpec& spec, const SolverOptions& opts, bool override_validation) {
  ValidationReport v = validate_problem(spec);
  if (!v.passed() && !override_validation) {
    std::ostringstream os;
    os << "hypotheses fail:";
    for (const auto& e : v.entries) {
      if (e.status == CheckStatus::kFail) os << " " << e.name << ";";
    }
    throw Error(ErrorCode::kInadmissible, os.str());
  }
  SolveReport rep = minimize_energy(spec.model, opts);
  rep.validation = std::move(v);
  rep.validation_overridden = override_validation && !rep.validation.passed();
  rep.regime = sharpness_regime(spec).regime;
  return rep;
}

namespace {

void require_kind(const ProblemSpec& spec, ProblemKind k) {
  if (spec.kind != k) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("expected a ") + to_string(k) + " problem, got " + to_string(spec.kind));
  }
}

}  // namespace

SolveReport solve_problem1(const ProblemSpec& spec, const SolverOptions& opts, bool override_validation) {
  require_kind(spec, ProblemKind::kProblem1);
  return solve(spec, opts, override_validation);
}

SolveReport solve_problem2(const ProblemSpec& spec, const SolverOptions& opts, bool override_validation) {
  require_kind(spec, ProblemKind::kProblem2);
  return solve(spec, opts, override_validation);
}

SolveReport solve_kirchhoff(const ProblemSpec& spec, const SolverOptions& opts, bool override_validation) {
  require_kind(spec, ProblemKind::kKirchhoff);
  return solve(spec, opts, override_validation);
}

namespace {

struct Rayleigh {
  double top = 0.0;
  double bottom = 0.0;
  double value() const { return top / bottom; }
};

Rayleigh rayleigh(const Mesh& m, const Integrand& g, std::span<const double> u) {
  Rayleigh q;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    q.top += g.A(cell_gradient(m, u, c)) * m.cell_measure(c);
    q.bottom += std::pow(std::abs(cell_mean(m, u, c)), g.p) * m.cell_measure(c);
  }
  return q;
}

/// Gradient of top - R * bottom with respect to the nodal values.
void rayleigh_gradient(const Mesh& m, const Integrand& g, std::span<const double> u, double R,
                       std::vector<double>& out) {
  const double r = g.p;
  const double npc = static_cast<double>(m.nodes_per_cell());
  out.assign(m.node_count(), 0.0);
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const Vec2 a = g.flux(cell_gradient(m, u, c));
    for (int k = 0; k < m.dimension(); ++k) {
      const AxisStencil& st = m.stencil(c, k);
      const double t = r * a[static_cast<std::size_t>(k)] * st.inv_h * m.cell_measure(c);
      out[st.plus] += t;
      out[st.minus] -= t;
    }
    const double ub = cell_mean(m, u, c);
    const double b = ub == 0.0 ? 0.0 : r * std::pow(std::abs(ub), r - 2.0) * ub;
    for (auto n : m.cell_nodes(c)) out[n] -= R * b * m.cell_measure(c) / npc;
  }
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.is_boundary(i)) out[i] = 0.0;
  }
}

void normalize(const Mesh& m, const Integrand& g, std::vector<double>& u) {
  for (double& x : u) x = std::abs(x);
  const double b = rayleigh(m, g, u).bottom;
  const double s = std::pow(b, -1.0 / g.p);
  for (double& x : u) x *= s;
}

}  // namespace

EigenResult first_eigenpair(const MeshPtr& mesh, double r, const EigenOptions& opts) {
  if (!(r > 1.0) || !std::isfinite(r)) throw Error(ErrorCode::kInvalidArgument, "r must be finite and > 1");
  const Mesh& m = *mesh;
  const DofMap dofs = dof_map(m);
  if (dofs.interior.empty()) throw Error(ErrorCode::kInvalidArgument, "mesh has no interior nodes");
  const Integrand g = Integrand::isotropic(r, r, m.dimension());

  const NodeField b = bump(mesh);
  std::vector<double> u(b.values().begin(), b.values().end());
  normalize(m, g, u);
  std::vector<double> grad;
  EigenResult res;
  int flat = 0;
  for (;;) {
    const double R = rayleigh(m, g, u).value();
    rayleigh_gradient(m, g, u, R, grad);
    res.residual = scaled_max(m, dofs, grad) / (r * R);
    if (res.residual <= opts.tol || (flat >= 20 && res.residual <= opts.stall_tol)) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opts.max_iters) break;

    double gmax = 0.0;
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      gmax = std::max(gmax, euclid_norm(cell_gradient(m, u, c), m.dimension()));
    }
    // Below r = 2 any eps lowers the Jacobian, so it stays at rounding size.
    const double pre_eps = std::max((r < 2.0 ? 1e-8 : 1e-3) * gmax, 1e-300);
    std::vector<Eigen::Triplet<double>> trip;
    add_stiffness(m, dofs, [&](std::size_t c) {
      Mat2 J = g.flux_jacobian(cell_gradient(m, u, c), pre_eps);
      for (auto& row : J) for (double& x : row) x *= r;
      return J;
    }, trip);
    const long n = static_cast<long>(dofs.interior.size());
    SpMat K(n, n);
    K.setFromTriplets(trip.begin(), trip.end());
    Preconditioner P;
    P.factor(std::move(K));
    Vec rhs(n);
    for (long k = 0; k < n; ++k) rhs[k] = -grad[dofs.interior[static_cast<std::size_t>(k)]];
    Vec d = P.solve(rhs);
    // The gradient of the quotient is grad / bottom, and bottom = 1 here.
    const double slope = dot_interior(dofs, grad, d);
    if (!(slope < 0.0)) break;
    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> trial;
    double Rt = R;
    while (alpha > 1e-14) {
      trial = step(dofs, u, d, alpha);
      Rt = rayleigh(m, g, trial).value();
      if (std::isfinite(Rt) && Rt <= R + 1e-4 * alpha * slope + 1e-15 * R) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.converged = res.residual <= opts.stall_tol;
      break;
    }
    flat = R - Rt <= 1e-14 * R ? flat + 1 : 0;
    normalize(m, g, trial);
    u = std::move(trial);
    ++res.iterations;
  }
  if (!res.converged) {
    std::ostringstream os;
    os << "eigenpair iteration stopped at residual " << res.residual << " after " << res.iterations
       << " iterations";
    throw Error(ErrorCode::kNonConvergence, os.str());
  }
  res.lambda = rayleigh(m, g, u).value();
  res.phi = NodeField(mesh, std::move(u));
  return res;
}

UniquenessReport uniqueness_experiment(const ProblemSpec& spec, const SolverOptions& opts, int n_inits,
                                       std::uint64_t seed, double tol) {
  if (n_inits < 0) throw Error(ErrorCode::kInvalidArgument, "n_inits must be >= 0");
  UniquenessReport rep;
  rep.regime = sharpness_regime(spec).regime;
  Rng rng(seed);
  std::vector<NodeField> sols;
  bool all_converged = true;
  for (int k = 0; k <= n_inits; ++k) {
    SolverOptions o = opts;
    o.initial.reset();
    if (k == 0) {
      o.init = InitKind::kBump;
    } else {
      o.init = InitKind::kRandom;
      o.seed = rng.next();
    }
    SolveReport s = minimize_energy(spec.model, o);
    ++rep.runs;
    if (s.converged) ++rep.converged_runs;
    all_converged = all_converged && s.converged;
    rep.energies.push_back(s.energy);
    rep.sup_norms.push_back(s.solution.max_abs());
    sols.push_back(std::move(s.solution));
  }
  for (std::size_t k = 1; k < sols.size(); ++k) {
    double dist = 0.0;
    for (std::size_t i = 0; i < sols[0].size(); ++i) dist = std::max(dist, std::abs(sols[k][i] - sols[0][i]));
    rep.max_distance = std::max(rep.max_distance, dist);
    try {
      GapReport gr = diaz_saa_gap(sols[0], sols[k], spec.model);
      const double rel = gr.scale > 0.0 ? std::abs(gr.gap) / gr.scale : std::abs(gr.gap);
      rep.max_relative_gap = std::max(rep.max_relative_gap, rel);
      ++rep.gap_pairs;
    } catch (const Error&) {
    }
  }
  const bool close = rep.max_distance <= tol;
  rep.passed = all_converged && close;
  if (rep.regime == Regime::kDegenerateEigen) {
    rep.tag = "expected-multiplicity";
  } else if (!all_converged) {
    rep.tag = "inconclusive";
  } else {
    rep.tag = close ? "unique" : "not-unique";
  }
  return rep;
}

}  // namespace pxl
