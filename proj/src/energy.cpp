#include "pxlap/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pxlap/error.hpp"

namespace pxl {

ReactionTerm::ReactionTerm(ReactionKind kind, NodeField h, NodeField q)
    : kind_(kind), h_(std::move(h)), q_(std::move(q)) {
  require_same_mesh(h_, q_);
  if (h_.min() < 0.0) throw Error(ErrorCode::kInvalidArgument, "reaction coefficient h must be >= 0");
  if (q_.min() < 1.0) throw Error(ErrorCode::kInvalidArgument, "reaction exponent q must be >= 1");
}

ReactionTerm ReactionTerm::power(NodeField h, NodeField q) {
  return ReactionTerm(ReactionKind::kPower, std::move(h), std::move(q));
}

ReactionTerm ReactionTerm::source(NodeField h) {
  NodeField q(h.mesh_ptr(), 1.0);
  return ReactionTerm(ReactionKind::kSource, std::move(h), std::move(q));
}

PowerLaw ReactionTerm::at_cell(std::size_t c) const {
  return {h_.cell_average(c), q_.cell_average(c), kind_ == ReactionKind::kSource};
}

AbsorptionTerm::AbsorptionTerm(NodeField l, NodeField Q) : l_(std::move(l)), Q_(std::move(Q)) {
  require_same_mesh(l_, Q_);
  if (!(l_.min() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "absorption coefficient l must be > 0");
  if (Q_.min() < 1.0) throw Error(ErrorCode::kInvalidArgument, "absorption exponent Q must be >= 1");
}

PowerLaw AbsorptionTerm::at_cell(std::size_t c) const {
  return {l_.cell_average(c), Q_.cell_average(c), false};
}

KirchhoffTerm::KirchhoffTerm(double m0, double m_inf) : m0_(m0), m_inf_(m_inf) {
  if (!std::isfinite(m0) || !std::isfinite(m_inf)) {
    throw Error(ErrorCode::kInvalidArgument, "Kirchhoff parameters must be finite");
  }
}

double KirchhoffTerm::M_hat(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "M_hat needs t >= 0");
  return m_inf_ * t - (m_inf_ - m0_) * std::log1p(t);
}

double potential_F(const PowerLaw& f, double u) { return f.primitive(u); }
double potential_G(const PowerLaw& g, double u) { return g.primitive(u); }

EnergyModel::EnergyModel(AnisotropyModel anisotropy) : anisotropy_(std::move(anisotropy)) {}

EnergyModel& EnergyModel::with_reaction(ReactionTerm term) {
  require_same_mesh(term.h(), exponent().values());
  f_cells_.resize(mesh().cell_count());
  for (std::size_t c = 0; c < f_cells_.size(); ++c) f_cells_[c] = term.at_cell(c);
  reaction_ = std::move(term);
  return *this;
}

EnergyModel& EnergyModel::with_absorption(AbsorptionTerm term) {
  require_same_mesh(term.l(), exponent().values());
  g_cells_.resize(mesh().cell_count());
  for (std::size_t c = 0; c < g_cells_.size(); ++c) g_cells_[c] = term.at_cell(c);
  absorption_ = std::move(term);
  return *this;
}

EnergyModel& EnergyModel::with_kirchhoff(KirchhoffTerm term) {
  kirchhoff_ = term;
  return *this;
}

EnergyModel& EnergyModel::with_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::kInvalidArgument, "regularization eps must be >= 0");
  }
  eps_ = eps;
  return *this;
}

FunctionalKind EnergyModel::kind() const {
  if (!reaction_) return FunctionalKind::kWA;
  if (kirchhoff_) return FunctionalKind::kJ;
  if (absorption_) return FunctionalKind::kEHat;
  return FunctionalKind::kE;
}

void require_cone(std::span<const double> v, const Mesh& mesh) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool ok = std::isfinite(v[i]) && (mesh.is_boundary(i) ? v[i] >= 0.0 : v[i] > 0.0);
    if (!ok) {
      std::ostringstream os;
      os << "value " << v[i] << " at node " << i << " is outside the positive cone";
      throw Error(ErrorCode::kOutsideCone, os.str());
    }
  }
}

namespace {

std::vector<double> root(std::span<const double> v, double r) {
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::pow(v[i], 1.0 / r);
  return w;
}

template <class Density>
double root_sum(const NodeField& v, const EnergyModel& model, Density density) {
  require_same_mesh(v, model.exponent().values());
  const Mesh& m = model.mesh();
  require_cone(v.values(), m);
  const double r = model.r();
  const std::vector<double> w = root(v.values(), r);
  double s = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const Integrand& g = model.anisotropy().at_cell(c);
    s += r / g.p * density(g, cell_gradient(m, w, c)) * m.cell_measure(c);
  }
  return s;
}

double reaction_sum(std::span<const double> u, const EnergyModel& model) {
  const Mesh& m = model.mesh();
  const auto& f = model.reaction_cells();
  double s = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    s += f[c].primitive(cell_mean(m, u, c)) * m.cell_measure(c);
  }
  return s;
}

double absorption_sum(std::span<const double> u, const EnergyModel& model) {
  const Mesh& m = model.mesh();
  const auto& g = model.absorption_cells();
  double s = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    s += g[c].primitive(cell_mean(m, u, c)) * m.cell_measure(c);
  }
  return s;
}

void require_reaction(const EnergyModel& model) {
  if (!model.reaction()) throw Error(ErrorCode::kInvalidArgument, "model has no reaction term");
}

void require_size(std::span<const double> u, const EnergyModel& model) {
  if (u.size() != model.mesh().node_count()) {
    throw Error(ErrorCode::kMeshMismatch, "field size does not match the mesh");
  }
}

}  // namespace

double W_functional(const NodeField& v, const EnergyModel& model) {
  return root_sum(v, model, [](const Integrand& g, const Vec2& xi) {
    return std::pow(euclid_norm(xi, g.dim), g.p);
  });
}

double W_A_functional(const NodeField& v, const EnergyModel& model) {
  return root_sum(v, model, [](const Integrand& g, const Vec2& xi) { return g.A(xi); });
}

double gradient_term(std::span<const double> u, const EnergyModel& model) {
  require_size(u, model);
  const Mesh& m = model.mesh();
  const double eps = model.eps();
  double s = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const Integrand& g = model.anisotropy().at_cell(c);
    s += g.density(cell_gradient(m, u, c), eps) / g.p * m.cell_measure(c);
  }
  return s;
}

double energy_E(const NodeField& u, const EnergyModel& model) {
  require_same_mesh(u, model.exponent().values());
  require_reaction(model);
  return gradient_term(u.values(), model) - reaction_sum(u.values(), model);
}

double energy_E_hat(const NodeField& u, const EnergyModel& model) {
  if (!model.absorption()) throw Error(ErrorCode::kInvalidArgument, "model has no absorption term");
  return energy_E(u, model) + absorption_sum(u.values(), model);
}

double energy_J(const NodeField& u, const EnergyModel& model) {
  require_same_mesh(u, model.exponent().values());
  require_reaction(model);
  if (!model.kirchhoff()) throw Error(ErrorCode::kInvalidArgument, "model has no Kirchhoff term");
  return model.kirchhoff()->M_hat(gradient_term(u.values(), model)) - reaction_sum(u.values(), model);
}

EnergyParts energy_parts(std::span<const double> u, const EnergyModel& model) {
  require_size(u, model);
  require_reaction(model);
  EnergyParts e;
  e.gradient = gradient_term(u, model);
  e.reaction = reaction_sum(u, model);
  e.total = (model.kirchhoff() ? model.kirchhoff()->M_hat(e.gradient) : e.gradient) - e.reaction;
  if (model.absorption()) {
    e.absorption = absorption_sum(u, model);
    e.total += e.absorption;
  }
  return e;
}

double energy(std::span<const double> u, const EnergyModel& model) {
  require_size(u, model);
  if (!model.reaction()) {
    return W_A_functional(NodeField(model.mesh_ptr(), std::vector<double>(u.begin(), u.end())), model);
  }
  return energy_parts(u, model).total;
}

double energy(const NodeField& u, const EnergyModel& model) {
  require_same_mesh(u, model.exponent().values());
  return energy(u.values(), model);
}

void gateaux_gradient(const EnergyModel& model, std::span<const double> u, std::vector<double>& out) {
  require_size(u, model);
  const Mesh& m = model.mesh();
  const double eps = model.eps();
  const int dim = m.dimension();
  const double npc = static_cast<double>(m.nodes_per_cell());
  out.assign(m.node_count(), 0.0);
  const double mfac = model.kirchhoff() ? model.kirchhoff()->M(gradient_term(u, model)) : 1.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const Integrand& g = model.anisotropy().at_cell(c);
    Vec2 a = g.flux(cell_gradient(m, u, c), eps);
    for (int k = 0; k < dim; ++k) {
      const AxisStencil& st = m.stencil(c, k);
      double t = mfac * a[static_cast<std::size_t>(k)] * st.inv_h * m.cell_measure(c);
      out[st.plus] += t;
      out[st.minus] -= t;
    }
  }
  if (model.reaction()) {
    const auto& f = model.reaction_cells();
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      double t = f[c].value(cell_mean(m, u, c)) * m.cell_measure(c) / npc;
      for (auto n : m.cell_nodes(c)) out[n] -= t;
    }
  }
  if (model.absorption()) {
    const auto& gl = model.absorption_cells();
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      double t = gl[c].value(cell_mean(m, u, c)) * m.cell_measure(c) / npc;
      for (auto n : m.cell_nodes(c)) out[n] += t;
    }
  }
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.is_boundary(i)) out[i] = 0.0;
  }
}

NodeField gateaux_gradient(const EnergyModel& model, const NodeField& u) {
  require_same_mesh(u, model.exponent().values());
  std::vector<double> g;
  gateaux_gradient(model, u.values(), g);
  return NodeField(u.mesh_ptr(), std::move(g));
}

NodeField segment_point(const NodeField& v1, const NodeField& v2, double theta) {
  require_same_mesh(v1, v2);
  std::vector<double> v(v1.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - theta) * v1[i] + theta * v2[i];
  return NodeField(v1.mesh_ptr(), std::move(v));
}

double phi_line(const NodeField& v1, const NodeField& v2, double theta, LineFunctional which,
                const EnergyModel& model) {
  NodeField v = segment_point(v1, v2, theta);
  switch (which) {
    case LineFunctional::kW: return W_functional(v, model);
    case LineFunctional::kWA: return W_A_functional(v, model);
    case LineFunctional::kRootEnergy: break;
  }
  require_same_mesh(v, model.exponent().values());
  require_cone(v.values(), model.mesh());
  require_reaction(model);
  return energy(root(v.values(), model.r()), model);
}

double phi_prime(const NodeField& v1, const NodeField& v2, double theta, LineFunctional which,
                 const EnergyModel& model) {
  NodeField v = segment_point(v1, v2, theta);
  require_same_mesh(v, model.exponent().values());
  const Mesh& m = model.mesh();
  require_cone(v.values(), m);
  const double r = model.r();
  const std::vector<double> w = root(v.values(), r);
  std::vector<double> z(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double d = v2[i] - v1[i];
    if (v[i] > 0.0) {
      z[i] = d / std::pow(v[i], 1.0 - 1.0 / r);
    } else if (d == 0.0) {
      z[i] = 0.0;
    } else if (r == 1.0) {
      z[i] = d;
    } else {
      throw Error(ErrorCode::kOutsideCone, "segment derivative undefined at a zero of v");
    }
  }

  const bool energy_line = which == LineFunctional::kRootEnergy;
  if (energy_line) require_reaction(model);
  const double eps = energy_line ? model.eps() : 0.0;
  double flux_part = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const Integrand& g = model.anisotropy().at_cell(c);
    Vec2 xi = cell_gradient(m, w, c);
    Vec2 a = which == LineFunctional::kW ? Integrand::isotropic(g.p, g.r, g.dim).flux(xi)
                                         : g.flux(xi, eps);
    Vec2 dz = cell_gradient(m, z, c);
    flux_part += (a[0] * dz[0] + a[1] * dz[1]) * m.cell_measure(c);
  }
  if (!energy_line) return flux_part;

  const double mfac = model.kirchhoff() ? model.kirchhoff()->M(gradient_term(w, model)) : 1.0;
  double f_part = 0.0;
  const auto& f = model.reaction_cells();
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    f_part += f[c].value(cell_mean(m, w, c)) * cell_mean(m, z, c) * m.cell_measure(c);
  }
  double g_part = 0.0;
  if (model.absorption()) {
    const auto& gl = model.absorption_cells();
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      g_part += gl[c].value(cell_mean(m, w, c)) * cell_mean(m, z, c) * m.cell_measure(c);
    }
  }
  return (mfac * flux_part - f_part + g_part) / r;
}

double admissible_delta(const NodeField& v1, const NodeField& v2) {
  require_same_mesh(v1, v2);
  double d = 0.25;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    double diff = std::fabs(v2[i] - v1[i]);
    if (diff > 0.0) d = std::min(d, 0.5 * std::min(v1[i], v2[i]) / diff);
  }
  return std::max(d, 0.0);
}

}  // namespace pxl
