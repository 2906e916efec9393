#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pxlap/anisotropy.hpp"
#include "pxlap/exponent.hpp"
#include "pxlap/mesh.hpp"

namespace pxl {

/// s -> coef * s^{exponent - 1} for s >= 0 and 0 for s < 0, with primitive
/// coef * s^exponent / exponent. The source variant is s -> coef for every s,
/// with primitive coef * s.
struct PowerLaw {
  double coef = 1.0;
  double exponent = 2.0;
  bool source = false;

  double value(double s) const {
    if (source) return coef;
    return s >= 0.0 ? coef * std::pow(s, exponent - 1.0) : 0.0;
  }
  double primitive(double s) const {
    if (source) return coef * s;
    return s >= 0.0 ? coef * std::pow(s, exponent) / exponent : 0.0;
  }
  /// d value / ds on s > 0 (0 for the source variant).
  double slope(double s) const {
    if (source || s <= 0.0) return 0.0;
    return coef * (exponent - 1.0) * std::pow(s, exponent - 2.0);
  }
};

enum class ReactionKind { kPower, kSource };

/// f(x, s) = h(x) s^{q(x)-1} (power) or f(x, s) = h(x) (source).
class ReactionTerm {
 public:
  /// h >= 0 finite, q >= 1.
  static ReactionTerm power(NodeField h, NodeField q);
  static ReactionTerm source(NodeField h);

  ReactionKind kind() const { return kind_; }
  const NodeField& h() const { return h_; }
  /// Exponent field; identically 1 for the source kind.
  const NodeField& q() const { return q_; }
  PowerLaw at_node(std::size_t i) const { return {h_[i], q_[i], kind_ == ReactionKind::kSource}; }
  PowerLaw at_cell(std::size_t c) const;

 private:
  ReactionTerm(ReactionKind kind, NodeField h, NodeField q);
  ReactionKind kind_;
  NodeField h_;
  NodeField q_;
};

/// g(x, s) = l(x) s^{Q(x)-1} for s >= 0, 0 otherwise.
class AbsorptionTerm {
 public:
  /// l > 0, Q >= 1.
  AbsorptionTerm(NodeField l, NodeField Q);

  const NodeField& l() const { return l_; }
  const NodeField& Q() const { return Q_; }
  PowerLaw at_node(std::size_t i) const { return {l_[i], Q_[i], false}; }
  PowerLaw at_cell(std::size_t c) const;

 private:
  NodeField l_;
  NodeField Q_;
};

/// Saturating M(s) = m_inf - (m_inf - m0) / (1 + s). Parameters are only
/// required to be finite; the structural conditions are checked by
/// validate_M.
class KirchhoffTerm {
 public:
  KirchhoffTerm(double m0, double m_inf);

  double m0() const { return m0_; }
  double m_inf() const { return m_inf_; }
  double M(double s) const { return m_inf_ - (m_inf_ - m0_) / (1.0 + s); }
  /// Integral of M over [0, t]; throws kInvalidArgument for t < 0.
  double M_hat(double t) const;

 private:
  double m0_;
  double m_inf_;
};

double potential_F(const PowerLaw& f, double u);
double potential_G(const PowerLaw& g, double u);

enum class FunctionalKind { kW, kWA, kE, kEHat, kJ };

/// Which functional phi_line / phi_prime restrict to a segment.
/// kRootEnergy evaluates the model energy (E, E-hat or J) at v^{1/r}.
enum class LineFunctional { kW, kWA, kRootEnergy };

/// The integrand, optional reaction/absorption/Kirchhoff terms, and the
/// gradient regularization eps used by E, E-hat and J. Per-cell coefficients
/// are cached at construction.
class EnergyModel {
 public:
  explicit EnergyModel(AnisotropyModel anisotropy);

  EnergyModel& with_reaction(ReactionTerm term);
  EnergyModel& with_absorption(AbsorptionTerm term);
  EnergyModel& with_kirchhoff(KirchhoffTerm term);
  EnergyModel& with_eps(double eps);

  const Mesh& mesh() const { return anisotropy_.mesh(); }
  const MeshPtr& mesh_ptr() const { return anisotropy_.exponent().mesh_ptr(); }
  const AnisotropyModel& anisotropy() const { return anisotropy_; }
  const ExponentField& exponent() const { return anisotropy_.exponent(); }
  double r() const { return anisotropy_.exponent().r(); }
  double eps() const { return eps_; }

  const std::optional<ReactionTerm>& reaction() const { return reaction_; }
  const std::optional<AbsorptionTerm>& absorption() const { return absorption_; }
  const std::optional<KirchhoffTerm>& kirchhoff() const { return kirchhoff_; }

  /// Kirchhoff -> J, absorption -> E-hat, reaction -> E, otherwise W_A.
  FunctionalKind kind() const;

  const std::vector<PowerLaw>& reaction_cells() const { return f_cells_; }
  const std::vector<PowerLaw>& absorption_cells() const { return g_cells_; }

 private:
  AnisotropyModel anisotropy_;
  std::optional<ReactionTerm> reaction_;
  std::optional<AbsorptionTerm> absorption_;
  std::optional<KirchhoffTerm> kirchhoff_;
  std::vector<PowerLaw> f_cells_;
  std::vector<PowerLaw> g_cells_;
  double eps_ = 0.0;
};

/// Cone membership: finite, >= 0, and > 0 at interior nodes. Throws kOutsideCone.
void require_cone(std::span<const double> v, const Mesh& mesh);

/// Sum over cells of (r/p) |grad(v^{1/r})|^p * measure (isotropic form).
double W_functional(const NodeField& v, const EnergyModel& model);
/// Same with A(x, .) in place of |.|^p; bitwise equal to W_functional for
/// the isotropic model.
double W_A_functional(const NodeField& v, const EnergyModel& model);

/// D(u) = sum (1/p) A_eps(grad u) * measure, with A_eps the regularized density.
double gradient_term(std::span<const double> u, const EnergyModel& model);

double energy_E(const NodeField& u, const EnergyModel& model);
double energy_E_hat(const NodeField& u, const EnergyModel& model);
double energy_J(const NodeField& u, const EnergyModel& model);

/// Pieces of the model energy: total = K(gradient) - reaction + absorption,
/// with K = M_hat for the Kirchhoff model and the identity otherwise.
struct EnergyParts {
  double gradient = 0.0;
  double reaction = 0.0;
  double absorption = 0.0;
  double total = 0.0;
};

/// Requires a reaction term.
EnergyParts energy_parts(std::span<const double> u, const EnergyModel& model);

/// The functional selected by model.kind() (W_A when there is no reaction).
double energy(std::span<const double> u, const EnergyModel& model);
double energy(const NodeField& u, const EnergyModel& model);

/// Derivative of energy(u) with respect to each nodal value; boundary
/// entries are 0. Pairing with a field phi gives the directional derivative.
void gateaux_gradient(const EnergyModel& model, std::span<const double> u, std::vector<double>& out);
NodeField gateaux_gradient(const EnergyModel& model, const NodeField& u);

/// Nodewise (1 - theta) v1 + theta v2.
NodeField segment_point(const NodeField& v1, const NodeField& v2, double theta);

double phi_line(const NodeField& v1, const NodeField& v2, double theta, LineFunctional which,
                const EnergyModel& model);

/// Exact derivative in theta of phi_line: sum a(grad w) . grad z * measure
/// with w = v^{1/r} and z = (v2 - v1) / v^{1 - 1/r} formed nodewise. For
/// kRootEnergy the flux part carries M(D(w)), the reaction and absorption
/// parts use the cell averages of w and z, and the whole is scaled by 1/r.
double phi_prime(const NodeField& v1, const NodeField& v2, double theta, LineFunctional which,
                 const EnergyModel& model);

/// Half the largest theta-margin keeping the segment in the cone, capped at 0.25.
double admissible_delta(const NodeField& v1, const NodeField& v2);

}  // namespace pxl
