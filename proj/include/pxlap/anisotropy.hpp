#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "pxlap/exponent.hpp"
#include "pxlap/mesh.hpp"

namespace pxl {

enum class AnisotropyKind { kIsotropic, kWeightedQuadratic };

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Euclidean length of the first `dim` components.
inline double euclid_norm(const Vec2& xi, int dim) {
  return dim == 1 ? std::abs(xi[0]) : std::hypot(xi[0], xi[1]);
}

/// The integrand A(x, .) frozen at one location x.
///
/// Isotropic: A = |xi|^p, N = |xi|^r.
/// Weighted quadratic: N = (sum w_i xi_i^2)^{r/2}, A = N^{p/r}
/// = (sum w_i xi_i^2)^{p/2}. The flux is a = (1/p) dA/dxi.
struct Integrand {
  AnisotropyKind kind = AnisotropyKind::kIsotropic;
  int dim = 1;
  double p = 2.0;
  double r = 1.0;
  Vec2 w{1.0, 1.0};

  static Integrand isotropic(double p, double r, int dim = 1) {
    return {AnisotropyKind::kIsotropic, dim, p, r, {1.0, 1.0}};
  }
  static Integrand weighted(double p, double r, Vec2 w, int dim = 2) {
    return {AnisotropyKind::kWeightedQuadratic, dim, p, r, w};
  }

  /// xi^T W xi (|xi|^2 for the isotropic kind).
  double quad(const Vec2& xi) const;
  double A(const Vec2& xi) const;
  double N(const Vec2& xi) const;
  Vec2 flux(const Vec2& xi) const;

  /// eps-regularized density (eps^2 + xi^T W xi)^{p/2} - eps^p; equals A at eps = 0.
  double density(const Vec2& xi, double eps) const;
  /// Its gradient divided by p: (eps^2 + xi^T W xi)^{(p-2)/2} W xi.
  Vec2 flux(const Vec2& xi, double eps) const;
  /// d flux / d xi at regularization eps (symmetric, positive definite for eps > 0).
  Mat2 flux_jacobian(const Vec2& xi, double eps) const;
};

struct HypothesisAReport {
  double gamma_hat = 0.0;
  double Gamma_hat = 0.0;
  std::size_t samples = 0;
  bool passed = false;
};

struct StrictConvexityReport {
  double min_relative_gap = 0.0;
  std::size_t violations = 0;
  std::size_t non_strict = 0;
  std::size_t samples = 0;
  bool passed = false;
};

/// A(x, xi) over a mesh: one of the two built-in kinds, with per-cell
/// coefficients at the quadrature points.
class AnisotropyModel {
 public:
  static AnisotropyModel isotropic(ExponentField exponent);
  /// One nonnegative weight field per coordinate axis. Strict positivity is
  /// not enforced here; check_hypothesis_A reports a degenerate direction.
  static AnisotropyModel weighted(ExponentField exponent, std::vector<NodeField> weights);

  AnisotropyKind kind() const { return kind_; }
  const ExponentField& exponent() const { return exponent_; }
  const Mesh& mesh() const { return exponent_.values().mesh(); }

  const Integrand& at_cell(std::size_t c) const { return cells_[c]; }
  Integrand at_node(std::size_t i) const;

  std::optional<double> gamma_hat() const { return gamma_hat_; }
  std::optional<double> Gamma_hat() const { return Gamma_hat_; }
  AnisotropyModel with_constants(const HypothesisAReport& rep) const;

 private:
  AnisotropyModel(AnisotropyKind kind, ExponentField exponent, std::vector<NodeField> weights);

  AnisotropyKind kind_;
  ExponentField exponent_;
  std::vector<NodeField> weights_;
  std::vector<Integrand> cells_;
  std::optional<double> gamma_hat_;
  std::optional<double> Gamma_hat_;
};

/// Samples (x, xi on the unit sphere, eta) and measures the ellipticity and
/// growth of the finite-difference Jacobian of the flux against |xi|^{p-2}.
/// Throws kModelDefect on a non-finite Jacobian entry.
HypothesisAReport check_hypothesis_A(const AnisotropyModel& model, std::size_t sample_count,
                                     std::uint64_t seed);

/// Midpoint test N((xi1+xi2)/2) < (N(xi1)+N(xi2))/2. Half of the pairs are
/// drawn on a common ray, where strict convexity is hardest.
StrictConvexityReport check_N_strict_convexity(const AnisotropyModel& model,
                                               std::size_t sample_count, std::uint64_t seed);

}  // namespace pxl
