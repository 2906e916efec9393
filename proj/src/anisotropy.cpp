#include "pxlap/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pxlap/error.hpp"
#include "pxlap/random.hpp"

namespace pxl {

namespace {

Vec2 weighted_vec(const Integrand& g, const Vec2& xi) {
  if (g.kind == AnisotropyKind::kIsotropic) return g.dim == 1 ? Vec2{xi[0], 0.0} : xi;
  return g.dim == 1 ? Vec2{g.w[0] * xi[0], 0.0} : Vec2{g.w[0] * xi[0], g.w[1] * xi[1]};
}

Vec2 random_unit(Rng& rng, int dim) {
  if (dim == 1) return {rng.uniform() < 0.5 ? -1.0 : 1.0, 0.0};
  double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {std::cos(t), std::sin(t)};
}

}  // namespace

double Integrand::quad(const Vec2& xi) const {
  const Vec2 wx = weighted_vec(*this, xi);
  return dim == 1 ? wx[0] * xi[0] : wx[0] * xi[0] + wx[1] * xi[1];
}

double Integrand::A(const Vec2& xi) const {
  if (kind == AnisotropyKind::kIsotropic) return std::pow(euclid_norm(xi, dim), p);
  return std::pow(quad(xi), 0.5 * p);
}

double Integrand::N(const Vec2& xi) const {
  if (kind == AnisotropyKind::kIsotropic) return std::pow(euclid_norm(xi, dim), r);
  return std::pow(quad(xi), 0.5 * r);
}

Vec2 Integrand::flux(const Vec2& xi) const {
  if (kind == AnisotropyKind::kIsotropic) {
    double n = euclid_norm(xi, dim);
    if (n == 0.0) return {0.0, 0.0};
    double k = std::pow(n, p - 2.0);
    return dim == 1 ? Vec2{k * xi[0], 0.0} : Vec2{k * xi[0], k * xi[1]};
  }
  double s = quad(xi);
  if (s == 0.0) return {0.0, 0.0};
  double k = std::pow(s, 0.5 * (p - 2.0));
  Vec2 wx = weighted_vec(*this, xi);
  return {k * wx[0], k * wx[1]};
}

double Integrand::density(const Vec2& xi, double eps) const {
  if (eps == 0.0) return A(xi);
  return std::pow(eps * eps + quad(xi), 0.5 * p) - std::pow(eps, p);
}

Vec2 Integrand::flux(const Vec2& xi, double eps) const {
  if (eps == 0.0) return flux(xi);
  double k = std::pow(eps * eps + quad(xi), 0.5 * (p - 2.0));
  Vec2 wx = weighted_vec(*this, xi);
  return {k * wx[0], k * wx[1]};
}

Mat2 Integrand::flux_jacobian(const Vec2& xi, double eps) const {
  double s = eps * eps + quad(xi);
  double k0 = std::pow(s, 0.5 * (p - 2.0));
  double k1 = s > 0.0 ? (p - 2.0) * std::pow(s, 0.5 * (p - 4.0)) : 0.0;
  Vec2 wx = weighted_vec(*this, xi);
  Vec2 wd = kind == AnisotropyKind::kIsotropic ? Vec2{1.0, 1.0} : w;
  Mat2 J{};
  const int n = dim;
  for (int i = 0; i < n; ++i) {
    J[i][i] = k1 * wx[i] * wx[i] + k0 * wd[i];
    for (int j = 0; j < i; ++j) J[i][j] = J[j][i] = k1 * wx[i] * wx[j];
  }
  return J;
}

AnisotropyModel::AnisotropyModel(AnisotropyKind kind, ExponentField exponent,
                                 std::vector<NodeField> weights)
    : kind_(kind), exponent_(std::move(exponent)), weights_(std::move(weights)) {
  const Mesh& m = mesh();
  cells_.resize(m.cell_count());
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    Integrand g;
    g.kind = kind_;
    g.dim = m.dimension();
    g.p = exponent_.at_cell(c);
    g.r = exponent_.r();
    for (std::size_t k = 0; k < weights_.size(); ++k) g.w[k] = weights_[k].cell_average(c);
    cells_[c] = g;
  }
}

AnisotropyModel AnisotropyModel::isotropic(ExponentField exponent) {
  return AnisotropyModel(AnisotropyKind::kIsotropic, std::move(exponent), {});
}

AnisotropyModel AnisotropyModel::weighted(ExponentField exponent, std::vector<NodeField> weights) {
  const Mesh& m = exponent.values().mesh();
  if (weights.size() != static_cast<std::size_t>(m.dimension())) {
    std::ostringstream os;
    os << "weighted anisotropy needs " << m.dimension() << " weight fields, got " << weights.size();
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  for (const NodeField& w : weights) {
    require_same_mesh(w, exponent.values());
    if (w.min() < 0.0) throw Error(ErrorCode::kInvalidArgument, "anisotropy weights must be >= 0");
  }
  return AnisotropyModel(AnisotropyKind::kWeightedQuadratic, std::move(exponent), std::move(weights));
}

Integrand AnisotropyModel::at_node(std::size_t i) const {
  Integrand g;
  g.kind = kind_;
  g.dim = mesh().dimension();
  g.p = exponent_.values()[i];
  g.r = exponent_.r();
  for (std::size_t k = 0; k < weights_.size(); ++k) g.w[k] = weights_[k][i];
  return g;
}

AnisotropyModel AnisotropyModel::with_constants(const HypothesisAReport& rep) const {
  AnisotropyModel out = *this;
  out.gamma_hat_ = rep.gamma_hat;
  out.Gamma_hat_ = rep.Gamma_hat;
  return out;
}

HypothesisAReport check_hypothesis_A(const AnisotropyModel& model, std::size_t sample_count,
                                     std::uint64_t seed) {
  if (sample_count == 0) throw Error(ErrorCode::kInvalidArgument, "sample_count must be >= 1");
  const int dim = model.mesh().dimension();
  const double h = 1e-6;
  Rng rng(seed);
  HypothesisAReport rep;
  rep.gamma_hat = std::numeric_limits<double>::infinity();
  rep.Gamma_hat = 0.0;
  for (std::size_t s = 0; s < sample_count; ++s) {
    const Integrand& g = model.at_cell(rng.index(model.mesh().cell_count()));
    Vec2 xi = random_unit(rng, dim);
    Vec2 eta = random_unit(rng, dim);

    Mat2 J{};
    for (int j = 0; j < dim; ++j) {
      Vec2 xp = xi, xm = xi;
      xp[j] += h;
      xm[j] -= h;
      Vec2 ap = g.flux(xp), am = g.flux(xm);
      for (int i = 0; i < dim; ++i) {
        J[i][j] = (ap[i] - am[i]) / (2.0 * h);
        if (!std::isfinite(J[i][j])) {
          throw Error(ErrorCode::kModelDefect, "non-finite flux Jacobian entry");
        }
      }
    }
    const double scale = std::pow(euclid_norm(xi, dim), g.p - 2.0);

    auto form = [&](const Vec2& e) {
      double v = 0.0, ee = 0.0;
      for (int i = 0; i < dim; ++i) {
        ee += e[i] * e[i];
        for (int j = 0; j < dim; ++j) v += J[i][j] * e[i] * e[j];
      }
      return v / (scale * ee);
    };
    rep.gamma_hat = std::min(rep.gamma_hat, form(eta));
    for (int k = 0; k < dim; ++k) {
      Vec2 e{0.0, 0.0};
      e[k] = 1.0;
      rep.gamma_hat = std::min(rep.gamma_hat, form(e));
    }
    double total = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) total += std::fabs(J[i][j]);
    }
    rep.Gamma_hat = std::max(rep.Gamma_hat, total / scale);
    ++rep.samples;
  }
  rep.passed = rep.gamma_hat > 0.0 && std::isfinite(rep.Gamma_hat);
  return rep;
}

StrictConvexityReport check_N_strict_convexity(const AnisotropyModel& model,
                                               std::size_t sample_count, std::uint64_t seed) {
  if (sample_count == 0) throw Error(ErrorCode::kInvalidArgument, "sample_count must be >= 1");
  const int dim = model.mesh().dimension();
  Rng rng(seed);
  StrictConvexityReport rep;
  rep.min_relative_gap = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sample_count; ++s) {
    const Integrand& g = model.at_cell(rng.index(model.mesh().cell_count()));
    double r1 = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    Vec2 d1 = random_unit(rng, dim);
    Vec2 x1{r1 * d1[0], r1 * d1[1]};
    Vec2 x2;
    if (s % 2 == 1) {
      // same ray, ratio in [1/5, 1/1.25] or [1.25, 5]
      double t = std::exp(rng.uniform(std::log(1.25), std::log(5.0)));
      if (rng.uniform() < 0.5) t = 1.0 / t;
      x2 = {t * x1[0], t * x1[1]};
    } else {
      double r2 = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      Vec2 d2 = random_unit(rng, dim);
      x2 = {r2 * d2[0], r2 * d2[1]};
    }
    Vec2 mid{0.5 * (x1[0] + x2[0]), 0.5 * (x1[1] + x2[1])};
    double n1 = g.N(x1), n2 = g.N(x2);
    double gap = 0.5 * (n1 + n2) - g.N(mid);
    double scale = n1 + n2;
    double dist = euclid_norm({x1[0] - x2[0], x1[1] - x2[1]}, dim);
    if (scale > 0.0) rep.min_relative_gap = std::min(rep.min_relative_gap, gap / scale);
    if (gap < -1e-12 * scale) {
      ++rep.violations;
    } else if (dist > 1e-6 && gap <= 1e-12 * scale) {
      ++rep.non_strict;
    }
    ++rep.samples;
  }
  rep.passed = rep.violations == 0 && rep.non_strict == 0;
  return rep;
}

}  // namespace pxl
