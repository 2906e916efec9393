#include "pxlap/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pxlap/error.hpp"

namespace pxl {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kIndeterminate: return "indeterminate";
  }
  return "?";
}

std::pair<double, double> exponent_bounds(const NodeField& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 1.0)) {
      std::ostringstream os;
      os << "invalid exponent: p = " << p[i] << " <= 1 at node " << i;
      throw Error(ErrorCode::kInvalidArgument, os.str());
    }
  }
  return {p.min(), p.max()};
}

ExponentField::ExponentField(NodeField p, double r) : p_(std::move(p)), r_(r) {
  auto [lo, hi] = exponent_bounds(p_);
  p_minus_ = lo;
  p_plus_ = hi;
  if (!(r >= 1.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::kInvalidArgument, "comparison constant r must be >= 1");
  }
  const Mesh& m = p_.mesh();
  cell_p_.resize(m.cell_count());
  for (std::size_t c = 0; c < m.cell_count(); ++c) cell_p_[c] = p_.cell_average(c);
}

double ExponentField::fraction_above_r() const {
  if (cell_p_.empty()) return 0.0;
  std::size_t k = 0;
  for (double p : cell_p_) {
    if (p - r_ > 1e-12) ++k;
  }
  return static_cast<double>(k) / static_cast<double>(cell_p_.size());
}

ValidationReport validate_exponent_hypothesis(const ExponentField& p, double holder_alpha) {
  ValidationReport rep;
  {
    std::ostringstream os;
    os << "p_minus = " << p.p_minus();
    rep.add("p_minus > 1", p.p_minus() > 1.0, os.str(), p.p_minus());
  }
  {
    std::ostringstream os;
    os << "r = " << p.r() << ", p_minus = " << p.p_minus();
    rep.add("1 <= r <= p_minus", p.r() >= 1.0 && p.r() <= p.p_minus(), os.str(), p.r());
  }
  const Mesh& m = p.values().mesh();
  double q = 0.0;
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    for (std::size_t j = i + 1; j < m.node_count(); ++j) {
      const Point& a = m.node(i);
      const Point& b = m.node(j);
      double d = std::hypot(a[0] - b[0], a[1] - b[1]);
      q = std::max(q, std::fabs(p.values()[i] - p.values()[j]) / std::pow(d, holder_alpha));
    }
  }
  std::ostringstream os;
  os << "alpha = " << holder_alpha << ", grid quotient = " << q;
  rep.add("holder surrogate finite", std::isfinite(q), os.str(), q);
  return rep;
}

double modular(const NodeField& u, const ExponentField& p) {
  require_same_mesh(u, p.values());
  const Mesh& m = u.mesh();
  double s = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    s += std::pow(std::fabs(u.cell_average(c)), p.at_cell(c)) * m.cell_measure(c);
  }
  return s;
}

double luxemburg_norm(const NodeField& u, const ExponentField& p) {
  require_same_mesh(u, p.values());
  const Mesh& m = u.mesh();
  // modular(u / lambda) with u_q precomputed
  std::vector<double> uq(m.cell_count());
  for (std::size_t c = 0; c < m.cell_count(); ++c) uq[c] = std::fabs(u.cell_average(c));
  auto rho = [&](double lambda) {
    double s = 0.0;
    for (std::size_t c = 0; c < uq.size(); ++c) {
      s += std::pow(uq[c] / lambda, p.at_cell(c)) * m.cell_measure(c);
    }
    return s;
  };
  if (*std::max_element(uq.begin(), uq.end()) == 0.0) return 0.0;

  double lo = std::numeric_limits<double>::epsilon();
  double hi = u.max_abs();
  while (rho(hi) >= 1.0) hi *= 2.0;
  if (rho(lo) < 1.0) return lo;
  for (int it = 0; it < 400; ++it) {
    double mid = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double v = rho(mid);
    if (v == 1.0) return mid;
    (v > 1.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-16 * hi) break;
  }
  return 0.5 * (lo + hi);
}

NodeField sobolev_conjugate(const ExponentField& p, int dimension) {
  const NodeField& pv = p.values();
  std::vector<double> out(pv.size());
  const double n = dimension;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    out[i] = pv[i] < n ? n * pv[i] / (n - pv[i]) : kInfiniteExponent;
  }
  return NodeField(pv.mesh_ptr(), std::move(out));
}

}  // namespace pxl
