#pragma once

// Independent reference solutions used by the tests. Nothing here calls the
// library's discretization or solver.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Symmetric positive solution of u'' = rhs(u) on (0, L), u(0) = u(L) = 0,
/// found by shooting from the centre (u(L/2) = a, u'(L/2) = 0) with RK4 and
/// bisecting on a in (a_lo, a_hi) until u(0) = 0. Values are returned at
/// x_k = k L / cells, k = 0..cells (cells even).
inline std::vector<double> shoot_symmetric(const std::function<double(double)>& rhs, double L, int cells,
                                           double a_lo, double a_hi, int substeps = 64) {
  if (cells % 2 != 0) throw std::invalid_argument("cells must be even");
  const int half = cells / 2;
  const int steps = half * substeps;
  const double dx = -(0.5 * L) / steps;

  auto integrate = [&](double a, std::vector<double>* samples) {
    double u = a;
    double v = 0.0;
    if (samples) (*samples)[static_cast<std::size_t>(half)] = u;
    for (int s = 1; s <= steps; ++s) {
      const double k1u = v, k1v = rhs(u);
      const double k2u = v + 0.5 * dx * k1v, k2v = rhs(u + 0.5 * dx * k1u);
      const double k3u = v + 0.5 * dx * k2v, k3v = rhs(u + 0.5 * dx * k2u);
      const double k4u = v + dx * k3v, k4v = rhs(u + dx * k3u);
      u += dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      v += dx / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (samples && s % substeps == 0) (*samples)[static_cast<std::size_t>(half - s / substeps)] = u;
    }
    return u;
  };

  double lo = a_lo;
  double hi = a_hi;
  const double f_lo = integrate(lo, nullptr);
  const double f_hi = integrate(hi, nullptr);
  if (!(f_lo < 0.0 && f_hi > 0.0)) throw std::runtime_error("shooting bracket does not straddle the root");
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (integrate(mid, nullptr) < 0.0 ? lo : hi) = mid;
  }
  std::vector<double> u(static_cast<std::size_t>(cells) + 1, 0.0);
  integrate(0.5 * (lo + hi), &u);
  for (int k = 0; k < half; ++k) u[static_cast<std::size_t>(cells - k)] = u[static_cast<std::size_t>(k)];
  u.front() = 0.0;
  u.back() = 0.0;
  return u;
}

/// Solves the tridiagonal system lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
inline std::vector<double> thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                                  std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

/// Linear P1 system -u'' = f on a uniform grid of (0, L) with zero ends and
/// the load of each segment split equally between its two nodes:
/// (2u_i - u_{i-1} - u_{i+1}) / h = (h/2) (f_{i-1/2} + f_{i+1/2}).
inline std::vector<double> linear_p1(const std::vector<double>& f_mid, double L) {
  const std::size_t cells = f_mid.size();
  const double h = L / static_cast<double>(cells);
  const std::size_t n = cells - 1;
  std::vector<double> lo(n, -1.0 / h), di(n, 2.0 / h), up(n, -1.0 / h), rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = 0.5 * h * (f_mid[i] + f_mid[i + 1]);
  std::vector<double> inner = thomas(lo, di, up, rhs);
  std::vector<double> u(cells + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) u[i + 1] = inner[i];
  return u;
}

/// First eigenvalue of the quotient sum ((u_{i+1}-u_i)/h)^2 h / sum ((u_i+u_{i+1})/2)^2 h
/// on (0, L) with zero ends; the sine mode sin(pi x / L) is its eigenvector.
inline double discrete_dirichlet_eigenvalue(double L, int cells) {
  const double h = L / cells;
  const double t = std::tan(std::numbers::pi * h / (2.0 * L));
  return 4.0 / (h * h) * t * t;
}

/// Two Richardson levels on values at h, h/2, h/4 with error expansion c2 h^2 + c4 h^4.
inline double richardson_h2_h4(double coarse, double mid, double fine) {
  const double r1 = (4.0 * mid - coarse) / 3.0;
  const double r2 = (4.0 * fine - mid) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

/// Least-squares slope of log(err) against log(n).
inline double loglog_slope(const std::vector<double>& n, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(n[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// Bisection root of a continuous function with a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
