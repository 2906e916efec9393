#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pxlap/energy.hpp"

namespace pxl {

struct SuiteParams {
  /// Cells per axis.
  int n = 64;
  int dimension = 1;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
};

/// One sampled instance: `value` is the relative slack, relative gap or
/// comparison excess the suite judges.
struct SuiteSample {
  std::size_t index = 0;
  std::string p;
  double r = 0.0;
  double value = 0.0;
  double scale = 0.0;
  bool ok = false;
};

struct SuiteSummary {
  std::string name;
  std::size_t samples = 0;
  std::size_t failures = 0;
  /// Smallest relative slack or gap (largest excess for the comparison suite).
  double worst = 0.0;
  std::size_t worst_index = 0;
  double tolerance = 0.0;
  std::vector<SuiteSample> records;
  bool passed = false;
};

/// Random positive pairs over p in {2, 2+x, 1.5+0.4 sin(6x)^2} (2D: 2, 2+xy)
/// and r in {1, 1.5, 2} with r <= p_minus, half of them rough and half smooth
/// (low-frequency modulations, closer to equality). Each sample checks the midpoint
/// slack of W or W_A against -1e-10 * scale and the equality diagnosis; the
/// p = r samples also check that a proportional pair is affine to 1e-12.
SuiteSummary convexity_suite(const SuiteParams& params);

/// Random admissible pairs vanishing on the boundary, alternately rough and
/// smooth, with r drawn in [1, p_minus].
/// Passes when every gap is >= -tol * scale, tol = 1e-10 in 1D and 1e-8 in 2D.
SuiteSummary diaz_saa_suite(const SuiteParams& params);

/// Ordered pairs f1 <= f2 of positive coefficients with p = 2 + a x (p > r on
/// the whole domain). Each sample solves both comparison problems and passes
/// when the hypotheses hold and max(u1 - u2) <= 1e-6.
SuiteSummary comparison_suite(const SuiteParams& params);

}  // namespace pxl
