#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kinkflow/profile.hpp"
#include "kinkflow/quadrature.hpp"

namespace kinkflow {

// Numerator integrand of the interaction-constant ratio:
//   6 e^{sqrt2 x} (1 - w^2) w'.
inline double beta_numerator_integrand(double x) {
  const double w = kink(x);
  return 6.0 * std::exp(kSqrt2 * x) * (1.0 - w * w) * kink_deriv(x, 1);
}

inline double beta_denominator_integrand(double x) {
  const double d = kink_deriv(x, 1);
  return d * d;
}

namespace detail {
// Both integrands are bounded by 68 e^{-sqrt2 |x|} (sech^2(x/sqrt2) <= 4
// e^{-sqrt2 |x|}), so the tail beyond [-R, R] is below 96 e^{-sqrt2 R}.
inline double beta_truncation_radius(double abs_tol) {
  const double tail_coeff = 2.0 * 68.0 / kSqrt2;
  double radius = 40.0;
  const double needed = -std::log(abs_tol / tail_coeff) / kSqrt2 + 1.0;
  if (needed > radius) radius = std::ceil(needed);
  return radius;
}
}  // namespace detail

inline double beta_numerator(double abs_tol = 1e-10) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("beta_numerator: abs_tol > 0");
  const double radius = detail::beta_truncation_radius(abs_tol);
  return integrate_unit_panels(beta_numerator_integrand, -radius, radius);
}

inline double beta_denominator(double abs_tol = 1e-10) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("beta_denominator: abs_tol > 0");
  const double radius = detail::beta_truncation_radius(abs_tol);
  return integrate_unit_panels(beta_denominator_integrand, -radius, radius);
}

// Interaction constant: ratio of the two kink integrals. Closed forms give
// numerator 16, denominator 2 sqrt2 / 3, hence 12 sqrt2.
inline double compute_beta(double abs_tol) {
  return beta_numerator(abs_tol) / beta_denominator(abs_tol);
}

enum class ConstantsNormalization {
  kResidualZero,   // gap exponentials solve the consistency system exactly
  kPaperPrinted,   // e_l scaled by 1/(2 beta); kept for the discrepancy report
};

// Constants of the explicit interface trajectory
//   xi_j(t) = (1/sqrt2)(j - (k+1)/2) log(-c_log t) + gamma_j.
struct TodaConstants {
  double beta = 0.0;
  double c_log = 0.0;            // coefficient inside log(-c_log t)
  std::vector<double> b;         // k-1 gap offsets, b_l = b_{k-l}
  std::vector<double> gamma;     // k position offsets, gamma_j = -gamma_{k-j+1}
  std::vector<double> a;         // k-1 reduction coefficients, (k-l) l / (2 beta)
};

// Solves the consistency system for the gap exponentials e_l = exp(-sqrt2 b_l).
// Substituting the logarithmic trajectory into the interface law telescopes to
//   e_j - e_{j-1} = -(c_log/beta)(1/sqrt2)(j - (k+1)/2),   e_0 = e_k = 0,
// which with c_log = 2 sqrt2 beta gives e_l = l(k-l) exactly. The alternating
// signs make the telescoped sum hit e_k = 0 identically. gamma follows from
// the symmetry relation gamma_j = -(1/2) sum_{i=j..k-j} b_i for j <= k/2.
inline TodaConstants toda_constants(
    int k, double beta,
    ConstantsNormalization norm = ConstantsNormalization::kResidualZero) {
  if (k < 2 || k % 2 != 0)
    throw std::invalid_argument("toda_constants: k must be even, >= 2");
  if (!(beta > 0.0)) throw std::invalid_argument("toda_constants: beta > 0");

  TodaConstants c;
  c.beta = beta;
  c.c_log = 2.0 * kSqrt2 * beta;

  std::vector<double> e(k + 1, 0.0);
  for (int j = 1; j <= k; ++j) e[j] = e[j - 1] + (k + 1 - 2 * j);
  if (e[k] != 0.0)
    throw std::logic_error("toda_constants: telescoped sum failed to close");

  const double scale = (norm == ConstantsNormalization::kPaperPrinted)
                           ? 1.0 / (2.0 * beta)
                           : 1.0;
  c.b.resize(k - 1);
  for (int l = 1; l < k; ++l) {
    const double el = e[l] * scale;
    if (!(el > 0.0))
      throw std::logic_error("toda_constants: non-positive gap exponential");
    c.b[l - 1] = -std::log(el) / kSqrt2;
  }

  c.gamma.assign(k, 0.0);
  for (int j = 1; j <= k / 2; ++j) {
    double sum = 0.0;
    for (int i = j; i <= k - j; ++i) sum += c.b[i - 1];
    c.gamma[j - 1] = -0.5 * sum;
    c.gamma[k - j] = 0.5 * sum;
  }

  c.a.resize(k - 1);
  for (int l = 1; l < k; ++l) c.a[l - 1] = (k - l) * l / (2.0 * beta);
  return c;
}

}  // namespace kinkflow
