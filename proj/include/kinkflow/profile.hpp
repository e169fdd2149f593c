#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinkflow {

inline constexpr double kSqrt2 = 1.4142135623730950488;

// Heteroclinic kink profile connecting -1 to +1, zero at the origin.
inline double kink(double x) { return std::tanh(x / kSqrt2); }

// Closed-form derivatives of the kink. With w = tanh(x/sqrt2):
//   w'   = (1 - w^2)/sqrt2
//   w''  = -w (1 - w^2)            (equals -f(w); steady-state identity)
//   w''' = -(1 - 3 w^2)(1 - w^2)/sqrt2
inline double kink_deriv(double x, int order) {
  const double w = kink(x);
  const double s = 1.0 - w * w;
  switch (order) {
    case 1: return s / kSqrt2;
    case 2: return -w * s;
    case 3: return -(1.0 - 3.0 * w * w) * s / kSqrt2;
    default: throw std::invalid_argument("kink_deriv: order must be 1, 2 or 3");
  }
}

// Bistable nonlinearity f(u) = u(1-u^2) and its derivative.
inline double nonlinearity(double u, int order) {
  switch (order) {
    case 0: return u * (1.0 - u * u);
    case 1: return 1.0 - 3.0 * u * u;
    default: throw std::invalid_argument("nonlinearity: order must be 0 or 1");
  }
}

// Ordered interface positions xi_1 < ... < xi_k. The antisymmetric flag is
// metadata recording that xi_j = -xi_{k-j+1} held (to tolerance) on input.
struct InterfaceVector {
  std::vector<double> xi;
  bool antisymmetric = false;

  InterfaceVector() = default;
  explicit InterfaceVector(std::vector<double> positions, bool antisym = false)
      : xi(std::move(positions)), antisymmetric(antisym) {
    if (xi.empty()) throw std::invalid_argument("InterfaceVector: empty");
    for (std::size_t j = 1; j < xi.size(); ++j)
      if (!(xi[j] > xi[j - 1]))
        throw std::invalid_argument(
            "InterfaceVector: positions must be strictly increasing (xi[" +
            std::to_string(j) + "]=" + std::to_string(xi[j]) + ")");
    if (antisymmetric && antisymmetry_defect() > 1e-9)
      throw std::invalid_argument("InterfaceVector: antisymmetry flag set but "
                                  "xi_j != -xi_{k-j+1}");
  }

  int k() const { return static_cast<int>(xi.size()); }

  double antisymmetry_defect() const {
    double d = 0.0;
    const int n = k();
    for (int j = 0; j < n; ++j)
      d = std::max(d, std::abs(xi[j] + xi[n - 1 - j]));
    return d;
  }

  double min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < xi.size(); ++j) g = std::min(g, xi[j] - xi[j - 1]);
    return g;
  }
};

struct Params {
  int k;          // even number of interfaces
  double sigma;   // weight decay rate, sqrt2/2 < sigma < sqrt2
  double nu;      // (sqrt2 - sigma)/(2 sqrt2)
  double beta;    // interaction constant
  double t0;      // reference time, negative

  static Params make(int k, double sigma, double beta, double t0) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("Params: k must be even, >= 2");
    if (!(sigma > kSqrt2 / 2.0 && sigma < kSqrt2))
      throw std::invalid_argument("Params: sigma must lie in (sqrt2/2, sqrt2)");
    if (!(beta > 0.0)) throw std::invalid_argument("Params: beta must be positive");
    if (!(t0 < 0.0)) throw std::invalid_argument("Params: t0 must be negative");
    return Params{k, sigma, (kSqrt2 - sigma) / (2.0 * kSqrt2), beta, t0};
  }
};

// Multi-kink ansatz: alternating sum of translated kinks minus 1.
inline double ansatz(double x, const InterfaceVector& xi) {
  double z = -1.0;
  double sign = 1.0;
  for (double pos : xi.xi) {
    z += sign * kink(x - pos);
    sign = -sign;
  }
  return z;
}

// Index of the weight cell containing x. Cell j (0-based) spans between the
// midpoints of consecutive interfaces; ties at a midpoint resolve to the
// left cell so evaluation is deterministic.
inline int weight_cell(double x, const InterfaceVector& xi0) {
  int cell = 0;
  const int k = xi0.k();
  while (cell < k - 1 && x > 0.5 * (xi0.xi[cell] + xi0.xi[cell + 1])) ++cell;
  return cell;
}

// Piecewise exponential weight: on cell j it is
//   exp(sigma (xi0_{j-1} - x)) + exp(sigma (x - xi0_{j+1}))
// with the convention xi0_0 = -inf, xi0_{k+1} = +inf (term omitted).
inline double weight_phi(double x, const InterfaceVector& xi0, double sigma) {
  if (!(sigma > 0.0 && sigma < kSqrt2))
    throw std::invalid_argument("weight_phi: sigma must lie in (0, sqrt2)");
  if (xi0.k() < 2)
    throw std::invalid_argument("weight_phi: needs at least two interfaces");
  const int j = weight_cell(x, xi0);
  double value = 0.0;
  if (j - 1 >= 0) value += std::exp(sigma * (xi0.xi[j - 1] - x));
  if (j + 1 < xi0.k()) value += std::exp(sigma * (x - xi0.xi[j + 1]));
  return value;
}

}  // namespace kinkflow
