#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kinkflow {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre nodes/weights on [-1,1] via Newton iteration on the
// Legendre recurrence. Symmetric pairs are filled together.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = -p1 / pp;
      z += dz;
      if (std::abs(dz) < std::numeric_limits<double>::epsilon()) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return rule;
}

// Composite Gauss-Legendre over [a,b] split into equal panels.
template <typename F>
double integrate_composite(F&& f, double a, double b, int panels,
                           const QuadratureRule& rule) {
  if (!(a < b)) throw std::invalid_argument("integrate_composite: need a < b");
  if (panels < 1) throw std::invalid_argument("integrate_composite: panels >= 1");
  const double dx = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * dx;
    const double mid = lo + 0.5 * dx;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * f(mid + 0.5 * dx * rule.nodes[i]);
    total += 0.5 * dx * acc;
  }
  return total;
}

// 64-node panels of unit width, the workhorse for the kink-profile integrals.
template <typename F>
double integrate_unit_panels(F&& f, double a, double b) {
  static const QuadratureRule rule = gauss_legendre(64);
  const int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
  return integrate_composite(f, a, b, panels, rule);
}

}  // namespace kinkflow
