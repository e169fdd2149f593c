#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "kinkflow/grid.hpp"
#include "kinkflow/profile.hpp"
#include "kinkflow/tridiag.hpp"

namespace kinkflow {

// Second-order centered-difference discretization of
//   zeta -> -zeta'' + q(x) zeta
// on the interior nodes, homogeneous Dirichlet at both ends.
inline SymTridiag schrodinger_operator(const Grid& grid,
                                       const std::function<double(double)>& potential) {
  const int m = grid.n - 2;
  if (m < 1) throw std::invalid_argument("schrodinger_operator: grid too small");
  SymTridiag t;
  t.diag.resize(m);
  t.off.assign(m - 1, -1.0 / (grid.h * grid.h));
  for (int i = 0; i < m; ++i)
    t.diag[i] = 2.0 / (grid.h * grid.h) + potential(grid.nodes[i + 1]);
  return t;
}

// Linearization around a single kink centered at `center`: potential
// -f'(w(x - center)).
inline SymTridiag linearized_operator(const Grid& grid, double center) {
  if (grid.h > 0.1)
    throw std::invalid_argument("linearized_operator: grid under-resolved (h > 0.1)");
  if (grid.half_width - std::abs(center) < 20.0)
    throw std::invalid_argument("linearized_operator: need 20 units beyond the kink");
  return schrodinger_operator(
      grid, [center](double x) { return -nonlinearity(kink(x - center), 1); });
}

struct SpectralGapReport {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double gap_on_complement = 0.0;
  double cosine_similarity = 0.0;  // ground mode against sampled kink slope
  Field mode0;                     // padded with the Dirichlet zeros
  Field mode1;
};

namespace detail {
inline Field pad_interior(const GridPtr& grid, const std::vector<double>& interior) {
  std::vector<double> full(grid->n, 0.0);
  for (std::size_t i = 0; i < interior.size(); ++i) full[i + 1] = interior[i];
  return Field(grid, std::move(full));
}
}  // namespace detail

// Two lowest eigenpairs of the single-kink linearization plus the smallest
// Rayleigh quotient on the complement of the translation mode. The
// shift for the deflated iteration sits at 1, between the zero mode and the
// rest of the spectrum, so the iteration locks onto the bottom of the
// complement.
inline SpectralGapReport spectral_gap(const GridPtr& grid) {
  const SymTridiag op = linearized_operator(*grid, 0.0);
  SpectralGapReport report;
  report.lambda0 = tridiag_eigenvalue(op, 0);
  report.lambda1 = tridiag_eigenvalue(op, 1);
  const std::vector<double> v0 = tridiag_eigenvector(op, report.lambda0);
  const std::vector<double> v1 = tridiag_eigenvector(op, report.lambda1);

  const int m = op.size();
  std::vector<double> slope(m);
  for (int i = 0; i < m; ++i) slope[i] = kink_deriv(grid->nodes[i + 1], 1);
  double dot = 0.0, nw = 0.0, nv = 0.0;
  for (int i = 0; i < m; ++i) {
    dot += slope[i] * v0[i];
    nw += slope[i] * slope[i];
    nv += v0[i] * v0[i];
  }
  report.cosine_similarity = std::abs(dot) / std::sqrt(nw * nv);
  report.gap_on_complement = min_rayleigh_on_complement(op, slope, 1.0);
  report.mode0 = detail::pad_interior(grid, v0);
  report.mode1 = detail::pad_interior(grid, v1);
  return report;
}

// Rayleigh quotients of random vectors orthogonalized against the sampled
// kink slope; a Monte-Carlo probe of the gap inequality.
inline std::vector<double> rayleigh_samples(const GridPtr& grid, int trials,
                                            unsigned seed) {
  const SymTridiag op = linearized_operator(*grid, 0.0);
  const int m = op.size();
  std::vector<double> slope(m);
  for (int i = 0; i < m; ++i) slope[i] = kink_deriv(grid->nodes[i + 1], 1);
  double slope_norm2 = 0.0;
  for (double s : slope) slope_norm2 += s * s;

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> out;
  out.reserve(trials);
  std::vector<double> v(m), tv(m);
  for (int trial = 0; trial < trials; ++trial) {
    for (double& x : v) x = unit(rng);
    double dot = 0.0;
    for (int i = 0; i < m; ++i) dot += v[i] * slope[i];
    for (int i = 0; i < m; ++i) v[i] -= dot / slope_norm2 * slope[i];
    op.apply(v, tv);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < m; ++i) {
      num += v[i] * tv[i];
      den += v[i] * v[i];
    }
    out.push_back(num / den);
  }
  return out;
}

namespace detail {
inline void check_margin(const Grid& grid, const InterfaceVector& xi, double margin,
                         const char* who) {
  if (xi.xi.front() - (-grid.half_width) < margin ||
      grid.half_width - xi.xi.back() < margin)
    throw std::invalid_argument(std::string(who) +
                                ": interfaces too close to the grid boundary");
}
}  // namespace detail

// Overlap matrix of the translated kink slopes, entries
// int w'(x - xi_i) w'(x - xi_j) dx by the trapezoid rule.
inline Eigen::MatrixXd gram_matrix(const InterfaceVector& xi, const Grid& grid) {
  detail::check_margin(grid, xi, 15.0, "gram_matrix");
  const int k = xi.k();
  std::vector<std::vector<double>> slopes(k, std::vector<double>(grid.n));
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < grid.n; ++i)
      slopes[a][i] = kink_deriv(grid.nodes[i] - xi.xi[a], 1);
  Eigen::MatrixXd g(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      double acc = 0.5 * (slopes[a][0] * slopes[b][0] +
                          slopes[a][grid.n - 1] * slopes[b][grid.n - 1]);
      for (int i = 1; i + 1 < grid.n; ++i) acc += slopes[a][i] * slopes[b][i];
      g(a, b) = g(b, a) = acc * grid.h;
    }
  return g;
}

namespace detail {
inline Eigen::VectorXd solve_gram(const Eigen::MatrixXd& gram,
                                  const Eigen::VectorXd& rhs, const char* who) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible())
    throw std::runtime_error(std::string(who) + ": singular overlap system");
  return lu.solve(rhs);
}
}  // namespace detail

// Multiplier coefficients c_i keeping the evolution orthogonal to the
// translation modes. Solves the overlap system whose right side assembles
//   <(f'(z) - f'(w_j)) psi, w'_j>  -  xi_j' <psi, w''_j>  +  <forcing, w'_j>;
// the first term is the integrated-by-parts form of <psi_xx + f'(z) psi, w'_j>
// valid under the orthogonality constraint, so no second derivatives of psi
// are ever formed.
inline std::vector<double> projection_coeffs(const Field& psi,
                                             const InterfaceVector& xi,
                                             std::span<const double> xi_dot,
                                             const Field& forcing,
                                             const Field& z_field) {
  const Grid& grid = *psi.grid;
  const int k = xi.k();
  if (static_cast<int>(xi_dot.size()) != k)
    throw std::invalid_argument("projection_coeffs: xi_dot size mismatch");

  Eigen::VectorXd rhs(k);
  std::vector<double> integrand(grid.n);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.nodes[i];
      const double wj = kink(x - xi.xi[j]);
      const double slope = kink_deriv(x - xi.xi[j], 1);
      const double curv = kink_deriv(x - xi.xi[j], 2);
      integrand[i] =
          (nonlinearity(z_field.values[i], 1) - nonlinearity(wj, 1)) *
              psi.values[i] * slope -
          xi_dot[j] * psi.values[i] * curv + forcing.values[i] * slope;
    }
    rhs(j) = trapezoid(grid, integrand);
  }
  const Eigen::MatrixXd gram = gram_matrix(xi, grid);
  const Eigen::VectorXd c = detail::solve_gram(gram, rhs, "projection_coeffs");
  return std::vector<double>(c.data(), c.data() + k);
}

// Removes the translation-mode components: returns psi - sum lambda_i w'_i
// with lambda solving the overlap system, so the result is orthogonal to
// every w'(x - xi_j).
inline Field project_out(const Field& psi, const InterfaceVector& xi) {
  const Grid& grid = *psi.grid;
  const int k = xi.k();
  const Eigen::MatrixXd gram = gram_matrix(xi, grid);
  Eigen::VectorXd rhs(k);
  std::vector<double> integrand(grid.n);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < grid.n; ++i)
      integrand[i] = psi.values[i] * kink_deriv(grid.nodes[i] - xi.xi[j], 1);
    rhs(j) = trapezoid(grid, integrand);
  }
  const Eigen::VectorXd lambda = detail::solve_gram(gram, rhs, "project_out");
  std::vector<double> out = psi.values;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < grid.n; ++i)
      out[i] -= lambda(j) * kink_deriv(grid.nodes[i] - xi.xi[j], 1);
  return Field(psi.grid, std::move(out));
}

}  // namespace kinkflow
