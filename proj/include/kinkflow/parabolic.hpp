#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "kinkflow/grid.hpp"
#include "kinkflow/profile.hpp"
#include "kinkflow/spectral.hpp"
#include "kinkflow/toda.hpp"
#include "kinkflow/tridiag.hpp"

namespace kinkflow {

struct SpaceTimeWindow {
  GridPtr grid;
  double t_start;
  double t_end;
  double dt;

  void validate() const {
    if (!grid) throw std::invalid_argument("SpaceTimeWindow: null grid");
    if (!(t_start < t_end && t_end < 0.0))
      throw std::invalid_argument("SpaceTimeWindow: need t_start < t_end < 0");
    if (!(dt > 0.0)) throw std::invalid_argument("SpaceTimeWindow: dt > 0");
  }
};

using SpaceTimeForcing = std::function<double(double t, double x)>;

struct LinearSolveResult {
  std::vector<double> snapshot_times;
  std::vector<Field> snapshots;
  std::vector<double> coeff_times;
  std::vector<std::vector<double>> coeffs;   // projection coefficients per step
  double psi_norm_phi = 0.0;                 // sup over steps of |psi|/Phi
  double forcing_norm_phi = 0.0;             // same for the forcing samples
  double max_orthogonality_defect = 0.0;     // max |<psi, w'_i>| over steps
  double max_splitting_defect = 0.0;         // pre-projection drift per step
};

// Zero-initial-data solve of
//   psi_t = psi_xx + f'(z) psi + forcing - sum_i c_i(t) w'(x - xi_i(t))
// by IMEX Euler: diffusion implicit (tridiagonal solve), reaction and forcing
// explicit, homogeneous Dirichlet ends. With projections enabled, c_i(t) is
// recomputed from psi each step and the update is re-orthogonalized against
// the translation modes at the new time (splitting, once per step).
inline LinearSolveResult solve_linear(const SpaceTimeWindow& window,
                                      const XiPath& xi_path,
                                      const SpaceTimeForcing& forcing,
                                      bool with_projections, double sigma = 1.0,
                                      int snapshot_stride = 100) {
  window.validate();
  const Grid& grid = *window.grid;
  const int n = grid.n;
  const double dt = window.dt;
  const double lam = dt / (grid.h * grid.h);

  // (I - dt d_xx) with identity rows at the Dirichlet boundary.
  std::vector<double> lower(n - 1, -lam), upper(n - 1, -lam), diag(n, 1.0 + 2.0 * lam);
  diag.front() = diag.back() = 1.0;
  upper.front() = 0.0;
  lower.back() = 0.0;

  const int steps = static_cast<int>(std::lround((window.t_end - window.t_start) / dt));
  LinearSolveResult result;
  std::vector<double> psi(n, 0.0), rhs(n);

  auto margin_check = [&](const InterfaceVector& xi) {
    detail::check_margin(grid, xi, 15.0, "solve_linear");
  };

  double t = window.t_start;
  for (int step = 0; step < steps; ++step) {
    const TrajectoryPoint p = xi_path(t);
    InterfaceVector xi(p.xi);
    margin_check(xi);

    std::vector<double> z(n), g(n);
    for (int i = 0; i < n; ++i) {
      z[i] = ansatz(grid.nodes[i], xi);
      g[i] = forcing(t, grid.nodes[i]);
    }
    const Field psi_field(window.grid, psi);
    const Field z_field(window.grid, z);
    const Field g_field(window.grid, g);

    // weighted norms are tracked on the fly over every time level
    for (int i = 0; i < n; ++i) {
      const double phi = weight_phi(grid.nodes[i], xi, sigma);
      result.psi_norm_phi = std::max(result.psi_norm_phi, std::abs(psi[i]) / phi);
      result.forcing_norm_phi =
          std::max(result.forcing_norm_phi, std::abs(g[i]) / phi);
    }

    std::vector<double> c(xi.k(), 0.0);
    if (with_projections) {
      c = projection_coeffs(psi_field, xi, p.xi_dot, g_field, z_field);
      for (int j = 0; j < xi.k(); ++j)
        for (int i = 0; i < n; ++i)
          g[i] -= c[j] * kink_deriv(grid.nodes[i] - xi.xi[j], 1);
    }
    result.coeff_times.push_back(t);
    result.coeffs.push_back(c);

    for (int i = 0; i < n; ++i)
      rhs[i] = psi[i] + dt * (nonlinearity(z[i], 1) * psi[i] + g[i]);
    rhs.front() = rhs.back() = 0.0;
    psi = thomas_solve(lower, diag, upper, rhs);
    t = window.t_start + (step + 1) * dt;

    const TrajectoryPoint pn = xi_path(t);
    InterfaceVector xi_next(pn.xi);
    if (with_projections) {
      const Field before(window.grid, psi);
      std::vector<double> slope(n);
      for (int j = 0; j < xi_next.k(); ++j) {
        for (int i = 0; i < n; ++i)
          slope[i] = kink_deriv(grid.nodes[i] - xi_next.xi[j], 1);
        result.max_splitting_defect =
            std::max(result.max_splitting_defect,
                     std::abs(inner_product(before, Field(window.grid, slope))));
      }
      psi = project_out(before, xi_next).values;
    }

    // orthogonality defect at the new time level
    {
      const Field f(window.grid, psi);
      std::vector<double> slope(n);
      for (int j = 0; j < xi_next.k(); ++j) {
        for (int i = 0; i < n; ++i)
          slope[i] = kink_deriv(grid.nodes[i] - xi_next.xi[j], 1);
        const double ip = inner_product(f, Field(window.grid, slope));
        result.max_orthogonality_defect =
            std::max(result.max_orthogonality_defect, std::abs(ip));
      }
      for (int i = 0; i < n; ++i) {
        const double phi = weight_phi(grid.nodes[i], xi_next, sigma);
        result.psi_norm_phi = std::max(result.psi_norm_phi, std::abs(psi[i]) / phi);
      }
    }

    if ((step + 1) % snapshot_stride == 0 || step + 1 == steps) {
      result.snapshot_times.push_back(t);
      result.snapshots.emplace_back(window.grid, psi);
    }
  }
  return result;
}

}  // namespace kinkflow
