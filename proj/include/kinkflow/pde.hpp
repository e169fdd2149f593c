#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kinkflow/grid.hpp"
#include "kinkflow/profile.hpp"
#include "kinkflow/tridiag.hpp"

namespace kinkflow {

// Samples the multi-kink ansatz on the grid; interfaces must sit at least
// `margin` inside the domain so the Dirichlet values are compatible with the
// profile tails.
inline Field initial_field(const GridPtr& grid, const InterfaceVector& xi,
                           double margin = 15.0) {
  if (xi.xi.front() + grid->half_width < margin ||
      grid->half_width - xi.xi.back() < margin)
    throw std::invalid_argument("initial_field: interface margin violated");
  return sample(grid, [&xi](double x) { return ansatz(x, xi); });
}

struct Boundary {
  enum class Kind { kDirichlet, kNeumann };
  Kind kind = Kind::kDirichlet;
  double left = -1.0;   // Dirichlet values; ignored for Neumann
  double right = -1.0;
};

struct EvolveOptions {
  Boundary boundary{};
  int snapshot_stride_steps = 1000;
  double blowup_threshold = 2.0;
};

using Snapshot = std::pair<double, Field>;

// IMEX Euler for u_t = u_xx + u(1 - u^2): implicit diffusion via a
// tridiagonal solve, explicit cubic reaction. Snapshots include the initial
// and final states.
inline std::vector<Snapshot> evolve(const Field& u0, double t_start, double t_end,
                                    double dt, const EvolveOptions& opt = {}) {
  if (!(t_start < t_end && t_end <= 0.0))
    throw std::invalid_argument("evolve: need t_start < t_end <= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt > 0");
  const Grid& grid = *u0.grid;
  const int n = grid.n;
  const double lam = dt / (grid.h * grid.h);

  std::vector<double> lower(n - 1, -lam), upper(n - 1, -lam), diag(n, 1.0 + 2.0 * lam);
  const bool dirichlet = opt.boundary.kind == Boundary::Kind::kDirichlet;
  diag.front() = diag.back() = 1.0;
  if (dirichlet) {
    upper.front() = 0.0;
    lower.back() = 0.0;
  } else {  // homogeneous Neumann: u_0 = u_1, u_{n-1} = u_{n-2}
    upper.front() = -1.0;
    lower.back() = -1.0;
  }

  const int steps = static_cast<int>(std::lround((t_end - t_start) / dt));
  std::vector<Snapshot> snapshots;
  snapshots.emplace_back(t_start, u0);

  std::vector<double> u = u0.values, rhs(n);
  for (int step = 0; step < steps; ++step) {
    for (int i = 0; i < n; ++i) rhs[i] = u[i] + dt * nonlinearity(u[i], 0);
    if (dirichlet) {
      rhs.front() = opt.boundary.left;
      rhs.back() = opt.boundary.right;
    } else {
      rhs.front() = rhs.back() = 0.0;
    }
    u = thomas_solve(lower, diag, upper, rhs);

    double amp = 0.0;
    for (double v : u) amp = std::max(amp, std::abs(v));
    if (amp > opt.blowup_threshold)
      throw std::runtime_error("evolve: blow-up detected (|u| = " +
                               std::to_string(amp) + ") at t = " +
                               std::to_string(t_start + (step + 1) * dt));

    if ((step + 1) % opt.snapshot_stride_steps == 0 || step + 1 == steps)
      snapshots.emplace_back(t_start + (step + 1) * dt, Field(u0.grid, u));
  }
  return snapshots;
}

// Discrete double-well energy int u_x^2/2 + (1 - u^2)^2/4, midpoint rule on
// the cells.
inline double energy(const Field& u) {
  const Grid& grid = *u.grid;
  double acc = 0.0;
  for (int i = 0; i + 1 < grid.n; ++i) {
    const double du = (u.values[i + 1] - u.values[i]) / grid.h;
    const double um = 0.5 * (u.values[i + 1] + u.values[i]);
    const double well = (1.0 - um * um);
    acc += grid.h * (0.5 * du * du + 0.25 * well * well);
  }
  return acc;
}

}  // namespace kinkflow
