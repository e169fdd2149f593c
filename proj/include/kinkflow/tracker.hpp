#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "kinkflow/grid.hpp"
#include "kinkflow/profile.hpp"
#include "kinkflow/toda.hpp"

namespace kinkflow {

// Zero crossings of the field by linear interpolation between bracketing
// nodes. A crossing counts only when the sign persists for at least three
// cells on each side, which filters noise blips near the +-1 plateaus.
inline InterfaceVector find_interfaces(const Field& field, int expected_k) {
  const Grid& grid = *field.grid;
  const auto& u = field.values;

  // runs of constant nonzero sign with length >= 3
  struct Run { int sign; int begin; int end; };  // [begin, end)
  std::vector<Run> runs;
  int i = 0;
  while (i < grid.n) {
    const int s = (u[i] > 0.0) ? 1 : (u[i] < 0.0 ? -1 : 0);
    int j = i;
    while (j < grid.n) {
      const int sj = (u[j] > 0.0) ? 1 : (u[j] < 0.0 ? -1 : 0);
      if (sj != s) break;
      ++j;
    }
    if (s != 0 && j - i >= 3) runs.push_back({s, i, j});
    i = j;
  }

  std::vector<double> crossings;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].sign == runs[r - 1].sign) continue;
    const int a = runs[r - 1].end - 1;  // last node of the left run
    const int b = runs[r].begin;        // first node of the right run
    if (b == a + 1) {
      const double xa = grid.nodes[a], xb = grid.nodes[b];
      crossings.push_back(xa - u[a] * (xb - xa) / (u[b] - u[a]));
    } else if (b == a + 2 && u[a + 1] == 0.0) {
      crossings.push_back(grid.nodes[a + 1]);  // node-exact zero
    }
    // wider separations are noise patches: rejected
  }

  if (static_cast<int>(crossings.size()) != expected_k) {
    std::ostringstream msg;
    msg << "find_interfaces: expected " << expected_k << " crossings, found "
        << crossings.size();
    if (!crossings.empty()) {
      msg << " at";
      for (double c : crossings) msg << ' ' << c;
    }
    throw std::runtime_error(msg.str());
  }
  return InterfaceVector(std::move(crossings));
}

// Defect of the multi-kink ansatz when the interfaces move with velocity
// xi_dot:
//   E = sum_j (-1)^{j+1} w'(x - xi_j) xi_j' + f(z) - sum_j (-1)^{j+1} f(w_j).
inline Field error_term(const GridPtr& grid, const InterfaceVector& xi,
                        std::span<const double> xi_dot) {
  if (static_cast<int>(xi_dot.size()) != xi.k())
    throw std::invalid_argument("error_term: xi_dot size mismatch");
  std::vector<double> out(grid->n);
  for (int i = 0; i < grid->n; ++i) {
    const double x = grid->nodes[i];
    double drift = 0.0, fsum = 0.0, z = -1.0, sign = 1.0;
    for (int j = 0; j < xi.k(); ++j) {
      const double w = kink(x - xi.xi[j]);
      drift += sign * kink_deriv(x - xi.xi[j], 1) * xi_dot[j];
      fsum += sign * nonlinearity(w, 0);
      z += sign * w;
      sign = -sign;
    }
    out[i] = drift + nonlinearity(z, 0) - fsum;
  }
  return Field(grid, std::move(out));
}

// Quadratic-and-cubic remainder of the nonlinearity around z; for the cubic
// f this is exactly -3 z psi^2 - psi^3.
inline Field nonlinear_remainder(const Field& psi, const Field& z_field) {
  if (psi.values.size() != z_field.values.size())
    throw std::invalid_argument("nonlinear_remainder: grid mismatch");
  std::vector<double> out(psi.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double p = psi.values[i], z = z_field.values[i];
    out[i] = -3.0 * z * p * p - p * p * p;
  }
  return Field(psi.grid, std::move(out));
}

struct GapFit {
  double slope = 0.0;       // of gap against (1/sqrt2) log(-c_log t)
  double intercept = 0.0;
  double first = 0.0;
  double last = 0.0;
};

struct ComparisonReport {
  int k = 0;
  std::vector<double> max_abs_deviation;   // per interface
  std::vector<double> mean_abs_deviation;
  double max_deviation = 0.0;
  std::vector<GapFit> gap_fits;            // per adjacent gap, from traj_a
};

// Per-interface deviation statistics plus the separation law extracted from
// the first trajectory. Both trajectories must carry the same time stamps.
inline ComparisonReport compare_trajectories(const Trajectory& traj_a,
                                             const Trajectory& traj_b,
                                             double c_log) {
  if (traj_a.k() != traj_b.k())
    throw std::invalid_argument("compare_trajectories: interface count mismatch");
  if (traj_a.times.size() != traj_b.times.size())
    throw std::invalid_argument("compare_trajectories: time stamp mismatch");
  for (std::size_t i = 0; i < traj_a.times.size(); ++i)
    if (std::abs(traj_a.times[i] - traj_b.times[i]) >
        1e-9 * std::abs(traj_a.times[i]))
      throw std::invalid_argument("compare_trajectories: time stamp mismatch");

  const int k = traj_a.k();
  const std::size_t nt = traj_a.times.size();
  ComparisonReport report;
  report.k = k;
  report.max_abs_deviation.assign(k, 0.0);
  report.mean_abs_deviation.assign(k, 0.0);
  for (std::size_t i = 0; i < nt; ++i)
    for (int j = 0; j < k; ++j) {
      const double d = std::abs(traj_a.states[i].xi[j] - traj_b.states[i].xi[j]);
      report.max_abs_deviation[j] = std::max(report.max_abs_deviation[j], d);
      report.mean_abs_deviation[j] += d / nt;
      report.max_deviation = std::max(report.max_deviation, d);
    }

  for (int l = 0; l + 1 < k; ++l) {
    GapFit fit;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
      const double x = std::log(-c_log * traj_a.times[i]) / kSqrt2;
      const double y = traj_a.states[i].xi[l + 1] - traj_a.states[i].xi[l];
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double det = nt * sxx - sx * sx;
    fit.slope = (det != 0.0) ? (nt * sxy - sx * sy) / det : 0.0;
    fit.intercept = (sy - fit.slope * sx) / nt;
    fit.first = traj_a.states.front().xi[l + 1] - traj_a.states.front().xi[l];
    fit.last = traj_a.states.back().xi[l + 1] - traj_a.states.back().xi[l];
    report.gap_fits.push_back(fit);
  }
  return report;
}

}  // namespace kinkflow
