#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinkflow/constants.hpp"
#include "kinkflow/profile.hpp"

namespace kinkflow {

// Interface positions together with their velocities at one instant.
struct TrajectoryPoint {
  std::vector<double> xi;
  std::vector<double> xi_dot;
};

using XiPath = std::function<TrajectoryPoint(double)>;

struct Trajectory {
  std::vector<double> times;           // strictly increasing, all negative
  std::vector<InterfaceVector> states;

  int k() const { return states.empty() ? 0 : states.front().k(); }
};

// Right-hand side of the first-order interface law:
//   xi_j' = beta [ e^{-sqrt2 (xi_{j+1}-xi_j)} - e^{-sqrt2 (xi_j-xi_{j-1})} ]
// with xi_0 = -inf and xi_{k+1} = +inf (the corresponding term is omitted,
// never approximated by a sentinel).
inline std::vector<double> toda_rhs(std::span<const double> xi, double beta) {
  const int k = static_cast<int>(xi.size());
  for (int j = 1; j < k; ++j)
    if (!(xi[j] > xi[j - 1]))
      throw std::invalid_argument("toda_rhs: positions must be increasing");
  std::vector<double> rhs(k);
  for (int j = 0; j < k; ++j) {
    const double right = (j + 1 < k) ? std::exp(-kSqrt2 * (xi[j + 1] - xi[j])) : 0.0;
    const double left = (j > 0) ? std::exp(-kSqrt2 * (xi[j] - xi[j - 1])) : 0.0;
    rhs[j] = beta * (right - left);
  }
  return rhs;
}

inline std::vector<double> toda_rhs(const InterfaceVector& xi, double beta) {
  return toda_rhs(std::span<const double>(xi.xi), beta);
}

// Explicit logarithmic solution xi_j(t) = (1/sqrt2)(j-(k+1)/2) log(-c_log t)
// + gamma_j. Requires -c_log t > 1 so the log is positive.
inline InterfaceVector explicit_positions(double t, const TodaConstants& consts,
                                          int k) {
  if (static_cast<int>(consts.gamma.size()) != k)
    throw std::invalid_argument("explicit_positions: constants/k mismatch");
  const double arg = -consts.c_log * t;
  if (!(arg > 1.0))
    throw std::invalid_argument("explicit_positions: need -c_log * t > 1");
  const double lg = std::log(arg);
  std::vector<double> xi(k);
  for (int j = 1; j <= k; ++j)
    xi[j - 1] = (j - 0.5 * (k + 1)) * lg / kSqrt2 + consts.gamma[j - 1];
  return InterfaceVector(std::move(xi));
}

inline std::vector<double> explicit_velocity(double t, const TodaConstants& consts,
                                             int k) {
  if (!(-consts.c_log * t > 1.0))
    throw std::invalid_argument("explicit_velocity: need -c_log * t > 1");
  std::vector<double> dot(k);
  for (int j = 1; j <= k; ++j) dot[j - 1] = (j - 0.5 * (k + 1)) / (kSqrt2 * t);
  return dot;
}

inline XiPath explicit_path(const TodaConstants& consts, int k) {
  return [consts, k](double t) {
    return TrajectoryPoint{explicit_positions(t, consts, k).xi,
                           explicit_velocity(t, consts, k)};
  };
}

// Max combined defect of the interface law over the sample times,
//   max_{t,j} | (1/beta) xi_j' - e^{-sqrt2 gap_+} + e^{-sqrt2 gap_-} |.
inline double toda_residual(const XiPath& traj, double beta,
                            std::span<const double> t_samples) {
  if (t_samples.empty())
    throw std::invalid_argument("toda_residual: empty sample set");
  double worst = 0.0;
  for (double t : t_samples) {
    const TrajectoryPoint p = traj(t);
    const std::vector<double> rhs = toda_rhs(std::span<const double>(p.xi), beta);
    for (std::size_t j = 0; j < p.xi.size(); ++j)
      worst = std::max(worst, std::abs((p.xi_dot[j] - rhs[j]) / beta));
  }
  return worst;
}

inline std::vector<double> log_spaced_times(double t_lo, double t_hi, int count) {
  if (!(t_lo < t_hi && t_hi < 0.0) || count < 2)
    throw std::invalid_argument("log_spaced_times: need t_lo < t_hi < 0");
  std::vector<double> ts(count);
  const double la = std::log(-t_lo), lb = std::log(-t_hi);
  for (int i = 0; i < count; ++i)
    ts[i] = -std::exp(la + (lb - la) * i / (count - 1));
  return ts;
}

namespace detail {
inline void rk4_step(std::vector<double>& xi, double step, double beta) {
  const std::size_t k = xi.size();
  const std::vector<double> k1 = toda_rhs(std::span<const double>(xi), beta);
  std::vector<double> tmp(k);
  for (std::size_t j = 0; j < k; ++j) tmp[j] = xi[j] + 0.5 * step * k1[j];
  const std::vector<double> k2 = toda_rhs(std::span<const double>(tmp), beta);
  for (std::size_t j = 0; j < k; ++j) tmp[j] = xi[j] + 0.5 * step * k2[j];
  const std::vector<double> k3 = toda_rhs(std::span<const double>(tmp), beta);
  for (std::size_t j = 0; j < k; ++j) tmp[j] = xi[j] + step * k3[j];
  const std::vector<double> k4 = toda_rhs(std::span<const double>(tmp), beta);
  for (std::size_t j = 0; j < k; ++j)
    xi[j] += step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

inline void check_ordered(const std::vector<double>& xi, double t) {
  for (std::size_t j = 1; j < xi.size(); ++j)
    if (!(xi[j] > xi[j - 1]))
      throw std::runtime_error("integrate: interface ordering lost at t = " +
                               std::to_string(t));
}
}  // namespace detail

// Classical fixed-step RK4 for the interface law; the final partial step is
// shortened to land exactly on t_end.
inline Trajectory integrate(const InterfaceVector& xi_init, double t_start,
                            double t_end, double step, double beta) {
  if (!(t_start < t_end && t_end < 0.0))
    throw std::invalid_argument("integrate: need t_start < t_end < 0");
  if (!(step > 0.0)) throw std::invalid_argument("integrate: step > 0");

  Trajectory traj;
  traj.times.push_back(t_start);
  traj.states.push_back(xi_init);
  std::vector<double> xi = xi_init.xi;
  double t = t_start;
  while (t < t_end - 1e-12 * std::abs(t_end)) {
    const double h = std::min(step, t_end - t);
    try {
      detail::rk4_step(xi, h, beta);
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("integrate: interface ordering lost near t = " +
                               std::to_string(t));
    }
    t += h;
    detail::check_ordered(xi, t);
    traj.times.push_back(t);
    traj.states.emplace_back(xi, xi_init.antisymmetric &&
                                     InterfaceVector(xi).antisymmetry_defect() < 1e-9);
  }
  return traj;
}

// Same integrator, but records states exactly at the requested checkpoint
// times (each checkpoint is reached with a shortened final step). Used to put
// the interface law on the snapshot times of a PDE run.
inline Trajectory integrate_through(const InterfaceVector& xi_init,
                                    std::span<const double> checkpoints,
                                    double step, double beta) {
  if (checkpoints.empty())
    throw std::invalid_argument("integrate_through: no checkpoints");
  Trajectory traj;
  std::vector<double> xi = xi_init.xi;
  double t = checkpoints.front();
  traj.times.push_back(t);
  traj.states.push_back(InterfaceVector(xi));
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    const double target = checkpoints[i];
    if (!(target > t))
      throw std::invalid_argument("integrate_through: checkpoints must increase");
    while (t < target - 1e-12 * std::abs(target)) {
      const double h = std::min(step, target - t);
      try {
        detail::rk4_step(xi, h, beta);
      } catch (const std::invalid_argument&) {
        throw std::runtime_error(
            "integrate_through: interface ordering lost near t = " +
            std::to_string(t));
      }
      t += h;
      detail::check_ordered(xi, t);
    }
    t = target;
    traj.times.push_back(t);
    traj.states.push_back(InterfaceVector(xi));
  }
  return traj;
}

// Linear interpolation of an integrated trajectory, with velocities from the
// interface law itself; lets a Trajectory stand in wherever an XiPath is
// expected.
inline XiPath interpolated_path(Trajectory traj, double beta) {
  return [traj = std::move(traj), beta](double t) {
    const auto& ts = traj.times;
    if (t < ts.front() - 1e-9 || t > ts.back() + 1e-9)
      throw std::out_of_range("interpolated_path: t outside trajectory");
    std::size_t hi = 1;
    while (hi + 1 < ts.size() && ts[hi] < t) ++hi;
    const double t0 = ts[hi - 1], t1 = ts[hi];
    const double alpha = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    const auto& a = traj.states[hi - 1].xi;
    const auto& b = traj.states[hi].xi;
    std::vector<double> xi(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
      xi[j] = (1.0 - alpha) * a[j] + alpha * b[j];
    auto dot = toda_rhs(std::span<const double>(xi), beta);
    return TrajectoryPoint{std::move(xi), std::move(dot)};
  };
}

}  // namespace kinkflow
