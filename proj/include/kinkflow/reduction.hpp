#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "kinkflow/constants.hpp"
#include "kinkflow/profile.hpp"

namespace kinkflow {

// Matrix pipeline reducing the interface law to decoupled scalar modes:
// B maps positions to (gaps..., sum); C is the tridiagonal interaction
// stencil acting on the gap exponentials; A = C^{1/2} diag(a) C^{1/2} is the
// symmetrized Jacobian of the reduced system, diagonalized by `eigenvectors`.
struct ReductionPipeline {
  Eigen::MatrixXd B;             // k x k change of variables
  Eigen::MatrixXd C;             // (k-1) x (k-1), tridiag(-1, 2, -1)
  Eigen::MatrixXd C_half;        // symmetric positive definite square root
  Eigen::MatrixXd A;             // C_half * diag(a) * C_half
  Eigen::VectorXd eigenvalues;   // of A, ascending, all positive
  Eigen::MatrixXd eigenvectors;  // orthogonal, columns match eigenvalues
};

inline ReductionPipeline build_reduction(int k, const TodaConstants& consts) {
  if (k < 2 || k % 2 != 0)
    throw std::invalid_argument("build_reduction: k must be even, >= 2");
  if (static_cast<int>(consts.a.size()) != k - 1)
    throw std::invalid_argument("build_reduction: constants/k mismatch");

  ReductionPipeline p;
  p.B = Eigen::MatrixXd::Zero(k, k);
  for (int l = 0; l < k - 1; ++l) {
    p.B(l, l) = -1.0;
    p.B(l, l + 1) = 1.0;
  }
  p.B.row(k - 1).setOnes();

  const int m = k - 1;
  p.C = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    p.C(i, i) = 2.0;
    if (i > 0) p.C(i, i - 1) = -1.0;
    if (i + 1 < m) p.C(i, i + 1) = -1.0;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esC(p.C);
  if (esC.info() != Eigen::Success)
    throw std::runtime_error("build_reduction: eigensolve of C failed");
  p.C_half = esC.eigenvectors() *
             esC.eigenvalues().cwiseSqrt().asDiagonal() *
             esC.eigenvectors().transpose();

  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(consts.a.data(), m);
  p.A = p.C_half * a.asDiagonal() * p.C_half;
  p.A = 0.5 * (p.A + p.A.transpose().eval());  // scrub rounding asymmetry

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esA(p.A);
  if (esA.info() != Eigen::Success)
    throw std::runtime_error("build_reduction: eigensolve of A failed");
  p.eigenvalues = esA.eigenvalues();
  p.eigenvectors = esA.eigenvectors();
  if (p.eigenvalues.minCoeff() <= 0.0)
    throw std::runtime_error("build_reduction: A has a non-positive eigenvalue");
  return p;
}

// Reduced right-hand side on gap variables: C applied to the gap
// exponentials e^{-sqrt2 v_l}.
inline Eigen::VectorXd reduced_rhs(const Eigen::MatrixXd& C,
                                   const Eigen::VectorXd& vbar) {
  Eigen::VectorXd e = (-kSqrt2 * vbar.array()).exp().matrix();
  return C * e;
}

// Forcing of the correction modes: maps (t, omega, omega') to an m-vector.
using CorrectionForcing = std::function<Eigen::VectorXd(
    double t, const Eigen::VectorXd& omega, const Eigen::VectorXd& omega_dot)>;

struct CorrectionResult {
  std::vector<double> times;
  Eigen::MatrixXd omega;                  // row per time, column per mode
  std::vector<double> iteration_deltas;   // successive-iterate norms
  int iterations = 0;
};

namespace detail {
// d/dt by centered differences on a (possibly nonuniform) grid, one-sided at
// the two ends.
inline Eigen::MatrixXd grid_derivative(const std::vector<double>& t,
                                       const Eigen::MatrixXd& y) {
  const int n = static_cast<int>(t.size());
  Eigen::MatrixXd d(n, y.cols());
  d.row(0) = (y.row(1) - y.row(0)) / (t[1] - t[0]);
  for (int i = 1; i + 1 < n; ++i)
    d.row(i) = (y.row(i + 1) - y.row(i - 1)) / (t[i + 1] - t[i - 1]);
  d.row(n - 1) = (y.row(n - 1) - y.row(n - 2)) / (t[n - 1] - t[n - 2]);
  return d;
}
}  // namespace detail

// Norm controlling both the correction and its rescaled derivative:
// sup |h| + sup |t| |h'|.
inline double correction_norm(const std::vector<double>& t,
                              const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd d = detail::grid_derivative(t, y);
  double sup_val = 0.0, sup_der = 0.0;
  for (int i = 0; i < y.rows(); ++i) {
    sup_val = std::max(sup_val, y.row(i).cwiseAbs().maxCoeff());
    sup_der = std::max(sup_der, std::abs(t[i]) * d.row(i).cwiseAbs().maxCoeff());
  }
  return sup_val + sup_der;
}

// Picard iteration of the mode-wise integral map
//   omega_i(t) = -(-t)^{-sqrt(lambda_i)} int_t^{t_ref} (-s)^{sqrt(lambda_i)}
//                Gamma_i(omega', omega)(s) ds,
// anchored at t_ref = t_grid.back() where omega vanishes. The omega'
// dependence of Gamma is lagged one iteration; integrals use the trapezoid
// rule on t_grid. Stops when successive iterates differ by < tol in
// correction_norm; throws if max_iter is exhausted first.
inline CorrectionResult correction_fixed_point(
    const CorrectionForcing& forcing, const std::vector<double>& lambdas,
    double t_ref, const std::vector<double>& t_grid, int max_iter, double tol) {
  const int n = static_cast<int>(t_grid.size());
  const int m = static_cast<int>(lambdas.size());
  if (n < 3) throw std::invalid_argument("correction_fixed_point: grid too small");
  if (!(t_ref < 0.0)) throw std::invalid_argument("correction_fixed_point: t_ref < 0");
  for (double l : lambdas)
    if (!(l > 0.0))
      throw std::invalid_argument("correction_fixed_point: lambdas must be positive");
  for (int i = 1; i < n; ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("correction_fixed_point: grid must increase");
  if (std::abs(t_grid.back() - t_ref) > 1e-9 * std::abs(t_ref))
    throw std::invalid_argument(
        "correction_fixed_point: grid must end at the anchor time");

  // Decay guard: the forcing at omega = 0 must fall off faster than
  // |t|^{-1/2}, otherwise the integral map is unbounded as the window grows.
  {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m);
    const double na = forcing(t_grid.front(), zero, zero).cwiseAbs().maxCoeff();
    const double nb = forcing(t_ref, zero, zero).cwiseAbs().maxCoeff();
    const double span = std::abs(t_grid.front()) / std::abs(t_ref);
    if (na > 1e-300 && nb > 1e-300 && span >= 4.0) {
      const double q_hat = std::log(nb / na) / std::log(span);
      if (q_hat <= 0.5)
        throw std::invalid_argument(
            "correction_fixed_point: forcing decays like |t|^(-q) with q <= 1/2");
    }
  }

  CorrectionResult result;
  result.times = t_grid;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, m);

  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::MatrixXd omega_dot = detail::grid_derivative(t_grid, omega);
    Eigen::MatrixXd gamma(n, m);
    for (int i = 0; i < n; ++i)
      gamma.row(i) =
          forcing(t_grid[i], omega.row(i).transpose(), omega_dot.row(i).transpose())
              .transpose();

    Eigen::MatrixXd next(n, m);
    for (int c = 0; c < m; ++c) {
      const double root = std::sqrt(lambdas[c]);
      std::vector<double> g(n);
      for (int i = 0; i < n; ++i)
        g[i] = std::pow(-t_grid[i], root) * gamma(i, c);
      double integral = 0.0;  // int_{t_i}^{t_ref} (-s)^root gamma ds
      next(n - 1, c) = 0.0;
      for (int i = n - 2; i >= 0; --i) {
        integral += 0.5 * (t_grid[i + 1] - t_grid[i]) * (g[i] + g[i + 1]);
        next(i, c) = -std::pow(-t_grid[i], -root) * integral;
      }
    }

    const double delta = correction_norm(t_grid, (next - omega).eval());
    result.iteration_deltas.push_back(delta);
    omega.swap(next);
    result.iterations = iter;
    if (delta < tol) {
      result.omega = std::move(omega);
      return result;
    }
  }
  throw std::runtime_error("correction_fixed_point: no convergence within max_iter");
}

}  // namespace kinkflow
