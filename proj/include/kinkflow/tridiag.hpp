#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace kinkflow {

// Symmetric tridiagonal matrix: diag has size n, off has size n-1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }

  void apply(std::span<const double> x, std::span<double> y) const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
      double v = diag[i] * x[i];
      if (i > 0) v += off[i - 1] * x[i - 1];
      if (i + 1 < n) v += off[i] * x[i + 1];
      y[i] = v;
    }
  }
};

// Thomas algorithm for a general tridiagonal system. Safe without pivoting
// only for diagonally dominant matrices (the implicit diffusion operators
// used here are).
inline std::vector<double> thomas_solve(std::span<const double> lower,
                                        std::span<const double> diag,
                                        std::span<const double> upper,
                                        std::span<const double> rhs) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> c(n), d(n);
  c[0] = upper[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i - 1] * c[i - 1];
    c[i] = (i + 1 < n) ? upper[i] / m : 0.0;
    d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

// Tridiagonal solve with partial pivoting (Gaussian elimination keeping the
// band plus one fill-in diagonal). Handles the indefinite shifted systems of
// inverse iteration.
inline std::vector<double> tridiag_solve_pivoted(const SymTridiag& t,
                                                 double shift,
                                                 std::span<const double> rhs) {
  const int n = t.size();
  std::vector<double> a(n), b(n - 1 > 0 ? n - 1 : 0), c(n - 1 > 0 ? n - 1 : 0),
      f(std::max(0, n - 2), 0.0), x(rhs.begin(), rhs.end());
  for (int i = 0; i < n; ++i) a[i] = t.diag[i] - shift;
  for (int i = 0; i + 1 < n; ++i) b[i] = c[i] = t.off[i];
  // b: subdiagonal, a: diagonal, c: superdiagonal, f: second superdiagonal
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(b[i]) > std::abs(a[i])) {
      std::swap(a[i], b[i]);
      std::swap(c[i], a[i + 1]);
      if (i + 2 < n) std::swap(f[i], c[i + 1]);
      std::swap(x[i], x[i + 1]);
    }
    if (a[i] == 0.0) a[i] = std::numeric_limits<double>::min();
    const double m = b[i] / a[i];
    a[i + 1] -= m * c[i];
    if (i + 2 < n) c[i + 1] -= m * f[i];
    x[i + 1] -= m * x[i];
  }
  if (a[n - 1] == 0.0) a[n - 1] = std::numeric_limits<double>::min();
  for (int i = n - 1; i >= 0; --i) {
    double v = x[i];
    if (i + 1 < n) v -= c[i] * x[i + 1];
    if (i + 2 < n) v -= f[i] * x[i + 2];
    x[i] = v / a[i];
  }
  return x;
}

namespace detail {
// Number of eigenvalues of t strictly below x (Sturm count via LDL^T).
inline int sturm_count(const SymTridiag& t, double x) {
  const int n = t.size();
  int count = 0;
  double d = t.diag[0] - x;
  if (d < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    if (d == 0.0) d = 1e-300;
    d = (t.diag[i] - x) - t.off[i - 1] * t.off[i - 1] / d;
    if (d < 0.0) ++count;
  }
  return count;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
}  // namespace detail

// index-th smallest eigenvalue (0-based) by Sturm-sequence bisection.
inline double tridiag_eigenvalue(const SymTridiag& t, int index) {
  const int n = t.size();
  if (index < 0 || index >= n)
    throw std::invalid_argument("tridiag_eigenvalue: index out of range");
  double lo = t.diag[0], hi = t.diag[0];
  for (int i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) +
                     (i + 1 < n ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::sturm_count(t, mid) > index)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Eigenvector by inverse iteration at the given eigenvalue estimate. The
// starting vector comes from a fixed-seed generator so results are
// reproducible run to run.
inline std::vector<double> tridiag_eigenvector(const SymTridiag& t, double eigenvalue,
                                               unsigned seed = 12345u) {
  const int n = t.size();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = unit(rng);
  const double scale = std::max(1.0, std::abs(eigenvalue));
  const double shift = eigenvalue + 1e-12 * scale;
  for (int it = 0; it < 8; ++it) {
    v = tridiag_solve_pivoted(t, shift, v);
    const double nrm = detail::norm2(v);
    for (double& x : v) x /= nrm;
  }
  return v;
}

// Smallest Rayleigh quotient of t over the complement of `excluded`
// (normalized). Shift-and-invert iteration with re-projection each sweep;
// the shift must sit below the restricted spectrum but away from the
// eigenvalue carried by the excluded direction.
inline double min_rayleigh_on_complement(const SymTridiag& t,
                                         std::span<const double> excluded,
                                         double shift, int iterations = 120,
                                         unsigned seed = 54321u) {
  const int n = t.size();
  std::vector<double> u(excluded.begin(), excluded.end());
  const double un = detail::norm2(u);
  for (double& x : u) x /= un;

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = unit(rng);

  auto project = [&](std::vector<double>& w) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += w[i] * u[i];
    for (int i = 0; i < n; ++i) w[i] -= dot * u[i];
  };

  project(v);
  for (int it = 0; it < iterations; ++it) {
    v = tridiag_solve_pivoted(t, shift, v);
    project(v);
    const double nrm = detail::norm2(v);
    for (double& x : v) x /= nrm;
  }
  std::vector<double> tv(n);
  t.apply(v, tv);
  double num = 0.0;
  for (int i = 0; i < n; ++i) num += v[i] * tv[i];
  return num;
}

}  // namespace kinkflow
