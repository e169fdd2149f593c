#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "kinkflow/parabolic.hpp"

using namespace kinkflow;

namespace {
const double kBeta = 12.0 * kSqrt2;

SpaceTimeWindow short_window(double s, double length, double h = 0.05,
                             double dt = 0.01) {
  const TodaConstants c = toda_constants(2, kBeta);
  const InterfaceVector xi = explicit_positions(s, c, 2);
  return SpaceTimeWindow{make_grid(std::abs(xi.xi.back()) + 16.0, h), s,
                         s + length, dt};
}

XiPath path2() { return explicit_path(toda_constants(2, kBeta), 2); }
}  // namespace

TEST_CASE("zero forcing keeps the zero solution") {
  const SpaceTimeWindow w = short_window(-500.0, 5.0);
  const LinearSolveResult r = solve_linear(
      w, path2(), [](double, double) { return 0.0; }, true);
  CHECK(r.psi_norm_phi == 0.0);
  for (const auto& c : r.coeffs)
    for (double v : c) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("projections hold the orthogonality constraint") {
  const SpaceTimeWindow w = short_window(-500.0, 10.0);
  const TodaConstants c = toda_constants(2, kBeta);
  const LinearSolveResult r = solve_linear(
      w, path2(),
      [&c](double t, double x) {
        return weight_phi(x, explicit_positions(t, c, 2), 1.0);
      },
      true);
  CHECK(r.max_orthogonality_defect < 1e-8);
  CHECK(r.psi_norm_phi > 0.0);
}

TEST_CASE("without projections the defect grows") {
  // forcing orthogonal to the slopes only at the initial time; the drift of
  // the inner products is what the multiplier terms exist to cancel
  const SpaceTimeWindow w = short_window(-500.0, 10.0);
  const TodaConstants c = toda_constants(2, kBeta);
  const InterfaceVector xi_s = explicit_positions(w.t_start, c, 2);
  const Field f0 = project_out(
      sample(w.grid, [&](double x) { return weight_phi(x, xi_s, 1.0); }), xi_s);
  const Grid& grid = *w.grid;
  const auto forcing = [&](double, double x) {
    const int i = static_cast<int>(std::lround((x + grid.half_width) / grid.h));
    return f0.values[i];
  };
  const LinearSolveResult with = solve_linear(w, path2(), forcing, true);
  const LinearSolveResult without = solve_linear(w, path2(), forcing, false);
  CHECK(with.max_orthogonality_defect < 1e-10);
  CHECK(without.max_orthogonality_defect > 100.0 * with.max_orthogonality_defect);
}

TEST_CASE("solution map is linear") {
  const SpaceTimeWindow w = short_window(-300.0, 3.0);
  const TodaConstants c = toda_constants(2, kBeta);
  const SpaceTimeForcing f1 = [&c](double t, double x) {
    return weight_phi(x, explicit_positions(t, c, 2), 1.0);
  };
  const SpaceTimeForcing f2 = [](double, double x) {
    return std::exp(-0.1 * x * x);
  };
  const double alpha = 2.5;
  const SpaceTimeForcing combo = [&](double t, double x) {
    return alpha * f1(t, x) + f2(t, x);
  };
  const LinearSolveResult ra = solve_linear(w, path2(), f1, true, 1.0, 50);
  const LinearSolveResult rb = solve_linear(w, path2(), f2, true, 1.0, 50);
  const LinearSolveResult rc = solve_linear(w, path2(), combo, true, 1.0, 50);
  REQUIRE(ra.snapshots.size() == rc.snapshots.size());
  double defect = 0.0;
  const auto& last_a = ra.snapshots.back().values;
  const auto& last_b = rb.snapshots.back().values;
  const auto& last_c = rc.snapshots.back().values;
  for (std::size_t i = 0; i < last_a.size(); ++i)
    defect = std::max(defect,
                      std::abs(alpha * last_a[i] + last_b[i] - last_c[i]));
  CHECK(defect < 1e-10);
}

TEST_CASE("per-step splitting defect shrinks with dt") {
  // the end-of-step projection removes a pre-projection drift that is
  // O(dt) per step; refinement must shrink it
  const TodaConstants c = toda_constants(2, kBeta);
  auto splitting_defect = [&](double dt) {
    SpaceTimeWindow w = short_window(-500.0, 4.0, 0.05, dt);
    const LinearSolveResult r = solve_linear(
        w, path2(),
        [&c](double t, double x) {
          return weight_phi(x, explicit_positions(t, c, 2), 1.0);
        },
        true);
    return r.max_splitting_defect;
  };
  const double d1 = splitting_defect(0.02);
  const double d2 = splitting_defect(0.01);
  CHECK(d2 < d1 / 1.5);
  CHECK(d1 < 1e-4);
}

TEST_CASE("window validation") {
  SpaceTimeWindow w = short_window(-300.0, 3.0);
  w.dt = -1.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = short_window(-300.0, 3.0);
  w.t_end = w.t_start;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}
