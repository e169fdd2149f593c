#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "kinkflow/tracker.hpp"
#include "oracles.hpp"

using namespace kinkflow;

namespace {
const double kBeta = 12.0 * kSqrt2;

// bisection root of the closed-form ansatz, the tracking oracle
double ansatz_zero(const InterfaceVector& xi, double lo, double hi) {
  double flo = ansatz(lo, xi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = ansatz(mid, xi);
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("interface extraction against the closed-form root") {
  const GridPtr grid = make_grid(20.0, 0.05);
  const InterfaceVector xi({-3.0, 3.0});
  const Field u = sample(grid, [&](double x) { return ansatz(x, xi); });
  const InterfaceVector found = find_interfaces(u, 2);
  const double exact_right = ansatz_zero(xi, 1.0, 5.0);
  CHECK(std::abs(found.xi[1] - exact_right) < 5e-3);
  CHECK(std::abs(found.xi[0] + exact_right) < 5e-3);
  CHECK(std::abs(found.xi[1] - 3.0) < 5e-3);  // exact zero shifts only at e^{-6 sqrt2}
}

TEST_CASE("interface extraction error paths") {
  const GridPtr grid = make_grid(20.0, 0.05);
  const Field flat = sample(grid, [](double) { return -1.0; });
  CHECK_THROWS_WITH(find_interfaces(flat, 2),
                    Catch::Matchers::ContainsSubstring("found 0"));

  // a two-node noise blip does not count as a crossing
  Field noisy = flat;
  noisy.values[100] = 0.5;
  noisy.values[101] = 0.5;
  CHECK_THROWS_AS(find_interfaces(noisy, 2), std::runtime_error);
}

TEST_CASE("single kink crossing") {
  const GridPtr grid = make_grid(15.0, 0.04);
  const Field u = sample(grid, [](double x) { return kink(x - 0.8137); });
  const InterfaceVector found = find_interfaces(u, 1);
  CHECK(std::abs(found.xi[0] - 0.8137) < grid->h * grid->h);

  // zero landing exactly on a node still counts as one crossing
  const Field centered = sample(grid, [](double x) { return kink(x); });
  CHECK(find_interfaces(centered, 1).xi[0] == 0.0);
}

TEST_CASE("error term closed forms") {
  SECTION("wide gap: drift plus exponentially small interaction") {
    const GridPtr grid = make_grid(50.0, 0.05);
    const InterfaceVector xi({-15.0, 15.0});
    const std::vector<double> xi_dot{0.25, -0.25};
    const Field e = error_term(grid, xi, xi_dot);
    double sup = 0.0;
    for (double v : e.values) sup = std::max(sup, std::abs(v));
    CHECK(sup <= 0.25 / kSqrt2 + 40.0 * std::exp(-30.0 * kSqrt2));
    CHECK(sup >= 0.9 * 0.25 / kSqrt2);
  }
  SECTION("even under reflection for antisymmetric data") {
    const TodaConstants c = toda_constants(4, kBeta);
    const InterfaceVector xi = explicit_positions(-1e3, c, 4);
    const std::vector<double> xi_dot = toda_rhs(xi, kBeta);
    const GridPtr grid = make_grid(30.0, 0.05);
    const Field e = error_term(grid, xi, xi_dot);
    for (int i = 0; i < grid->n; ++i)
      CHECK(e.values[i] == Catch::Approx(e.values[grid->n - 1 - i]).margin(1e-14));
  }
}

TEST_CASE("interface law cancels the slow error mode") {
  // the projection of E onto each translation mode nearly vanishes when the
  // interfaces move by the law, against a frozen configuration
  const TodaConstants c = toda_constants(2, kBeta);
  const InterfaceVector xi = explicit_positions(-1e3, c, 2);
  const GridPtr grid = make_grid(std::abs(xi.xi[1]) + 20.0, 0.02);
  const std::vector<double> moving = toda_rhs(xi, kBeta);
  const std::vector<double> frozen(2, 0.0);
  const Field e_moving = error_term(grid, xi, moving);
  const Field e_frozen = error_term(grid, xi, frozen);
  for (int j = 0; j < 2; ++j) {
    const Field slope =
        sample(grid, [&](double x) { return kink_deriv(x - xi.xi[j], 1); });
    const double p_moving = inner_product(e_moving, slope);
    const double p_frozen = inner_product(e_frozen, slope);
    CHECK(std::abs(p_moving) <= 0.1 * std::abs(p_frozen));
  }
}

TEST_CASE("nonlinear remainder is exact cubic algebra") {
  const GridPtr grid = make_grid(10.0, 0.1);
  const Field z = sample(grid, [](double x) { return std::tanh(x); });
  const Field psi = sample(grid, [](double x) { return 0.3 * std::cos(x); });
  const Field n = nonlinear_remainder(psi, z);
  for (int i = 0; i < grid->n; ++i) {
    const double p = psi.values[i], zz = z.values[i];
    const double direct = nonlinearity(p + zz, 0) - nonlinearity(zz, 0) -
                          nonlinearity(zz, 1) * p;
    CHECK(n.values[i] == Catch::Approx(direct).margin(1e-14));
    CHECK(std::abs(n.values[i]) <=
          (3.0 * std::abs(zz) + 1.0) * (p * p + std::abs(p * p * p)) + 1e-15);
  }
  SECTION("zero perturbation") {
    const Field n0 = nonlinear_remainder(zero_field(grid), z);
    for (double v : n0.values) CHECK(v == 0.0);
  }
  SECTION("pure cubic at z = 0") {
    const Field c = sample(grid, [](double) { return 0.5; });
    const Field n0 = nonlinear_remainder(c, zero_field(grid));
    for (double v : n0.values) CHECK(v == Catch::Approx(-0.125));
  }
}

TEST_CASE("trajectory comparison") {
  const TodaConstants c = toda_constants(2, kBeta);
  const InterfaceVector init = explicit_positions(-400.0, c, 2);
  const std::vector<double> stamps{-400.0, -380.0, -360.0, -340.0};
  const Trajectory a = integrate_through(init, stamps, 0.1, kBeta);

  SECTION("identical trajectories have zero deviation") {
    const ComparisonReport r = compare_trajectories(a, a, c.c_log);
    CHECK(r.max_deviation == 0.0);
    CHECK(r.gap_fits.size() == 1);
    // gap follows (1/sqrt2) log(-c_log t) + b exactly on this trajectory
    CHECK(r.gap_fits[0].slope == Catch::Approx(1.0).margin(1e-6));
    CHECK(r.gap_fits[0].intercept == Catch::Approx(c.b[0]).margin(1e-6));
  }
  SECTION("mismatched interface counts are rejected") {
    const TodaConstants c4 = toda_constants(4, kBeta);
    const Trajectory b =
        integrate_through(explicit_positions(-400.0, c4, 4), stamps, 0.1, kBeta);
    CHECK_THROWS_AS(compare_trajectories(a, b, c.c_log), std::invalid_argument);
  }
}
