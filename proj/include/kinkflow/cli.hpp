#pragma once

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "kinkflow/constants.hpp"
#include "kinkflow/norms.hpp"
#include "kinkflow/parabolic.hpp"
#include "kinkflow/pde.hpp"
#include "kinkflow/profile.hpp"
#include "kinkflow/reduction.hpp"
#include "kinkflow/spectral.hpp"
#include "kinkflow/toda.hpp"
#include "kinkflow/tracker.hpp"

namespace kinkflow::cli {

inline constexpr const char* kVersion = "0.1.0";
using json = nlohmann::ordered_json;

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << fmt(values[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace detail

struct Options {
  int k = 2;
  double sigma = 1.0;
  double t_start = -2000.0;
  double t_end = -1000.0;
  double dt = 0.01;
  double h = 0.05;
  double half_width = 0.0;  // 0 = choose from the interface spread
  std::string out = "out";
  unsigned seed = 12345;
  bool paper_normalization = false;

  // subcommand-specific
  double toda_step = 0.1;
  std::string forcing = "phi";
  std::string boundary = "dirichlet";
  bool projections = true;
  int stride = 1000;
  bool h_set = false;           // whether --h was given explicitly
  bool half_width_set = false;  // same for --half-width

  std::filesystem::path out_dir() const {
    std::filesystem::path p(out);
    std::filesystem::create_directories(p);
    return p;
  }

  void write_manifest(const std::string& subcommand, json parameters,
                      double wall_seconds) const {
    json m;
    m["subcommand"] = subcommand;
    m["version"] = kVersion;
    m["seed"] = seed;
    m["parameters"] = std::move(parameters);
    m["wall_time_seconds"] = wall_seconds;
    detail::write_json(out_dir() / (subcommand + "_manifest.json"), m);
  }
};

namespace detail {

inline json common_params(const Options& opt) {
  json p;
  p["k"] = opt.k;
  p["sigma"] = opt.sigma;
  p["t_start"] = opt.t_start;
  p["t_end"] = opt.t_end;
  p["dt"] = opt.dt;
  p["h"] = opt.h;
  p["paper_normalization"] = opt.paper_normalization;
  return p;
}

inline TodaConstants constants_for(const Options& opt, double beta) {
  return toda_constants(opt.k, beta,
                        opt.paper_normalization
                            ? ConstantsNormalization::kPaperPrinted
                            : ConstantsNormalization::kResidualZero);
}

inline Trajectory track_snapshots(const std::vector<Snapshot>& snapshots, int k) {
  Trajectory traj;
  for (const auto& [t, field] : snapshots) {
    traj.times.push_back(t);
    traj.states.push_back(find_interfaces(field, k));
  }
  return traj;
}

inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const Trajectory& traj) {
  std::vector<std::string> header{"t"};
  for (int j = 1; j <= traj.k(); ++j) header.push_back("xi_" + std::to_string(j));
  CsvWriter csv(path, header);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i]};
    row.insert(row.end(), traj.states[i].xi.begin(), traj.states[i].xi.end());
    csv.row(row);
  }
}

}  // namespace detail

inline int run_constants(const Options& opt) {
  detail::Timer timer;
  const double beta = compute_beta(1e-10);
  const TodaConstants exact = toda_constants(opt.k, beta);
  const TodaConstants paper =
      toda_constants(opt.k, beta, ConstantsNormalization::kPaperPrinted);

  const std::vector<double> ts = log_spaced_times(-1e6, -10.0, 200);
  const double residual_exact =
      toda_residual(explicit_path(exact, opt.k), beta, ts);
  const double residual_paper =
      toda_residual(explicit_path(paper, opt.k), beta, ts);

  json summary;
  summary["k"] = opt.k;
  summary["beta"] = beta;
  summary["beta_numerator"] = beta_numerator(1e-10);
  summary["beta_denominator"] = beta_denominator(1e-10);
  summary["c_log"] = exact.c_log;
  summary["b"] = exact.b;
  summary["gamma"] = exact.gamma;
  summary["a"] = exact.a;
  summary["b_paper_printed"] = paper.b;
  summary["residual_exact_normalization"] = residual_exact;
  summary["residual_paper_normalization"] = residual_paper;
  summary["pass_residual_exact"] = residual_exact < 1e-12;
  detail::write_json(opt.out_dir() / "constants_summary.json", summary);
  opt.write_manifest("constants", detail::common_params(opt), timer.seconds());
  std::cout << "constants: k=" << opt.k << " beta=" << detail::fmt(beta)
            << " residual=" << residual_exact
            << " paper_residual=" << residual_paper << '\n';
  return 0;
}

inline int run_toda(const Options& opt) {
  detail::Timer timer;
  const double beta = compute_beta(1e-10);
  const TodaConstants consts = detail::constants_for(opt, beta);

  const InterfaceVector init = explicit_positions(opt.t_start, consts, opt.k);
  const Trajectory traj =
      integrate(init, opt.t_start, opt.t_end, opt.toda_step, beta);
  detail::write_trajectory_csv(opt.out_dir() / "toda_trajectory.csv", traj);

  const InterfaceVector target = explicit_positions(opt.t_end, consts, opt.k);
  double terminal_error = 0.0, sum = 0.0;
  for (int j = 0; j < opt.k; ++j) {
    terminal_error =
        std::max(terminal_error, std::abs(traj.states.back().xi[j] - target.xi[j]));
    sum += traj.states.back().xi[j] - init.xi[j];
  }
  const std::vector<double> ts = log_spaced_times(opt.t_start, opt.t_end, 100);
  const double residual = toda_residual(explicit_path(consts, opt.k), beta, ts);

  json summary;
  summary["k"] = opt.k;
  summary["beta"] = beta;
  summary["step"] = opt.toda_step;
  summary["normalization"] = opt.paper_normalization ? "paper_printed" : "residual_zero";
  summary["terminal_error_vs_explicit"] = terminal_error;
  summary["explicit_residual"] = residual;
  summary["sum_drift"] = sum;
  summary["antisymmetry_defect"] = traj.states.back().antisymmetry_defect();
  detail::write_json(opt.out_dir() / "toda_summary.json", summary);

  json params = detail::common_params(opt);
  params["step"] = opt.toda_step;
  opt.write_manifest("toda", params, timer.seconds());
  std::cout << "toda: k=" << opt.k << " steps=" << traj.times.size() - 1
            << " terminal_error=" << terminal_error << " residual=" << residual
            << '\n';
  return 0;
}

inline int run_spectral(const Options& opt) {
  detail::Timer timer;
  // the operator wants a finer default resolution than the PDE runs
  const double half_width = opt.half_width_set ? opt.half_width : 40.0;
  const double h = opt.h_set ? opt.h : 0.01;
  const GridPtr grid = make_grid(half_width, h);
  const SpectralGapReport report = spectral_gap(grid);
  const std::vector<double> rayleigh = rayleigh_samples(grid, 100, opt.seed);
  const double rayleigh_min =
      *std::min_element(rayleigh.begin(), rayleigh.end());

  {
    detail::CsvWriter csv(opt.out_dir() / "spectral_modes.csv",
                          {"x", "mode0", "mode1", "kink_slope"});
    for (int i = 0; i < grid->n; ++i)
      csv.row({grid->nodes[i], report.mode0.values[i], report.mode1.values[i],
               kink_deriv(grid->nodes[i], 1)});
  }

  json summary;
  summary["half_width"] = half_width;
  summary["h"] = h;
  summary["lambda0"] = report.lambda0;
  summary["lambda1"] = report.lambda1;
  summary["gap_on_complement"] = report.gap_on_complement;
  summary["cosine_similarity"] = report.cosine_similarity;
  summary["rayleigh_trials"] = 100;
  summary["rayleigh_min"] = rayleigh_min;
  summary["seed"] = opt.seed;
  detail::write_json(opt.out_dir() / "spectral_summary.json", summary);

  json params;
  params["half_width"] = half_width;
  params["h"] = h;
  opt.write_manifest("spectral", params, timer.seconds());
  std::cout << "spectral: lambda0=" << report.lambda0
            << " lambda1=" << report.lambda1
            << " gap_on_complement=" << report.gap_on_complement
            << " rayleigh_min=" << rayleigh_min << '\n';
  return 0;
}

inline int run_linear(const Options& opt) {
  detail::Timer timer;
  const double beta = compute_beta(1e-10);
  const TodaConstants consts = detail::constants_for(opt, beta);

  const InterfaceVector xi0 = explicit_positions(opt.t_start, consts, opt.k);
  const double half_width =
      opt.half_width > 0.0 ? opt.half_width : std::abs(xi0.xi.back()) + 16.0;
  SpaceTimeWindow window{make_grid(half_width, opt.h), opt.t_start, opt.t_end,
                         opt.dt};

  const XiPath path = explicit_path(consts, opt.k);
  SpaceTimeForcing forcing;
  if (opt.forcing == "zero") {
    forcing = [](double, double) { return 0.0; };
  } else if (opt.forcing == "phi") {
    forcing = [consts, k = opt.k, sigma = opt.sigma](double t, double x) {
      return weight_phi(x, explicit_positions(t, consts, k), sigma);
    };
  } else if (opt.forcing == "kinkprime") {
    forcing = [consts, k = opt.k](double t, double x) {
      return kink_deriv(x - explicit_positions(t, consts, k).xi.front(), 1);
    };
  } else {
    std::cerr << "linear: unknown forcing preset '" << opt.forcing << "'\n";
    return 2;
  }

  const LinearSolveResult result =
      solve_linear(window, path, forcing, opt.projections, opt.sigma, opt.stride);

  {
    detail::CsvWriter csv(opt.out_dir() / "linear_snapshots.csv", {"t", "x", "psi"});
    for (std::size_t s = 0; s < result.snapshots.size(); ++s)
      for (int i = 0; i < window.grid->n; ++i)
        csv.row({result.snapshot_times[s], window.grid->nodes[i],
                 result.snapshots[s].values[i]});
  }

  json summary;
  summary["k"] = opt.k;
  summary["forcing"] = opt.forcing;
  summary["projections"] = opt.projections;
  summary["t_start"] = opt.t_start;
  summary["t_end"] = opt.t_end;
  summary["psi_norm_phi"] = result.psi_norm_phi;
  summary["forcing_norm_phi"] = result.forcing_norm_phi;
  summary["norm_ratio"] = result.forcing_norm_phi > 0.0
                              ? result.psi_norm_phi / result.forcing_norm_phi
                              : 0.0;
  summary["max_orthogonality_defect"] = result.max_orthogonality_defect;
  detail::write_json(opt.out_dir() / "linear_summary.json", summary);

  json params = detail::common_params(opt);
  params["forcing"] = opt.forcing;
  params["projections"] = opt.projections;
  params["half_width"] = half_width;
  opt.write_manifest("linear", params, timer.seconds());
  std::cout << "linear: ratio=" << summary["norm_ratio"]
            << " max_orthogonality_defect=" << result.max_orthogonality_defect
            << '\n';
  return 0;
}

inline int run_simulate(const Options& opt) {
  detail::Timer timer;
  const double beta = compute_beta(1e-10);
  const TodaConstants consts = detail::constants_for(opt, beta);

  const InterfaceVector xi0 = explicit_positions(opt.t_start, consts, opt.k);
  const double half_width =
      opt.half_width > 0.0 ? opt.half_width : std::abs(xi0.xi.back()) + 15.0;
  const GridPtr grid = make_grid(half_width, opt.h);
  const Field u0 = initial_field(grid, xi0);
  if (opt.dt > grid->h)
    std::cerr << "simulate: warning: dt=" << opt.dt << " exceeds h=" << grid->h
              << "; splitting error may dominate\n";

  EvolveOptions evolve_opt;
  evolve_opt.snapshot_stride_steps = opt.stride;
  if (opt.boundary == "neumann")
    evolve_opt.boundary.kind = Boundary::Kind::kNeumann;
  const std::vector<Snapshot> snapshots =
      evolve(u0, opt.t_start, opt.t_end, opt.dt, evolve_opt);

  const auto dir = opt.out_dir();
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", s);
    detail::CsvWriter csv(dir / name, {"x", "u"});
    for (int i = 0; i < grid->n; ++i)
      csv.row({grid->nodes[i], snapshots[s].second.values[i]});
  }
  detail::write_trajectory_csv(dir / "simulate_interfaces.csv",
                               detail::track_snapshots(snapshots, opt.k));

  json summary;
  summary["k"] = opt.k;
  summary["snapshots"] = snapshots.size();
  summary["energy_initial"] = energy(snapshots.front().second);
  summary["energy_final"] = energy(snapshots.back().second);
  detail::write_json(dir / "simulate_summary.json", summary);

  json params = detail::common_params(opt);
  params["half_width"] = half_width;
  params["stride"] = opt.stride;
  params["boundary"] = opt.boundary;
  json grid_info;
  grid_info["half_width"] = grid->half_width;
  grid_info["n"] = grid->n;
  grid_info["h"] = grid->h;
  params["grid"] = grid_info;
  opt.write_manifest("simulate", params, timer.seconds());
  std::cout << "simulate: k=" << opt.k << " snapshots=" << snapshots.size()
            << " energy " << detail::fmt(energy(snapshots.front().second)) << " -> "
            << detail::fmt(energy(snapshots.back().second)) << '\n';
  return 0;
}

inline int run_validate(const Options& opt) {
  detail::Timer timer;
  const double beta = compute_beta(1e-10);
  const TodaConstants consts = detail::constants_for(opt, beta);

  const InterfaceVector xi0 = explicit_positions(opt.t_start, consts, opt.k);
  const double half_width =
      opt.half_width > 0.0 ? opt.half_width : std::abs(xi0.xi.back()) + 15.0;
  const GridPtr grid = make_grid(half_width, opt.h);
  const Field u0 = initial_field(grid, xi0);

  EvolveOptions evolve_opt;
  evolve_opt.snapshot_stride_steps = opt.stride;
  const std::vector<Snapshot> snapshots =
      evolve(u0, opt.t_start, opt.t_end, opt.dt, evolve_opt);
  const Trajectory pde_traj = detail::track_snapshots(snapshots, opt.k);

  const Trajectory toda_traj =
      integrate_through(pde_traj.states.front(), pde_traj.times, 0.1, beta);
  const ComparisonReport report =
      compare_trajectories(pde_traj, toda_traj, consts.c_log);

  // negative control: freeze the initial interfaces
  Trajectory frozen;
  frozen.times = pde_traj.times;
  frozen.states.assign(pde_traj.times.size(), pde_traj.states.front());
  const ComparisonReport frozen_report =
      compare_trajectories(pde_traj, frozen, consts.c_log);

  const double tolerance = 0.05;
  const double separation_measured =
      report.gap_fits.empty() ? 0.0
                              : report.gap_fits.front().last -
                                    report.gap_fits.front().first;
  const double separation_expected =
      std::log(opt.t_end / opt.t_start) / kSqrt2;
  const bool pass_deviation = report.max_deviation <= tolerance;
  const bool pass_separation =
      std::abs(separation_measured - separation_expected) <=
      0.1 * std::abs(separation_expected);
  const bool pass_negative_control = frozen_report.max_deviation > tolerance;

  const auto dir = opt.out_dir();
  detail::write_trajectory_csv(dir / "validate_pde_trajectory.csv", pde_traj);
  detail::write_trajectory_csv(dir / "validate_toda_trajectory.csv", toda_traj);
  {
    std::vector<std::string> header{"t", "log_term"};
    for (int l = 1; l < opt.k; ++l) header.push_back("gap_" + std::to_string(l));
    detail::CsvWriter csv(dir / "validate_gaps.csv", header);
    for (std::size_t i = 0; i < pde_traj.times.size(); ++i) {
      std::vector<double> row{pde_traj.times[i],
                              std::log(-consts.c_log * pde_traj.times[i]) / kSqrt2};
      for (int l = 0; l + 1 < opt.k; ++l)
        row.push_back(pde_traj.states[i].xi[l + 1] - pde_traj.states[i].xi[l]);
      csv.row(row);
    }
  }

  json verdict;
  verdict["k"] = opt.k;
  verdict["t_start"] = opt.t_start;
  verdict["t_end"] = opt.t_end;
  verdict["tolerance"] = tolerance;
  verdict["max_deviation"] = report.max_deviation;
  verdict["mean_abs_deviation"] = report.mean_abs_deviation;
  verdict["separation_change_measured"] = separation_measured;
  verdict["separation_change_expected"] = separation_expected;
  verdict["frozen_max_deviation"] = frozen_report.max_deviation;
  verdict["gap_fit_slope"] =
      report.gap_fits.empty() ? 0.0 : report.gap_fits.front().slope;
  verdict["pass_deviation"] = pass_deviation;
  verdict["pass_separation"] = pass_separation;
  verdict["pass_negative_control"] = pass_negative_control;
  verdict["pass"] = pass_deviation && pass_separation && pass_negative_control;
  detail::write_json(dir / "validate_verdict.json", verdict);

  json params = detail::common_params(opt);
  params["half_width"] = half_width;
  params["stride"] = opt.stride;
  opt.write_manifest("validate", params, timer.seconds());
  std::cout << "validate: max_deviation=" << report.max_deviation
            << " (tol " << tolerance << ") separation="
            << separation_measured << " expected=" << separation_expected
            << " frozen=" << frozen_report.max_deviation
            << (verdict["pass"].get<bool>() ? " PASS" : " FAIL") << '\n';
  return verdict["pass"].get<bool>() ? 0 : 1;
}

inline int run_report(const Options& opt) {
  const auto dir = opt.out_dir();
  json report;
  report["version"] = kVersion;
  json inputs = json::array();
  bool all_pass = true;
  int checks = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const bool summary = name.size() > 13 &&
                         name.substr(name.size() - 13) == "_summary.json";
    const bool verdict = name == "validate_verdict.json";
    if (!summary && !verdict) continue;
    std::ifstream in(entry.path());
    json j;
    in >> j;
    json item;
    item["file"] = name;
    json flags = json::object();
    for (auto& [key, value] : j.items())
      if (key.rfind("pass", 0) == 0 && value.is_boolean()) {
        flags[key] = value;
        all_pass = all_pass && value.get<bool>();
        ++checks;
      }
    item["checks"] = flags;
    inputs.push_back(item);
  }
  std::sort(inputs.begin(), inputs.end(),
            [](const json& a, const json& b) { return a["file"] < b["file"]; });
  report["inputs"] = inputs;
  report["checks"] = checks;
  report["pass"] = all_pass;
  detail::write_json(dir / "report.json", report);
  std::cout << "report: " << inputs.size() << " inputs, " << checks
            << " checks, " << (all_pass ? "PASS" : "FAIL") << '\n';
  return all_pass ? 0 : 1;
}

inline int run(std::vector<std::string> args) {
  CLI::App app{"multi-kink interface dynamics toolkit"};
  app.set_help_flag("--help", "print usage");  // frees -h / --h for the grid spacing
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "flat key=value configuration file");

  Options opt;
  if (const char* env = std::getenv("KINKFLOW_OUT")) opt.out = env;

  app.add_option("--k", opt.k, "number of interfaces (even, >= 2)")
      ->check(CLI::Range(2, 64));
  app.add_option("--sigma", opt.sigma, "weight decay rate");
  app.add_option("--t-start", opt.t_start, "window start time (negative)");
  app.add_option("--t-end", opt.t_end, "window end time (negative)");
  app.add_option("--dt", opt.dt, "time step");
  app.add_option("--h", opt.h, "grid spacing");
  app.add_option("--half-width", opt.half_width,
                 "domain half width (0 = automatic)");
  app.add_option("--out", opt.out, "output directory")->capture_default_str();
  app.add_option("--seed", opt.seed, "random seed for stochastic checks");
  app.add_flag("--paper-normalization", opt.paper_normalization,
               "use the printed constants instead of the residual-zero ones");

  auto* constants = app.add_subcommand("constants", "interaction and trajectory constants");
  auto* toda = app.add_subcommand("toda", "integrate the interface law");
  toda->add_option("--step", opt.toda_step, "integrator step");
  auto* spectral = app.add_subcommand("spectral", "single-kink linearization spectrum");
  auto* linear = app.add_subcommand("linear", "projected linear parabolic solve");
  linear->add_option("--forcing", opt.forcing, "forcing preset: zero|phi|kinkprime")
      ->check(CLI::IsMember({"zero", "phi", "kinkprime"}));
  linear->add_option("--projections", opt.projections, "enable the projection terms");
  linear->add_option("--stride", opt.stride, "snapshot stride in steps");
  auto* simulate = app.add_subcommand("simulate", "nonlinear forward simulation");
  simulate->add_option("--stride", opt.stride, "snapshot stride in steps");
  simulate->add_option("--boundary", opt.boundary, "dirichlet|neumann")
      ->check(CLI::IsMember({"dirichlet", "neumann"}));
  auto* validate = app.add_subcommand("validate",
                                      "simulate, track and compare against the interface law");
  validate->add_option("--stride", opt.stride, "snapshot stride in steps");
  auto* report = app.add_subcommand("report", "aggregate prior outputs");
  app.require_subcommand(1);
  for (CLI::App* sub : {constants, toda, spectral, linear, simulate, validate, report})
    sub->fallthrough();  // global options remain valid after the subcommand name

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
    opt.h_set = app.count("--h") > 0;
    opt.half_width_set = app.count("--half-width") > 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (opt.k % 2 != 0) {
      std::cerr << "error: --k must be even\n";
      return 2;
    }
    if (constants->parsed()) return run_constants(opt);
    if (toda->parsed()) return run_toda(opt);
    if (spectral->parsed()) return run_spectral(opt);
    if (linear->parsed()) return run_linear(opt);
    if (simulate->parsed()) return run_simulate(opt);
    if (validate->parsed()) return run_validate(opt);
    if (report->parsed()) return run_report(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace kinkflow::cli
