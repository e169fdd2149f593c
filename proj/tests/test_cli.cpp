#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "kinkflow/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("kinkflow_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("constants subcommand writes the summary") {
  const fs::path dir = temp_dir("constants");
  const int rc = kinkflow::cli::run(
      {"constants", "--k", "4", "--out", dir.string()});
  CHECK(rc == 0);
  json j;
  std::ifstream(dir / "constants_summary.json") >> j;
  CHECK(j["beta"].get<double>() == Catch::Approx(12.0 * kinkflow::kSqrt2).margin(1e-8));
  CHECK(j["residual_exact_normalization"].get<double>() < 1e-12);
  CHECK(j["residual_paper_normalization"].get<double>() > 1e-4);
  CHECK(fs::exists(dir / "constants_manifest.json"));
}

TEST_CASE("odd interface counts are a usage error") {
  const fs::path dir = temp_dir("oddk");
  CHECK(kinkflow::cli::run({"toda", "--k", "3", "--out", dir.string()}) == 2);
  CHECK(kinkflow::cli::run({"bogus-subcommand"}) == 2);
}

TEST_CASE("toda subcommand integrates and reports") {
  const fs::path dir = temp_dir("toda");
  const int rc = kinkflow::cli::run({"toda", "--k", "2", "--t-start", "-200",
                                     "--t-end", "-150", "--out", dir.string()});
  CHECK(rc == 0);
  json j;
  std::ifstream(dir / "toda_summary.json") >> j;
  CHECK(j["terminal_error_vs_explicit"].get<double>() < 1e-8);
  CHECK(fs::exists(dir / "toda_trajectory.csv"));
  const std::string csv = slurp(dir / "toda_trajectory.csv");
  CHECK(csv.rfind("t,xi_1,xi_2", 0) == 0);
}

TEST_CASE("outputs are byte-identical across runs") {
  const fs::path a = temp_dir("det_a");
  const fs::path b = temp_dir("det_b");
  for (const auto& dir : {a, b})
    REQUIRE(kinkflow::cli::run({"constants", "--k", "6", "--out", dir.string()}) == 0);
  CHECK(slurp(a / "constants_summary.json") == slurp(b / "constants_summary.json"));
}

TEST_CASE("config file supplies defaults, flags override") {
  const fs::path dir = temp_dir("config");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "k=4\n";
    cfg << "t-start=-200\n";
    cfg << "t-end=-150\n";
  }
  const int rc = kinkflow::cli::run({"toda", "--config", (dir / "run.cfg").string(),
                                     "--out", dir.string()});
  CHECK(rc == 0);
  json j;
  std::ifstream(dir / "toda_summary.json") >> j;
  CHECK(j["k"].get<int>() == 4);

  const int rc2 = kinkflow::cli::run({"toda", "--config", (dir / "run.cfg").string(),
                                      "--k", "2", "--out", dir.string()});
  CHECK(rc2 == 0);
  std::ifstream(dir / "toda_summary.json") >> j;
  CHECK(j["k"].get<int>() == 2);
}

TEST_CASE("report aggregates pass flags") {
  const fs::path dir = temp_dir("report");
  REQUIRE(kinkflow::cli::run({"constants", "--k", "2", "--out", dir.string()}) == 0);
  CHECK(kinkflow::cli::run({"report", "--out", dir.string()}) == 0);
  json j;
  std::ifstream(dir / "report.json") >> j;
  CHECK(j["pass"].get<bool>());
  CHECK(j["checks"].get<int>() >= 1);

  // an injected failing summary flips the verdict and the exit code
  {
    std::ofstream bad(dir / "extra_summary.json");
    bad << "{\"pass_injected\": false}\n";
  }
  CHECK(kinkflow::cli::run({"report", "--out", dir.string()}) == 1);
}

TEST_CASE("validate pipeline agrees with the interface law") {
  const fs::path dir = temp_dir("validate");
  const int rc = kinkflow::cli::run(
      {"validate", "--k", "2", "--t-start", "-2000", "--t-end", "-1000", "--h",
       "0.05", "--dt", "0.01", "--out", dir.string()});
  json j;
  std::ifstream(dir / "validate_verdict.json") >> j;
  CHECK(j["max_deviation"].get<double>() < 0.05);
  CHECK(j["pass_deviation"].get<bool>());
  CHECK(j["pass_separation"].get<bool>());
  CHECK(j["pass_negative_control"].get<bool>());
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "validate_gaps.csv"));
  CHECK(fs::exists(dir / "validate_pde_trajectory.csv"));
}

TEST_CASE("environment variable supplies the default output directory") {
  const fs::path dir = temp_dir("envout");
  setenv("KINKFLOW_OUT", dir.string().c_str(), 1);
  const int rc = kinkflow::cli::run({"constants", "--k", "2"});
  unsetenv("KINKFLOW_OUT");
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "constants_summary.json"));
}

TEST_CASE("spectral subcommand honors the shared grid flags") {
  const fs::path dir = temp_dir("spectral");
  const int rc = kinkflow::cli::run({"spectral", "--half-width", "25", "--h",
                                     "0.02", "--out", dir.string()});
  CHECK(rc == 0);
  json j;
  std::ifstream(dir / "spectral_summary.json") >> j;
  CHECK(j["half_width"].get<double>() == 25.0);
  CHECK(j["lambda1"].get<double>() == Catch::Approx(1.5).margin(0.01));
  CHECK(j["rayleigh_min"].get<double>() >= 1.4);
  CHECK(fs::exists(dir / "spectral_modes.csv"));
}
