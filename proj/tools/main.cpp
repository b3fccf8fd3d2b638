// tabdev: command-line front end for the high-dimensional deviation tests.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tabdev/error.hpp"

namespace {

namespace fs = std::filesystem;
using namespace tabdev::cli;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string out_dir;
  bool compact = false;
  bool csv = false;
};

void add_common(CLI::App* cmd, Common& common, std::optional<std::uint64_t>* seed) {
  cmd->add_option("--out", common.out_dir, "Directory for CSV artifacts and the run manifest");
  cmd->add_flag("--json", common.compact, "Emit compact single-line JSON");
  if (seed) cmd->add_option("--seed", *seed, "Master seed (u64); generated and recorded when omitted");
}

int emit(const CommandOutput& out, const Common& common, const std::string& command_line) {
  std::vector<std::string> written;
  if (!common.out_dir.empty()) {
    fs::create_directories(common.out_dir);
    for (const auto& a : out.artifacts) {
      const auto path = fs::path(common.out_dir) / a.filename;
      std::ofstream(path, std::ios::binary) << a.content;
      written.push_back(path.string());
    }
    const auto manifest_path = fs::path(common.out_dir) / "manifest.json";
    written.push_back(manifest_path.string());
    std::ofstream(manifest_path, std::ios::binary) << run_manifest(command_line, out, written).dump(2) << '\n';
  }
  if (common.csv) {
    if (out.artifacts.empty()) throw tabdev::ConfigError("--csv: this command produced no CSV output");
    std::cout << out.artifacts.front().content;
  } else {
    std::cout << (common.compact ? out.result.dump() : out.result.dump(2)) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional deviation tests for mean vectors (two-armed bandit statistic)"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

  Common common;

  TestOneOptions one;
  auto* test_one = app.add_subcommand("test-one", "One-sample deviation test on a CSV dataset");
  test_one->add_option("--data", one.data, "CSV file, rows = observations")->required()->check(CLI::ExistingFile);
  test_one->add_flag("--header", one.header, "Skip the first line");
  test_one->add_option("--d0", one.d0, "Deviation radius (several values allowed)");
  test_one->add_option("--d0-grid", one.d0_grid, "Radius grid start:stop:step");
  test_one->add_option("--alpha", one.alpha, "Significance level")->capture_default_str();
  test_one->add_option("--mu0", one.mu0, "Reference mean: 'zeros'")->capture_default_str();
  test_one->add_option("--mu0-file", one.mu0_file, "Single-row CSV with the reference mean")->check(CLI::ExistingFile);
  test_one->add_option("--split", one.split, "Head fraction T1/T")->capture_default_str();
  test_one->add_flag("--shuffle", one.shuffle, "Permute rows (seeded) before splitting");
  test_one->add_flag("--trajectory", one.trajectory, "Write trajectory.csv to --out");
  add_common(test_one, common, &one.seed);

  TestTwoOptions two;
  auto* test_two = app.add_subcommand("test-two", "Two-sample deviation test on two CSV datasets");
  test_two->add_option("--x", two.x, "First group CSV")->required()->check(CLI::ExistingFile);
  test_two->add_option("--z", two.z, "Second group CSV")->required()->check(CLI::ExistingFile);
  test_two->add_flag("--header", two.header, "Skip the first line of each file");
  test_two->add_option("--d0", two.d0, "Deviation radius (several values allowed)");
  test_two->add_option("--d0-grid", two.d0_grid, "Radius grid start:stop:step");
  test_two->add_option("--alpha", two.alpha, "Significance level")->capture_default_str();
  test_two->add_option("--n0", two.n0, "Recursion length N0 (default floor(min(M1,M2)/3))");
  test_two->add_flag("--shuffle", two.shuffle, "Permute rows of each group (seeded) before splitting");
  test_two->add_flag("--trajectory", two.trajectory, "Write trajectory.csv to --out");
  add_common(test_two, common, &two.seed);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rejection-rate grid");
  // CLI11 reads config files on the root app only; keys go under a [simulate] section.
  app.set_config("--config", "", "TOML file; put simulate keys (same names as the flags) under [simulate]");
  simulate->fallthrough();
  simulate->add_option("--preset", sim.preset, "'table1' or 'none'")->capture_default_str();
  simulate->add_option("--cells", sim.cells, "(n,T) cells, e.g. \"(100,200),(200,400)\"");
  simulate->add_flag("--full", sim.full, "With --preset table1: all eight (n,T) cells");
  simulate->add_option("--n", sim.n, "Dimension")->capture_default_str();
  simulate->add_option("--t", sim.t, "Sample size")->capture_default_str();
  simulate->add_option("--d0", sim.d0, "Radius values");
  simulate->add_option("--d0-grid", sim.d0_grid, "Radius grid start:stop:step");
  simulate->add_option("--reps", sim.reps, "Replications per cell")->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Significance level")->capture_default_str();
  simulate->add_option("--rho", sim.rho, "AR(1) coefficient")->capture_default_str();
  simulate->add_option("--mu", sim.mu, "'unit' (||mu|| = 1) or 'zero'")->capture_default_str();
  simulate->add_option("--sigma", sim.sigma, "'ar1' or 'identity'")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "'gaussian' or 'rademacher'")->capture_default_str();
  simulate->add_option("--mode", sim.mode, "'one' or 'two'")->capture_default_str();
  simulate->add_option("--split", sim.split, "One-sample head fraction")->capture_default_str();
  simulate->add_option("--n0", sim.n0, "Two-sample recursion length");
  simulate->add_option("--m1", sim.m1, "Two-sample first group size");
  simulate->add_option("--m2", sim.m2, "Two-sample second group size");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = TABDEV_THREADS or auto)");
  simulate->add_flag("--csv", common.csv, "Print grid CSV to stdout instead of JSON");
  add_common(simulate, common, &sim.seed);

  PowerCurveOptions pc;
  auto* power = app.add_subcommand("power-curve", "Asymptotic rejection probability over a d0 grid");
  power->add_option("--n", pc.n, "Dimension")->capture_default_str();
  power->add_option("--t", pc.t, "Total sample size, split in halves (default 2n)");
  power->add_option("--t1", pc.t1, "Head size");
  power->add_option("--t2", pc.t2, "Recursion length");
  power->add_option("--m1", pc.m1, "Two-sample first group size");
  power->add_option("--m2", pc.m2, "Two-sample second group size");
  power->add_option("--n0", pc.n0, "Two-sample recursion length");
  power->add_option("--rho", pc.rho, "AR(1) coefficient")->capture_default_str();
  power->add_option("--mu", pc.mu, "'unit' or 'zero'")->capture_default_str();
  power->add_option("--mu-norm", pc.mu_norm, "||mu|| when --mu unit")->capture_default_str();
  power->add_option("--sigma", pc.sigma, "'ar1' or 'identity'")->capture_default_str();
  power->add_option("--d0", pc.d0, "Radius values");
  power->add_option("--d0-grid", pc.d0_grid, "Radius grid start:stop:step");
  power->add_option("--alpha", pc.alpha, "Significance level")->capture_default_str();
  power->add_flag("--csv", common.csv, "Print d0,kappa,predicted_power CSV to stdout");
  add_common(power, common, nullptr);

  DistOptions dist;
  auto* dist_cmd = app.add_subcommand("dist", "Bandit distribution B(kappa): density, CDF, tail, quantile, draws");
  dist_cmd->add_option("--kappa", dist.kappa, "kappa")->required();
  dist_cmd->add_option("--pdf", dist.pdf, "Density at x");
  dist_cmd->add_option("--cdf", dist.cdf, "P(B(kappa) <= x)");
  dist_cmd->add_option("--tail", dist.tail, "g(kappa) = P(|B(-kappa)| > z)");
  dist_cmd->add_option("--quantile", dist.quantile, "Quantile at q");
  dist_cmd->add_option("--sample", dist.sample, "Number of inverse-CDF draws (samples.csv)");
  dist_cmd->add_flag("--table", dist.table, "Density/CDF table (dist_table.csv)");
  dist_cmd->add_option("--step", dist.table_step, "Table spacing")->capture_default_str();
  dist_cmd->add_flag("--csv", common.csv, "Print the first CSV artifact to stdout");
  add_common(dist_cmd, common, &dist.seed);

  SdeCheckOptions sde;
  auto* sde_cmd = app.add_subcommand("sde-check", "Euler-Maruyama endpoints vs the closed-form transition law");
  sde_cmd->add_option("--drift", sde.drift, "Drift alpha in dY = alpha sign(Y) ds + beta dB")->capture_default_str();
  sde_cmd->add_option("--beta", sde.beta, "Diffusion beta")->capture_default_str();
  sde_cmd->add_option("--steps", sde.steps, "Euler steps on [0, 1]")->capture_default_str();
  sde_cmd->add_option("--paths", sde.paths, "Simulated paths")->capture_default_str();
  sde_cmd->add_option("--threads", sde.threads, "Worker threads (0 = TABDEV_THREADS or auto)");
  add_common(sde_cmd, common, &sde.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    CommandOutput out;
    if (*test_one) out = cmd_test_one(one);
    else if (*test_two) out = cmd_test_two(two);
    else if (*simulate) out = cmd_simulate(sim);
    else if (*power) out = cmd_power_curve(pc);
    else if (*dist_cmd) out = cmd_dist(dist);
    else out = cmd_sde_check(sde);
    return emit(out, common, command_line);
  } catch (const tabdev::Error& e) {
    const nlohmann::json err = {{"schema", kSchemaVersion}, {"error", to_string(e.code())}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return e.code() == tabdev::ErrorCode::configuration ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    const nlohmann::json err = {{"schema", kSchemaVersion}, {"error", "internal_error"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitRuntime;
  }
}
