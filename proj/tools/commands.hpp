#pragma once

// Subcommand implementations behind the `tabdev` executable. Each command
// returns its result JSON plus any CSV artifacts; main.cpp owns argument
// parsing and file output.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace tabdev::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

struct Artifact {
  std::string filename;
  std::string content;
};

struct CommandOutput {
  nlohmann::json result;
  std::vector<Artifact> artifacts;
  /// Seed actually used (explicit or auto-generated); empty for deterministic commands.
  std::optional<std::uint64_t> seed;
  /// Canonical configuration; hashed into the run manifest.
  nlohmann::json config;
};

struct TestOneOptions {
  std::string data;
  bool header = false;
  std::vector<double> d0;
  std::string d0_grid;
  double alpha = 0.05;
  std::string mu0 = "zeros";
  std::string mu0_file;
  double split = 0.5;
  bool shuffle = false;
  bool trajectory = false;
  std::optional<std::uint64_t> seed;
};

struct TestTwoOptions {
  std::string x;
  std::string z;
  bool header = false;
  std::vector<double> d0;
  std::string d0_grid;
  double alpha = 0.05;
  std::optional<std::size_t> n0;
  bool shuffle = false;
  bool trajectory = false;
  std::optional<std::uint64_t> seed;
};

struct SimulateOptions {
  std::string preset = "none";  // "table1" or "none"
  std::string cells;            // e.g. "(100,200),(200,400)"
  bool full = false;
  std::size_t n = 100;
  std::size_t t = 200;
  std::vector<double> d0;
  std::string d0_grid;
  std::size_t reps = 200;
  double alpha = 0.05;
  double rho = 0.5;
  std::string mu = "unit";        // unit | zero
  std::string sigma = "ar1";      // ar1 | identity
  std::string noise = "gaussian"; // gaussian | rademacher
  std::string mode = "one";       // one | two
  double split = 0.5;
  std::size_t n0 = 0;
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

struct PowerCurveOptions {
  std::size_t n = 100;
  std::size_t t = 0;
  std::size_t t1 = 0;
  std::size_t t2 = 0;
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  std::size_t n0 = 0;
  double rho = 0.5;
  std::string mu = "unit";
  double mu_norm = 1.0;
  std::string sigma = "ar1";
  std::vector<double> d0;
  std::string d0_grid;
  double alpha = 0.05;
};

struct DistOptions {
  double kappa = 0.0;
  std::optional<double> pdf;
  std::optional<double> cdf;
  std::optional<double> tail;
  std::optional<double> quantile;
  std::size_t sample = 0;
  bool table = false;
  double table_step = 0.05;
  std::optional<std::uint64_t> seed;
};

struct SdeCheckOptions {
  double drift = -2.0;
  double beta = 1.0;
  std::size_t steps = 2000;
  std::size_t paths = 20000;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

CommandOutput cmd_test_one(const TestOneOptions& opts);
CommandOutput cmd_test_two(const TestTwoOptions& opts);
CommandOutput cmd_simulate(const SimulateOptions& opts);
CommandOutput cmd_power_curve(const PowerCurveOptions& opts);
CommandOutput cmd_dist(const DistOptions& opts);
CommandOutput cmd_sde_check(const SdeCheckOptions& opts);

/// "a:b:step", inclusive of b up to rounding.
std::vector<double> parse_grid(const std::string& spec);

/// "(n,T),(n,T),..."
std::vector<std::pair<std::size_t, std::size_t>> parse_cells(const std::string& spec);

/// FNV-1a over the canonical (key-sorted) dump, so field order never matters.
std::string config_hash(const nlohmann::json& config);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

nlohmann::json run_manifest(const std::string& command_line, const CommandOutput& out,
                            const std::vector<std::string>& written_files);

}  // namespace tabdev::cli
