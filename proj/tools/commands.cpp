#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

#include "tabdev/bandit.hpp"
#include "tabdev/csv.hpp"
#include "tabdev/power.hpp"
#include "tabdev/random.hpp"
#include "tabdev/sde.hpp"
#include "tabdev/sim.hpp"
#include "tabdev/tab.hpp"
#include "tabdev/two_sample.hpp"

namespace tabdev::cli {

using nlohmann::json;

namespace {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

Matrix shuffle_rows(const Matrix& m, std::uint64_t seed) {
  std::vector<std::size_t> order(m.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Engine rng(seed);
  // Explicit Fisher-Yates so the permutation does not depend on the
  // standard library's shuffle.
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto src = m.row(order[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

std::string trajectory_csv(const TabTrajectory& traj) {
  std::string s = "t,theta,target,partial\n";
  for (std::size_t i = 0; i < traj.thetas.size(); ++i) {
    s += std::to_string(i + 1) + ',' + std::to_string(traj.thetas[i]) + ',' + format_double(traj.targets[i]) +
         ',' + format_double(traj.partials[i]) + '\n';
  }
  return s;
}

json result_json(const TestResult& r, const TabTrajectory& traj) {
  return {{"statistic", r.statistic},
          {"abs_statistic", std::abs(r.statistic)},
          {"p_value", r.p_value},
          {"reject", r.reject_h0},
          {"critical_value", r.critical_value},
          {"d0", r.d0},
          {"alpha", r.alpha},
          {"n", r.dimension},
          {"tau_hat", traj.nuisance.tau_hat},
          {"sigma2_hat", traj.nuisance.sigma2_hat}};
}

std::vector<double> resolve_d0(const std::vector<double>& d0, const std::string& grid) {
  std::vector<double> values = d0;
  if (!grid.empty()) {
    const auto g = parse_grid(grid);
    values.insert(values.end(), g.begin(), g.end());
  }
  if (values.empty()) throw ConfigError("no d0 given (use --d0 or --d0-grid)");
  return values;
}

// One result object when a single d0 was requested, else {"results": [...]}.
void attach_results(json& out, std::vector<json> results) {
  if (results.size() == 1) {
    for (auto& [k, v] : results.front().items()) out[k] = v;
  } else {
    out["results"] = std::move(results);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<double> parse_grid(const std::string& spec) {
  const std::regex re(R"(^\s*([-+0-9.eE]+)\s*:\s*([-+0-9.eE]+)\s*:\s*([-+0-9.eE]+)\s*$)");
  std::smatch m;
  if (!std::regex_match(spec, m, re)) throw ConfigError("grid must look like start:stop:step, got '" + spec + "'");
  const double a = std::stod(m[1]);
  const double b = std::stod(m[2]);
  const double step = std::stod(m[3]);
  if (!(step > 0.0) || b < a) throw ConfigError("grid needs step > 0 and stop >= start");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    // Round away the accumulated binary error so 0.5 + 7 * 0.1 prints as 1.2.
    out.push_back(std::round((a + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_cells(const std::string& spec) {
  const std::regex re(R"(\(\s*(\d+)\s*,\s*(\d+)\s*\))");
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (auto it = std::sregex_iterator(spec.begin(), spec.end(), re); it != std::sregex_iterator(); ++it) {
    cells.emplace_back(std::stoul((*it)[1]), std::stoul((*it)[2]));
  }
  if (cells.empty()) throw ConfigError("cells must look like (n,T),(n,T), got '" + spec + "'");
  return cells;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json run_manifest(const std::string& command_line, const CommandOutput& out,
                  const std::vector<std::string>& written_files) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  json m = {{"schema", kSchemaVersion},
            {"command", command_line},
            {"config", out.config},
            {"config_hash", config_hash(out.config)},
            {"version", kVersion},
            {"timestamp", ts.str()},
            {"outputs", written_files}};
  m["seed"] = out.seed ? json(*out.seed) : json(nullptr);
  return m;
}

CommandOutput cmd_test_one(const TestOneOptions& opts) {
  Matrix data = parse_csv(opts.data, opts.header);
  CommandOutput out;
  if (opts.shuffle) {
    out.seed = resolve_seed(opts.seed);
    data = shuffle_rows(data, *out.seed);
  }
  OneSampleConfig cfg;
  cfg.alpha = opts.alpha;
  cfg.split_fraction = opts.split;
  if (!opts.mu0_file.empty()) {
    cfg.mu0 = parse_csv_vector(opts.mu0_file);
  } else if (opts.mu0 != "zeros") {
    throw ConfigError("--mu0 accepts only 'zeros'; use --mu0-file for a reference vector");
  }
  const auto d0s = resolve_d0(opts.d0, opts.d0_grid);

  std::vector<json> results;
  for (double d0 : d0s) {
    cfg.d0 = d0;
    const auto [res, traj] = one_sample_deviation_test(data, cfg);
    json r = result_json(res, traj);
    r["t1"] = res.head_rows;
    r["t2"] = res.tail_rows;
    results.push_back(std::move(r));
    if (opts.trajectory) {
      const std::string name = d0s.size() == 1 ? "trajectory.csv" : "trajectory_d0_" + format_double(d0) + ".csv";
      out.artifacts.push_back({name, trajectory_csv(traj)});
    }
  }
  out.result = {{"schema", kSchemaVersion}, {"command", "test-one"}};
  attach_results(out.result, std::move(results));
  out.config = {{"command", "test-one"}, {"data", opts.data},   {"header", opts.header},
                {"d0", d0s},             {"alpha", opts.alpha}, {"mu0", opts.mu0},
                {"mu0_file", opts.mu0_file}, {"split", opts.split}, {"shuffle", opts.shuffle}};
  if (out.seed) out.result["seed"] = *out.seed;
  return out;
}

CommandOutput cmd_test_two(const TestTwoOptions& opts) {
  Matrix x = parse_csv(opts.x, opts.header);
  Matrix z = parse_csv(opts.z, opts.header);
  CommandOutput out;
  if (opts.shuffle) {
    out.seed = resolve_seed(opts.seed);
    x = shuffle_rows(x, mix64(*out.seed));
    z = shuffle_rows(z, mix64(*out.seed + 1));
  }
  TwoSampleConfig cfg;
  cfg.alpha = opts.alpha;
  cfg.n0 = opts.n0;
  const auto d0s = resolve_d0(opts.d0, opts.d0_grid);

  std::vector<json> results;
  for (double d0 : d0s) {
    cfg.d0 = d0;
    const auto [res, traj] = two_sample_deviation_test(x, z, cfg);
    json r = result_json(res, traj);
    r["m1"] = res.head_rows;
    r["m2"] = z.rows() - res.tail_rows;
    r["n0"] = res.tail_rows;
    results.push_back(std::move(r));
    if (opts.trajectory) {
      const std::string name = d0s.size() == 1 ? "trajectory.csv" : "trajectory_d0_" + format_double(d0) + ".csv";
      out.artifacts.push_back({name, trajectory_csv(traj)});
    }
  }
  out.result = {{"schema", kSchemaVersion}, {"command", "test-two"}};
  attach_results(out.result, std::move(results));
  out.config = {{"command", "test-two"}, {"x", opts.x}, {"z", opts.z}, {"header", opts.header},
                {"d0", d0s}, {"alpha", opts.alpha}, {"shuffle", opts.shuffle}};
  out.config["n0"] = opts.n0 ? json(*opts.n0) : json(nullptr);
  if (out.seed) out.result["seed"] = *out.seed;
  return out;
}

namespace {

MuSpec::Kind mu_kind(const std::string& s) {
  if (s == "unit") return MuSpec::Kind::uniform_unit_norm;
  if (s == "zero") return MuSpec::Kind::zero;
  throw ConfigError("--mu must be 'unit' or 'zero'");
}

SigmaSpec::Kind sigma_kind(const std::string& s) {
  if (s == "ar1") return SigmaSpec::Kind::ar1;
  if (s == "identity") return SigmaSpec::Kind::identity;
  throw ConfigError("--sigma must be 'ar1' or 'identity'");
}

const std::vector<std::pair<std::size_t, std::size_t>> kTable1Cells = {
    {100, 200}, {200, 400}, {400, 800}, {600, 1200}, {100, 150}, {200, 300}, {400, 600}, {600, 900}};

const std::vector<std::pair<std::size_t, std::size_t>> kDeskCells = {{100, 200}, {200, 400}};

}  // namespace

static std::string grid_csv(const GridResult& grid) {
  std::string s = "n,t,d0,rate,replications,mean_abs_statistic,stderr\n";
  for (const auto& r : grid.rows) {
    s += std::to_string(r.n) + ',' + std::to_string(r.t) + ',' + format_double(r.d0) + ',' + format_double(r.rate) +
         ',' + std::to_string(r.replications) + ',' + format_double(r.mean_abs_statistic) + ',' +
         format_double(r.stderr_rate) + '\n';
  }
  return s;
}

CommandOutput cmd_simulate(const SimulateOptions& opts) {
  CommandOutput out;
  out.seed = resolve_seed(opts.seed);

  std::vector<std::pair<std::size_t, std::size_t>> cells;
  std::vector<double> d0s;
  SimulationConfig base;
  base.replications = opts.reps;
  base.seed = *out.seed;
  base.sigma.rho = opts.rho;
  if (opts.preset == "table1") {
    cells = opts.full ? kTable1Cells : kDeskCells;
    d0s = parse_grid("0.5:1.5:0.1");
    base.mu.kind = MuSpec::Kind::uniform_unit_norm;
    base.sigma.kind = SigmaSpec::Kind::ar1;
    base.sigma.rho = 0.5;
  } else if (opts.preset == "none") {
    cells = {{opts.n, opts.t}};
    base.mu.kind = mu_kind(opts.mu);
    base.sigma.kind = sigma_kind(opts.sigma);
  } else {
    throw ConfigError("unknown preset '" + opts.preset + "'");
  }
  if (!opts.cells.empty()) cells = parse_cells(opts.cells);
  if (!opts.d0.empty() || !opts.d0_grid.empty()) d0s = resolve_d0(opts.d0, opts.d0_grid);
  if (d0s.empty()) throw ConfigError("no d0 given (use --d0 or --d0-grid)");
  base.d0_values = d0s;

  if (opts.noise == "gaussian") {
    base.noise = Noise::gaussian;
  } else if (opts.noise == "rademacher") {
    base.noise = Noise::rademacher;
  } else {
    throw ConfigError("--noise must be 'gaussian' or 'rademacher'");
  }
  if (opts.mode == "two") {
    base.mode = TwoSampleMode{opts.n0, opts.m1, opts.m2};
  } else if (opts.mode == "one") {
    base.mode = OneSampleMode{opts.split};
  } else {
    throw ConfigError("--mode must be 'one' or 'two'");
  }

  GridResult all;
  for (const auto& [n, t] : cells) {
    SimulationConfig cfg = base;
    cfg.n = n;
    cfg.t = t;
    auto grid = empirical_rejection_rate(cfg, opts.alpha, opts.threads);
    all.rows.insert(all.rows.end(), grid.rows.begin(), grid.rows.end());
  }

  json rows = json::array();
  for (const auto& r : all.rows) {
    rows.push_back({{"n", r.n}, {"t", r.t}, {"d0", r.d0}, {"rate", r.rate}, {"replications", r.replications},
                    {"mean_abs_statistic", r.mean_abs_statistic}, {"stderr", r.stderr_rate}});
  }
  out.result = {{"schema", kSchemaVersion}, {"command", "simulate"}, {"seed", *out.seed},
                {"alpha", opts.alpha},      {"rows", rows}};
  out.artifacts.push_back({"grid.csv", grid_csv(all)});

  json cell_list = json::array();
  for (const auto& [n, t] : cells) cell_list.push_back({n, t});
  out.config = {{"command", "simulate"}, {"cells", cell_list}, {"d0", d0s}, {"reps", opts.reps},
                {"alpha", opts.alpha}, {"rho", base.sigma.rho}, {"mu", opts.preset == "table1" ? "unit" : opts.mu},
                {"sigma", opts.preset == "table1" ? "ar1" : opts.sigma}, {"noise", opts.noise},
                {"mode", opts.mode}, {"split", opts.split}, {"n0", opts.n0}, {"m1", opts.m1}, {"m2", opts.m2},
                {"seed", *out.seed}};
  return out;
}

CommandOutput cmd_power_curve(const PowerCurveOptions& opts) {
  if (opts.n == 0) throw ConfigError("--n must be positive");
  PopulationSpec pop;
  if (opts.mu == "unit") {
    pop.mu.assign(opts.n, opts.mu_norm / std::sqrt(static_cast<double>(opts.n)));
  } else if (opts.mu == "zero") {
    pop.mu.assign(opts.n, 0.0);
  } else {
    throw ConfigError("--mu must be 'unit' or 'zero'");
  }
  pop.sigma = sigma_kind(opts.sigma) == SigmaSpec::Kind::ar1 ? ar1_covariance(opts.n, opts.rho)
                                                             : Matrix::identity(opts.n);

  SampleSizes sizes;
  json size_json;
  if (opts.m1 || opts.m2 || opts.n0) {
    if (!(opts.m1 && opts.m2 && opts.n0)) throw ConfigError("two-sample power needs --m1, --m2 and --n0");
    pop.mu2 = std::vector<double>(opts.n, 0.0);
    pop.sigma2 = pop.sigma;
    sizes = TwoSampleSizes{opts.m1, opts.m2, opts.n0};
    size_json = {{"m1", opts.m1}, {"m2", opts.m2}, {"n0", opts.n0}};
  } else {
    std::size_t t1 = opts.t1;
    std::size_t t2 = opts.t2;
    if (!t1 || !t2) {
      const std::size_t t = opts.t ? opts.t : 2 * opts.n;
      t1 = t / 2;
      t2 = t - t1;
    }
    sizes = OneSampleSizes{t1, t2};
    size_json = {{"t1", t1}, {"t2", t2}};
  }
  const auto d0s = resolve_d0(opts.d0, opts.d0_grid);
  const auto rows = power_curve(pop, d0s, sizes, opts.alpha);

  CommandOutput out;
  std::string csv = "d0,kappa,predicted_power\n";
  json jrows = json::array();
  for (const auto& r : rows) {
    csv += format_double(r.d0) + ',' + format_double(r.kappa) + ',' + format_double(r.predicted_power) + '\n';
    jrows.push_back({{"d0", r.d0}, {"kappa", r.kappa}, {"predicted_power", r.predicted_power}});
  }
  out.artifacts.push_back({"power_curve.csv", csv});
  out.result = {{"schema", kSchemaVersion}, {"command", "power-curve"}, {"sizes", size_json},
                {"alpha", opts.alpha},      {"rows", jrows}};
  out.config = {{"command", "power-curve"}, {"n", opts.n}, {"mu", opts.mu}, {"mu_norm", opts.mu_norm},
                {"sigma", opts.sigma}, {"rho", opts.rho}, {"sizes", size_json}, {"d0", d0s}, {"alpha", opts.alpha}};
  return out;
}

CommandOutput cmd_dist(const DistOptions& opts) {
  const BanditParams p(opts.kappa);
  CommandOutput out;
  out.result = {{"schema", kSchemaVersion}, {"command", "dist"}, {"kappa", opts.kappa}};
  if (opts.pdf) out.result["pdf"] = {{"x", *opts.pdf}, {"value", bandit_pdf(*opts.pdf, p)}};
  if (opts.cdf) out.result["cdf"] = {{"x", *opts.cdf}, {"value", bandit_cdf(*opts.cdf, p)}};
  if (opts.tail) out.result["tail"] = {{"z", *opts.tail}, {"value", bandit_tail_prob(opts.kappa, *opts.tail)}};
  if (opts.quantile) out.result["quantile"] = {{"q", *opts.quantile}, {"value", bandit_quantile(*opts.quantile, p)}};
  if (opts.table) {
    if (!(opts.table_step > 0.0)) throw ConfigError("--step must be positive");
    const double half = 6.0 + std::abs(opts.kappa);
    const auto count = static_cast<std::size_t>(std::floor(2.0 * half / opts.table_step + 1e-9));
    std::string csv = "x,pdf,cdf\n";
    for (std::size_t i = 0; i <= count; ++i) {
      const double x = std::round((-half + static_cast<double>(i) * opts.table_step) * 1e12) / 1e12;
      csv += format_double(x) + ',' + format_double(bandit_pdf(x, p)) + ',' + format_double(bandit_cdf(x, p)) + '\n';
    }
    out.artifacts.push_back({"dist_table.csv", csv});
  }
  if (opts.sample > 0) {
    out.seed = resolve_seed(opts.seed);
    Engine rng(*out.seed);
    const auto draws = bandit_sample(p, rng, opts.sample);
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(draws.size());
    double ss = 0.0;
    for (double d : draws) ss += (d - mean) * (d - mean);
    std::string csv = "value\n";
    for (double d : draws) csv += format_double(d) + '\n';
    out.artifacts.push_back({"samples.csv", csv});
    out.result["sample"] = {{"count", draws.size()},
                            {"mean", mean},
                            {"sd", std::sqrt(ss / static_cast<double>(draws.size()))},
                            {"seed", *out.seed}};
  }
  out.config = {{"command", "dist"}, {"kappa", opts.kappa}, {"table", opts.table}, {"sample", opts.sample}};
  return out;
}

CommandOutput cmd_sde_check(const SdeCheckOptions& opts) {
  CommandOutput out;
  out.seed = resolve_seed(opts.seed);
  const unsigned workers = opts.threads ? opts.threads : default_worker_count();
  const auto r = sde_ks_check(opts.drift, opts.beta, opts.steps, opts.paths, *out.seed, workers);
  out.result = {{"schema", kSchemaVersion}, {"command", "sde-check"}, {"ks", r.ks},       {"paths", r.paths},
                {"steps", r.steps},         {"alpha", r.alpha},       {"beta", r.beta}, {"seed", *out.seed}};
  out.config = {{"command", "sde-check"}, {"alpha", opts.drift}, {"beta", opts.beta},
                {"steps", opts.steps},    {"paths", opts.paths}, {"seed", *out.seed}};
  return out;
}

}  // namespace tabdev::cli
