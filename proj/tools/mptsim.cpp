// mptsim command-line front end: topology generation, single runs,
// experiment sweeps, SP/MP comparisons and topology reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mptsim/config.hpp"
#include "mptsim/format.hpp"
#include "mptsim/harness.hpp"
#include "mptsim/topology.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct GlobalOptions {
  std::optional<std::string> config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> ticks;
  std::optional<double> mp_scale;
  std::vector<std::string> sets;
};

enum class Command { kGen, kRun, kSweep, kCompare, kStats };

// Layers: defaults, config file, --set overrides, then dedicated flags. The
// caller validates once subcommand flags are applied as well.
mptsim::HarnessConfig build_config(const GlobalOptions& g, Command command) {
  mptsim::HarnessConfig config;
  if (g.config_file) config = mptsim::load_config_file(*g.config_file, config);
  for (const std::string& assignment : g.sets) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
      throw mptsim::ConfigError("--set expects key=value, got '" + assignment + "'");
    }
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      return s;
    };
    mptsim::apply_config_value(config, trim(assignment.substr(0, eq)),
                               trim(assignment.substr(eq + 1)));
  }
  if (g.seed) {
    // `gen` and `stats` are about the topology, everything else about the run.
    if (command == Command::kGen || command == Command::kStats) config.sim.topology.seed = *g.seed;
    else config.sim.seed = *g.seed;
  }
  if (g.mode) mptsim::apply_config_value(config, "mode", *g.mode);
  if (g.ticks) config.sim.ticks = *g.ticks;
  if (g.mp_scale) config.mp_scale = *g.mp_scale;
  return config;
}

// Opens <out>/<name> when --out was given; otherwise returns stdout.
class Output {
 public:
  Output(const std::optional<std::string>& dir, const std::string& name) {
    if (!dir) return;
    std::filesystem::create_directories(*dir);
    path_ = std::filesystem::path(*dir) / name;
    file_.open(path_, std::ios::binary);
    if (!file_) throw std::runtime_error("cannot write '" + path_.string() + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void close() {
    if (!file_.is_open()) return;
    file_.close();
    if (!file_) throw std::runtime_error("error writing '" + path_.string() + "'");
  }
  bool to_file() const { return !path_.empty(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream file_;
};

int cmd_gen(const mptsim::HarnessConfig& config, const GlobalOptions& g) {
  const auto routes = mptsim::make_routes(config);
  Output out(g.out_dir, "topology.txt");
  mptsim::save_topology(routes->topology(), out.stream());
  out.close();
  if (out.to_file()) std::cout << out.path().string() << '\n';
  return kExitOk;
}

int cmd_stats(const mptsim::HarnessConfig& config, const GlobalOptions& g,
              const std::optional<std::string>& topology_file) {
  const mptsim::Topology topology =
      topology_file ? mptsim::load_topology_file(*topology_file)
                    : mptsim::make_routes(config)->topology();
  Output out(g.out_dir, "stats.txt");
  mptsim::topology_stats(topology).write(out.stream());
  out.close();
  if (out.to_file()) std::cout << out.path().string() << '\n';
  return kExitOk;
}

int cmd_run(const mptsim::HarnessConfig& config, const GlobalOptions& g) {
  const auto routes = mptsim::make_routes(config);
  mptsim::SimConfig sim = config.sim;
  sim.topology = config.effective_topology();
  const mptsim::RunResult result = mptsim::run(sim, routes);

  Output out(g.out_dir, "trace.csv");
  mptsim::write_provenance(out.stream(), "RUN", {sim.seed}, config);
  if (result.pair) {
    out.stream() << "# pair=" << result.pair->first << ',' << result.pair->second << '\n';
  }
  mptsim::write_trace_csv(result.series, out.stream());
  out.close();
  if (out.to_file()) {
    const mptsim::RunSummary s =
        mptsim::summarize(result.series, sim.warmup, config.search.thresholds);
    std::cout << out.path().string() << '\n'
              << "mean_throughput_full " << mptsim::format_sig6(s.mean_throughput_full) << '\n'
              << "mean_throughput_steady " << mptsim::format_sig6(s.mean_throughput_steady) << '\n'
              << "mean_total_throughput_steady "
              << mptsim::format_sig6(s.mean_total_throughput_steady) << '\n'
              << "backlog_slope " << mptsim::format_sig6(s.backlog_slope) << '\n'
              << "verdict " << mptsim::to_string(s.verdict) << '\n'
              << "services " << result.services << '\n'
              << "multipath_services " << result.multipath_services << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const mptsim::HarnessConfig& config, const GlobalOptions& g) {
  const auto written = mptsim::run_experiment(config, g.out_dir.value_or("."));
  for (const auto& path : written) std::cout << path.string() << '\n';
  return kExitOk;
}

int cmd_compare(const mptsim::HarnessConfig& config, const GlobalOptions& g) {
  const mptsim::GainPoint p = mptsim::compare_modes(config);
  Output out(g.out_dir, "compare.csv");
  mptsim::write_provenance(out.stream(), "COMPARE", mptsim::replication_seeds(config), config);
  if (p.pair) out.stream() << "# pair=" << p.pair->first << ',' << p.pair->second << '\n';
  out.stream() << "lambda,scope,sp_throughput,mp_throughput,tg\n"
               << mptsim::format_real(p.axis) << ',' << mptsim::to_string(p.scope) << ','
               << mptsim::format_sig6(p.sp_throughput) << ','
               << mptsim::format_sig6(p.mp_throughput) << ',' << mptsim::format_sig6(p.tg)
               << '\n';
  out.close();
  if (out.to_file()) std::cout << out.path().string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mptsim: single-path vs. multipath transport on random hierarchical networks"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  GlobalOptions g;
  bool list_keys = false;
  app.add_option("--config", g.config_file, "Config file of `key = value` lines")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Simulation seed (gen/stats: topology seed)");
  app.add_option("--out", g.out_dir, "Output directory (default: stdout / current directory)");
  app.add_option("--mode", g.mode, "Transport mode")->check(CLI::IsMember({"sp", "mp"}));
  app.add_option("--ticks", g.ticks, "Simulated ticks per run")->check(CLI::PositiveNumber);
  app.add_option("--mp-scale", g.mp_scale,
                 "Multiply every multi-parent probability (0.2: low multi-parent preset)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--set", g.sets, "Config override `key=value` (repeatable)");
  app.add_flag("--list-keys", list_keys, "Print every config key with its default and exit");

  auto* gen = app.add_subcommand("gen", "Build a topology and save it (topology.txt)");
  app.add_subcommand("run", "Run one simulation and emit its tick trace (trace.csv)");
  auto* sweep = app.add_subcommand("sweep", "Run one experiment (FIG7..FIG12, CUSTOM)");
  std::optional<std::string> experiment;
  sweep->add_option("--experiment,-e", experiment, "Experiment id (overrides experiment.id)");
  auto* compare = app.add_subcommand("compare", "SP vs. MP on shared seeds; emits TG (compare.csv)");
  std::optional<std::string> scope;
  std::optional<double> lambda;
  compare->add_option("--scope", scope, "Pair scope")
      ->check(CLI::IsMember({"entire-network", "single-pair"}));
  compare->add_option("--lambda", lambda, "Arrival rate")->check(CLI::PositiveNumber);
  auto* stats = app.add_subcommand("stats", "Report topology statistics (stats.txt)");
  std::optional<std::string> topology_file;
  stats->add_option("topology", topology_file, "Topology file (default: generate from config)")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (list_keys) {
    mptsim::write_config_reference(std::cout);
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitConfig;
  }

  Command command = Command::kRun;
  if (*gen) command = Command::kGen;
  else if (*sweep) command = Command::kSweep;
  else if (*compare) command = Command::kCompare;
  else if (*stats) command = Command::kStats;

  mptsim::HarnessConfig config;
  try {
    config = build_config(g, command);
    if (experiment) config.experiment = mptsim::parse_experiment_id(*experiment);
    if (scope) mptsim::apply_config_value(config, "pair_scope", *scope);
    if (lambda) config.sim.arrival.lambda = *lambda;
    config.validate();
  } catch (const mptsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    config = mptsim::apply_calibration(config, &std::cerr);
    switch (command) {
      case Command::kGen: return cmd_gen(config, g);
      case Command::kRun: return cmd_run(config, g);
      case Command::kSweep: return cmd_sweep(config, g);
      case Command::kCompare: return cmd_compare(config, g);
      case Command::kStats: return cmd_stats(config, g, topology_file);
    }
  } catch (const mptsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
