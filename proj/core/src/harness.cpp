#include "mptsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "mptsim/format.hpp"

namespace mptsim {

namespace {

SimConfig sim_config(const HarnessConfig& config) {
  SimConfig sim = config.sim;
  sim.topology = config.effective_topology();
  return sim;
}

std::uint32_t majority(std::uint32_t replications) { return (replications + 1) / 2; }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw std::runtime_error("error writing '" + path.string() + "'");
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_sig6(*value) : std::string("nan");
}

}  // namespace

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

std::vector<std::uint64_t> replication_seeds(const HarnessConfig& config) {
  std::vector<std::uint64_t> seeds;
  for (std::uint32_t r = 0; r < config.replications; ++r) seeds.push_back(config.sim.seed + r);
  return seeds;
}

void write_provenance(std::ostream& out, std::string_view label,
                      const std::vector<std::uint64_t>& seeds, const HarnessConfig& config) {
  out << "# mptsim v1 experiment=" << label << " seed=";
  for (std::size_t i = 0; i < seeds.size(); ++i) out << (i ? "," : "") << seeds[i];
  out << " config-hash=" << config_hash(config) << '\n';
}

HarnessConfig with_axis(HarnessConfig config, Axis axis, double value) {
  switch (axis) {
    case Axis::kLambda:
      config.sim.arrival.lambda = value;
      break;
    case Axis::kMeanSize:
      config.sim.size.mean_size = value;
      break;
    case Axis::kMultiParentScale:
      config.mp_scale = value;
      break;
    case Axis::kMeanChildren:
      for (auto& lp : config.sim.topology.levels) lp.mean_children = value;
      break;
  }
  return config;
}

HarnessConfig with_multi_parent_probability(HarnessConfig config, double p) {
  auto& params = config.sim.topology;
  if (params.level_count() < 3) {
    throw ConfigError("the multi-parent sweep needs at least 3 levels");
  }
  params.level(2).p_mp_in = p;
  params.level(3).p_mp_in = p;
  params.level(3).p_mp_out = p / 2.0;
  return config;
}

std::shared_ptr<RouteCache> make_routes(const HarnessConfig& config) {
  return std::make_shared<RouteCache>(make_topology(sim_config(config)));
}

CalibrationResult calibrate_capacity(const HarnessConfig& config) {
  const CalibrationSpec& spec = config.calibration;
  HarnessConfig base = config;
  base.sim.mode = Mode::kSP;
  base.sim.pair_scope = PairScope::kEntireNetwork;
  base.sim.arrival.lambda = spec.lambda;
  base.sim.size.mean_size = spec.mean_size;

  LambdaSearch search = config.search;
  search.replications = config.replications;

  const auto steps =
      static_cast<std::int64_t>(std::floor((spec.capacity_hi - spec.capacity_lo) / spec.resolution + 1e-9));
  auto grid = [&](std::int64_t k) { return spec.capacity_lo + static_cast<double>(k) * spec.resolution; };

  const std::uint32_t required = spec.min_steady ? spec.min_steady : config.replications;
  CalibrationResult result;
  std::shared_ptr<RouteCache> routes;
  std::map<std::int64_t, bool> known;
  auto steady_at = [&](std::int64_t k) {
    if (auto it = known.find(k); it != known.end()) return it->second;
    HarnessConfig c = base;
    c.sim.topology.level(spec.level).capacity = grid(k);
    auto topology = std::make_shared<const Topology>(build_topology(c.effective_topology()));
    routes = routes ? routes->rebind(topology) : std::make_shared<RouteCache>(topology);
    std::uint32_t votes = 0;
    for (std::uint64_t seed : replication_seeds(c)) {
      SimConfig sim = sim_config(c);
      sim.seed = seed;
      if (search_verdict(sim, search, routes) == Verdict::kSteady) ++votes;
    }
    result.votes.emplace_back(grid(k), votes);
    return known[k] = votes >= required;
  };

  if (!steady_at(steps)) {
    throw RangeExhausted("SP is unsteady at lambda " + format_real(spec.lambda) +
                             " for every capacity up to " + format_real(grid(steps)),
                         false);
  }
  if (steady_at(0)) {
    throw RangeExhausted("SP is already steady at capacity " + format_real(grid(0)), true);
  }
  std::int64_t lo = 0;  // unsteady
  std::int64_t hi = steps;  // steady
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (steady_at(mid) ? hi : lo) = mid;
  }
  result.capacity = grid(hi);
  std::sort(result.votes.begin(), result.votes.end());
  return result;
}

HarnessConfig apply_calibration(HarnessConfig config, std::ostream* log) {
  if (!config.calibration.enabled) return config;
  const CalibrationResult result = calibrate_capacity(config);
  config.sim.topology.level(config.calibration.level).capacity = result.capacity;
  if (log) {
    *log << "calibrated level" << config.calibration.level
         << ".capacity = " << format_real(result.capacity) << '\n';
  }
  return config;
}

std::vector<ThroughputPoint> throughput_sweep(const HarnessConfig& config, Axis axis,
                                              const std::vector<double>& values) {
  const auto seeds = replication_seeds(config);
  const bool shared_topology = axis == Axis::kLambda || axis == Axis::kMeanSize;

  std::vector<HarnessConfig> point_configs;
  std::vector<std::shared_ptr<RouteCache>> routes;
  for (double v : values) {
    point_configs.push_back(with_axis(config, axis, v));
    if (!shared_topology || routes.empty()) routes.push_back(make_routes(point_configs.back()));
    else routes.push_back(routes.front());
  }

  constexpr Mode kModes[] = {Mode::kSP, Mode::kMP};
  std::vector<ThroughputPoint> points(values.size() * 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].axis = values[i / 2];
    points[i].mode = kModes[i % 2];
    points[i].runs.resize(seeds.size());
  }
  parallel_for(points.size() * seeds.size(), config.threads, [&](std::size_t job) {
    const std::size_t p = job / seeds.size();
    const std::size_t r = job % seeds.size();
    SimConfig sim = sim_config(point_configs[p / 2]);
    sim.mode = points[p].mode;
    sim.seed = seeds[r];
    const RunResult result = run(sim, routes[p / 2]);
    points[p].runs[r] = summarize(result.series, sim.warmup, config.search.thresholds);
  });
  for (ThroughputPoint& point : points) {
    double sum = 0.0;
    for (const RunSummary& s : point.runs) {
      sum += s.mean_throughput_steady;
      if (s.verdict == Verdict::kSteady) ++point.steady_runs;
    }
    point.mean_throughput = sum / static_cast<double>(point.runs.size());
    point.verdict = point.steady_runs >= majority(config.replications) ? Verdict::kSteady
                                                                       : Verdict::kUnsteady;
  }
  return points;
}

std::vector<CapacityPoint> lambda_max_sweep(const HarnessConfig& config, Axis axis,
                                            const std::vector<double>& values) {
  if (axis != Axis::kMeanSize && axis != Axis::kMeanChildren) {
    throw ConfigError("lambda_max sweeps run over mean_size or mean_children");
  }
  std::vector<HarnessConfig> point_configs;
  std::vector<std::shared_ptr<RouteCache>> routes;
  for (double v : values) {
    point_configs.push_back(with_axis(config, axis, v));
    if (axis == Axis::kMeanChildren || routes.empty()) routes.push_back(make_routes(point_configs.back()));
    else routes.push_back(routes.front());
  }

  constexpr Mode kModes[] = {Mode::kSP, Mode::kMP};
  std::vector<CapacityPoint> points(values.size() * 2);
  parallel_for(points.size(), config.threads, [&](std::size_t i) {
    const HarnessConfig& c = point_configs[i / 2];
    CapacityPoint& point = points[i];
    point.axis = values[i / 2];
    point.mode = kModes[i % 2];
    point.mean_size = c.sim.size.mean_size;

    LambdaSearch search = c.search;
    search.replications = c.replications;
    search.lambda_lo = c.load_lo / point.mean_size;
    search.lambda_hi = c.load_hi / point.mean_size;
    search.resolution = c.load_resolution / point.mean_size;
    try {
      point.search = find_lambda_max(sim_config(c), point.mode, search, routes[i / 2]);
      point.lambda_max = point.search.lambda_max;
    } catch (const RangeExhausted& e) {
      point.note = e.what();
    }
  });
  return points;
}

namespace {

struct GainJob {
  std::size_t point = 0;
  Mode mode = Mode::kSP;
  std::size_t replication = 0;
};

// Runs every (point, mode, seed) combination and fills the TG fields.
void evaluate_gains(std::vector<GainPoint>& points, const std::vector<HarnessConfig>& configs,
                    const std::vector<std::shared_ptr<RouteCache>>& routes,
                    const HarnessConfig& base) {
  const auto seeds = replication_seeds(base);
  const std::size_t per_point = 2 * seeds.size();
  std::vector<RunSummary> summaries(points.size() * per_point);
  parallel_for(summaries.size(), base.threads, [&](std::size_t job) {
    const std::size_t p = job / per_point;
    const Mode mode = (job % per_point) < seeds.size() ? Mode::kSP : Mode::kMP;
    SimConfig sim = sim_config(configs[p]);
    sim.mode = mode;
    sim.pair_scope = points[p].scope;
    sim.pair = points[p].pair;
    sim.seed = seeds[job % seeds.size()];
    const RunResult result = run(sim, routes[p]);
    summaries[job] = summarize(result.series, sim.warmup, base.search.thresholds);
  });
  for (std::size_t p = 0; p < points.size(); ++p) {
    double sp = 0.0;
    double mp = 0.0;
    for (std::size_t r = 0; r < seeds.size(); ++r) {
      const RunSummary& s = summaries[p * per_point + r];
      const RunSummary& m = summaries[p * per_point + seeds.size() + r];
      sp += s.mean_throughput_steady;
      mp += m.mean_throughput_steady;
      if (s.verdict == Verdict::kSteady) ++points[p].sp_steady_runs;
      if (m.verdict == Verdict::kSteady) ++points[p].mp_steady_runs;
    }
    points[p].sp_throughput = sp / static_cast<double>(seeds.size());
    points[p].mp_throughput = mp / static_cast<double>(seeds.size());
    RunSummary sp_mean;
    RunSummary mp_mean;
    sp_mean.mean_throughput_steady = points[p].sp_throughput;
    mp_mean.mean_throughput_steady = points[p].mp_throughput;
    points[p].tg = throughput_gain(mp_mean, sp_mean);
  }
}

std::optional<std::pair<NodeId, NodeId>> probe_pair(const HarnessConfig& config,
                                                    RouteCache& routes) {
  if (config.sim.pair) return config.sim.pair;
  auto pair = select_multipath_pair(routes);
  if (!pair) throw std::runtime_error("no leaf pair admits two paths");
  return pair;
}

}  // namespace

GainPoint compare_modes(const HarnessConfig& config) {
  auto routes = make_routes(config);
  GainPoint point;
  point.axis = config.sim.arrival.lambda;
  point.scope = config.sim.pair_scope;
  if (point.scope == PairScope::kSinglePair) point.pair = probe_pair(config, *routes);
  std::vector<GainPoint> points{point};
  evaluate_gains(points, {config}, {routes}, config);
  return points.front();
}

std::vector<GainPoint> gain_vs_lambda(const HarnessConfig& config,
                                      const std::vector<double>& lambdas,
                                      const std::vector<PairScope>& scopes) {
  auto routes = make_routes(config);
  std::optional<std::pair<NodeId, NodeId>> pair;
  if (std::find(scopes.begin(), scopes.end(), PairScope::kSinglePair) != scopes.end()) {
    pair = probe_pair(config, *routes);
  }
  std::vector<GainPoint> points;
  std::vector<HarnessConfig> configs;
  for (double lambda : lambdas) {
    for (PairScope scope : scopes) {
      GainPoint p;
      p.axis = lambda;
      p.scope = scope;
      if (scope == PairScope::kSinglePair) p.pair = pair;
      points.push_back(p);
      configs.push_back(with_axis(config, Axis::kLambda, lambda));
    }
  }
  evaluate_gains(points, configs, std::vector(points.size(), routes), config);
  return points;
}

std::vector<GainPoint> gain_vs_multi_parent(const HarnessConfig& config,
                                            const std::vector<double>& probabilities) {
  std::vector<GainPoint> points;
  std::vector<HarnessConfig> configs;
  std::vector<std::shared_ptr<RouteCache>> routes;
  for (double p : probabilities) {
    HarnessConfig c = with_multi_parent_probability(config, p);
    c.sim.arrival.lambda = config.tg_lambda;
    routes.push_back(make_routes(c));
    GainPoint point;
    point.axis = p;
    point.scope = c.sim.pair_scope;
    if (point.scope == PairScope::kSinglePair) point.pair = probe_pair(c, *routes.back());
    points.push_back(point);
    configs.push_back(std::move(c));
  }
  evaluate_gains(points, configs, routes, config);
  return points;
}

std::vector<double> default_values(ExperimentId id) {
  switch (id) {
    case ExperimentId::kFig7:
      return {300, 340};
    case ExperimentId::kFig8:
    case ExperimentId::kFig10:
      return {50, 100, 150, 200, 250, 300, 350, 400, 450, 500};
    case ExperimentId::kFig9:
      return {5, 10, 20, 40};
    case ExperimentId::kFig11:
      return {0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.18, 0.20};
    case ExperimentId::kFig12:
      return {6, 8, 10, 12, 14, 16};
    case ExperimentId::kCustom:
      return {};
  }
  return {};
}

std::vector<std::filesystem::path> run_experiment(const HarnessConfig& config,
                                                  const std::filesystem::path& out_dir) {
  config.validate();
  const std::vector<double> values =
      config.values.empty() ? default_values(config.experiment) : config.values;
  if (values.empty()) throw ConfigError("CUSTOM experiments need experiment.values");
  std::filesystem::create_directories(out_dir);

  const ExperimentId id = config.experiment;
  const auto seeds = replication_seeds(config);
  std::vector<std::filesystem::path> written;
  auto begin_file = [&](const std::string& name, const std::vector<std::uint64_t>& file_seeds) {
    written.push_back(out_dir / name);
    std::ofstream out = open_output(written.back());
    write_provenance(out, to_string(id), file_seeds, config);
    return out;
  };

  switch (id) {
    case ExperimentId::kFig7: {
      auto routes = make_routes(config);
      struct Trace {
        Mode mode;
        double lambda;
        TimeSeries series;
      };
      std::vector<Trace> traces;
      for (Mode mode : {Mode::kSP, Mode::kMP}) {
        for (double lambda : values) traces.push_back({mode, lambda, {}});
      }
      parallel_for(traces.size(), config.threads, [&](std::size_t i) {
        SimConfig sim = sim_config(config);
        sim.mode = traces[i].mode;
        sim.arrival.lambda = traces[i].lambda;
        traces[i].series = run(sim, routes).series;
      });
      for (const Trace& t : traces) {
        const std::string name = std::string("fig7_") + to_string(t.mode) + "_lambda" +
                                 format_real(t.lambda) + ".csv";
        std::ofstream out = begin_file(name, {config.sim.seed});
        write_trace_csv(t.series, out);
        close_output(out, written.back());
      }
      break;
    }
    case ExperimentId::kFig8:
    case ExperimentId::kCustom: {
      const Axis axis = id == ExperimentId::kFig8 ? Axis::kLambda : config.axis.value_or(Axis::kLambda);
      const auto points = throughput_sweep(config, axis, values);
      std::ofstream out = begin_file(id == ExperimentId::kFig8 ? "fig8.csv" : "custom.csv", seeds);
      out << to_string(axis) << ",mode,mean_throughput,verdict\n";
      for (const ThroughputPoint& p : points) {
        out << format_real(p.axis) << ',' << to_string(p.mode) << ','
            << format_sig6(p.mean_throughput) << ',' << to_string(p.verdict) << '\n';
      }
      close_output(out, written.back());
      break;
    }
    case ExperimentId::kFig9:
    case ExperimentId::kFig12: {
      const bool fig9 = id == ExperimentId::kFig9;
      const auto points =
          lambda_max_sweep(config, fig9 ? Axis::kMeanSize : Axis::kMeanChildren, values);
      std::ofstream out = begin_file(fig9 ? "fig9.csv" : "fig12.csv", seeds);
      out << (fig9 ? "mean_size,mode,lambda_max,product\n" : "mean_children,mode,lambda_max\n");
      for (const CapacityPoint& p : points) {
        out << format_real(p.axis) << ',' << to_string(p.mode) << ','
            << format_optional(p.lambda_max);
        if (fig9) {
          out << ','
              << format_optional(p.lambda_max ? std::optional(*p.lambda_max * p.mean_size)
                                              : std::nullopt);
        }
        out << '\n';
      }
      close_output(out, written.back());
      break;
    }
    case ExperimentId::kFig10: {
      const auto points = gain_vs_lambda(config, values,
                                         {PairScope::kSinglePair, PairScope::kEntireNetwork});
      std::ofstream out = begin_file("fig10.csv", seeds);
      for (const GainPoint& p : points) {
        if (p.pair) {
          out << "# pair=" << p.pair->first << ',' << p.pair->second << '\n';
          break;
        }
      }
      out << "lambda,scope,tg\n";
      for (const GainPoint& p : points) {
        out << format_real(p.axis) << ',' << to_string(p.scope) << ',' << format_sig6(p.tg)
            << '\n';
      }
      close_output(out, written.back());
      break;
    }
    case ExperimentId::kFig11: {
      const auto points = gain_vs_multi_parent(config, values);
      std::ofstream out = begin_file("fig11.csv", seeds);
      out << "p_mp_in,tg\n";
      for (const GainPoint& p : points) {
        out << format_real(p.axis) << ',' << format_sig6(p.tg) << '\n';
      }
      close_output(out, written.back());
      break;
    }
  }
  return written;
}

}  // namespace mptsim
