#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mptsim/config.hpp"
#include "mptsim/engine.hpp"
#include "mptsim/metrics.hpp"

namespace mptsim {

/// Runs fn(0) .. fn(count - 1) on up to `threads` workers (0: hardware
/// concurrency). Each index runs exactly once; the first exception thrown
/// by any job is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Simulation seeds of the replications: seed, seed + 1, ...
std::vector<std::uint64_t> replication_seeds(const HarnessConfig& config);

/// `# mptsim v1 experiment=<label> seed=<s1,s2,...> config-hash=<hex>`.
/// The label is an experiment id, or RUN / COMPARE for single commands.
void write_provenance(std::ostream& out, std::string_view label,
                      const std::vector<std::uint64_t>& seeds, const HarnessConfig& config);

/// The configuration with one axis value applied. kMultiParentScale
/// multiplies every multi-parent probability; kMeanChildren sets the mean
/// child count of every level.
HarnessConfig with_axis(HarnessConfig config, Axis axis, double value);

/// Multi-parent sweep coupling: level-2 and level-3 MPin set to `p`,
/// level-3 MPout to p / 2.
HarnessConfig with_multi_parent_probability(HarnessConfig config, double p);

/// Builds (or loads) the topology of `config` and an empty route cache.
std::shared_ptr<RouteCache> make_routes(const HarnessConfig& config);

struct CalibrationResult {
  double capacity = 0.0;
  /// Steady-run count per evaluated capacity.
  std::vector<std::pair<double, std::uint32_t>> votes;
};

/// Smallest grid capacity of calibration.level at which SP is STEADY at
/// calibration.lambda in calibration.min_steady replications, by bisection
/// (steadiness is assumed to be monotone in capacity).
/// Throws RangeExhausted when the grid never or always is steady.
CalibrationResult calibrate_capacity(const HarnessConfig& config);

/// Runs the calibration when enabled and stores the capacity in the
/// topology parameters; otherwise returns the configuration unchanged.
HarnessConfig apply_calibration(HarnessConfig config, std::ostream* log = nullptr);

/// Steady-state throughput of one (axis value, mode) sweep point.
struct ThroughputPoint {
  double axis = 0.0;
  Mode mode = Mode::kSP;
  std::vector<RunSummary> runs;  // one per replication seed
  double mean_throughput = 0.0;  // mean of runs[i].mean_throughput_steady
  std::uint32_t steady_runs = 0;
  Verdict verdict = Verdict::kSteady;  // majority
};

/// Both modes at every value, replications on each. Sorted by axis, SP first.
std::vector<ThroughputPoint> throughput_sweep(const HarnessConfig& config, Axis axis,
                                              const std::vector<double>& values);

struct CapacityPoint {
  double axis = 0.0;
  Mode mode = Mode::kSP;
  double mean_size = 0.0;
  std::optional<double> lambda_max;  // unset when the range was exhausted
  LambdaMaxResult search;
  std::string note;  // range-exhaustion message
};

/// lambda_max for both modes at every value of `axis` (kMeanSize or
/// kMeanChildren). The grid is the load grid divided by the mean size.
std::vector<CapacityPoint> lambda_max_sweep(const HarnessConfig& config, Axis axis,
                                            const std::vector<double>& values);

struct GainPoint {
  double axis = 0.0;
  PairScope scope = PairScope::kEntireNetwork;
  double sp_throughput = 0.0;  // replication mean
  double mp_throughput = 0.0;
  double tg = 0.0;  // mp_throughput / sp_throughput
  std::uint32_t sp_steady_runs = 0;
  std::uint32_t mp_steady_runs = 0;
  std::optional<std::pair<NodeId, NodeId>> pair;
};

/// Throughput gain of `config` as configured (its lambda and pair scope):
/// SP and MP runs share topology and seeds.
GainPoint compare_modes(const HarnessConfig& config);

/// TG against lambda for each scope in `scopes`.
std::vector<GainPoint> gain_vs_lambda(const HarnessConfig& config,
                                      const std::vector<double>& lambdas,
                                      const std::vector<PairScope>& scopes);

/// TG at config.tg_lambda against the coupled multi-parent probability.
std::vector<GainPoint> gain_vs_multi_parent(const HarnessConfig& config,
                                            const std::vector<double>& probabilities);

/// Default axis grid of each experiment.
std::vector<double> default_values(ExperimentId id);

/// Runs config.experiment and writes its CSV files into `out_dir`.
/// Returns the written paths.
std::vector<std::filesystem::path> run_experiment(const HarnessConfig& config,
                                                  const std::filesystem::path& out_dir);

}  // namespace mptsim
