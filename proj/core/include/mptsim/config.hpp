#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mptsim/engine.hpp"
#include "mptsim/metrics.hpp"

namespace mptsim {

/// Any problem with configuration text, keys or values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentId : std::uint8_t { kFig7, kFig8, kFig9, kFig10, kFig11, kFig12, kCustom };

const char* to_string(ExperimentId id);
/// Accepts FIG7..FIG12 and CUSTOM, case-insensitive. Throws ConfigError.
ExperimentId parse_experiment_id(const std::string& text);

/// Sweep axes for CUSTOM experiments.
enum class Axis : std::uint8_t { kLambda, kMeanSize, kMultiParentScale, kMeanChildren };

const char* to_string(Axis axis);
Axis parse_axis(const std::string& text);

/// Capacity calibration: the smallest capacity at `level` (on the grid
/// lo, lo + resolution, ..., hi) for which SP with mean size `mean_size`
/// is STEADY at `lambda` in at least `min_steady` of the replication seeds.
struct CalibrationSpec {
  bool enabled = false;
  int level = 2;
  double lambda = 300.0;
  double mean_size = 10.0;
  double capacity_lo = 50.0;
  double capacity_hi = 200.0;
  double resolution = 1.0;
  std::uint32_t min_steady = 0;  // 0: every replication
};

/// Everything a CLI invocation can set, with the defaults of the reference
/// setup.
struct HarnessConfig {
  SimConfig sim;
  LambdaSearch search;  // lambda grid for single lambda_max searches
  /// Offered-load grid (lambda x mean size) used by the FIG9/FIG12 searches,
  /// so one grid serves every service size.
  double load_lo = 500.0;
  double load_hi = 16000.0;
  double load_resolution = 100.0;

  ExperimentId experiment = ExperimentId::kCustom;
  std::optional<Axis> axis;   // CUSTOM only
  std::vector<double> values;  // empty: the experiment's default grid
  /// Operating lambda of the FIG11 throughput-gain sweep.
  double tg_lambda = 250.0;
  std::uint32_t replications = 5;
  unsigned threads = 0;  // 0: hardware concurrency
  /// Multiplier on every multi-parent probability, applied after all keys.
  double mp_scale = 1.0;
  CalibrationSpec calibration;

  /// Throws ConfigError.
  void validate() const;
  /// Topology parameters with mp_scale applied.
  TopologyParams effective_topology() const;
};

/// Parses flat `key = value` lines. `#` starts a comment; blank lines are
/// skipped. Duplicate keys are errors. Throws ConfigError with line numbers.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in);

/// Applies one key. Unknown keys and malformed values throw ConfigError.
void apply_config_value(HarnessConfig& config, const std::string& key, const std::string& value);

HarnessConfig load_config(std::istream& in, HarnessConfig base = {});
HarnessConfig load_config_file(const std::string& path, HarnessConfig base = {});

/// Every effective key with its value, sorted by key. Feeding the result
/// back through apply_config_value reproduces the configuration.
std::vector<std::pair<std::string, std::string>> config_entries(const HarnessConfig& config);

/// FNV-1a 64 of the canonical `key = value` dump (minus experiment.threads),
/// as 16 hex digits.
std::string config_hash(const HarnessConfig& config);

/// One line per key: name, default and meaning.
void write_config_reference(std::ostream& out);

}  // namespace mptsim
