#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mptsim/engine.hpp"

namespace mptsim {

enum class Verdict : std::uint8_t { kSteady, kUnsteady };

const char* to_string(Verdict verdict);

struct StabilityThresholds {
  double slope_threshold = 0.02;  // services per tick
  /// Drift is also measured against load: the slope must exceed this
  /// fraction of the mean post-warmup arrivals per tick.
  double relative_slope_threshold = 0.001;
  double blowup_factor = 3.0;     // final backlog vs. post-warmup median
  /// The blowup rule also needs final - median above this many services,
  /// so a near-empty network (median 0 or 1) is not flagged on noise.
  double blowup_min_excess = 10.0;
  /// The "final" backlog is the mean over this many closing ticks, so a
  /// one-tick arrival burst does not read as a blowup.
  std::uint64_t tail_window = 20;
  std::uint64_t min_ticks = 100;  // post-warmup ticks required
};

struct StabilityReport {
  Verdict verdict = Verdict::kSteady;
  double backlog_slope = 0.0;
  double median_backlog = 0.0;
  double final_backlog = 0.0;  // mean over the tail window
};

struct RunSummary {
  /// Time-averaged mean per-service throughput (ticks that served nothing
  /// are skipped), over all ticks and over post-warmup ticks.
  double mean_throughput_full = 0.0;
  double mean_throughput_steady = 0.0;
  /// Time-averaged aggregate throughput over post-warmup ticks.
  double mean_total_throughput_steady = 0.0;
  Verdict verdict = Verdict::kSteady;
  double backlog_slope = 0.0;
};

class SeriesTooShort : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Least-squares slope of active services over post-warmup ticks; UNSTEADY
/// iff slope > max(slope_threshold, relative_slope_threshold x mean
/// arrivals per tick), or the final backlog exceeds
/// blowup_factor x the post-warmup median (by more than blowup_min_excess).
/// The final backlog is averaged over the last tail_window ticks.
StabilityReport classify_stability(const TimeSeries& series, std::uint64_t warmup,
                                   const StabilityThresholds& thresholds = {});

RunSummary summarize(const TimeSeries& series, std::uint64_t warmup,
                     const StabilityThresholds& thresholds = {});

/// mp.mean_throughput_steady / sp.mean_throughput_steady.
double throughput_gain(const RunSummary& mp, const RunSummary& sp);

class RangeExhausted : public std::runtime_error {
 public:
  RangeExhausted(const std::string& what, bool all_steady)
      : std::runtime_error(what), all_steady_(all_steady) {}
  bool all_steady() const { return all_steady_; }

 private:
  bool all_steady_;
};

struct LambdaSearch {
  double lambda_lo = 50.0;
  double lambda_hi = 800.0;
  double resolution = 10.0;
  std::uint32_t replications = 5;
  StabilityThresholds thresholds;
  /// A search run stops early, counted UNSTEADY, once its post-warmup
  /// backlog exceeds this many ticks of arrivals (backlog > factor x lambda:
  /// by Little's law a mean sojourn no steady run comes near). 0 disables.
  double overload_factor = 100.0;
};

struct LambdaMaxResult {
  double lambda_max = 0.0;
  /// Steady-run count per evaluated grid point. Seeds stop once the
  /// majority is decided, so counts above the majority are not recorded.
  std::map<double, std::uint32_t> steady_votes;
  /// The grid point just below lambda_max was also steady (when it exists).
  bool monotone_at_boundary = true;
  std::uint32_t runs = 0;  // simulations actually run
};

/// Largest grid lambda (lo + k * resolution <= hi) at which at least
/// ceil(replications / 2) runs with seeds base.seed, base.seed + 1, ... are
/// STEADY, by bisection on the grid. Throws RangeExhausted when the whole
/// grid is steady or unsteady.
LambdaMaxResult find_lambda_max(const SimConfig& base, Mode mode, const LambdaSearch& search,
                                const std::shared_ptr<RouteCache>& routes);

/// Number of STEADY runs among `search.replications` seeded runs at one lambda.
std::uint32_t count_steady(const SimConfig& base, Mode mode, double lambda,
                           const LambdaSearch& search, const std::shared_ptr<RouteCache>& routes);

/// One search run: the full-length verdict, or UNSTEADY as soon as the
/// overload cutoff trips.
Verdict search_verdict(const SimConfig& config, const LambdaSearch& search,
                       const std::shared_ptr<RouteCache>& routes);

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mptsim
