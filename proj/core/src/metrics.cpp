#include "mptsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mptsim {

const char* to_string(Verdict verdict) {
  return verdict == Verdict::kSteady ? "STEADY" : "UNSTEADY";
}

StabilityReport classify_stability(const TimeSeries& series, std::uint64_t warmup,
                                   const StabilityThresholds& thresholds) {
  if (series.size() <= warmup || series.size() - warmup < thresholds.min_ticks) {
    throw SeriesTooShort("stability needs at least " + std::to_string(thresholds.min_ticks) +
                         " post-warmup ticks, got " +
                         std::to_string(series.size() > warmup ? series.size() - warmup : 0));
  }
  const auto first = series.begin() + static_cast<std::ptrdiff_t>(warmup);
  const auto n = static_cast<double>(series.end() - first);

  double mean_t = 0.0;
  double mean_a = 0.0;
  double mean_arrivals = 0.0;
  for (auto it = first; it != series.end(); ++it) {
    mean_t += static_cast<double>(it->tick);
    mean_a += static_cast<double>(it->active_services);
    mean_arrivals += static_cast<double>(it->arrivals);
  }
  mean_t /= n;
  mean_a /= n;
  mean_arrivals /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (auto it = first; it != series.end(); ++it) {
    const double dt = static_cast<double>(it->tick) - mean_t;
    sxy += dt * (static_cast<double>(it->active_services) - mean_a);
    sxx += dt * dt;
  }

  std::vector<double> backlog;
  backlog.reserve(static_cast<std::size_t>(n));
  for (auto it = first; it != series.end(); ++it) {
    backlog.push_back(static_cast<double>(it->active_services));
  }
  const std::size_t mid = backlog.size() / 2;
  std::nth_element(backlog.begin(), backlog.begin() + static_cast<std::ptrdiff_t>(mid),
                   backlog.end());
  double median = backlog[mid];
  if (backlog.size() % 2 == 0) {
    const double lower = *std::max_element(backlog.begin(),
                                           backlog.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }

  StabilityReport report;
  report.backlog_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  report.median_backlog = median;
  const auto tail = static_cast<std::ptrdiff_t>(
      std::clamp<std::uint64_t>(thresholds.tail_window, 1, static_cast<std::uint64_t>(n)));
  double tail_sum = 0.0;
  for (auto it = series.end() - tail; it != series.end(); ++it) {
    tail_sum += static_cast<double>(it->active_services);
  }
  report.final_backlog = tail_sum / static_cast<double>(tail);
  const double slope_limit = std::max(thresholds.slope_threshold,
                                      thresholds.relative_slope_threshold * mean_arrivals);
  const bool drifting = report.backlog_slope > slope_limit;
  const bool blown_up = report.final_backlog > thresholds.blowup_factor * median &&
                        report.final_backlog - median > thresholds.blowup_min_excess;
  report.verdict = drifting || blown_up ? Verdict::kUnsteady : Verdict::kSteady;
  return report;
}

RunSummary summarize(const TimeSeries& series, std::uint64_t warmup,
                     const StabilityThresholds& thresholds) {
  if (series.empty()) throw SeriesTooShort("cannot summarize an empty series");
  if (warmup >= series.size()) throw SeriesTooShort("warmup covers the whole series");

  auto mean_per_service = [&](std::size_t begin) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = begin; i < series.size(); ++i) {
      if (series[i].served == 0) continue;
      sum += series[i].mean_service_throughput;
      ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
  };

  RunSummary s;
  s.mean_throughput_full = mean_per_service(0);
  s.mean_throughput_steady = mean_per_service(warmup);
  double total = 0.0;
  for (std::size_t i = warmup; i < series.size(); ++i) total += series[i].total_throughput;
  s.mean_total_throughput_steady = total / static_cast<double>(series.size() - warmup);

  const StabilityReport report = classify_stability(series, warmup, thresholds);
  s.verdict = report.verdict;
  s.backlog_slope = report.backlog_slope;
  return s;
}

double throughput_gain(const RunSummary& mp, const RunSummary& sp) {
  if (!(sp.mean_throughput_steady > 0.0)) {
    throw std::invalid_argument("throughput gain needs a positive SP throughput");
  }
  return mp.mean_throughput_steady / sp.mean_throughput_steady;
}

Verdict search_verdict(const SimConfig& config, const LambdaSearch& search,
                       const std::shared_ptr<RouteCache>& routes) {
  Simulation sim(config, routes);
  TimeSeries series;
  series.reserve(config.ticks);
  const double cutoff = search.overload_factor * config.arrival.lambda;
  for (std::uint64_t t = 0; t < config.ticks; ++t) {
    series.push_back(sim.step());
    if (search.overload_factor > 0.0 && t >= config.warmup &&
        static_cast<double>(series.back().active_services) > cutoff) {
      return Verdict::kUnsteady;
    }
  }
  return classify_stability(series, config.warmup, search.thresholds).verdict;
}

std::uint32_t count_steady(const SimConfig& base, Mode mode, double lambda,
                           const LambdaSearch& search, const std::shared_ptr<RouteCache>& routes) {
  std::uint32_t steady = 0;
  for (std::uint32_t r = 0; r < search.replications; ++r) {
    SimConfig c = base;
    c.mode = mode;
    c.arrival.lambda = lambda;
    c.seed = base.seed + r;
    if (search_verdict(c, search, routes) == Verdict::kSteady) ++steady;
  }
  return steady;
}

LambdaMaxResult find_lambda_max(const SimConfig& base, Mode mode, const LambdaSearch& search,
                                const std::shared_ptr<RouteCache>& routes) {
  if (!(search.lambda_lo < search.lambda_hi) || !(search.resolution > 0.0) ||
      search.replications == 0) {
    throw std::invalid_argument("lambda search needs lo < hi, resolution > 0, replications > 0");
  }
  const auto steps =
      static_cast<std::int64_t>(std::floor((search.lambda_hi - search.lambda_lo) / search.resolution + 1e-9));
  const std::uint32_t majority = (search.replications + 1) / 2;
  auto grid = [&](std::int64_t k) { return search.lambda_lo + static_cast<double>(k) * search.resolution; };

  LambdaMaxResult result;
  auto steady_at = [&](std::int64_t k) {
    const double lambda = grid(k);
    if (auto it = result.steady_votes.find(lambda); it != result.steady_votes.end()) {
      return it->second >= majority;
    }
    // Seeds run in order until the majority is decided either way.
    std::uint32_t votes = 0;
    for (std::uint32_t r = 0; r < search.replications; ++r) {
      SimConfig c = base;
      c.mode = mode;
      c.arrival.lambda = lambda;
      c.seed = base.seed + r;
      ++result.runs;
      if (search_verdict(c, search, routes) == Verdict::kSteady) ++votes;
      if (votes >= majority || r + 1 - votes > search.replications - majority) break;
    }
    result.steady_votes[lambda] = votes;
    return votes >= majority;
  };

  if (steady_at(steps)) {
    throw RangeExhausted("every lambda up to " + std::to_string(grid(steps)) + " is steady", true);
  }
  if (!steady_at(0)) {
    throw RangeExhausted("already unsteady at lambda " + std::to_string(grid(0)), false);
  }
  std::int64_t lo = 0;
  std::int64_t hi = steps;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (steady_at(mid) ? lo : hi) = mid;
  }
  if (lo > 0) result.monotone_at_boundary = steady_at(lo - 1);
  result.lambda_max = grid(lo);
  return result;
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("correlation needs two equal-length samples of size >= 2");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace mptsim
