// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criteria 3-8 run on the capacity-calibrated reference
// configuration; the calibration itself is reported first. Criterion ids on
// the command line restrict the run to those criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mptsim/format.hpp"
#include "mptsim/harness.hpp"
#include "mptsim/rng.hpp"
#include "mptsim_test/fixtures.hpp"

#ifndef MPTSIM_CLI_PATH
#error "MPTSIM_CLI_PATH must name the mptsim executable"
#endif

namespace {

using namespace mptsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) { return format_sig6(v); }

int g_failures = 0;
int g_reported = 0;
std::set<int> g_selected;

bool selected(int id) { return g_selected.empty() || g_selected.contains(id); }

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  if (!selected(id)) return;
  ++g_reported;
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++g_failures;
  std::printf("criterion %d %s: %s (%.1f s) %s\n", id, name.c_str(), o.pass ? "PASS" : "FAIL",
              seconds_since(start), o.detail.c_str());
  std::fflush(stdout);
}

void note(const std::string& line) {
  std::printf("# %s\n", line.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// 1. Oracle worksheet on the 9-node topology (MP mode, core scope).

Outcome oracle() {
  const auto start = Clock::now();
  auto routes = std::make_shared<RouteCache>(
      std::make_shared<const Topology>(mptsim_test::oracle_topology()));
  SimConfig c;
  c.mode = Mode::kMP;
  c.ticks = 5;
  c.warmup = 0;
  c.random_arrivals = false;
  Simulation sim(c, routes);
  sim.inject(5, 7, 5.0);
  sim.inject(6, 8, 12.0);

  // Per tick: throughput of services 0, 1, 2 (NAN: not active) and the
  // residual after the tick.
  struct Row {
    double tp[3];
    double residual[3];
  };
  const double x = NAN;
  const Row sheet[5] = {
      {{3, 6, x}, {2, 6, x}},
      {{2, 5, 2}, {0, 1, 5}},
      {{x, 9, 3}, {x, -8, 2}},
      {{x, x, 6}, {x, x, -4}},
      {{x, x, x}, {x, x, x}},
  };
  std::map<std::uint64_t, double> final_residual;
  double worst = 0.0;
  int mismatches = 0;
  auto check = [&](double got, double want) {
    worst = std::max(worst, std::abs(got - want));
    if (!(std::abs(got - want) <= 1e-9)) ++mismatches;
  };
  for (int t = 0; t < 5; ++t) {
    if (t == 1) sim.inject(7, 8, 7.0);
    const TickMetrics m = sim.step();
    double total = 0.0;
    std::set<std::uint64_t> seen;
    for (const ActiveService& a : sim.active()) {
      seen.insert(a.service.id);
      check(a.last_throughput, sheet[t].tp[a.service.id]);
      check(a.service.residual, sheet[t].residual[a.service.id]);
      total += a.last_throughput;
    }
    for (const CompletionRecord& r : sim.completions()) {
      if (r.completion_tick != m.tick) continue;
      seen.insert(r.id);
      check(r.last_throughput, sheet[t].tp[r.id]);
      check(r.initial_size - r.delivered, sheet[t].residual[r.id]);
      total += r.last_throughput;
    }
    for (std::uint64_t id = 0; id < 3; ++id) {
      if (!std::isnan(sheet[t].tp[id]) && !seen.contains(id)) ++mismatches;
    }
    check(m.total_throughput, total);
    if (sim.flow_table() != sim.recount()) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 1.0,
          "mismatches=" + std::to_string(mismatches) + " max_abs_error=" + fmt(worst) +
              " runtime=" + fmt(elapsed) + "s"};
}

// ---------------------------------------------------------------------------
// 2. CLI determinism.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "mptsim_acceptance_cli";
  fs::remove_all(root);
  const std::vector<std::string> commands = {
      "run --seed 7 --mode mp --ticks 300",
      "run --seed 7 --ticks 300 --set pair_scope=single-pair --set lambda=150",
      "sweep -e FIG8 --ticks 200 --set experiment.values=100,250 --set experiment.replications=2",
      "sweep -e FIG7 --ticks 200",
      "gen --seed 5",
      "compare --scope single-pair --lambda 120 --ticks 200 --set experiment.replications=2",
  };
  std::size_t files = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::vector<std::map<std::string, std::string>> outputs;
    for (const char* copy : {"a", "b"}) {
      const fs::path dir = root / (std::to_string(i) + copy);
      const std::string cmd = std::string("\"") + MPTSIM_CLI_PATH + "\" " + commands[i] +
                              " --out \"" + dir.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + commands[i]};
      std::map<std::string, std::string> contents;
      for (const auto& entry : fs::directory_iterator(dir)) {
        contents[entry.path().filename().string()] = slurp(entry.path());
      }
      outputs.push_back(std::move(contents));
    }
    if (outputs[0].empty()) return {false, "no output from: " + commands[i]};
    if (outputs[0] != outputs[1]) return {false, "outputs differ for: " + commands[i]};
    files += outputs[0].size();
  }
  fs::remove_all(root);
  return {true, std::to_string(commands.size()) + " invocations, " + std::to_string(files) +
                    " files byte-identical across repeats"};
}

// ---------------------------------------------------------------------------
// Shared results for criteria 3-8.

struct Shared {
  HarnessConfig config;
  std::vector<GainPoint> fig10;  // both scopes on the FIG8/FIG10 lambda grid
};

std::uint32_t majority(const HarnessConfig& c) { return (c.replications + 1) / 2; }

Outcome fig7_regimes(const Shared& s) {
  const auto start = Clock::now();
  const auto points = throughput_sweep(s.config, Axis::kLambda, {300, 340});
  const double elapsed = seconds_since(start);
  std::map<std::pair<double, Mode>, const ThroughputPoint*> at;
  for (const auto& p : points) at[{p.axis, p.mode}] = &p;
  const auto reps = s.config.replications;
  const std::uint32_t sp_unsteady = reps - at[{340, Mode::kSP}]->steady_runs;
  const std::uint32_t mp_steady = at[{340, Mode::kMP}]->steady_runs;
  const bool pass = sp_unsteady >= 4 && mp_steady >= 4 && elapsed < 120.0;
  return {pass, "lambda=340: SP unsteady " + std::to_string(sp_unsteady) + "/" +
                    std::to_string(reps) + ", MP steady " + std::to_string(mp_steady) + "/" +
                    std::to_string(reps) + "; lambda=300: SP steady " +
                    std::to_string(at[{300, Mode::kSP}]->steady_runs) + "/" +
                    std::to_string(reps) + "; runs=20 runtime=" + fmt(elapsed) + "s"};
}

Outcome fig8_dominance(const Shared& s) {
  std::ostringstream d;
  bool dominant = true;
  double top_lambda = -1.0;
  double top_ratio = 0.0;
  for (const GainPoint& p : s.fig10) {
    if (p.scope != PairScope::kEntireNetwork) continue;
    if (p.mp_throughput < p.sp_throughput) {
      dominant = false;
      d << "MP<SP at lambda=" << fmt(p.axis) << "; ";
    }
    if (p.sp_steady_runs >= majority(s.config) && p.mp_steady_runs >= majority(s.config)) {
      top_lambda = p.axis;
      top_ratio = p.mp_throughput / p.sp_throughput;
    }
  }
  const bool in_band = top_lambda > 0 && top_ratio >= 1.5 && top_ratio <= 2.5;
  d << "MP>=SP at every lambda: " << (dominant ? "yes" : "no")
    << "; highest lambda with both steady=" << fmt(top_lambda) << " MP/SP=" << fmt(top_ratio);
  return {dominant && in_band, d.str()};
}

std::string describe_products(const std::vector<CapacityPoint>& points, Mode mode,
                              std::vector<double>& products) {
  std::ostringstream d;
  d << to_string(mode) << "[";
  for (const CapacityPoint& p : points) {
    if (p.mode != mode) continue;
    if (p.lambda_max) {
      products.push_back(*p.lambda_max * p.mean_size);
      d << fmt(p.axis) << ":" << fmt(products.back()) << " ";
    } else {
      d << fmt(p.axis) << ":nan(" << p.note << ") ";
    }
  }
  d << "]";
  return d.str();
}

Outcome fig9_constancy(const Shared& s) {
  const auto start = Clock::now();
  const auto points = lambda_max_sweep(s.config, Axis::kMeanSize, {5, 10, 20, 40});
  const double elapsed = seconds_since(start);
  std::vector<double> sp;
  std::vector<double> mp;
  const std::string sp_text = describe_products(points, Mode::kSP, sp);
  const std::string mp_text = describe_products(points, Mode::kMP, mp);
  if (sp.size() != 4 || mp.size() != 4) return {false, "missing lambda_max: " + sp_text + mp_text};
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  auto spread = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - m) / m);
    return worst;
  };
  const double gain = mean(mp) / mean(sp) - 1.0;
  const bool pass = spread(sp) <= 0.15 && spread(mp) <= 0.15 && gain >= 0.20 && elapsed < 900.0;
  return {pass, "products " + sp_text + " " + mp_text + " spread sp=" + fmt(spread(sp)) +
                    " mp=" + fmt(spread(mp)) + " mp/sp-1=" + fmt(gain) +
                    " runtime=" + fmt(elapsed) + "s"};
}

Outcome fig10_scope(const Shared& s) {
  std::map<double, const GainPoint*> single;
  std::map<double, const GainPoint*> network;
  for (const GainPoint& p : s.fig10) {
    (p.scope == PairScope::kSinglePair ? single : network)[p.axis] = &p;
  }
  double worst_single = 0.0;
  for (const auto& [lambda, p] : single) worst_single = std::max(worst_single, p->tg);

  // Top steady lambda: the highest lambda at which the network running MP
  // end to end stays steady (majority of seeds).
  double top = -1.0;
  double both = -1.0;
  for (const auto& [lambda, p] : network) {
    if (p->mp_steady_runs >= majority(s.config)) top = lambda;
    if (p->mp_steady_runs >= majority(s.config) && p->sp_steady_runs >= majority(s.config)) {
      both = lambda;
    }
  }
  if (top < 0) return {false, "the entire-network MP runs are never steady"};
  const double tg_network = network.at(top)->tg;
  const double tg_single = single.at(top)->tg;
  note("criterion 6 detail: at the highest lambda where SP is steady too (" + fmt(both) +
       ") entire-network TG=" + fmt(network.at(both)->tg) +
       " single-pair TG=" + fmt(single.at(both)->tg));
  std::ostringstream d;
  d << "max single-pair TG=" << fmt(worst_single) << "; top MP-steady lambda=" << fmt(top)
    << ": entire-network TG=" << fmt(tg_network) << " single-pair TG=" << fmt(tg_single)
    << " (pair " << single.begin()->second->pair->first << ","
    << single.begin()->second->pair->second << ")";
  return {worst_single <= 2.05 && tg_network > tg_single, d.str()};
}

Outcome fig11_monotonicity(const Shared& s) {
  const auto grid = default_values(ExperimentId::kFig11);
  const auto points = gain_vs_multi_parent(s.config, grid);
  std::ostringstream d;
  d << "TG[";
  for (const GainPoint& p : points) d << fmt(p.axis) << ":" << fmt(p.tg) << " ";
  d << "]";
  bool monotone = true;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].tg < 0.95 * points[i - 1].tg) monotone = false;
  }
  // Plateau: the TG level over 10%..20%.
  double plateau = 0.0;
  double at10 = NAN;
  double at20 = NAN;
  int n = 0;
  for (const GainPoint& p : points) {
    if (p.axis < 0.10 - 1e-9) continue;
    plateau += p.tg;
    ++n;
    if (std::abs(p.axis - 0.10) < 1e-9) at10 = p.tg;
    if (std::abs(p.axis - 0.20) < 1e-9) at20 = p.tg;
  }
  plateau /= n;
  const double change = std::abs(at20 - at10);
  d << " non-decreasing(5%): " << (monotone ? "yes" : "no") << " |TG(20%)-TG(10%)|=" << fmt(change)
    << " plateau=" << fmt(plateau) << " at lambda=" << fmt(s.config.tg_lambda);
  return {monotone && change < 0.10 * plateau, d.str()};
}

Outcome fig12_linearity(const Shared& s) {
  const auto points = lambda_max_sweep(s.config, Axis::kMeanChildren, default_values(ExperimentId::kFig12));
  std::map<Mode, std::vector<double>> x;
  std::map<Mode, std::vector<double>> y;
  std::map<double, std::map<Mode, double>> by_point;
  std::ostringstream d;
  bool complete = true;
  for (const CapacityPoint& p : points) {
    if (!p.lambda_max) {
      complete = false;
      d << "nan at " << to_string(p.mode) << " " << fmt(p.axis) << " (" << p.note << "); ";
      continue;
    }
    x[p.mode].push_back(p.axis);
    y[p.mode].push_back(*p.lambda_max);
    by_point[p.axis][p.mode] = *p.lambda_max;
  }
  if (!complete) return {false, d.str()};
  bool dominant = true;
  for (const auto& [nc, modes] : by_point) {
    d << fmt(nc) << ":" << fmt(modes.at(Mode::kSP)) << "/" << fmt(modes.at(Mode::kMP)) << " ";
    if (modes.at(Mode::kMP) < modes.at(Mode::kSP)) dominant = false;
  }
  const double r_sp = pearson_correlation(x[Mode::kSP], y[Mode::kSP]);
  const double r_mp = pearson_correlation(x[Mode::kMP], y[Mode::kMP]);
  d << "(sp/mp lambda_max) r_sp=" << fmt(r_sp) << " r_mp=" << fmt(r_mp);
  return {r_sp >= 0.95 && r_mp >= 0.95 && dominant, d.str()};
}

// ---------------------------------------------------------------------------
// 9. Samplers.

Outcome samplers() {
  Rng arrivals(1, streams::kArrivals);
  constexpr int kDraws = 10000;
  std::vector<double> counts(kDraws);
  for (double& c : counts) c = static_cast<double>(sample_arrival_count({.lambda = 300.0}, arrivals));
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / kDraws;
  double ss = 0.0;
  for (double c : counts) ss += (c - mean) * (c - mean);
  const double dispersion = ss / (kDraws - 1) / mean;

  Rng sizes(1, streams::kEndpoints);
  const SizeModel model{.mean_size = 10.0};
  double sum = 0.0;
  bool in_band = true;
  for (int i = 0; i < kDraws; ++i) {
    const double s = sample_size(model, sizes);
    in_band = in_band && s >= 5.0 && s <= 15.0;
    sum += s;
  }
  const double size_mean = sum / kDraws;
  const bool pass = std::abs(mean - 300.0) <= 3.0 && dispersion >= 0.95 && dispersion <= 1.05 &&
                    in_band && std::abs(size_mean - 10.0) <= 0.15;
  return {pass, "poisson mean=" + fmt(mean) + " var/mean=" + fmt(dispersion) +
                    "; size mean=" + fmt(size_mean) + " all in [5,15]: " + (in_band ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 10. Topology properties.

struct RateCheck {
  std::string name;
  double p = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;

  double rate() const { return static_cast<double>(hits) / static_cast<double>(trials); }
  double z() const {
    if (p == 0.0 || p == 1.0) return rate() == p ? 0.0 : INFINITY;
    return (rate() - p) / std::sqrt(p * (1 - p) / static_cast<double>(trials));
  }
  bool within_ci() const { return std::abs(z()) <= 2.576; }
};

// True when no path from src to dst avoiding `masked` has fewer than
// `limit` hops (exhaustive depth-limited search over simple paths).
bool no_shorter_path(const Topology& t, NodeId src, NodeId dst, std::size_t limit,
                     const std::set<NodeId>& masked) {
  std::vector<char> on_path(t.node_count(), 0);
  std::function<bool(NodeId, std::size_t)> dfs = [&](NodeId u, std::size_t depth) {
    if (u == dst) return true;
    if (depth + 1 >= limit) return false;  // one more hop would reach `limit`
    on_path[u] = 1;
    for (NodeId v : t.neighbors(u)) {
      if (on_path[v] || masked.contains(v)) continue;
      if (v == dst || depth + 2 < limit) {
        if (dfs(v, depth + 1)) {
          on_path[u] = 0;
          return true;
        }
      }
    }
    on_path[u] = 0;
    return false;
  };
  return !dfs(src, 0);
}

bool path_is_valid(const Topology& t, const RoutePath& p, NodeId src, NodeId dst,
                   const std::set<NodeId>& masked) {
  if (p.hops.size() < 2 || p.hops.front() != src || p.hops.back() != dst) return false;
  if (std::set<NodeId>(p.hops.begin(), p.hops.end()).size() != p.hops.size()) return false;
  for (std::size_t i = 0; i + 1 < p.hops.size(); ++i) {
    if (!t.has_edge(p.hops[i], p.hops[i + 1])) return false;
  }
  return std::none_of(p.hops.begin(), p.hops.end(), [&](NodeId h) { return masked.contains(h); });
}

Outcome topology_suite() {
  int connected = 0;
  int counts_ok = 0;
  int level_in_band[3] = {0, 0, 0};
  constexpr int kSeeds = 200;
  const TopologyParams reference = reference_params();
  std::vector<RateCheck> checks = {
      {"L1 in", reference.level(1).p_in},       {"L2 in", reference.level(2).p_in},
      {"L3 in", reference.level(3).p_in},       {"L2 out", reference.level(2).p_out},
      {"L3 out", reference.level(3).p_out},     {"L2 mp_in", reference.level(2).p_mp_in},
      {"L3 mp_in", reference.level(3).p_mp_in}, {"L3 mp_out", reference.level(3).p_mp_out},
  };
  auto check = [&](const std::string& name) -> RateCheck& {
    return *std::find_if(checks.begin(), checks.end(), [&](const RateCheck& c) { return c.name == name; });
  };
  const double bands[] = {10, 100, 1000};

  for (int seed = 1; seed <= kSeeds; ++seed) {
    const Topology t = build_topology(reference_params(static_cast<std::uint64_t>(seed)));
    connected += is_connected(t);
    bool in_band = true;
    for (int l = 1; l <= 3; ++l) {
      const auto n = static_cast<double>(t.level_nodes(l).size());
      const bool ok = n >= 0.5 * bands[l - 1] && n <= 1.5 * bands[l - 1];
      level_in_band[l - 1] += ok;
      in_band = in_band && ok;
    }
    counts_ok += in_band;

    for (int l = 1; l <= 3; ++l) {
      const auto nodes = t.level_nodes(l);
      const std::uint32_t range = t.params().level(l).out_range;
      RateCheck& in = check("L" + std::to_string(l) + " in");
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
          const bool linked = t.has_edge(nodes[i].id, nodes[j].id);
          if (nodes[i].domain() == nodes[j].domain()) {
            ++in.trials;
            in.hits += linked;
          } else if (l > 1 && index_distance(nodes[i], nodes[j]) <= range) {
            RateCheck& out = check("L" + std::to_string(l) + " out");
            ++out.trials;
            out.hits += linked;
          }
        }
      }
      if (l == 1) continue;
      for (const Node& n : nodes) {
        const Node& parent = t.node(*n.original_parent);
        const bool extra_in = n.extra_parent && t.node(*n.extra_parent).domain() == parent.domain();
        const bool extra_out = n.extra_parent && !extra_in;
        // Every parent domain here has several members, so an in-domain
        // candidate always exists and the MPin draw is a plain Bernoulli.
        RateCheck& mp_in = check("L" + std::to_string(l) + " mp_in");
        ++mp_in.trials;
        mp_in.hits += extra_in;
        if (l == 3 && !extra_in) {
          // MPout applies when no in-domain extra parent was drawn and the
          // parent has a same-level neighbour outside its own domain.
          const auto peers = t.neighbors(parent.id);
          const bool candidate = std::any_of(peers.begin(), peers.end(), [&](NodeId q) {
            return t.node(q).level == parent.level && t.node(q).domain() != parent.domain();
          });
          if (candidate) {
            RateCheck& mp_out = check("L3 mp_out");
            ++mp_out.trials;
            mp_out.hits += extra_out;
          }
        }
      }
    }
  }

  // Minimality of SP and MP routes on small graphs.
  int graphs = 0;
  int route_failures = 0;
  std::uint64_t pairs = 0;
  for (std::uint64_t seed = 1; graphs < 50 && seed < 5000; ++seed) {
    TopologyParams p = reference_params(seed);
    p.level(1).mean_children = 3;
    p.level(2).mean_children = 2;
    p.level(3).mean_children = 3;
    for (int l = 2; l <= 3; ++l) {
      p.level(l).p_in = 0.3;
      p.level(l).p_out = 0.2;
      p.level(l).p_mp_in = 0.3;
      p.level(l).p_mp_out = 0.3;
      p.level(l).out_range = 4;
    }
    const Topology t = build_topology(p);
    if (t.node_count() > 30 || !is_connected(t)) continue;
    ++graphs;
    PathFinder finder(t);
    for (const Node& s : t.leaves()) {
      for (const Node& d : t.leaves()) {
        if (s.id == d.id) continue;
        ++pairs;
        const PathAssignment a = finder.find_paths(s.id, d.id, Mode::kMP);
        const RoutePath& first = a.paths[0];
        if (!path_is_valid(t, first, s.id, d.id, {}) ||
            !no_shorter_path(t, s.id, d.id, first.hop_count(), {})) {
          ++route_failures;
          continue;
        }
        const auto core = first.core_hops();
        if (core.empty()) continue;
        const std::set<NodeId> masked = {core.front(), core.back()};
        if (a.paths.size() == 2) {
          const RoutePath& second = a.paths[1];
          if (!path_is_valid(t, second, s.id, d.id, masked) ||
              !no_shorter_path(t, s.id, d.id, second.hop_count(), masked)) {
            ++route_failures;
          }
        } else if (shortest_path(t, s.id, d.id, std::vector<NodeId>(masked.begin(), masked.end()))) {
          ++route_failures;
        }
      }
    }
  }

  std::ostringstream d;
  bool rates_ok = true;
  d << "connected " << connected << "/" << kSeeds << "; counts in band " << counts_ok << "/"
    << kSeeds << " (L1 " << level_in_band[0] << ", L2 " << level_in_band[1] << ", L3 "
    << level_in_band[2] << "); rates";
  for (const RateCheck& c : checks) {
    rates_ok = rates_ok && c.within_ci();
    d << " " << c.name << "=" << fmt(c.rate()) << "(p=" << fmt(c.p) << " z=" << fmt(c.z())
      << (c.within_ci() ? "" : ", outside 99% CI") << ")";
  }
  d << "; minimality " << graphs << " graphs, " << pairs << " pairs, " << route_failures
    << " failures";
  const bool pass = connected == kSeeds && counts_ok == kSeeds && rates_ok && graphs == 50 &&
                    route_failures == 0;
  return {pass, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) g_selected.insert(std::atoi(argv[i]));
  const auto start = Clock::now();
  report(1, "oracle", oracle);
  report(2, "determinism", cli_determinism);

  Shared shared;
  shared.config.threads = 0;
  bool simulate = false;
  for (int id = 3; id <= 8; ++id) simulate = simulate || selected(id);
  if (simulate) {
    const auto t0 = Clock::now();
    HarnessConfig c = shared.config;
    c.calibration.enabled = true;
    const CalibrationResult cal = calibrate_capacity(c);
    shared.config.sim.topology.level(c.calibration.level).capacity = cal.capacity;
    std::ostringstream votes;
    for (const auto& [capacity, v] : cal.votes) votes << fmt(capacity) << ":" << v << " ";
    note("calibration: level2.capacity = " + fmt(cal.capacity) + " (steady votes " +
         votes.str() + "; " + fmt(seconds_since(t0)) + " s)");
  }
  if (selected(4) || selected(6)) {
    const auto t0 = Clock::now();
    shared.fig10 = gain_vs_lambda(shared.config, default_values(ExperimentId::kFig10),
                                  {PairScope::kSinglePair, PairScope::kEntireNetwork});
    std::ostringstream line;
    for (const GainPoint& p : shared.fig10) {
      line << fmt(p.axis) << "/" << (p.scope == PairScope::kSinglePair ? "single" : "network")
           << ": sp=" << fmt(p.sp_throughput) << " mp=" << fmt(p.mp_throughput)
           << " tg=" << fmt(p.tg) << " steady=" << p.sp_steady_runs << "/" << p.mp_steady_runs
           << "; ";
    }
    note("lambda sweep (" + fmt(seconds_since(t0)) + " s): " + line.str());
  }

  report(3, "fig7-regimes", [&] { return fig7_regimes(shared); });
  report(4, "fig8-dominance", [&] { return fig8_dominance(shared); });
  report(5, "fig9-constancy", [&] { return fig9_constancy(shared); });
  report(6, "fig10-scope", [&] { return fig10_scope(shared); });
  report(7, "fig11-monotonicity", [&] { return fig11_monotonicity(shared); });
  report(8, "fig12-linearity", [&] { return fig12_linearity(shared); });
  report(9, "samplers", samplers);
  report(10, "topology", topology_suite);

  std::printf("acceptance: %d/%d criteria passed (%.0f s)\n", g_reported - g_failures, g_reported,
              seconds_since(start));
  return g_failures == 0 ? 0 : 1;
}
