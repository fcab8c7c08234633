#include "mptsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "mptsim/format.hpp"

namespace mptsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

double parse_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a real number, got '" + text + "'");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
  }
  return value;
}

std::uint32_t parse_u32(const std::string& key, const std::string& text) {
  const std::uint64_t value = parse_u64(key, text);
  if (value > UINT32_MAX) throw ConfigError(key + ": value too large");
  return static_cast<std::uint32_t>(value);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = trim(text.substr(pos, comma == std::string::npos ? comma : comma - pos));
    out.push_back(parse_real(key, item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_real(values[i]);
  }
  return out;
}

struct KeyInfo {
  std::string default_text;
  std::string help;
  std::function<void(HarnessConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const HarnessConfig&)> get;
};

// Non-level keys. Level keys (`level<N>.<field>`) are handled separately
// because their count follows topology.levels.
const std::map<std::string, KeyInfo>& key_table() {
  static const std::map<std::string, KeyInfo> table = [] {
    std::map<std::string, KeyInfo> t;
    // Accessors return a mutable reference; getters only read through it.
    auto real = [&t](const std::string& name, const std::string& def, const std::string& help,
                     auto accessor) {
      t[name] = {def, help,
                 [accessor](HarnessConfig& c, const std::string& k, const std::string& v) {
                   accessor(c) = parse_real(k, v);
                 },
                 [accessor](const HarnessConfig& c) {
                   return format_real(accessor(const_cast<HarnessConfig&>(c)));
                 }};
    };
    auto count = [&t](const std::string& name, const std::string& def, const std::string& help,
                      auto accessor) {
      t[name] = {def, help,
                 [accessor](HarnessConfig& c, const std::string& k, const std::string& v) {
                   accessor(c) = static_cast<std::remove_reference_t<decltype(accessor(c))>>(
                       parse_u64(k, v));
                 },
                 [accessor](const HarnessConfig& c) {
                   return std::to_string(accessor(const_cast<HarnessConfig&>(c)));
                 }};
    };

    count("seed", "1", "simulation seed (arrival, endpoint and size streams)",
          [](HarnessConfig& c) -> std::uint64_t& { return c.sim.seed; });
    t["mode"] = {"sp", "transport mode: sp or mp",
                 [](HarnessConfig& c, const std::string& k, const std::string& v) {
                   const auto m = parse_mode(v);
                   if (!m) throw ConfigError(k + ": expected sp or mp, got '" + v + "'");
                   c.sim.mode = *m;
                 },
                 [](const HarnessConfig& c) { return std::string(to_string(c.sim.mode)); }};
    count("ticks", "1000", "simulated ticks per run",
          [](HarnessConfig& c) -> std::uint64_t& { return c.sim.ticks; });
    count("warmup", "50", "ticks excluded from steady-state statistics",
          [](HarnessConfig& c) -> std::uint64_t& { return c.sim.warmup; });
    real("lambda", "300", "mean service arrivals per tick",
         [](HarnessConfig& c) -> double& { return c.sim.arrival.lambda; });
    real("mean_size", "10", "mean service size",
         [](HarnessConfig& c) -> double& { return c.sim.size.mean_size; });
    t["size_distribution"] = {
        "uniform", "uniform on [0.5, 1.5) x mean_size, or constant",
        [](HarnessConfig& c, const std::string& k, const std::string& v) {
          if (v == "uniform") c.sim.size.distribution = SizeDistribution::kUniform;
          else if (v == "constant") c.sim.size.distribution = SizeDistribution::kConstant;
          else throw ConfigError(k + ": expected uniform or constant, got '" + v + "'");
        },
        [](const HarnessConfig& c) {
          return std::string(c.sim.size.distribution == SizeDistribution::kUniform ? "uniform"
                                                                                   : "constant");
        }};
    t["flow_scope"] = {
        "core", "hops that carry flows: core (routers) or all",
        [](HarnessConfig& c, const std::string& k, const std::string& v) {
          if (v == "core") c.sim.flow_scope = FlowScope::kCoreHops;
          else if (v == "all") c.sim.flow_scope = FlowScope::kAllHops;
          else throw ConfigError(k + ": expected core or all, got '" + v + "'");
        },
        [](const HarnessConfig& c) { return std::string(to_string(c.sim.flow_scope)); }};
    t["pair_scope"] = {
        "entire-network", "entire-network or single-pair (only a probe pair uses `mode`)",
        [](HarnessConfig& c, const std::string& k, const std::string& v) {
          if (v == "entire-network") c.sim.pair_scope = PairScope::kEntireNetwork;
          else if (v == "single-pair") c.sim.pair_scope = PairScope::kSinglePair;
          else throw ConfigError(k + ": expected entire-network or single-pair, got '" + v + "'");
        },
        [](const HarnessConfig& c) { return std::string(to_string(c.sim.pair_scope)); }};
    t["pair"] = {
        "auto", "single-pair probe endpoints `<src>,<dst>`, or auto",
        [](HarnessConfig& c, const std::string& k, const std::string& v) {
          if (v == "auto") {
            c.sim.pair.reset();
            return;
          }
          const auto comma = v.find(',');
          if (comma == std::string::npos) throw ConfigError(k + ": expected <src>,<dst> or auto");
          c.sim.pair = std::pair(parse_u32(k, trim(v.substr(0, comma))),
                                 parse_u32(k, trim(v.substr(comma + 1))));
        },
        [](const HarnessConfig& c) {
          return c.sim.pair ? std::to_string(c.sim.pair->first) + "," +
                                  std::to_string(c.sim.pair->second)
                            : std::string("auto");
        }};

    t["topology.file"] = {
        "", "load the topology from this file instead of generating it",
        [](HarnessConfig& c, const std::string&, const std::string& v) {
          if (v.empty()) c.sim.topology_file.reset();
          else c.sim.topology_file = v;
        },
        [](const HarnessConfig& c) { return c.sim.topology_file.value_or(""); }};
    count("topology.seed", "1", "topology generation seed",
          [](HarnessConfig& c) -> std::uint64_t& { return c.sim.topology.seed; });
    t["topology.levels"] = {
        "3", "number of levels; added levels copy the last one",
        [](HarnessConfig& c, const std::string& k, const std::string& v) {
          const std::uint64_t n = parse_u64(k, v);
          if (n < 2 || n > 16) throw ConfigError(k + ": must be within 2..16");
          auto& levels = c.sim.topology.levels;
          const LevelParams last = levels.back();
          levels.resize(n, last);
        },
        [](const HarnessConfig& c) { return std::to_string(c.sim.topology.levels.size()); }};
    real("topology.mp_scale", "1", "factor on every multi-parent probability",
         [](HarnessConfig& c) -> double& { return c.mp_scale; });

    real("stability.slope_threshold", "0.02", "backlog slope limit, services per tick",
         [](HarnessConfig& c) -> double& { return c.search.thresholds.slope_threshold; });
    real("stability.relative_slope_threshold", "0.001",
         "backlog slope limit as a fraction of mean arrivals per tick",
         [](HarnessConfig& c) -> double& { return c.search.thresholds.relative_slope_threshold; });
    real("stability.blowup_factor", "3", "final backlog vs. post-warmup median",
         [](HarnessConfig& c) -> double& { return c.search.thresholds.blowup_factor; });
    real("stability.blowup_min_excess", "10", "final minus median backlog needed for blowup",
         [](HarnessConfig& c) -> double& { return c.search.thresholds.blowup_min_excess; });
    count("stability.tail_window", "20", "closing ticks averaged as the final backlog",
          [](HarnessConfig& c) -> std::uint64_t& { return c.search.thresholds.tail_window; });
    count("stability.min_ticks", "100", "post-warmup ticks the classifier requires",
          [](HarnessConfig& c) -> std::uint64_t& { return c.search.thresholds.min_ticks; });

    real("search.lambda_lo", "50", "lambda_max search grid start",
         [](HarnessConfig& c) -> double& { return c.search.lambda_lo; });
    real("search.lambda_hi", "800", "lambda_max search grid end",
         [](HarnessConfig& c) -> double& { return c.search.lambda_hi; });
    real("search.resolution", "10", "lambda_max search grid step",
         [](HarnessConfig& c) -> double& { return c.search.resolution; });
    real("search.overload_factor", "100",
         "search runs stop as UNSTEADY once backlog > factor x lambda (0: never)",
         [](HarnessConfig& c) -> double& { return c.search.overload_factor; });
    real("search.load_lo", "500", "FIG9/FIG12 grid start, as lambda x mean_size",
         [](HarnessConfig& c) -> double& { return c.load_lo; });
    real("search.load_hi", "16000", "FIG9/FIG12 grid end, as lambda x mean_size",
         [](HarnessConfig& c) -> double& { return c.load_hi; });
    real("search.load_resolution", "100", "FIG9/FIG12 grid step, as lambda x mean_size",
         [](HarnessConfig& c) -> double& { return c.load_resolution; });

    t["experiment.id"] = {
        "CUSTOM", "FIG7 .. FIG12 or CUSTOM",
        [](HarnessConfig& c, const std::string&, const std::string& v) {
          c.experiment = parse_experiment_id(v);
        },
        [](const HarnessConfig& c) { return std::string(to_string(c.experiment)); }};
    t["experiment.axis"] = {
        "", "CUSTOM axis: lambda, mean_size, p_mp_in_scale or mean_children",
        [](HarnessConfig& c, const std::string&, const std::string& v) {
          if (v.empty()) c.axis.reset();
          else c.axis = parse_axis(v);
        },
        [](const HarnessConfig& c) { return c.axis ? std::string(to_string(*c.axis)) : ""; }};
    t["experiment.values"] = {
        "", "comma-separated axis values; empty uses the experiment default",
        [](HarnessConfig& c, const std::string& k, const std::string& v) {
          c.values = parse_list(k, v);
        },
        [](const HarnessConfig& c) { return join(c.values); }};
    real("experiment.tg_lambda", "250", "FIG11 operating lambda",
         [](HarnessConfig& c) -> double& { return c.tg_lambda; });
    count("experiment.replications", "5", "seeds per sweep point (seed, seed + 1, ...)",
          [](HarnessConfig& c) -> std::uint32_t& { return c.replications; });
    count("experiment.threads", "0", "worker threads for sweeps (0: all cores)",
          [](HarnessConfig& c) -> unsigned& { return c.threads; });

    t["calibration.enabled"] = {
        "false", "calibrate one level's capacity before running",
        [](HarnessConfig& c, const std::string& k, const std::string& v) {
          c.calibration.enabled = parse_bool(k, v);
        },
        [](const HarnessConfig& c) { return std::string(c.calibration.enabled ? "true" : "false"); }};
    count("calibration.level", "2", "level whose capacity is calibrated",
          [](HarnessConfig& c) -> int& { return c.calibration.level; });
    real("calibration.lambda", "300", "SP must be STEADY at this lambda",
         [](HarnessConfig& c) -> double& { return c.calibration.lambda; });
    real("calibration.mean_size", "10", "mean service size during calibration",
         [](HarnessConfig& c) -> double& { return c.calibration.mean_size; });
    real("calibration.capacity_lo", "50", "capacity grid start",
         [](HarnessConfig& c) -> double& { return c.calibration.capacity_lo; });
    real("calibration.capacity_hi", "200", "capacity grid end",
         [](HarnessConfig& c) -> double& { return c.calibration.capacity_hi; });
    count("calibration.min_steady", "0", "steady seeds required (0: all replications)",
          [](HarnessConfig& c) -> std::uint32_t& { return c.calibration.min_steady; });
    real("calibration.resolution", "1", "capacity grid step",
         [](HarnessConfig& c) -> double& { return c.calibration.resolution; });
    return t;
  }();
  return table;
}

struct LevelField {
  const char* name;
  const char* help;
  bool integral;
  double LevelParams::*real;
  std::uint32_t LevelParams::*whole;
};

constexpr LevelField kLevelFields[] = {
    {"mean_children", "mean child count (level 1: node count)", false, &LevelParams::mean_children, nullptr},
    {"p_in", "same-domain link probability", false, &LevelParams::p_in, nullptr},
    {"p_out", "cross-domain link probability", false, &LevelParams::p_out, nullptr},
    {"p_mp_in", "extra parent inside the parent domain", false, &LevelParams::p_mp_in, nullptr},
    {"p_mp_out", "extra parent outside the parent domain", false, &LevelParams::p_mp_out, nullptr},
    {"out_range", "max index distance for cross-domain links", true, nullptr, &LevelParams::out_range},
    {"capacity", "per-node transmission capability", false, &LevelParams::capacity, nullptr},
};

bool apply_level_key(HarnessConfig& config, const std::string& key, const std::string& value) {
  if (key.rfind("level", 0) != 0) return false;
  const auto dot = key.find('.');
  if (dot == std::string::npos || dot == 5) return false;
  const std::string digits = key.substr(5, dot - 5);
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return false;
  }
  const std::string field = key.substr(dot + 1);
  const auto* f = std::find_if(std::begin(kLevelFields), std::end(kLevelFields),
                               [&](const LevelField& lf) { return field == lf.name; });
  if (f == std::end(kLevelFields)) return false;
  const std::uint64_t level = parse_u64(key, digits);
  if (level < 1 || level > config.sim.topology.levels.size()) {
    throw ConfigError(key + ": level out of range (set topology.levels first)");
  }
  LevelParams& lp = config.sim.topology.level(static_cast<int>(level));
  if (f->integral) lp.*(f->whole) = parse_u32(key, value);
  else lp.*(f->real) = parse_real(key, value);
  return true;
}

}  // namespace

const char* to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::kFig7: return "FIG7";
    case ExperimentId::kFig8: return "FIG8";
    case ExperimentId::kFig9: return "FIG9";
    case ExperimentId::kFig10: return "FIG10";
    case ExperimentId::kFig11: return "FIG11";
    case ExperimentId::kFig12: return "FIG12";
    case ExperimentId::kCustom: return "CUSTOM";
  }
  return "?";
}

ExperimentId parse_experiment_id(const std::string& text) {
  const std::string id = upper(text);
  for (auto e : {ExperimentId::kFig7, ExperimentId::kFig8, ExperimentId::kFig9,
                 ExperimentId::kFig10, ExperimentId::kFig11, ExperimentId::kFig12,
                 ExperimentId::kCustom}) {
    if (id == to_string(e)) return e;
  }
  throw ConfigError("unknown experiment '" + text + "' (expected FIG7..FIG12 or CUSTOM)");
}

const char* to_string(Axis axis) {
  switch (axis) {
    case Axis::kLambda: return "lambda";
    case Axis::kMeanSize: return "mean_size";
    case Axis::kMultiParentScale: return "p_mp_in_scale";
    case Axis::kMeanChildren: return "mean_children";
  }
  return "?";
}

Axis parse_axis(const std::string& text) {
  for (auto a : {Axis::kLambda, Axis::kMeanSize, Axis::kMultiParentScale, Axis::kMeanChildren}) {
    if (text == to_string(a)) return a;
  }
  throw ConfigError("unknown axis '" + text +
                    "' (expected lambda, mean_size, p_mp_in_scale or mean_children)");
}

void HarnessConfig::validate() const {
  try {
    sim.validate();
    effective_topology().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const TopologyError& e) {
    throw ConfigError(e.what());
  }
  if (sim.ticks - sim.warmup < search.thresholds.min_ticks) {
    throw ConfigError("ticks - warmup must be at least stability.min_ticks");
  }
  if (!(search.lambda_lo > 0.0 && search.lambda_lo < search.lambda_hi && search.resolution > 0.0)) {
    throw ConfigError("search grid needs 0 < lambda_lo < lambda_hi and resolution > 0");
  }
  if (!(load_lo > 0.0 && load_lo < load_hi && load_resolution > 0.0)) {
    throw ConfigError("load grid needs 0 < load_lo < load_hi and load_resolution > 0");
  }
  if (search.overload_factor < 0.0) throw ConfigError("search.overload_factor must be >= 0");
  if (replications == 0) throw ConfigError("experiment.replications must be positive");
  if (!(mp_scale >= 0.0)) throw ConfigError("topology.mp_scale must be >= 0");
  if (!(tg_lambda > 0.0)) throw ConfigError("experiment.tg_lambda must be > 0");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw ConfigError("experiment.values must be strictly increasing");
    }
  }
  if (experiment == ExperimentId::kCustom && !values.empty() && !axis) {
    throw ConfigError("CUSTOM experiments need experiment.axis");
  }
  if (calibration.enabled) {
    const auto& c = calibration;
    if (c.level < 1 || c.level > sim.topology.level_count()) {
      throw ConfigError("calibration.level out of range");
    }
    if (!(c.capacity_lo > 0.0 && c.capacity_lo < c.capacity_hi && c.resolution > 0.0 &&
          c.lambda > 0.0 && c.mean_size > 0.0)) {
      throw ConfigError("calibration needs 0 < capacity_lo < capacity_hi, resolution, lambda "
                        "and mean_size > 0");
    }
    if (sim.topology_file) throw ConfigError("calibration needs a generated topology");
    if (c.min_steady > replications) {
      throw ConfigError("calibration.min_steady exceeds experiment.replications");
    }
  }
}

TopologyParams HarnessConfig::effective_topology() const {
  TopologyParams params = sim.topology;
  if (mp_scale != 1.0) scale_multi_parent(params, mp_scale);
  return params;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected `key = value`");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void apply_config_value(HarnessConfig& config, const std::string& key, const std::string& value) {
  const auto& table = key_table();
  if (auto it = table.find(key); it != table.end()) {
    it->second.set(config, key, value);
    return;
  }
  if (apply_level_key(config, key, value)) return;
  throw ConfigError("unknown config key '" + key + "'");
}

HarnessConfig load_config(std::istream& in, HarnessConfig base) {
  auto entries = parse_config_text(in);
  // topology.levels first so level keys beyond the default three resolve.
  std::stable_partition(entries.begin(), entries.end(),
                        [](const auto& e) { return e.first == "topology.levels"; });
  for (const auto& [key, value] : entries) apply_config_value(base, key, value);
  return base;
}

HarnessConfig load_config_file(const std::string& path, HarnessConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return load_config(in, std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const HarnessConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, info] : key_table()) out.emplace_back(key, info.get(config));
  for (int l = 1; l <= config.sim.topology.level_count(); ++l) {
    const LevelParams& lp = config.sim.topology.level(l);
    for (const LevelField& f : kLevelFields) {
      out.emplace_back("level" + std::to_string(l) + "." + f.name,
                       f.integral ? std::to_string(lp.*(f.whole)) : format_real(lp.*(f.real)));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string config_hash(const HarnessConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, value] : config_entries(config)) {
    // Worker count never changes results, so it stays out of the hash.
    if (key == "experiment.threads") continue;
    for (char c : key + " = " + value + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_config_reference(std::ostream& out) {
  for (const auto& [key, info] : key_table()) {
    out << key << " = " << info.default_text << "    # " << info.help << '\n';
  }
  for (const LevelField& f : kLevelFields) {
    out << "level<N>." << f.name << "    # " << f.help << '\n';
  }
}

}  // namespace mptsim
