#include "mptsim/engine.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mptsim/format.hpp"

namespace mptsim {

const char* to_string(FlowScope scope) {
  return scope == FlowScope::kCoreHops ? "core" : "all";
}

const char* to_string(PairScope scope) {
  return scope == PairScope::kEntireNetwork ? "entire-network" : "single-pair";
}

void SimConfig::validate() const {
  if (!topology_file) {
    try {
      topology.validate();
    } catch (const TopologyError& e) {
      throw std::invalid_argument(e.what());
    }
  }
  arrival.validate();
  size.validate();
  if (ticks == 0) throw std::invalid_argument("ticks must be positive");
  if (warmup >= ticks) throw std::invalid_argument("warmup must be smaller than ticks");
}

void FlowTable::add(std::span<const NodeId> hops) {
  for (NodeId id : hops) ++counts_.at(id);
}

void FlowTable::remove(std::span<const NodeId> hops) {
  for (NodeId id : hops) {
    if (counts_.at(id) == 0) {
      throw std::logic_error("flow table underflow at node " + std::to_string(id));
    }
    --counts_[id];
  }
}

double node_bandwidth(double capacity, std::uint32_t flows) {
  if (flows == 0) throw std::invalid_argument("node bandwidth needs at least one flow");
  return capacity / static_cast<double>(flows);
}

std::vector<NodeId> counted_hops(const Topology& topology, const RoutePath& path,
                                 FlowScope scope) {
  if (scope == FlowScope::kCoreHops) {
    std::vector<NodeId> routers;
    for (NodeId id : path.core_hops()) {
      if (!topology.is_leaf(id)) routers.push_back(id);
    }
    if (!routers.empty()) return routers;
  }
  return path.hops;
}

double path_bandwidth(const Topology& topology, const FlowTable& flows,
                      std::span<const NodeId> hops) {
  if (hops.empty()) throw std::invalid_argument("path has no counted hops");
  double best = std::numeric_limits<double>::infinity();
  for (NodeId id : hops) best = std::min(best, node_bandwidth(topology.capacity(id), flows.count(id)));
  return best;
}

double path_bandwidth(const Topology& topology, const FlowTable& flows, const RoutePath& path,
                      FlowScope scope) {
  const auto hops = counted_hops(topology, path, scope);
  return path_bandwidth(topology, flows, hops);
}

double service_throughput(const Topology& topology, const FlowTable& flows,
                          const PathAssignment& assignment, FlowScope scope) {
  double total = 0.0;
  for (const RoutePath& p : assignment.paths) total += path_bandwidth(topology, flows, p, scope);
  return total;
}

Simulation::Simulation(SimConfig config, std::shared_ptr<RouteCache> routes)
    : config_(std::move(config)),
      routes_(std::move(routes)),
      arrival_rng_(config_.seed, streams::kArrivals),
      spawn_rng_(config_.seed, streams::kEndpoints),
      flows_(routes_->topology().node_count()) {
  config_.validate();
  const Topology& topology = routes_->topology();
  capacity_.reserve(topology.node_count());
  for (NodeId id = 0; id < topology.node_count(); ++id) capacity_.push_back(topology.capacity(id));
  share_.assign(topology.node_count(), 0.0);

  if (config_.pair_scope == PairScope::kSinglePair) {
    pair_ = config_.pair ? config_.pair : select_multipath_pair(*routes_);
    if (!pair_) throw std::invalid_argument("no leaf pair admits two paths");
    probe_ = routes_->get(pair_->first, pair_->second, config_.mode);
    for (const RoutePath& p : probe_->paths) {
      probe_flows_.push_back(counted_hops(topology, p, config_.flow_scope));
      flows_.add(probe_flows_.back());
    }
  }
}

void Simulation::inject(NodeId src, NodeId dst, double size) {
  if (!(size > 0.0)) throw std::invalid_argument("service size must be > 0");
  injected_.push_back({{src, dst}, size});
}

void Simulation::admit(Service service) {
  ActiveService a;
  const Topology& topology = routes_->topology();
  for (const RoutePath& p : service.assignment->paths) {
    a.flows.push_back(counted_hops(topology, p, config_.flow_scope));
    flows_.add(a.flows.back());
  }
  if (service.assignment->paths.size() > 1) ++multipath_services_;
  a.service = std::move(service);
  active_.push_back(std::move(a));
}

double Simulation::bandwidth(std::span<const NodeId> hops) const {
  double best = std::numeric_limits<double>::infinity();
  for (NodeId id : hops) best = std::min(best, share_[id]);
  return best;
}

TickMetrics Simulation::step() {
  ++tick_;
  TickMetrics m;
  m.tick = tick_;

  // Background services run SP when only the probe pair uses `mode`.
  const Mode service_mode =
      config_.pair_scope == PairScope::kSinglePair ? Mode::kSP : config_.mode;

  // (a) + (b): arrivals, routed and registered before any transmission.
  for (const auto& [pair, size] : injected_) {
    Service s;
    s.id = next_id_++;
    s.src = pair.first;
    s.dst = pair.second;
    s.initial_size = size;
    s.residual = size;
    s.birth_tick = tick_;
    s.assignment = routes_->get(s.src, s.dst, service_mode);
    admit(std::move(s));
    ++m.arrivals;
  }
  injected_.clear();
  if (config_.random_arrivals) {
    const std::uint64_t count = sample_arrival_count(config_.arrival, arrival_rng_);
    auto spawned =
        spawn_services(*routes_, count, service_mode, config_.size, spawn_rng_, next_id_, tick_);
    next_id_ += count;
    m.arrivals += count;
    for (auto& s : spawned) admit(std::move(s));
  }

  // (c): every bandwidth below reads the same post-arrival flow table, so
  // the per-node shares are computed once.
  const auto& counts = flows_.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) share_[i] = node_bandwidth(capacity_[i], counts[i]);
  }
  bool any_done = false;
  double measured = 0.0;
  for (ActiveService& a : active_) {
    double tp = 0.0;
    for (const auto& hops : a.flows) tp += bandwidth(hops);
    a.residual_before = a.service.residual;
    a.service.residual -= tp;
    a.delivered += tp;
    a.last_throughput = tp;
    m.total_throughput += tp;
    measured += tp;
    ++m.served;
    any_done = any_done || a.service.residual <= 0.0;
  }

  if (probe_) {
    double tp = 0.0;
    for (const auto& hops : probe_flows_) tp += bandwidth(hops);
    m.total_throughput += tp;
    measured = tp;
    m.served = 1;
  }

  // (d): release finished services.
  if (any_done) {
    for (const ActiveService& a : active_) {
      if (a.service.residual > 0.0) continue;
      for (const auto& hops : a.flows) flows_.remove(hops);
      completed_.push_back({.id = a.service.id,
                            .birth_tick = a.service.birth_tick,
                            .completion_tick = tick_,
                            .initial_size = a.service.initial_size,
                            .delivered = a.delivered,
                            .last_throughput = a.last_throughput});
      ++m.completions;
    }
    std::erase_if(active_, [](const ActiveService& a) { return a.service.residual <= 0.0; });
  }
  m.active_services = active_.size();
  m.mean_service_throughput = m.served ? measured / static_cast<double>(m.served) : 0.0;
  return m;
}

FlowTable Simulation::recount() const {
  FlowTable fresh(flows_.size());
  for (const auto& hops : probe_flows_) fresh.add(hops);
  for (const ActiveService& a : active_) {
    for (const auto& hops : a.flows) fresh.add(hops);
  }
  return fresh;
}

std::shared_ptr<const Topology> make_topology(const SimConfig& config) {
  if (config.topology_file) {
    return std::make_shared<const Topology>(load_topology_file(*config.topology_file));
  }
  return std::make_shared<const Topology>(build_topology(config.topology));
}

std::optional<std::pair<NodeId, NodeId>> select_multipath_pair(RouteCache& routes) {
  const auto leaves = routes.topology().leaves();
  for (const Node& src : leaves) {
    for (const Node& dst : leaves) {
      if (src.id == dst.id) continue;
      if (routes.get(src.id, dst.id, Mode::kMP)->paths.size() == 2) {
        return std::pair(src.id, dst.id);
      }
    }
  }
  return std::nullopt;
}

RunResult run(const SimConfig& config) {
  config.validate();
  auto routes = std::make_shared<RouteCache>(make_topology(config));
  return run(config, routes);
}

RunResult run(const SimConfig& config, const std::shared_ptr<RouteCache>& routes) {
  Simulation sim(config, routes);
  RunResult result;
  result.series.reserve(config.ticks);
  for (std::uint64_t t = 0; t < config.ticks; ++t) result.series.push_back(sim.step());
  result.completions = sim.completions();
  result.services = sim.total_services();
  result.multipath_services = sim.multipath_services();
  result.pair = sim.pair();
  return result;
}

void write_trace_csv(const TimeSeries& series, std::ostream& out) {
  out << "tick,throughput,active,arrivals,completions\n";
  for (const TickMetrics& m : series) {
    out << m.tick << ',' << format_sig6(m.total_throughput) << ',' << m.active_services << ','
        << m.arrivals << ',' << m.completions << '\n';
  }
}

}  // namespace mptsim
