#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mptsim/routing.hpp"
#include "mptsim/service.hpp"
#include "mptsim/topology.hpp"

namespace mptsim {

/// Which hops of a path register a flow and bound its bandwidth.
enum class FlowScope : std::uint8_t {
  kCoreHops,  // routers only (levels 1..L-1)
  kAllHops,   // every hop, leaf endpoints and leaf relays included
};

/// Who uses the configured transport mode.
///
/// kEntireNetwork: every service runs in `mode`; the measured throughput is
/// the mean over all active services.
/// kSinglePair: background services always run SP and one persistent probe
/// transfer between a fixed leaf pair runs in `mode`; the measured
/// throughput is the probe's. The probe never completes and is not counted
/// in the backlog.
enum class PairScope : std::uint8_t { kEntireNetwork, kSinglePair };

const char* to_string(FlowScope scope);
const char* to_string(PairScope scope);

struct SimConfig {
  TopologyParams topology = reference_params();
  std::optional<std::string> topology_file;  // overrides `topology` when set
  Mode mode = Mode::kSP;
  ArrivalModel arrival;
  SizeModel size;
  std::uint64_t ticks = 1000;
  std::uint64_t warmup = 50;
  std::uint64_t seed = 1;
  FlowScope flow_scope = FlowScope::kCoreHops;
  PairScope pair_scope = PairScope::kEntireNetwork;
  /// Probe endpoints for kSinglePair; chosen by select_multipath_pair when unset.
  std::optional<std::pair<NodeId, NodeId>> pair;
  /// Random arrivals on/off. Off leaves only injected services.
  bool random_arrivals = true;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Per-node count of (service, path) flows currently crossing the node.
class FlowTable {
 public:
  explicit FlowTable(std::size_t nodes = 0) : counts_(nodes, 0) {}

  void add(std::span<const NodeId> hops);
  /// Throws std::logic_error on underflow.
  void remove(std::span<const NodeId> hops);
  std::uint32_t count(NodeId id) const { return counts_.at(id); }
  std::size_t size() const { return counts_.size(); }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  friend bool operator==(const FlowTable&, const FlowTable&) = default;

 private:
  std::vector<std::uint32_t> counts_;
};

/// capacity / flows. flows == 0 is a contract violation (std::invalid_argument).
double node_bandwidth(double capacity, std::uint32_t flows);

/// Hops of `path` that register a flow under `scope`. Under kCoreHops a path
/// with no router on it (directly linked or leaf-relayed endpoints) falls
/// back to all of its hops.
std::vector<NodeId> counted_hops(const Topology& topology, const RoutePath& path,
                                 FlowScope scope);

/// Minimum node bandwidth over `hops`. Throws on an empty hop list.
double path_bandwidth(const Topology& topology, const FlowTable& flows,
                      std::span<const NodeId> hops);
double path_bandwidth(const Topology& topology, const FlowTable& flows, const RoutePath& path,
                      FlowScope scope = FlowScope::kCoreHops);

/// Sum of path bandwidths over the assignment's paths.
double service_throughput(const Topology& topology, const FlowTable& flows,
                          const PathAssignment& assignment,
                          FlowScope scope = FlowScope::kCoreHops);

struct TickMetrics {
  std::uint64_t tick = 0;
  double total_throughput = 0.0;  // sum of TP over everything served this tick
  std::uint64_t active_services = 0;  // still active at the end of the tick
  std::uint64_t arrivals = 0;
  std::uint64_t completions = 0;
  /// Measured services that transmitted this tick: every active service,
  /// or just the probe under PairScope::kSinglePair.
  std::uint64_t served = 0;
  /// Mean TP of the measured services, 0 when nothing was served.
  double mean_service_throughput = 0.0;

  friend bool operator==(const TickMetrics&, const TickMetrics&) = default;
};

using TimeSeries = std::vector<TickMetrics>;

struct CompletionRecord {
  std::uint64_t id = 0;
  std::uint64_t birth_tick = 0;
  std::uint64_t completion_tick = 0;
  double initial_size = 0.0;
  double delivered = 0.0;  // sum of per-tick TP
  double last_throughput = 0.0;
};

struct ActiveService {
  Service service;
  std::vector<std::vector<NodeId>> flows;  // counted hops, one list per path
  double delivered = 0.0;
  double last_throughput = 0.0;
  double residual_before = 0.0;  // residual at the start of the last tick
};

/// One simulation run: the per-tick loop over a shared route cache.
///
/// Tick order: draw arrivals, spawn and register their flows, compute
/// every active service's throughput (ascending id) against that flow
/// table, decrement residuals, then drop finished services and their flows.
class Simulation {
 public:
  Simulation(SimConfig config, std::shared_ptr<RouteCache> routes);

  /// Queues a service that arrives at the next step, in call order.
  void inject(NodeId src, NodeId dst, double size);

  TickMetrics step();

  std::uint64_t tick() const { return tick_; }
  const std::vector<ActiveService>& active() const { return active_; }
  const FlowTable& flow_table() const { return flows_; }
  const std::vector<CompletionRecord>& completions() const { return completed_; }
  std::uint64_t multipath_services() const { return multipath_services_; }
  std::uint64_t total_services() const { return next_id_; }
  /// Probe endpoints and routes (kSinglePair only).
  const std::optional<std::pair<NodeId, NodeId>>& pair() const { return pair_; }
  const PathAssignment* probe_assignment() const { return probe_.get(); }

  /// Rebuilds the flow table from the active services.
  FlowTable recount() const;

 private:
  void admit(Service service);
  double bandwidth(std::span<const NodeId> hops) const;

  SimConfig config_;
  std::shared_ptr<RouteCache> routes_;
  Rng arrival_rng_;
  Rng spawn_rng_;
  FlowTable flows_;
  std::vector<ActiveService> active_;
  std::vector<CompletionRecord> completed_;
  std::vector<std::pair<std::pair<NodeId, NodeId>, double>> injected_;
  std::optional<std::pair<NodeId, NodeId>> pair_;
  std::shared_ptr<const PathAssignment> probe_;
  std::vector<std::vector<NodeId>> probe_flows_;
  std::vector<double> capacity_;  // per node
  std::vector<double> share_;     // capacity / flows, refreshed every tick
  std::uint64_t tick_ = 0;
  std::uint64_t next_id_ = 0;
  std::uint64_t multipath_services_ = 0;
};

struct RunResult {
  TimeSeries series;
  std::vector<CompletionRecord> completions;
  std::uint64_t services = 0;
  std::uint64_t multipath_services = 0;
  std::optional<std::pair<NodeId, NodeId>> pair;
};

/// Builds or loads the topology named by `config`.
std::shared_ptr<const Topology> make_topology(const SimConfig& config);

/// First (src, dst) leaf pair, scanning src then dst in ascending id order,
/// for which MP routing yields two paths.
std::optional<std::pair<NodeId, NodeId>> select_multipath_pair(RouteCache& routes);

RunResult run(const SimConfig& config);
/// Reuses `routes` (and its topology) instead of building one.
RunResult run(const SimConfig& config, const std::shared_ptr<RouteCache>& routes);

/// `tick,throughput,active,arrivals,completions`, 6 significant digits.
void write_trace_csv(const TimeSeries& series, std::ostream& out);

}  // namespace mptsim
