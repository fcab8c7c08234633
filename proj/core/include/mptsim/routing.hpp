#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mptsim/topology.hpp"

namespace mptsim {

enum class Mode : std::uint8_t { kSP, kMP };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

class RoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Leaf-to-leaf hop sequence, endpoints inclusive.
struct RoutePath {
  std::vector<NodeId> hops;

  /// Hops strictly between the two leaf endpoints.
  std::span<const NodeId> core_hops() const {
    return hops.size() < 2 ? std::span<const NodeId>{}
                           : std::span<const NodeId>(hops).subspan(1, hops.size() - 2);
  }
  std::size_t hop_count() const { return hops.empty() ? 0 : hops.size() - 1; }

  friend bool operator==(const RoutePath&, const RoutePath&) = default;
};

enum class AssignmentMode : std::uint8_t { kSinglePath, kDegradedToSinglePath, kMultiPath };

const char* to_string(AssignmentMode mode);

struct PathAssignment {
  std::vector<RoutePath> paths;  // 1 or 2
  AssignmentMode mode_used = AssignmentMode::kSinglePath;

  friend bool operator==(const PathAssignment&, const PathAssignment&) = default;
};

/// Breadth-first search with reusable scratch space. Neighbors are expanded
/// in ascending id order, so among equal-length paths the one whose hops
/// were discovered first wins; results never depend on call history.
class PathFinder {
 public:
  explicit PathFinder(const Topology& topology);

  /// Minimum-hop path avoiding `masked`. Throws RoutingError for equal or
  /// non-leaf endpoints, or an endpoint that is itself masked.
  std::optional<RoutePath> shortest_path(NodeId src, NodeId dst,
                                         std::span<const NodeId> masked = {});

  /// SP: the shortest path. MP: additionally masks the first and last core
  /// hop of that path and searches again; without a second path the result
  /// degrades to one path. Throws RoutingError when src and dst are
  /// disconnected.
  PathAssignment find_paths(NodeId src, NodeId dst, Mode mode);

 private:
  void check_endpoints(NodeId src, NodeId dst) const;

  const Topology* topology_;
  std::vector<NodeId> parent_;
  std::vector<std::uint32_t> stamp_;
  std::vector<NodeId> queue_;
  std::uint32_t epoch_ = 0;
};

std::optional<RoutePath> shortest_path(const Topology& topology, NodeId src, NodeId dst,
                                       std::span<const NodeId> masked = {});
PathAssignment find_paths(const Topology& topology, NodeId src, NodeId dst, Mode mode);

/// Memoizes find_paths per (src, dst, mode) for one topology. Thread-safe;
/// shared by every run on the same topology.
class RouteCache {
 public:
  /// Roughly 0.5 GB of routes on deep topologies.
  static constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 21;

  /// The cache is emptied whenever it would exceed `max_entries`; routes
  /// are a pure function of the topology, so this only costs recomputation.
  explicit RouteCache(std::shared_ptr<const Topology> topology,
                      std::size_t max_entries = kDefaultMaxEntries);

  std::shared_ptr<const PathAssignment> get(NodeId src, NodeId dst, Mode mode);
  std::size_t size();
  const Topology& topology() const { return *topology_; }
  std::shared_ptr<const Topology> topology_ptr() const { return topology_; }

  /// A cache over `topology`, which must have the same nodes and edges
  /// (parameters such as capacities may differ), pre-filled with every
  /// route computed so far. Throws RoutingError on a structural mismatch.
  std::shared_ptr<RouteCache> rebind(std::shared_ptr<const Topology> topology);

 private:
  std::shared_ptr<const Topology> topology_;
  std::mutex mutex_;
  PathFinder finder_;
  std::size_t max_entries_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const PathAssignment>> cache_;
};

}  // namespace mptsim
