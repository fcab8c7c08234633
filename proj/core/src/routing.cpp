#include "mptsim/routing.hpp"

#include <algorithm>
#include <string>

namespace mptsim {

const char* to_string(Mode mode) { return mode == Mode::kSP ? "sp" : "mp"; }

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "sp" || text == "SP") return Mode::kSP;
  if (text == "mp" || text == "MP") return Mode::kMP;
  return std::nullopt;
}

const char* to_string(AssignmentMode mode) {
  switch (mode) {
    case AssignmentMode::kSinglePath: return "SP";
    case AssignmentMode::kDegradedToSinglePath: return "MP-degraded-to-SP";
    case AssignmentMode::kMultiPath: return "MP";
  }
  return "?";
}

PathFinder::PathFinder(const Topology& topology)
    : topology_(&topology),
      parent_(topology.node_count(), 0),
      stamp_(topology.node_count(), 0) {
  queue_.reserve(topology.node_count());
}

void PathFinder::check_endpoints(NodeId src, NodeId dst) const {
  const std::size_t n = topology_->node_count();
  if (src >= n || dst >= n) throw RoutingError("endpoint is not a node of the topology");
  if (src == dst) throw RoutingError("source and destination must differ");
  if (!topology_->is_leaf(src) || !topology_->is_leaf(dst)) {
    throw RoutingError("endpoints must be leaf nodes");
  }
}

std::optional<RoutePath> PathFinder::shortest_path(NodeId src, NodeId dst,
                                                   std::span<const NodeId> masked) {
  check_endpoints(src, dst);
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  // Masked nodes are pre-marked as visited; a masked endpoint is an error.
  for (NodeId m : masked) {
    if (m == src || m == dst) throw RoutingError("an endpoint cannot be masked");
    if (m < stamp_.size()) stamp_[m] = epoch_;
  }

  queue_.clear();
  queue_.push_back(src);
  stamp_[src] = epoch_;
  bool found = false;
  for (std::size_t head = 0; head < queue_.size() && !found; ++head) {
    const NodeId u = queue_[head];
    for (NodeId v : topology_->neighbors(u)) {
      if (stamp_[v] == epoch_) continue;
      stamp_[v] = epoch_;
      parent_[v] = u;
      if (v == dst) {
        found = true;
        break;
      }
      queue_.push_back(v);
    }
  }
  if (!found) return std::nullopt;

  RoutePath path;
  for (NodeId v = dst; v != src; v = parent_[v]) path.hops.push_back(v);
  path.hops.push_back(src);
  std::reverse(path.hops.begin(), path.hops.end());
  return path;
}

PathAssignment PathFinder::find_paths(NodeId src, NodeId dst, Mode mode) {
  auto first = shortest_path(src, dst);
  if (!first) {
    throw RoutingError("no path between " + std::to_string(src) + " and " + std::to_string(dst));
  }
  PathAssignment result;
  if (mode == Mode::kSP) {
    result.paths.push_back(std::move(*first));
    result.mode_used = AssignmentMode::kSinglePath;
    return result;
  }

  // Directly linked endpoints have no access router to mask.
  const auto core = first->core_hops();
  std::optional<RoutePath> second;
  if (!core.empty()) {
    const NodeId mask[2] = {core.front(), core.back()};
    second = shortest_path(src, dst, std::span<const NodeId>(mask, core.size() == 1 ? 1 : 2));
  }
  result.paths.push_back(std::move(*first));
  if (second) {
    result.paths.push_back(std::move(*second));
    result.mode_used = AssignmentMode::kMultiPath;
  } else {
    result.mode_used = AssignmentMode::kDegradedToSinglePath;
  }
  return result;
}

std::optional<RoutePath> shortest_path(const Topology& topology, NodeId src, NodeId dst,
                                       std::span<const NodeId> masked) {
  return PathFinder(topology).shortest_path(src, dst, masked);
}

PathAssignment find_paths(const Topology& topology, NodeId src, NodeId dst, Mode mode) {
  return PathFinder(topology).find_paths(src, dst, mode);
}

RouteCache::RouteCache(std::shared_ptr<const Topology> topology, std::size_t max_entries)
    : topology_(std::move(topology)),
      finder_(*topology_),
      max_entries_(std::max<std::size_t>(1, max_entries)) {}

std::shared_ptr<const PathAssignment> RouteCache::get(NodeId src, NodeId dst, Mode mode) {
  const std::uint64_t key = (std::uint64_t{src} << 33) | (std::uint64_t{dst} << 1) |
                            (mode == Mode::kMP ? 1U : 0U);
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto assignment = std::make_shared<const PathAssignment>(finder_.find_paths(src, dst, mode));
  if (cache_.size() >= max_entries_) cache_.clear();
  cache_.emplace(key, assignment);
  return assignment;
}

std::size_t RouteCache::size() {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::shared_ptr<RouteCache> RouteCache::rebind(std::shared_ptr<const Topology> topology) {
  if (topology->nodes() != topology_->nodes() || topology->edges() != topology_->edges()) {
    throw RoutingError("route cache can only be rebound to a structurally identical topology");
  }
  auto out = std::make_shared<RouteCache>(std::move(topology), max_entries_);
  std::lock_guard lock(mutex_);
  out->cache_ = cache_;
  return out;
}

}  // namespace mptsim
