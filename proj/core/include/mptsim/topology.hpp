#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mptsim {

using NodeId = std::uint32_t;

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generation parameters for one level of the hierarchy.
struct LevelParams {
  double mean_children = 10.0;  // expected child count (Level 1: node count)
  double p_in = 0.0;            // same-domain link probability
  double p_out = 0.0;           // cross-domain link probability
  double p_mp_in = 0.0;         // extra parent inside the parent domain
  double p_mp_out = 0.0;        // extra parent outside the parent domain
  std::uint32_t out_range = 0;  // max index distance for p_out links
  double capacity = 1.0;        // per-node transmission capability

  friend bool operator==(const LevelParams&, const LevelParams&) = default;
};

struct TopologyParams {
  std::vector<LevelParams> levels;  // levels[0] is the core (Level 1)
  std::uint64_t seed = 1;

  /// Throws TopologyError on any violated invariant.
  void validate() const;
  int level_count() const { return static_cast<int>(levels.size()); }
  const LevelParams& level(int l) const { return levels.at(l - 1); }
  LevelParams& level(int l) { return levels.at(l - 1); }

  friend bool operator==(const TopologyParams&, const TopologyParams&) =
      default;
};

/// Three-level reference parameters: 10 children per node, p_in 100/20/10%,
/// p_out 5%/2% within index range 30, MPin 5/10%, MPout 5% at the leaves.
/// Capacities default to 1000/100/10.
TopologyParams reference_params(std::uint64_t seed = 1);

/// Multiplies every multi-parent probability by `factor`.
void scale_multi_parent(TopologyParams& params, double factor);

struct Node {
  NodeId id = 0;
  int level = 1;
  std::uint32_t index_in_level = 0;
  std::optional<NodeId> original_parent;
  std::optional<NodeId> extra_parent;

  /// Domain id: the original parent's node id. Level-1 nodes have none.
  std::optional<NodeId> domain() const { return original_parent; }

  friend bool operator==(const Node&, const Node&) = default;
};

enum class EdgeKind : std::uint8_t { kParent, kIn, kOut, kMultiParent };

const char* to_string(EdgeKind kind);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

struct Edge {
  NodeId a = 0;  // a < b
  NodeId b = 0;
  EdgeKind kind = EdgeKind::kParent;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable leveled graph. Node ids are dense and grouped by level in
/// creation order; edges are kept sorted by (a, b).
class Topology {
 public:
  /// Validates all structural invariants; throws TopologyError.
  Topology(TopologyParams params, std::vector<Node> nodes,
           std::vector<Edge> edges);

  const TopologyParams& params() const { return params_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const { return nodes_.size(); }
  int level_count() const { return params_.level_count(); }

  /// Neighbors in ascending id order.
  std::span<const NodeId> neighbors(NodeId id) const;
  bool has_edge(NodeId a, NodeId b) const;

  /// Node ids at `level` (contiguous range).
  std::span<const Node> level_nodes(int level) const;
  std::span<const Node> leaves() const { return level_nodes(level_count()); }
  bool is_leaf(NodeId id) const { return node(id).level == level_count(); }
  double capacity(NodeId id) const {
    return params_.level(node(id).level).capacity;
  }

  friend bool operator==(const Topology& x, const Topology& y) {
    return x.params_ == y.params_ && x.nodes_ == y.nodes_ &&
           x.edges_ == y.edges_;
  }

 private:
  TopologyParams params_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> adj_offsets_;
  std::vector<NodeId> adj_;
  std::vector<std::size_t> level_begin_;  // size level_count + 1
};

/// Random hierarchical construction: per level, draw child counts, add
/// multi-parent links, in-domain links, then cross-domain links within
/// out_range. Deterministic in params.seed.
Topology build_topology(const TopologyParams& params);

/// |a.index_in_level - b.index_in_level|; throws if levels differ.
std::uint32_t index_distance(const Node& a, const Node& b);

struct LevelStats {
  int level = 0;
  std::size_t nodes = 0;
  std::size_t multi_parent = 0;
  double multi_parent_fraction = 0.0;
};

struct TopologyStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::vector<LevelStats> levels;
  std::map<EdgeKind, std::size_t> edges_by_kind;
  std::map<std::size_t, std::size_t> degree_histogram;  // degree -> nodes
  std::size_t degree_sum = 0;
  bool connected = false;

  /// Flat `key value` lines, stable order.
  void write(std::ostream& out) const;
};

TopologyStats topology_stats(const Topology& topology);
bool is_connected(const Topology& topology);

/// Line-oriented text format, header `mptsim-topology v1 seed=<u64>`.
void save_topology(const Topology& topology, std::ostream& out);
void save_topology(const Topology& topology, const std::string& path);
/// Errors carry "line N: reason".
Topology load_topology(std::istream& in);
Topology load_topology_file(const std::string& path);

}  // namespace mptsim
