#pragma once

// Hand-built topologies shared by the unit and acceptance tests.

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mptsim/topology.hpp"

namespace mptsim_test {

using mptsim::Edge;
using mptsim::EdgeKind;
using mptsim::LevelParams;
using mptsim::Node;
using mptsim::NodeId;
using mptsim::Topology;
using mptsim::TopologyParams;

/// Level parameters with every optional link disabled; only the
/// capacities matter for hand-built graphs.
inline TopologyParams plain_params(std::vector<double> capacities) {
  TopologyParams params;
  for (double c : capacities) {
    LevelParams lp;
    lp.mean_children = 2.0;
    lp.out_range = 100;
    lp.capacity = c;
    params.levels.push_back(lp);
  }
  return params;
}

/// Assembles a Topology node by node. Nodes must be added level by level;
/// parent and extra-parent edges are added automatically.
class TopologyBuilder {
 public:
  explicit TopologyBuilder(TopologyParams params) : params_(std::move(params)) {}

  NodeId add(int level, std::optional<NodeId> parent = std::nullopt,
             std::optional<NodeId> extra = std::nullopt) {
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({.id = id,
                      .level = level,
                      .index_in_level = next_index_[level]++,
                      .original_parent = parent,
                      .extra_parent = extra});
    if (parent) link(*parent, id, EdgeKind::kParent);
    if (extra) link(*extra, id, EdgeKind::kMultiParent);
    return id;
  }

  void link(NodeId x, NodeId y, EdgeKind kind) {
    edges_.push_back({.a = std::min(x, y), .b = std::max(x, y), .kind = kind});
  }

  Topology build() const {
    auto edges = edges_;
    std::sort(edges.begin(), edges.end(),
              [](const Edge& l, const Edge& r) { return std::pair(l.a, l.b) < std::pair(r.a, r.b); });
    return Topology(params_, nodes_, edges);
  }

 private:
  TopologyParams params_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<int, std::uint32_t> next_index_;
};

/// The 9-node worksheet topology: 2 core routers, 3 mid routers, 4 leaves.
///
///   core  0 —— 1                      capacities: core 12, mid 6, leaf 1
///   mid   2, 3 under 0; 4 under 1      3 —— 4 is a cross-domain link
///   leaf  5, 6 under 2; 7 under 3; 8 under 4
///         6 has extra parent 3, 8 has extra parent 3
///
/// Adjacency (ascending): 0:{1,2,3} 1:{0,4} 2:{0,5,6} 3:{0,4,6,7,8}
/// 4:{1,3,8} 5:{2} 6:{2,3} 7:{3} 8:{3,4}.
inline Topology oracle_topology() {
  TopologyBuilder b(plain_params({12.0, 6.0, 1.0}));
  const NodeId c0 = b.add(1);
  const NodeId c1 = b.add(1);
  b.link(c0, c1, EdgeKind::kIn);
  const NodeId m2 = b.add(2, c0);
  const NodeId m3 = b.add(2, c0);
  const NodeId m4 = b.add(2, c1);
  b.link(m3, m4, EdgeKind::kOut);
  b.add(3, m2);      // 5
  b.add(3, m2, m3);  // 6
  b.add(3, m3);      // 7
  b.add(3, m4, m3);  // 8
  return b.build();
}

}  // namespace mptsim_test
