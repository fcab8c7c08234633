#include <ostream>

#include "mptsim/topology.hpp"

namespace mptsim {

TopologyStats topology_stats(const Topology& topology) {
  TopologyStats stats;
  stats.node_count = topology.node_count();
  stats.edge_count = topology.edges().size();
  for (EdgeKind kind : {EdgeKind::kParent, EdgeKind::kIn, EdgeKind::kOut, EdgeKind::kMultiParent}) {
    stats.edges_by_kind[kind] = 0;
  }
  for (const Edge& e : topology.edges()) ++stats.edges_by_kind[e.kind];

  for (int l = 1; l <= topology.level_count(); ++l) {
    LevelStats ls;
    ls.level = l;
    for (const Node& n : topology.level_nodes(l)) {
      ++ls.nodes;
      if (n.extra_parent) ++ls.multi_parent;
    }
    ls.multi_parent_fraction =
        ls.nodes ? static_cast<double>(ls.multi_parent) / static_cast<double>(ls.nodes) : 0.0;
    stats.levels.push_back(ls);
  }

  for (const Node& n : topology.nodes()) {
    const std::size_t degree = topology.neighbors(n.id).size();
    ++stats.degree_histogram[degree];
    stats.degree_sum += degree;
  }
  stats.connected = is_connected(topology);
  return stats;
}

void TopologyStats::write(std::ostream& out) const {
  out << "nodes " << node_count << '\n';
  out << "edges " << edge_count << '\n';
  for (const auto& [kind, count] : edges_by_kind) {
    out << "edges." << to_string(kind) << ' ' << count << '\n';
  }
  for (const LevelStats& ls : levels) {
    out << "level" << ls.level << ".nodes " << ls.nodes << '\n';
    out << "level" << ls.level << ".multi_parent " << ls.multi_parent << '\n';
    out << "level" << ls.level << ".multi_parent_fraction " << ls.multi_parent_fraction << '\n';
  }
  out << "degree_sum " << degree_sum << '\n';
  out << "connected " << (connected ? 1 : 0) << '\n';
  for (const auto& [degree, count] : degree_histogram) {
    out << "degree " << degree << ' ' << count << '\n';
  }
}

}  // namespace mptsim
