#include "mptsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "mptsim/rng.hpp"

namespace mptsim {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

enum Phase : std::uint64_t { kCount = 0, kMulti = 1, kIn = 2, kOut = 3 };

Rng phase_rng(std::uint64_t seed, int level, Phase phase) {
  return Rng(seed, streams::kTopologyBase + 16 * static_cast<std::uint64_t>(level) +
                       phase);
}

std::uint64_t draw_child_count(Rng& rng, double mean) {
  const auto lo = static_cast<std::uint64_t>(std::lround(0.5 * mean));
  const auto hi = static_cast<std::uint64_t>(std::lround(1.5 * mean));
  return rng.uniform_int(lo, hi);
}

Edge make_edge(NodeId x, NodeId y, EdgeKind kind) {
  return x < y ? Edge{x, y, kind} : Edge{y, x, kind};
}

}  // namespace

void TopologyParams::validate() const {
  if (levels.size() < 2) {
    throw TopologyError("topology needs at least 2 levels, got " +
                        std::to_string(levels.size()));
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const LevelParams& lp = levels[i];
    const std::string where = "level " + std::to_string(i + 1) + ": ";
    if (!(lp.mean_children >= 1.0) || !std::isfinite(lp.mean_children)) {
      throw TopologyError(where + "mean_children must be >= 1");
    }
    if (!is_probability(lp.p_in) || !is_probability(lp.p_out) ||
        !is_probability(lp.p_mp_in) || !is_probability(lp.p_mp_out)) {
      throw TopologyError(where + "probabilities must lie in [0, 1]");
    }
    if (!(lp.capacity > 0.0) || !std::isfinite(lp.capacity)) {
      throw TopologyError(where + "capacity must be > 0");
    }
    if (i == 0 && (lp.p_out != 0.0 || lp.p_mp_in != 0.0 || lp.p_mp_out != 0.0)) {
      throw TopologyError(where + "p_out, p_mp_in and p_mp_out must be 0 at the core");
    }
  }
}

TopologyParams reference_params(std::uint64_t seed) {
  TopologyParams params;
  params.seed = seed;
  params.levels = {
      {.mean_children = 10, .p_in = 1.00, .capacity = 1000},
      {.mean_children = 10,
       .p_in = 0.20,
       .p_out = 0.05,
       .p_mp_in = 0.05,
       .out_range = 30,
       .capacity = 100},
      {.mean_children = 10,
       .p_in = 0.10,
       .p_out = 0.02,
       .p_mp_in = 0.10,
       .p_mp_out = 0.05,
       .out_range = 30,
       .capacity = 10},
  };
  return params;
}

void scale_multi_parent(TopologyParams& params, double factor) {
  for (auto& lp : params.levels) {
    lp.p_mp_in = std::clamp(lp.p_mp_in * factor, 0.0, 1.0);
    lp.p_mp_out = std::clamp(lp.p_mp_out * factor, 0.0, 1.0);
  }
}

const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kParent: return "parent";
    case EdgeKind::kIn: return "in";
    case EdgeKind::kOut: return "out";
    case EdgeKind::kMultiParent: return "mp";
  }
  return "?";
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  if (text == "parent") return EdgeKind::kParent;
  if (text == "in") return EdgeKind::kIn;
  if (text == "out") return EdgeKind::kOut;
  if (text == "mp") return EdgeKind::kMultiParent;
  return std::nullopt;
}

Topology::Topology(TopologyParams params, std::vector<Node> nodes,
                   std::vector<Edge> edges)
    : params_(std::move(params)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  params_.validate();
  const int levels = params_.level_count();

  level_begin_.assign(static_cast<std::size_t>(levels) + 1, nodes_.size());
  int prev_level = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const std::string where = "node " + std::to_string(i) + ": ";
    if (n.id != i) throw TopologyError(where + "ids must be dense and ordered");
    if (n.level < 1 || n.level > levels) throw TopologyError(where + "level out of range");
    if (n.level < prev_level) throw TopologyError(where + "nodes must be grouped by level");
    if (n.level != prev_level) {
      if (n.level != prev_level + 1) throw TopologyError(where + "empty level");
      level_begin_[n.level - 1] = i;
      prev_level = n.level;
    }
    if (n.index_in_level != i - level_begin_[n.level - 1]) {
      throw TopologyError(where + "index_in_level does not match creation order");
    }
    if (n.level == 1) {
      if (n.original_parent || n.extra_parent) {
        throw TopologyError(where + "core nodes have no parents");
      }
      continue;
    }
    if (!n.original_parent || *n.original_parent >= i ||
        nodes_[*n.original_parent].level != n.level - 1) {
      throw TopologyError(where + "original parent must sit one level up");
    }
    if (n.extra_parent &&
        (*n.extra_parent == *n.original_parent || *n.extra_parent >= i ||
         nodes_[*n.extra_parent].level != n.level - 1)) {
      throw TopologyError(where + "extra parent must be a distinct node one level up");
    }
  }
  if (prev_level != levels) throw TopologyError("every level needs at least one node");

  std::size_t parent_edges = 0;
  std::size_t mp_edges = 0;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    const std::string where = "edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + ": ";
    if (e.a >= e.b) throw TopologyError(where + "endpoints must satisfy a < b");
    if (e.b >= nodes_.size()) throw TopologyError(where + "unknown node");
    if (i > 0) {
      const Edge& p = edges_[i - 1];
      if (p.a == e.a && p.b == e.b) throw TopologyError(where + "duplicate edge");
      if (std::pair(p.a, p.b) > std::pair(e.a, e.b)) {
        throw TopologyError(where + "edges must be sorted");
      }
    }
    const Node& lo = nodes_[e.a];
    const Node& hi = nodes_[e.b];
    switch (e.kind) {
      case EdgeKind::kParent:
        if (hi.original_parent != e.a) throw TopologyError(where + "not an original-parent link");
        ++parent_edges;
        break;
      case EdgeKind::kMultiParent:
        if (hi.extra_parent != e.a) throw TopologyError(where + "not an extra-parent link");
        ++mp_edges;
        break;
      case EdgeKind::kIn:
        if (lo.level != hi.level || lo.domain() != hi.domain()) {
          throw TopologyError(where + "in-domain link across domains or levels");
        }
        break;
      case EdgeKind::kOut:
        if (lo.level != hi.level || lo.level == 1 || lo.domain() == hi.domain()) {
          throw TopologyError(where + "cross-domain link inside a domain");
        }
        break;
    }
  }
  const auto with_parent = static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.original_parent.has_value(); }));
  const auto with_extra = static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.extra_parent.has_value(); }));
  if (parent_edges != with_parent || mp_edges != with_extra) {
    throw TopologyError("every parent link must appear as an edge");
  }

  std::vector<std::size_t> degree(nodes_.size(), 0);
  for (const Edge& e : edges_) {
    ++degree[e.a];
    ++degree[e.b];
  }
  adj_offsets_.assign(nodes_.size() + 1, 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) adj_offsets_[i + 1] = adj_offsets_[i] + degree[i];
  adj_.resize(adj_offsets_.back());
  std::vector<std::size_t> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adj_[fill[e.a]++] = e.b;
    adj_[fill[e.b]++] = e.a;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(adj_offsets_[i]),
              adj_.begin() + static_cast<std::ptrdiff_t>(adj_offsets_[i + 1]));
  }
}

std::span<const NodeId> Topology::neighbors(NodeId id) const {
  return {adj_.data() + adj_offsets_.at(id), adj_.data() + adj_offsets_.at(id + 1)};
}

bool Topology::has_edge(NodeId a, NodeId b) const {
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::span<const Node> Topology::level_nodes(int level) const {
  if (level < 1 || level > level_count()) throw TopologyError("no such level");
  return {nodes_.data() + level_begin_[level - 1], nodes_.data() + level_begin_[level]};
}

Topology build_topology(const TopologyParams& params) {
  params.validate();
  const int levels = params.level_count();
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  // Growing adjacency; level l-1 is complete before level l is built.
  std::vector<std::vector<NodeId>> adj;

  auto add_node = [&](int level, std::uint32_t index, std::optional<NodeId> parent) {
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.push_back({.id = id, .level = level, .index_in_level = index, .original_parent = parent, .extra_parent = std::nullopt});
    adj.emplace_back();
    return id;
  };
  auto add_edge = [&](NodeId x, NodeId y, EdgeKind kind) {
    edges.push_back(make_edge(x, y, kind));
    adj[x].push_back(y);
    adj[y].push_back(x);
  };

  // Level 1: one pool of core nodes, fully meshed with probability p_in.
  {
    const LevelParams& lp = params.level(1);
    Rng count_rng = phase_rng(params.seed, 1, kCount);
    Rng in_rng = phase_rng(params.seed, 1, kIn);
    const std::uint64_t count = draw_child_count(count_rng, lp.mean_children);
    for (std::uint32_t i = 0; i < count; ++i) add_node(1, i, std::nullopt);
    for (NodeId a = 0; a < count; ++a) {
      for (NodeId b = a + 1; b < count; ++b) {
        if (in_rng.bernoulli(lp.p_in)) add_edge(a, b, EdgeKind::kIn);
      }
    }
  }

  NodeId parent_begin = 0;
  for (int level = 2; level <= levels; ++level) {
    const LevelParams& lp = params.level(level);
    Rng count_rng = phase_rng(params.seed, level, kCount);
    Rng mp_rng = phase_rng(params.seed, level, kMulti);
    Rng in_rng = phase_rng(params.seed, level, kIn);
    Rng out_rng = phase_rng(params.seed, level, kOut);

    const auto parent_end = static_cast<NodeId>(nodes.size());
    const NodeId level_begin = parent_end;

    // Members of each level-(l-1) domain, for multi-parent candidates.
    std::map<std::optional<NodeId>, std::vector<NodeId>> parent_domains;
    for (NodeId p = parent_begin; p < parent_end; ++p) {
      parent_domains[nodes[p].domain()].push_back(p);
    }

    std::uint32_t index = 0;
    std::vector<NodeId> candidates;
    for (NodeId parent = parent_begin; parent < parent_end; ++parent) {
      const std::uint64_t count = draw_child_count(count_rng, lp.mean_children);
      const auto first_child = static_cast<NodeId>(nodes.size());
      for (std::uint64_t c = 0; c < count; ++c) {
        const NodeId child = add_node(level, index++, parent);
        add_edge(parent, child, EdgeKind::kParent);
      }
      const auto end_child = static_cast<NodeId>(nodes.size());

      const std::optional<NodeId> parent_domain = nodes[parent].domain();
      for (NodeId child = first_child; child < end_child; ++child) {
        std::optional<NodeId> extra;
        if (mp_rng.bernoulli(lp.p_mp_in)) {
          candidates.clear();
          for (NodeId peer : parent_domains[parent_domain]) {
            if (peer != parent) candidates.push_back(peer);
          }
          if (!candidates.empty()) {
            extra = candidates[mp_rng.uniform_int(0, candidates.size() - 1)];
          }
        }
        if (!extra && lp.p_mp_out > 0.0 && mp_rng.bernoulli(lp.p_mp_out)) {
          // Only peers of the original parent outside its domain qualify.
          candidates.clear();
          if (parent_domain) {
            for (NodeId peer : adj[parent]) {
              if (nodes[peer].level == level - 1 && nodes[peer].domain() != parent_domain) {
                candidates.push_back(peer);
              }
            }
            std::sort(candidates.begin(), candidates.end());
          }
          if (!candidates.empty()) {
            extra = candidates[mp_rng.uniform_int(0, candidates.size() - 1)];
          }
        }
        if (extra) {
          nodes[child].extra_parent = extra;
          add_edge(*extra, child, EdgeKind::kMultiParent);
        }
      }

      for (NodeId a = first_child; a < end_child; ++a) {
        for (NodeId b = a + 1; b < end_child; ++b) {
          if (in_rng.bernoulli(lp.p_in)) add_edge(a, b, EdgeKind::kIn);
        }
      }
    }

    const auto level_end = static_cast<NodeId>(nodes.size());
    if (lp.p_out > 0.0) {
      for (NodeId a = level_begin; a < level_end; ++a) {
        const NodeId last = static_cast<NodeId>(
            std::min<std::uint64_t>(level_end - 1, std::uint64_t{a} + lp.out_range));
        for (NodeId b = a + 1; b <= last && b < level_end; ++b) {
          if (nodes[a].domain() == nodes[b].domain()) continue;
          if (out_rng.bernoulli(lp.p_out)) add_edge(a, b, EdgeKind::kOut);
        }
      }
    }
    parent_begin = parent_end;
  }

  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  return Topology(params, std::move(nodes), std::move(edges));
}

std::uint32_t index_distance(const Node& a, const Node& b) {
  if (a.level != b.level) {
    throw TopologyError("index distance is only defined within one level");
  }
  return a.index_in_level > b.index_in_level ? a.index_in_level - b.index_in_level
                                             : b.index_in_level - a.index_in_level;
}

bool is_connected(const Topology& topology) {
  const std::size_t n = topology.node_count();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : topology.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

}  // namespace mptsim
