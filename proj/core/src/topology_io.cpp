#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mptsim/format.hpp"
#include "mptsim/topology.hpp"

namespace mptsim {

namespace {

constexpr std::string_view kHeader = "mptsim-topology v1";

[[noreturn]] void fail(std::size_t line, const std::string& reason) {
  throw TopologyError("line " + std::to_string(line) + ": " + reason);
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r') ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(line, "bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

/// Matches `key=value` and returns value.
std::string_view expect_field(std::string_view token, std::string_view key, std::size_t line) {
  if (token.size() <= key.size() || token.substr(0, key.size()) != key ||
      token[key.size()] != '=') {
    fail(line, "expected " + std::string(key) + "=..., got '" + std::string(token) + "'");
  }
  return token.substr(key.size() + 1);
}

std::optional<NodeId> parse_optional_id(std::string_view text, std::size_t line,
                                        std::string_view what) {
  if (text == "-") return std::nullopt;
  return parse_number<NodeId>(text, line, what);
}

std::string format_optional_id(const std::optional<NodeId>& id) {
  return id ? std::to_string(*id) : std::string("-");
}

}  // namespace

void save_topology(const Topology& topology, std::ostream& out) {
  const TopologyParams& params = topology.params();
  out << kHeader << " seed=" << params.seed << '\n';
  for (int l = 1; l <= params.level_count(); ++l) {
    const LevelParams& lp = params.level(l);
    out << "level " << l << " mean_children=" << format_real(lp.mean_children)
        << " p_in=" << format_real(lp.p_in) << " p_out=" << format_real(lp.p_out)
        << " p_mp_in=" << format_real(lp.p_mp_in) << " p_mp_out=" << format_real(lp.p_mp_out)
        << " out_range=" << lp.out_range << " capacity=" << format_real(lp.capacity) << '\n';
  }
  for (const Node& n : topology.nodes()) {
    out << "node " << n.id << " level=" << n.level << " index=" << n.index_in_level
        << " parent=" << format_optional_id(n.original_parent)
        << " extra=" << format_optional_id(n.extra_parent) << '\n';
  }
  for (const Edge& e : topology.edges()) {
    out << "edge " << e.a << ' ' << e.b << " kind=" << to_string(e.kind) << '\n';
  }
}

void save_topology(const Topology& topology, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TopologyError("cannot open '" + path + "' for writing");
  save_topology(topology, out);
  if (!out) throw TopologyError("write to '" + path + "' failed");
}

Topology load_topology(std::istream& in) {
  TopologyParams params;
  params.levels.clear();
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::set<std::pair<NodeId, NodeId>> seen_edges;

  enum class Section { kHeader, kLevels, kNodes, kEdges } section = Section::kHeader;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto tokens = split_ws(raw);
    if (tokens.empty()) continue;

    if (section == Section::kHeader) {
      if (tokens.size() != 3 || tokens[0] != "mptsim-topology" || tokens[1] != "v1") {
        fail(line, "expected header '" + std::string(kHeader) + " seed=<u64>'");
      }
      params.seed = parse_number<std::uint64_t>(expect_field(tokens[2], "seed", line), line, "seed");
      section = Section::kLevels;
      continue;
    }

    const std::string_view kind = tokens[0];
    if (kind == "level") {
      if (section != Section::kLevels) fail(line, "level lines must precede nodes and edges");
      if (tokens.size() != 9) fail(line, "level line needs 8 fields");
      const auto l = parse_number<int>(tokens[1], line, "level");
      if (l != params.level_count() + 1) fail(line, "levels must be numbered 1, 2, ... in order");
      LevelParams lp;
      lp.mean_children = parse_number<double>(expect_field(tokens[2], "mean_children", line), line, "mean_children");
      lp.p_in = parse_number<double>(expect_field(tokens[3], "p_in", line), line, "p_in");
      lp.p_out = parse_number<double>(expect_field(tokens[4], "p_out", line), line, "p_out");
      lp.p_mp_in = parse_number<double>(expect_field(tokens[5], "p_mp_in", line), line, "p_mp_in");
      lp.p_mp_out = parse_number<double>(expect_field(tokens[6], "p_mp_out", line), line, "p_mp_out");
      lp.out_range = parse_number<std::uint32_t>(expect_field(tokens[7], "out_range", line), line, "out_range");
      lp.capacity = parse_number<double>(expect_field(tokens[8], "capacity", line), line, "capacity");
      params.levels.push_back(lp);
    } else if (kind == "node") {
      if (section == Section::kEdges) fail(line, "node lines must precede edges");
      section = Section::kNodes;
      if (tokens.size() != 6) fail(line, "node line needs 5 fields");
      Node n;
      n.id = parse_number<NodeId>(tokens[1], line, "node id");
      if (n.id != nodes.size()) fail(line, "node ids must be consecutive from 0");
      n.level = parse_number<int>(expect_field(tokens[2], "level", line), line, "level");
      if (n.level < 1 || n.level > params.level_count()) fail(line, "node level out of range");
      n.index_in_level = parse_number<std::uint32_t>(expect_field(tokens[3], "index", line), line, "index");
      n.original_parent = parse_optional_id(expect_field(tokens[4], "parent", line), line, "parent");
      n.extra_parent = parse_optional_id(expect_field(tokens[5], "extra", line), line, "extra");
      for (const auto& p : {n.original_parent, n.extra_parent}) {
        if (p && *p >= n.id) fail(line, "parent " + std::to_string(*p) + " is not a known node");
      }
      nodes.push_back(n);
    } else if (kind == "edge") {
      section = Section::kEdges;
      if (tokens.size() != 4) fail(line, "edge line needs 3 fields");
      const auto a = parse_number<NodeId>(tokens[1], line, "node id");
      const auto b = parse_number<NodeId>(tokens[2], line, "node id");
      for (NodeId id : {a, b}) {
        if (id >= nodes.size()) fail(line, "edge names unknown node " + std::to_string(id));
      }
      if (a == b) fail(line, "self-loop on node " + std::to_string(a));
      const auto edge_kind = parse_edge_kind(expect_field(tokens[3], "kind", line));
      if (!edge_kind) fail(line, "unknown edge kind '" + std::string(tokens[3]) + "'");
      const Edge e = a < b ? Edge{a, b, *edge_kind} : Edge{b, a, *edge_kind};
      if (!seen_edges.emplace(e.a, e.b).second) {
        fail(line, "duplicate edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
      }
      edges.push_back(e);
    } else {
      fail(line, "unknown record '" + std::string(kind) + "'");
    }
  }
  if (section == Section::kHeader) fail(line, "missing header");

  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  try {
    return Topology(std::move(params), std::move(nodes), std::move(edges));
  } catch (const TopologyError& e) {
    throw TopologyError("invalid topology: " + std::string(e.what()));
  }
}

Topology load_topology_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TopologyError("cannot open '" + path + "'");
  return load_topology(in);
}

}  // namespace mptsim
