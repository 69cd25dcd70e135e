#include "equinet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "equinet/csv.hpp"
#include "equinet/error.hpp"

namespace equinet {

EquityGraph::EquityGraph(std::string window, std::vector<std::string> firm_ids)
    : window_(std::move(window)), nodes_(std::move(firm_ids)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], static_cast<int>(i));
}

int EquityGraph::index_of(std::string_view firm_id) const {
  auto it = index_.find(std::string(firm_id));
  return it == index_.end() ? -1 : it->second;
}

void EquityGraph::add_edges(std::span<const OwnershipEdge> edges) {
  raw_edges_.reserve(raw_edges_.size() + edges.size());
  for (const auto& e : edges) {
    if (!e.window.empty() && !window_.empty() && e.window != window_) {
      throw Error(ErrorCode::InvalidWindow,
                  fmt::format("edge {}->{} belongs to window '{}', graph is '{}'", e.src, e.dst,
                              e.window, window_));
    }
    if (index_of(e.src) < 0 || index_of(e.dst) < 0) {
      throw Error(ErrorCode::EdgeEndpointUnknown,
                  fmt::format("edge {}->{} references a firm outside the node universe", e.src,
                              e.dst));
    }
    if (e.src == e.dst) {
      throw Error(ErrorCode::SelfLoop, fmt::format("self-loop on {}", e.src));
    }
    raw_edges_.push_back(e);
    raw_edges_.back().window = window_;
  }
  rebuild_simple();
}

void EquityGraph::rebuild_simple() {
  std::map<std::pair<int, int>, int> weights;
  for (const auto& e : raw_edges_) ++weights[{index_.at(e.src), index_.at(e.dst)}];
  simple_edges_.clear();
  simple_edges_.reserve(weights.size());
  for (const auto& [key, w] : weights) simple_edges_.push_back({key.first, key.second, w});
}

std::vector<std::vector<int>> EquityGraph::undirected_adjacency() const {
  std::vector<std::vector<int>> adj(nodes_.size());
  for (const auto& e : simple_edges_) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

std::vector<SimpleEdge> EquityGraph::undirected_weighted_edges() const {
  std::map<std::pair<int, int>, int> weights;
  for (const auto& e : simple_edges_) {
    weights[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += e.weight;
  }
  std::vector<SimpleEdge> out;
  out.reserve(weights.size());
  for (const auto& [key, w] : weights) out.push_back({key.first, key.second, w});
  return out;
}

std::vector<std::string> listed_firms(std::span<const ShareholderRecord> shareholders) {
  std::set<std::string> firms;
  for (const auto& r : shareholders) firms.insert(r.firm_id);
  return {firms.begin(), firms.end()};
}

AliasTable make_alias_table(std::span<const FirmAlias> aliases) {
  AliasTable table;
  for (const auto& a : aliases) table.emplace(normalize_name(a.name), a.firm_id);
  return table;
}

std::vector<OwnershipEdge> build_type1(std::span<const ShareholderRecord> shareholders,
                                       const AliasTable& aliases,
                                       std::span<const std::string> listed_set,
                                       const std::string& window) {
  const std::set<std::string_view> listed(listed_set.begin(), listed_set.end());
  std::vector<OwnershipEdge> edges;
  for (const auto& row : shareholders) {
    auto it = aliases.find(row.shareholder_name);
    if (it == aliases.end()) continue;
    const std::string& target = it->second;
    if (target == row.firm_id || !listed.count(target)) continue;
    edges.push_back({row.firm_id, target, RelationType::Type1, window});
  }
  return edges;
}

std::vector<OwnershipEdge> build_type2(std::span<const ShareholderRecord> shareholders,
                                       std::span<const LegalRepRecord> legal_reps,
                                       const std::string& window) {
  const auto listed_vec = listed_firms(shareholders);
  const std::set<std::string_view> listed(listed_vec.begin(), listed_vec.end());
  std::map<std::string, std::set<std::string>> represented;
  for (const auto& rep : legal_reps) {
    if (listed.count(rep.firm_id)) represented[rep.person_name].insert(rep.firm_id);
  }
  std::vector<OwnershipEdge> edges;
  for (const auto& row : shareholders) {
    auto it = represented.find(row.shareholder_name);
    if (it == represented.end()) continue;
    for (const auto& target : it->second) {
      if (target != row.firm_id) {
        edges.push_back({row.firm_id, target, RelationType::Type2, window});
      }
    }
  }
  return edges;
}

std::vector<OwnershipEdge> build_type3(std::span<const ShareholderRecord> shareholders,
                                       const std::string& window) {
  std::map<std::string, std::set<std::string>> holdings;
  for (const auto& row : shareholders) holdings[row.shareholder_name].insert(row.firm_id);
  std::vector<OwnershipEdge> edges;
  for (const auto& [holder, firm_set] : holdings) {
    if (firm_set.size() < 2) continue;
    for (const auto& a : firm_set) {
      for (const auto& b : firm_set) {
        if (a != b) edges.push_back({a, b, RelationType::Type3, window});
      }
    }
  }
  return edges;
}

EquityGraph assemble_graph(const std::string& window, std::vector<std::string> nodes,
                           std::span<const OwnershipEdge> type1,
                           std::span<const OwnershipEdge> type2,
                           std::span<const OwnershipEdge> type3) {
  EquityGraph graph(window, std::move(nodes));
  std::vector<OwnershipEdge> all;
  all.reserve(type1.size() + type2.size() + type3.size());
  all.insert(all.end(), type1.begin(), type1.end());
  all.insert(all.end(), type2.begin(), type2.end());
  all.insert(all.end(), type3.begin(), type3.end());
  graph.add_edges(all);
  return graph;
}

EquityGraph build_window_graph(std::span<const ShareholderRecord> shareholders,
                               std::span<const LegalRepRecord> legal_reps,
                               const AliasTable& aliases, const PeriodWindow& window) {
  const auto holders = window_slice(shareholders, window);
  const auto reps = window_slice(legal_reps, window);
  auto nodes = listed_firms(holders);
  const auto t1 = build_type1(holders, aliases, nodes, window.label);
  const auto t2 = build_type2(holders, reps, window.label);
  const auto t3 = build_type3(holders, window.label);
  return assemble_graph(window.label, std::move(nodes), t1, t2, t3);
}

ConnectionSummary connection_summary(const EquityGraph& graph) {
  ConnectionSummary s;
  for (const auto& e : graph.raw_edges()) {
    switch (e.relation) {
      case RelationType::Type1: ++s.type1; break;
      case RelationType::Type2: ++s.type2; break;
      case RelationType::Type3: ++s.type3; break;
    }
  }
  s.total = s.type1 + s.type2 + s.type3;
  return s;
}

void write_edge_list(std::ostream& out, const EquityGraph& graph, char delimiter) {
  out << csv::join({"source", "target", "type"}, delimiter) << '\n';
  for (const auto& e : graph.raw_edges()) {
    out << csv::join({e.src, e.dst, std::to_string(static_cast<int>(e.relation))}, delimiter)
        << '\n';
  }
}

void write_node_list(std::ostream& out, const EquityGraph& graph, char delimiter) {
  out << "firm_id\n";
  for (const auto& n : graph.nodes()) out << csv::escape(n, delimiter) << '\n';
}

EquityGraph read_graph(const std::filesystem::path& edges_path,
                       const std::filesystem::path& nodes_path, const std::string& window,
                       char delimiter) {
  std::ifstream edges_in(edges_path);
  if (!edges_in) throw Error(ErrorCode::FileNotFound, edges_path.string());
  csv::Reader reader(edges_in, delimiter);
  const int src_col = reader.column("source");
  const int dst_col = reader.column("target");
  const int type_col = reader.column("type");
  if (src_col < 0 || dst_col < 0 || type_col < 0) {
    throw ParseError(ErrorCode::MissingColumn, edges_path.string(), 1,
                     "edge list needs source, target, type");
  }
  std::vector<OwnershipEdge> edges;
  std::set<std::string> endpoints;
  std::vector<std::string> fields;
  bool ok = true;
  while (reader.next(fields, ok)) {
    const auto need = static_cast<std::size_t>(std::max({src_col, dst_col, type_col}));
    if (!ok || fields.size() <= need) {
      throw ParseError(ErrorCode::UnparsableValue, edges_path.string(), reader.line(),
                       "malformed edge row");
    }
    const std::string& type = fields[type_col];
    if (type != "1" && type != "2" && type != "3") {
      throw ParseError(ErrorCode::UnparsableValue, edges_path.string(), reader.line(),
                       fmt::format("edge type must be 1, 2 or 3, got '{}'", type));
    }
    edges.push_back({fields[src_col], fields[dst_col],
                     static_cast<RelationType>(type[0] - '0'), window});
    endpoints.insert(fields[src_col]);
    endpoints.insert(fields[dst_col]);
  }

  std::vector<std::string> nodes;
  if (!nodes_path.empty()) {
    std::ifstream nodes_in(nodes_path);
    if (!nodes_in) throw Error(ErrorCode::FileNotFound, nodes_path.string());
    csv::Reader node_reader(nodes_in, delimiter);
    const int id_col = node_reader.column("firm_id");
    if (id_col < 0) {
      throw ParseError(ErrorCode::MissingColumn, nodes_path.string(), 1,
                       "node list needs firm_id");
    }
    while (node_reader.next(fields, ok)) {
      if (!ok || fields.size() <= static_cast<std::size_t>(id_col)) {
        throw ParseError(ErrorCode::UnparsableValue, nodes_path.string(), node_reader.line(),
                         "malformed node row");
      }
      nodes.push_back(fields[id_col]);
    }
  } else {
    nodes.assign(endpoints.begin(), endpoints.end());
  }
  EquityGraph graph(window, std::move(nodes));
  graph.add_edges(edges);
  return graph;
}

}  // namespace equinet
