#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "equinet/records.hpp"

namespace equinet {

/// Type1: a listed firm is among A's top-ten holders. Type2: one of A's
/// holders is the legal representative of B. Type3: A and B share a
/// holder (emitted in both directions).
enum class RelationType { Type1 = 1, Type2 = 2, Type3 = 3 };

struct OwnershipEdge {
  std::string src;
  std::string dst;
  RelationType relation = RelationType::Type1;
  std::string window;

  bool operator==(const OwnershipEdge&) const = default;
};

/// Parallel raw edges between one ordered pair collapse into one simple
/// edge whose weight is their multiplicity. Endpoints are node indices.
struct SimpleEdge {
  int src = 0;
  int dst = 0;
  int weight = 0;

  bool operator==(const SimpleEdge&) const = default;
};

/// Per-window directed multigraph plus its weighted simple projection.
/// Nodes are kept sorted by firm_id; node indices follow that order.
class EquityGraph {
 public:
  EquityGraph() = default;
  EquityGraph(std::string window, std::vector<std::string> firm_ids);

  const std::string& window() const { return window_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<OwnershipEdge>& raw_edges() const { return raw_edges_; }
  /// Sorted by (src, dst).
  const std::vector<SimpleEdge>& simple_edges() const { return simple_edges_; }

  /// Index of a firm, or -1.
  int index_of(std::string_view firm_id) const;

  /// Appends raw edges and refreshes the simple projection. Throws
  /// EdgeEndpointUnknown / SelfLoop / InvalidWindow.
  void add_edges(std::span<const OwnershipEdge> edges);

  /// Neighbour lists of the undirected, unweighted projection (sorted).
  std::vector<std::vector<int>> undirected_adjacency() const;

  /// Undirected weighted projection: w(u,v) = w(u->v) + w(v->u), listed
  /// once per unordered pair with u < v.
  std::vector<SimpleEdge> undirected_weighted_edges() const;

 private:
  void rebuild_simple();

  std::string window_;
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, int> index_;
  std::vector<OwnershipEdge> raw_edges_;
  std::vector<SimpleEdge> simple_edges_;
};

/// Firms with at least one shareholder filing among `shareholders`
/// (the node universe of a window), sorted.
std::vector<std::string> listed_firms(std::span<const ShareholderRecord> shareholders);

/// Alias table keyed by normalized registry name.
using AliasTable = std::map<std::string, std::string>;
AliasTable make_alias_table(std::span<const FirmAlias> aliases);

std::vector<OwnershipEdge> build_type1(std::span<const ShareholderRecord> shareholders,
                                       const AliasTable& aliases,
                                       std::span<const std::string> listed_set,
                                       const std::string& window = {});

std::vector<OwnershipEdge> build_type2(std::span<const ShareholderRecord> shareholders,
                                       std::span<const LegalRepRecord> legal_reps,
                                       const std::string& window = {});

std::vector<OwnershipEdge> build_type3(std::span<const ShareholderRecord> shareholders,
                                       const std::string& window = {});

EquityGraph assemble_graph(const std::string& window, std::vector<std::string> nodes,
                           std::span<const OwnershipEdge> type1,
                           std::span<const OwnershipEdge> type2,
                           std::span<const OwnershipEdge> type3);

/// Slices the record sets to `window`, runs the three builders, and
/// assembles the result.
EquityGraph build_window_graph(std::span<const ShareholderRecord> shareholders,
                               std::span<const LegalRepRecord> legal_reps,
                               const AliasTable& aliases, const PeriodWindow& window);

struct ConnectionSummary {
  std::size_t type1 = 0;
  std::size_t type2 = 0;
  std::size_t type3 = 0;
  std::size_t total = 0;

  bool operator==(const ConnectionSummary&) const = default;
};

ConnectionSummary connection_summary(const EquityGraph& graph);

/// Three-column edge list: source, target, type (1/2/3), one row per raw
/// edge.
void write_edge_list(std::ostream& out, const EquityGraph& graph, char delimiter = ',');
void write_node_list(std::ostream& out, const EquityGraph& graph, char delimiter = ',');

/// Rebuilds a graph from an edge list and (optionally) a node list; when
/// no node list is given the nodes are the edge endpoints.
EquityGraph read_graph(const std::filesystem::path& edges,
                       const std::filesystem::path& nodes, const std::string& window,
                       char delimiter = ',');

}  // namespace equinet
