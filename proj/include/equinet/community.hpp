#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "equinet/graph.hpp"

namespace equinet {

/// Undirected weighted graph on nodes 0..node_count-1; edges listed once
/// with src < dst.
struct WeightedGraph {
  std::size_t node_count = 0;
  std::vector<SimpleEdge> edges;

  static WeightedGraph from(const EquityGraph& graph);
};

struct CommunityPartition {
  /// Parallel to the graph's node order.
  std::vector<std::string> firm_ids;
  /// Dense class indices 0..m-1, numbered by first appearance in node order.
  std::vector<int> classes;
  double modularity = 0.0;
  std::vector<int> class_sizes;
  std::uint64_t seed = 0;
  double resolution = 1.0;

  int class_count() const { return static_cast<int>(class_sizes.size()); }
  /// Class of a firm, or -1.
  int class_of(const std::string& firm_id) const;
};

/// Newman-Girvan modularity with a resolution multiplier on the null
/// term. Throws EmptyGraph (no nodes or zero total weight) and
/// InvalidAssignment.
double modularity(const WeightedGraph& graph, std::span<const int> assignment,
                  double resolution = 1.0);

/// Louvain local moving + aggregation. The node visiting order of each
/// level is shuffled by a generator seeded from `seed`; a node leaves its
/// class only for a strictly better one, and among equally good targets
/// the lowest class index wins. After aggregation converges, a node-level
/// pass on the original graph may move single nodes; if it does, the
/// levels are rebuilt from there. The search is repeated `restarts` times
/// (the first with `seed` itself, the rest with derived seeds) and the
/// highest-modularity result is kept, earliest on ties.
inline constexpr int kDefaultLouvainRestarts = 16;
CommunityPartition louvain(const EquityGraph& graph, std::uint64_t seed,
                           double resolution = 1.0, int restarts = kDefaultLouvainRestarts);
CommunityPartition louvain(const WeightedGraph& graph, std::uint64_t seed,
                           double resolution = 1.0, int restarts = kDefaultLouvainRestarts);

/// Classes holding at least threshold * node_count nodes, ascending.
std::vector<int> significant_classes(const CommunityPartition& partition,
                                     double threshold = 0.05);

struct ClassShare {
  int class_index = 0;
  int nodes = 0;
  /// Share of all nodes in percent, rounded to 2 decimals.
  double percent = 0.0;
};

std::vector<ClassShare> class_census(const CommunityPartition& partition);

/// Largest class; ties go to the lowest index.
int largest_class(const CommunityPartition& partition);

struct DummyEncoding {
  int baseline = 0;
  /// Class represented by each dummy column (all classes but baseline).
  std::vector<int> column_classes;
  /// One row per node, length m-1; the baseline class is all zeros.
  std::vector<std::vector<int>> rows;
};

/// Throws SingleClass when the partition has one class.
DummyEncoding dummy_encode(const CommunityPartition& partition, int baseline);

void write_partition(std::ostream& out, const CommunityPartition& partition,
                     char delimiter = ',');

/// Reads a (firm_id, class) file and aligns it with the graph's node
/// order; modularity and sizes are recomputed. Throws InvalidAssignment
/// if a node is missing.
CommunityPartition read_partition(const std::filesystem::path& path, const EquityGraph& graph,
                                  double resolution = 1.0, char delimiter = ',');

/// Builds a partition from a raw assignment: renumbers classes densely by
/// first appearance and evaluates modularity.
CommunityPartition make_partition(const EquityGraph& graph, std::span<const int> assignment,
                                  double resolution = 1.0);

}  // namespace equinet
