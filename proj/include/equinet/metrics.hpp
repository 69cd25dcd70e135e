#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "equinet/graph.hpp"

namespace equinet {

/// Sorted neighbour lists of an undirected simple graph.
using Adjacency = std::vector<std::vector<int>>;

struct DegreeTriple {
  int in = 0;
  int out = 0;
  /// Neighbour count on the undirected projection.
  int total = 0;

  bool operator==(const DegreeTriple&) const = default;
};

std::vector<DegreeTriple> degrees(const EquityGraph& graph);

/// Directed simple edge count over node count. Throws EmptyGraph.
double average_degree(std::size_t edge_count, std::size_t node_count);
double average_degree(const EquityGraph& graph);

/// Fraction of neighbour pairs that are adjacent; 0 for fewer than two
/// neighbours.
double local_clustering(const Adjacency& adj, int node);
std::vector<double> local_clustering(const Adjacency& adj);

enum class ClosenessConvention {
  /// reachable nodes / sum of distances to them
  ReachableOverDistance,
  /// sum of distances / reachable nodes (mean farness)
  DistanceOverReachable,
};

struct PathMetrics {
  double average_path_length = 0.0;
  int diameter = 0;
  std::vector<int> eccentricity;
  std::vector<double> closeness;
  /// Ordered pairs (u, v), u != v, with v reachable from u.
  std::uint64_t reachable_pairs = 0;
};

/// BFS from every node on the unweighted undirected graph. Unreachable
/// pairs are excluded from every aggregate. Throws EmptyGraph.
PathMetrics shortest_path_metrics(
    const Adjacency& adj,
    ClosenessConvention convention = ClosenessConvention::ReachableOverDistance);

enum class PairConvention {
  /// each unordered pair {s, t} contributes once
  Unordered,
  /// (s, t) and (t, s) both contribute
  Ordered,
};

/// Unnormalized shortest-path betweenness (Brandes accumulation).
std::vector<double> betweenness(const Adjacency& adj,
                                PairConvention pairs = PairConvention::Unordered);

/// Dominant eigenvector of the adjacency matrix, scaled to max entry 1.
/// Iterates on A + I, which has the same eigenvectors but no -lambda
/// competitor on bipartite graphs. Throws EmptyGraph without edges and
/// NoConvergence after max_iter sweeps.
std::vector<double> eigenvector_centrality(const Adjacency& adj, double tol = 1e-10,
                                           int max_iter = 10000);

struct DegreeHistograms {
  std::map<int, int> in;
  std::map<int, int> out;
  std::map<int, int> total;
};

DegreeHistograms degree_distribution(std::span<const DegreeTriple> degrees);

struct NodeMetrics {
  std::string firm_id;
  int in_degree = 0;
  int out_degree = 0;
  int degree = 0;
  double clustering_coefficient = 0.0;
  double betweenness = 0.0;
  double closeness = 0.0;
  double eigenvector = 0.0;
  int eccentricity = 0;

  bool operator==(const NodeMetrics&) const = default;
};

struct GraphMetrics {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double average_degree = 0.0;
  int diameter = 0;
  double average_clustering = 0.0;
  double average_path_length = 0.0;
  DegreeHistograms histograms;
};

struct MetricsOptions {
  ClosenessConvention closeness = ClosenessConvention::ReachableOverDistance;
  PairConvention betweenness_pairs = PairConvention::Unordered;
  double eigen_tol = 1e-10;
  int eigen_max_iter = 10000;
};

struct TopologyReport {
  std::vector<NodeMetrics> nodes;
  GraphMetrics graph;
};

TopologyReport compute_topology(const EquityGraph& graph, const MetricsOptions& options = {});

/// Delimited per-node table keyed by firm_id; reals use round-trip
/// precision so read_node_metrics restores them exactly.
void write_node_metrics(std::ostream& out, std::span<const NodeMetrics> nodes,
                        char delimiter = ',');
std::vector<NodeMetrics> read_node_metrics(const std::filesystem::path& path,
                                           char delimiter = ',');

/// Two-column (degree, count) file.
void write_histogram(std::ostream& out, const std::map<int, int>& histogram,
                     char delimiter = ',');

}  // namespace equinet
