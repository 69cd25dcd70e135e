#include "equinet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include <fmt/format.h>

#include "equinet/csv.hpp"
#include "equinet/error.hpp"

namespace equinet {

std::vector<DegreeTriple> degrees(const EquityGraph& graph) {
  std::vector<DegreeTriple> out(graph.node_count());
  for (const auto& e : graph.simple_edges()) {
    ++out[e.src].out;
    ++out[e.dst].in;
  }
  const auto adj = graph.undirected_adjacency();
  for (std::size_t v = 0; v < adj.size(); ++v) out[v].total = static_cast<int>(adj[v].size());
  return out;
}

double average_degree(std::size_t edge_count, std::size_t node_count) {
  if (node_count == 0) throw Error(ErrorCode::EmptyGraph, "average degree of a graph without nodes");
  return static_cast<double>(edge_count) / static_cast<double>(node_count);
}

double average_degree(const EquityGraph& graph) {
  return average_degree(graph.simple_edges().size(), graph.node_count());
}

namespace {

// Counts edges among the neighbours of `node`, using `mark` as scratch
// (all zeros on entry and exit).
std::uint64_t neighbour_links(const Adjacency& adj, int node, std::vector<char>& mark) {
  for (int u : adj[node]) mark[u] = 1;
  std::uint64_t links = 0;
  for (int u : adj[node]) {
    for (int w : adj[u]) {
      if (w > u && mark[w]) ++links;
    }
  }
  for (int u : adj[node]) mark[u] = 0;
  return links;
}

double clustering_from_links(std::uint64_t links, std::size_t k) {
  if (k < 2) return 0.0;
  return static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

}  // namespace

double local_clustering(const Adjacency& adj, int node) {
  std::vector<char> mark(adj.size(), 0);
  return clustering_from_links(neighbour_links(adj, node, mark), adj[node].size());
}

std::vector<double> local_clustering(const Adjacency& adj) {
  std::vector<char> mark(adj.size(), 0);
  std::vector<double> out(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) {
    out[v] = clustering_from_links(neighbour_links(adj, static_cast<int>(v), mark), adj[v].size());
  }
  return out;
}

PathMetrics shortest_path_metrics(const Adjacency& adj, ClosenessConvention convention) {
  const std::size_t n = adj.size();
  if (n == 0) throw Error(ErrorCode::EmptyGraph, "path metrics of a graph without nodes");
  PathMetrics pm;
  pm.eccentricity.assign(n, 0);
  pm.closeness.assign(n, 0.0);
  std::vector<int> dist(n, -1);
  std::vector<int> queue(n);
  std::uint64_t total_distance = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::size_t head = 0, tail = 0;
    queue[tail++] = static_cast<int>(s);
    dist[s] = 0;
    std::uint64_t sum = 0, reached = 0;
    int farthest = 0;
    while (head < tail) {
      const int v = queue[head++];
      for (int w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue[tail++] = w;
          sum += static_cast<std::uint64_t>(dist[w]);
          ++reached;
          farthest = dist[w];
        }
      }
    }
    pm.eccentricity[s] = farthest;
    pm.diameter = std::max(pm.diameter, farthest);
    total_distance += sum;
    pm.reachable_pairs += reached;
    if (reached > 0) {
      pm.closeness[s] = convention == ClosenessConvention::ReachableOverDistance
                            ? static_cast<double>(reached) / static_cast<double>(sum)
                            : static_cast<double>(sum) / static_cast<double>(reached);
    }
  }
  if (pm.reachable_pairs > 0) {
    pm.average_path_length =
        static_cast<double>(total_distance) / static_cast<double>(pm.reachable_pairs);
  }
  return pm;
}

std::vector<double> betweenness(const Adjacency& adj, PairConvention pairs) {
  const std::size_t n = adj.size();
  std::vector<double> centrality(n, 0.0);
  std::vector<int> dist(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<int> order;
  order.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    order.clear();
    dist[s] = 0;
    sigma[s] = 1.0;
    order.push_back(static_cast<int>(s));
    for (std::size_t head = 0; head < order.size(); ++head) {
      const int v = order[head];
      for (int w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    // Dependencies flow back up the shortest-path DAG in reverse BFS order.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (int v : adj[w]) {
        if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != static_cast<int>(s)) centrality[w] += delta[w];
    }
  }
  // Every source sees each pair from its own end, so the raw sums count
  // ordered pairs.
  if (pairs == PairConvention::Unordered) {
    for (auto& c : centrality) c /= 2.0;
  }
  return centrality;
}

std::vector<double> eigenvector_centrality(const Adjacency& adj, double tol, int max_iter) {
  const std::size_t n = adj.size();
  bool has_edge = false;
  for (const auto& list : adj) has_edge = has_edge || !list.empty();
  if (!has_edge) throw Error(ErrorCode::EmptyGraph, "eigenvector centrality needs an edge");

  std::vector<double> x(n, 1.0), next(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    double peak = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double sum = x[v];
      for (int w : adj[v]) sum += x[w];
      next[v] = sum;
      peak = std::max(peak, sum);
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= peak;
      change = std::max(change, std::abs(next[v] - x[v]));
    }
    x.swap(next);
    if (change < tol) return x;
  }
  throw Error(ErrorCode::NoConvergence,
              fmt::format("eigenvector centrality did not converge in {} iterations", max_iter));
}

DegreeHistograms degree_distribution(std::span<const DegreeTriple> degs) {
  DegreeHistograms h;
  for (const auto& d : degs) {
    ++h.in[d.in];
    ++h.out[d.out];
    ++h.total[d.total];
  }
  return h;
}

TopologyReport compute_topology(const EquityGraph& graph, const MetricsOptions& options) {
  if (graph.node_count() == 0) {
    throw Error(ErrorCode::EmptyGraph, fmt::format("window '{}' has no nodes", graph.window()));
  }
  const auto adj = graph.undirected_adjacency();
  const auto degs = degrees(graph);
  const auto clustering = local_clustering(adj);
  const auto paths = shortest_path_metrics(adj, options.closeness);
  const auto between = betweenness(adj, options.betweenness_pairs);
  std::vector<double> eigen(adj.size(), 0.0);
  if (!graph.simple_edges().empty()) {
    eigen = eigenvector_centrality(adj, options.eigen_tol, options.eigen_max_iter);
  }

  TopologyReport report;
  report.nodes.reserve(graph.node_count());
  double clustering_sum = 0.0;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    report.nodes.push_back({graph.nodes()[v], degs[v].in, degs[v].out, degs[v].total,
                            clustering[v], between[v], paths.closeness[v], eigen[v],
                            paths.eccentricity[v]});
    clustering_sum += clustering[v];
  }
  auto& g = report.graph;
  g.node_count = graph.node_count();
  g.edge_count = graph.simple_edges().size();
  g.average_degree = average_degree(graph);
  g.diameter = paths.diameter;
  g.average_clustering = clustering_sum / static_cast<double>(graph.node_count());
  g.average_path_length = paths.average_path_length;
  g.histograms = degree_distribution(degs);
  return report;
}

namespace {
constexpr std::array<std::string_view, 9> kNodeColumns{
    "firm_id",     "in_degree", "out_degree",  "degree",      "clustering_coefficient",
    "betweenness", "closeness", "eigenvector", "eccentricity"};
}

void write_node_metrics(std::ostream& out, std::span<const NodeMetrics> nodes, char delimiter) {
  out << csv::join({kNodeColumns.begin(), kNodeColumns.end()}, delimiter) << '\n';
  for (const auto& m : nodes) {
    out << csv::join({m.firm_id, std::to_string(m.in_degree), std::to_string(m.out_degree),
                      std::to_string(m.degree), fmt::format("{}", m.clustering_coefficient),
                      fmt::format("{}", m.betweenness), fmt::format("{}", m.closeness),
                      fmt::format("{}", m.eigenvector), std::to_string(m.eccentricity)},
                     delimiter)
        << '\n';
  }
}

std::vector<NodeMetrics> read_node_metrics(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  csv::Reader reader(in, delimiter);
  std::array<int, kNodeColumns.size()> idx{};
  for (std::size_t c = 0; c < kNodeColumns.size(); ++c) {
    idx[c] = reader.column(kNodeColumns[c]);
    if (idx[c] < 0) {
      throw ParseError(ErrorCode::MissingColumn, path.string(), 1,
                       fmt::format("header lacks column '{}'", kNodeColumns[c]));
    }
  }
  std::vector<NodeMetrics> out;
  std::vector<std::string> f;
  bool ok = true;
  while (reader.next(f, ok)) {
    try {
      if (!ok || f.size() < kNodeColumns.size()) throw std::invalid_argument("short row");
      NodeMetrics m;
      m.firm_id = f[idx[0]];
      m.in_degree = std::stoi(f[idx[1]]);
      m.out_degree = std::stoi(f[idx[2]]);
      m.degree = std::stoi(f[idx[3]]);
      m.clustering_coefficient = std::stod(f[idx[4]]);
      m.betweenness = std::stod(f[idx[5]]);
      m.closeness = std::stod(f[idx[6]]);
      m.eigenvector = std::stod(f[idx[7]]);
      m.eccentricity = std::stoi(f[idx[8]]);
      out.push_back(std::move(m));
    } catch (const std::exception& e) {
      throw ParseError(ErrorCode::UnparsableValue, path.string(), reader.line(), e.what());
    }
  }
  return out;
}

void write_histogram(std::ostream& out, const std::map<int, int>& histogram, char delimiter) {
  out << "degree" << delimiter << "count\n";
  for (const auto& [degree, count] : histogram) out << degree << delimiter << count << '\n';
}

}  // namespace equinet
