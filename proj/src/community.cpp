#include "equinet/community.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "equinet/csv.hpp"
#include "equinet/error.hpp"
#include "equinet/rng.hpp"

namespace equinet {

WeightedGraph WeightedGraph::from(const EquityGraph& graph) {
  return WeightedGraph{graph.node_count(), graph.undirected_weighted_edges()};
}

int CommunityPartition::class_of(const std::string& firm_id) const {
  auto it = std::lower_bound(firm_ids.begin(), firm_ids.end(), firm_id);
  if (it == firm_ids.end() || *it != firm_id) return -1;
  return classes[static_cast<std::size_t>(it - firm_ids.begin())];
}

double modularity(const WeightedGraph& graph, std::span<const int> assignment,
                  double resolution) {
  if (graph.node_count == 0) throw Error(ErrorCode::EmptyGraph, "modularity of an empty graph");
  if (assignment.size() != graph.node_count) {
    throw Error(ErrorCode::InvalidAssignment,
                fmt::format("assignment covers {} nodes, graph has {}", assignment.size(),
                            graph.node_count));
  }
  int max_class = -1;
  for (int c : assignment) {
    if (c < 0) throw Error(ErrorCode::InvalidAssignment, "negative class index");
    max_class = std::max(max_class, c);
  }
  std::vector<double> inside(max_class + 1, 0.0), total(max_class + 1, 0.0);
  double weight = 0.0;
  for (const auto& e : graph.edges) {
    const double w = e.weight;
    weight += w;
    if (assignment[e.src] == assignment[e.dst]) inside[assignment[e.src]] += 2.0 * w;
    total[assignment[e.src]] += w;
    total[assignment[e.dst]] += w;
  }
  if (weight <= 0.0) throw Error(ErrorCode::EmptyGraph, "modularity of a graph without edges");
  const double two_w = 2.0 * weight;
  double q = 0.0;
  for (std::size_t c = 0; c < inside.size(); ++c) {
    const double share = total[c] / two_w;
    q += inside[c] / two_w - resolution * share * share;
  }
  return q;
}

namespace {

struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> neighbours;
  // Internal weight carried by each aggregated node.
  std::vector<double> inner;
  std::vector<double> degree;
  double two_w = 0.0;
};

LevelGraph to_level(const WeightedGraph& graph) {
  LevelGraph g;
  g.neighbours.resize(graph.node_count);
  g.inner.assign(graph.node_count, 0.0);
  g.degree.assign(graph.node_count, 0.0);
  for (const auto& e : graph.edges) {
    g.neighbours[e.src].push_back({e.dst, static_cast<double>(e.weight)});
    g.neighbours[e.dst].push_back({e.src, static_cast<double>(e.weight)});
    g.degree[e.src] += e.weight;
    g.degree[e.dst] += e.weight;
  }
  for (auto& list : g.neighbours) std::sort(list.begin(), list.end());
  g.two_w = std::accumulate(g.degree.begin(), g.degree.end(), 0.0);
  return g;
}

// One local-moving phase. Returns true if any node changed class.
bool move_nodes(const LevelGraph& g, std::vector<int>& comm, double resolution, Rng& rng) {
  const std::size_t n = g.neighbours.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));

  std::vector<double> link(n, -1.0);
  std::vector<int> touched;
  constexpr double kEps = 1e-10;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (int i : order) {
      const int current = comm[i];
      const double k = g.degree[i];
      touched.clear();
      for (const auto& [j, w] : g.neighbours[i]) {
        const int c = comm[j];
        if (link[c] < 0.0) {
          link[c] = 0.0;
          touched.push_back(c);
        }
        link[c] += w;
      }
      tot[current] -= k;
      const double stay_link = link[current] < 0.0 ? 0.0 : link[current];
      int best = current;
      double best_gain = stay_link - resolution * tot[current] * k / g.two_w;
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        if (c == current) continue;
        const double gain = link[c] - resolution * tot[c] * k / g.two_w;
        if (gain > best_gain + kEps) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k;
      comm[i] = best;
      if (best != current) moved = any_move = true;
      for (int c : touched) link[c] = -1.0;
    }
  }
  return any_move;
}

// Renumbers classes densely by first appearance; returns class count.
int renumber(std::vector<int>& comm) {
  std::map<int, int> fresh;
  for (int& c : comm) {
    auto [it, inserted] = fresh.emplace(c, static_cast<int>(fresh.size()));
    c = it->second;
  }
  return static_cast<int>(fresh.size());
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& comm, int classes) {
  LevelGraph out;
  out.neighbours.resize(classes);
  out.inner.assign(classes, 0.0);
  out.degree.assign(classes, 0.0);
  std::vector<std::map<int, double>> links(classes);
  for (std::size_t i = 0; i < g.neighbours.size(); ++i) {
    const int ci = comm[i];
    out.inner[ci] += g.inner[i];
    out.degree[ci] += g.degree[i];
    for (const auto& [j, w] : g.neighbours[i]) {
      if (comm[j] == ci) {
        out.inner[ci] += w / 2.0;  // seen from both ends
      } else {
        links[ci][comm[j]] += w;
      }
    }
  }
  for (int c = 0; c < classes; ++c) {
    out.neighbours[c].assign(links[c].begin(), links[c].end());
  }
  out.two_w = g.two_w;
  return out;
}

CommunityPartition finish(std::vector<int> membership, const WeightedGraph& graph,
                          double resolution) {
  CommunityPartition p;
  const int classes = renumber(membership);
  p.classes = std::move(membership);
  p.class_sizes.assign(classes, 0);
  for (int c : p.classes) ++p.class_sizes[c];
  p.resolution = resolution;
  double weight = 0.0;
  for (const auto& e : graph.edges) weight += e.weight;
  p.modularity = weight > 0.0 ? modularity(graph, p.classes, resolution) : 0.0;
  return p;
}

std::vector<int> louvain_once(const LevelGraph& base, std::uint64_t seed, double resolution) {
  std::vector<int> membership(base.neighbours.size());
  std::iota(membership.begin(), membership.end(), 0);
  std::uint64_t step = 0;
  if (base.two_w > 0.0) {
    LevelGraph level = base;
    for (;;) {
      for (;;) {
        std::vector<int> comm(level.neighbours.size());
        std::iota(comm.begin(), comm.end(), 0);
        Rng rng(derive_seed(seed, step++));
        if (!move_nodes(level, comm, resolution, rng)) break;
        const int classes = renumber(comm);
        for (int& m : membership) m = comm[m];
        if (classes == static_cast<int>(level.neighbours.size())) break;
        level = aggregate(level, comm, classes);
      }
      // Refinement: single nodes may still gain by leaving their merged class.
      Rng rng(derive_seed(seed, step++));
      if (!move_nodes(base, membership, resolution, rng)) break;
      const int classes = renumber(membership);
      level = aggregate(base, membership, classes);
    }
  }
  return membership;
}

}  // namespace

CommunityPartition louvain(const WeightedGraph& graph, std::uint64_t seed, double resolution,
                           int restarts) {
  if (graph.node_count == 0) throw Error(ErrorCode::EmptyGraph, "louvain on an empty graph");
  if (restarts < 1) throw Error(ErrorCode::ConfigInvalid, "louvain restarts must be >= 1");
  const LevelGraph base = to_level(graph);
  CommunityPartition best;
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t run_seed = r == 0 ? seed : derive_seed(seed, 0x10000u + r);
    CommunityPartition p = finish(louvain_once(base, run_seed, resolution), graph, resolution);
    if (r == 0 || p.modularity > best.modularity + 1e-12) best = std::move(p);
  }
  best.seed = seed;
  return best;
}

CommunityPartition louvain(const EquityGraph& graph, std::uint64_t seed, double resolution,
                           int restarts) {
  CommunityPartition p = louvain(WeightedGraph::from(graph), seed, resolution, restarts);
  p.firm_ids = graph.nodes();
  return p;
}

CommunityPartition make_partition(const EquityGraph& graph, std::span<const int> assignment,
                                  double resolution) {
  if (assignment.size() != graph.node_count()) {
    throw Error(ErrorCode::InvalidAssignment,
                fmt::format("assignment covers {} nodes, graph has {}", assignment.size(),
                            graph.node_count()));
  }
  for (int c : assignment) {
    if (c < 0) throw Error(ErrorCode::InvalidAssignment, "negative class index");
  }
  CommunityPartition p = finish({assignment.begin(), assignment.end()},
                                WeightedGraph::from(graph), resolution);
  p.firm_ids = graph.nodes();
  return p;
}

std::vector<int> significant_classes(const CommunityPartition& partition, double threshold) {
  const double cut = threshold * static_cast<double>(partition.classes.size());
  std::vector<int> out;
  for (int c = 0; c < partition.class_count(); ++c) {
    // Tolerates representation error in threshold * n at the boundary.
    if (static_cast<double>(partition.class_sizes[c]) >= cut * (1.0 - 1e-12)) out.push_back(c);
  }
  return out;
}

std::vector<ClassShare> class_census(const CommunityPartition& partition) {
  const double n = static_cast<double>(partition.classes.size());
  std::vector<ClassShare> out;
  for (int c = 0; c < partition.class_count(); ++c) {
    const double pct = 100.0 * partition.class_sizes[c] / n;
    out.push_back({c, partition.class_sizes[c], std::round(pct * 100.0) / 100.0});
  }
  return out;
}

int largest_class(const CommunityPartition& partition) {
  const auto it = std::max_element(partition.class_sizes.begin(), partition.class_sizes.end());
  return static_cast<int>(it - partition.class_sizes.begin());
}

DummyEncoding dummy_encode(const CommunityPartition& partition, int baseline) {
  const int m = partition.class_count();
  if (m < 2) throw Error(ErrorCode::SingleClass, "a single class needs no dummies");
  if (baseline < 0 || baseline >= m) {
    throw Error(ErrorCode::InvalidAssignment, fmt::format("baseline class {} out of range", baseline));
  }
  DummyEncoding enc;
  enc.baseline = baseline;
  std::vector<int> column_of(m, -1);
  for (int c = 0; c < m; ++c) {
    if (c == baseline) continue;
    column_of[c] = static_cast<int>(enc.column_classes.size());
    enc.column_classes.push_back(c);
  }
  enc.rows.reserve(partition.classes.size());
  for (int c : partition.classes) {
    std::vector<int> row(m - 1, 0);
    if (column_of[c] >= 0) row[column_of[c]] = 1;
    enc.rows.push_back(std::move(row));
  }
  return enc;
}

void write_partition(std::ostream& out, const CommunityPartition& partition, char delimiter) {
  out << "firm_id" << delimiter << "class\n";
  for (std::size_t i = 0; i < partition.classes.size(); ++i) {
    out << csv::escape(partition.firm_ids[i], delimiter) << delimiter << partition.classes[i]
        << '\n';
  }
}

CommunityPartition read_partition(const std::filesystem::path& path, const EquityGraph& graph,
                                  double resolution, char delimiter) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  csv::Reader reader(in, delimiter);
  const int id_col = reader.column("firm_id");
  const int class_col = reader.column("class");
  if (id_col < 0 || class_col < 0) {
    throw ParseError(ErrorCode::MissingColumn, path.string(), 1, "partition needs firm_id, class");
  }
  std::vector<int> assignment(graph.node_count(), -1);
  std::vector<std::string> f;
  bool ok = true;
  while (reader.next(f, ok)) {
    if (!ok || f.size() <= static_cast<std::size_t>(std::max(id_col, class_col))) {
      throw ParseError(ErrorCode::UnparsableValue, path.string(), reader.line(), "malformed row");
    }
    const int v = graph.index_of(f[id_col]);
    if (v < 0) continue;
    try {
      assignment[v] = std::stoi(f[class_col]);
    } catch (const std::exception&) {
      throw ParseError(ErrorCode::UnparsableValue, path.string(), reader.line(),
                       fmt::format("bad class '{}'", f[class_col]));
    }
  }
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    if (assignment[v] < 0) {
      throw Error(ErrorCode::InvalidAssignment,
                  fmt::format("{} has no class in {}", graph.nodes()[v], path.string()));
    }
  }
  return make_partition(graph, assignment, resolution);
}

}  // namespace equinet
