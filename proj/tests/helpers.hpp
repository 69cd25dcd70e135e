// Graph and layout builders shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <array>
#include <cmath>

#include "equinet/community.hpp"
#include "equinet/graph.hpp"
#include "equinet/layout.hpp"
#include "oracles.hpp"

namespace testing_util {

/// Zero-padded ids so that node index i is firm "n" + i in sorted order.
inline std::string node_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "n%04d", i);
  return buf;
}

/// Directed graph from (src, dst) pairs, one Type 1 edge each.
inline equinet::EquityGraph directed(int n, const std::vector<std::pair<int, int>>& arcs) {
  std::vector<std::string> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back(node_name(i));
  std::vector<equinet::OwnershipEdge> edges;
  for (auto [a, b] : arcs) {
    edges.push_back({node_name(a), node_name(b), equinet::RelationType::Type1, "w"});
  }
  return equinet::assemble_graph("w", nodes, edges, {}, {});
}

/// Undirected graph from sorted adjacency lists; each edge becomes a
/// Type 3 pair in both directions.
inline equinet::EquityGraph from_adjacency(const std::vector<std::vector<int>>& adj) {
  std::vector<std::pair<int, int>> arcs;
  for (int u = 0; u < static_cast<int>(adj.size()); ++u) {
    for (int v : adj[u]) arcs.emplace_back(u, v);
  }
  return directed(static_cast<int>(adj.size()), arcs);
}

inline std::vector<std::vector<int>> path_graph(int n) {
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

inline std::vector<std::vector<int>> complete_graph(int n) {
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) adj[i].push_back(j);
    }
  }
  return adj;
}

/// Centre 0 with k leaves.
inline std::vector<std::vector<int>> star_graph(int k) {
  std::vector<std::vector<int>> adj(k + 1);
  for (int i = 1; i <= k; ++i) {
    adj[0].push_back(i);
    adj[i].push_back(0);
  }
  return adj;
}

inline equinet::WeightedGraph weighted(int n, const std::vector<std::array<int, 3>>& edges) {
  equinet::WeightedGraph g;
  g.node_count = static_cast<std::size_t>(n);
  for (const auto& e : edges) g.edges.push_back({e[0], e[1], e[2]});
  return g;
}

inline std::vector<std::array<int, 3>> unit_edges(const oracle::Adj& adj) {
  std::vector<std::array<int, 3>> out;
  for (int u = 0; u < static_cast<int>(adj.size()); ++u) {
    for (int v : adj[u]) {
      if (u < v) out.push_back({u, v, 1});
    }
  }
  return out;
}

/// Two cliques of size k joined by a single edge (k-1, k).
inline oracle::Adj clique_pair(int k) {
  oracle::Adj adj(2 * k);
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i != j) adj[b * k + i].push_back(b * k + j);
      }
    }
  }
  adj[k - 1].push_back(k);
  adj[k].push_back(k - 1);
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

inline std::vector<double> masses(const oracle::Adj& adj) {
  std::vector<double> m;
  for (const auto& a : adj) m.push_back(static_cast<double>(a.size()) + 1.0);
  return m;
}

/// Direct pairwise sum, written independently of the library.
inline std::vector<equinet::Point> brute_repulsion(const std::vector<equinet::Point>& p,
                                                   const std::vector<double>& m, double kr) {
  std::vector<equinet::Point> f(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i == j) continue;
      const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
      const double d = std::hypot(dx, dy);
      const double mag = kr * m[i] * m[j] / d;
      f[i].x += mag * dx / d;
      f[i].y += mag * dy / d;
    }
  }
  return f;
}

/// Root of summed squared force error over summed squared force.
inline double relative_error(const std::vector<equinet::Point>& approx,
                             const std::vector<equinet::Point>& exact) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    num += std::pow(approx[i].x - exact[i].x, 2) + std::pow(approx[i].y - exact[i].y, 2);
    den += exact[i].x * exact[i].x + exact[i].y * exact[i].y;
  }
  return std::sqrt(num / den);
}

/// Two K4s bridged between nodes 3 and 4; node i mirrors node 7 - i.
inline oracle::Adj dumbbell() {
  oracle::Adj adj(8);
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (i != j) adj[4 * b + i].push_back(4 * b + j);
      }
    }
  }
  adj[3].push_back(4);
  adj[4].push_back(3);
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

}  // namespace testing_util
