#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "equinet/community.hpp"
#include "equinet/graph.hpp"
#include "equinet/metrics.hpp"

namespace equinet {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

/// ForceAtlas2 settings. Constants the caller does not set follow the
/// published algorithm (speed efficiency, swing protection, jitter
/// estimate).
struct LayoutParams {
  int iterations = 500;
  double gravity = 1.0;
  /// Repulsion coefficient k_r.
  double scaling = 2.0;
  /// A quadtree cell is summarised when size / distance < theta.
  double barnes_hut_theta = 0.5;
  double jitter_tolerance = 1.0;
  std::uint64_t seed = 1;
  /// Exact O(n^2) repulsion when false.
  bool barnes_hut = true;

  /// Throws ConfigInvalid for out-of-range fields.
  void validate() const;
};

struct NodePositions {
  std::map<std::string, Point> xy;
};

/// Repulsion k_r * m_i * m_j / d between every pair, as force vectors.
std::vector<Point> repulsion_exact(std::span<const Point> pos, std::span<const double> mass,
                                   double scaling);
/// The same forces with far groups of nodes replaced by their
/// mass-weighted centre (quadtree, opening angle theta).
std::vector<Point> repulsion_barnes_hut(std::span<const Point> pos, std::span<const double> mass,
                                        double scaling, double theta);

/// Deterministic starting layout: uniform in a square, then centred on
/// the origin.
std::vector<Point> initial_positions(std::size_t node_count, std::uint64_t seed);

/// Runs `params.iterations` ForceAtlas2 steps on the undirected
/// projection. Throws NonFiniteForce on numerical blow-up.
std::vector<Point> forceatlas2(const Adjacency& adj, const LayoutParams& params,
                               std::optional<std::vector<Point>> initial = std::nullopt);

NodePositions forceatlas2(const EquityGraph& graph, const LayoutParams& params);

/// firm_id, x, y with round-trip precision.
void write_positions(std::ostream& out, const EquityGraph& graph, const NodePositions& positions,
                     char delimiter = ',');
NodePositions read_positions(const std::filesystem::path& path, char delimiter = ',');

/// GEXF 1.2 document: node positions, modularity class and metrics as node
/// attributes, degree-driven node size, weighted directed simple edges.
/// Throws MissingPosition if a node has no position.
void export_gexf(std::ostream& out, const EquityGraph& graph, const NodePositions& positions,
                 const CommunityPartition* partition = nullptr,
                 std::span<const NodeMetrics> node_metrics = {});

}  // namespace equinet
