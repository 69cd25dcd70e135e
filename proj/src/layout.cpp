#include "equinet/layout.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include <fmt/format.h>

#include "equinet/csv.hpp"
#include "equinet/error.hpp"
#include "equinet/rng.hpp"

namespace equinet {

void LayoutParams::validate() const {
  if (iterations < 0) throw Error(ErrorCode::ConfigInvalid, "layout iterations must be >= 0");
  if (!(gravity >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "gravity must be >= 0");
  if (!(scaling > 0.0)) throw Error(ErrorCode::ConfigInvalid, "scaling must be > 0");
  if (!(barnes_hut_theta > 0.0 && barnes_hut_theta <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "barnes_hut_theta must lie in (0, 1]");
  }
  if (!(jitter_tolerance > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "jitter_tolerance must be > 0");
  }
}

std::vector<Point> repulsion_exact(std::span<const Point> pos, std::span<const double> mass,
                                   double scaling) {
  std::vector<Point> force(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      const double dx = pos[i].x - pos[j].x;
      const double dy = pos[i].y - pos[j].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 <= 0.0) continue;
      const double factor = scaling * mass[i] * mass[j] / d2;
      force[i].x += dx * factor;
      force[i].y += dy * factor;
      force[j].x -= dx * factor;
      force[j].y -= dy * factor;
    }
  }
  return force;
}

namespace {

// Region quadtree over the layout; leaves hold one body, or several when
// bodies coincide beyond the depth limit.
class QuadTree {
 public:
  QuadTree(std::span<const Point> pos, std::span<const double> mass) : pos_(pos), mass_(mass) {
    double min_x = pos[0].x, max_x = pos[0].x, min_y = pos[0].y, max_y = pos[0].y;
    for (const auto& p : pos) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    origin_ = {min_x, min_y};
    const double size = std::max({max_x - min_x, max_y - min_y, 1e-12});
    cells_.emplace_back(0.0, 0.0, size * (1.0 + 1e-9));
    for (std::size_t i = 0; i < pos.size(); ++i) insert(0, static_cast<int>(i), 0);
  }

  Point force_on(int body, double scaling, double theta) const {
    Point f;
    accumulate(0, body, relative(body), scaling, theta, f);
    return f;
  }

 private:
  static constexpr int kMaxDepth = 48;

  struct Cell {
    Cell(double x, double y, double s) : x0(x), y0(y), size(s) {}

    double x0, y0, size;
    double mass = 0.0;
    double cx = 0.0, cy = 0.0;  // mass-weighted centre, absolute coordinates
    std::array<int, 4> child{-1, -1, -1, -1};
    std::vector<int> bodies;
    bool leaf = true;
  };

  Point relative(int body) const {
    return {pos_[body].x - origin_.x, pos_[body].y - origin_.y};
  }

  int quadrant(const Cell& c, const Point& r) const {
    const double half = c.size / 2.0;
    return (r.x >= c.x0 + half ? 1 : 0) + (r.y >= c.y0 + half ? 2 : 0);
  }

  int child_of(int cell, int q) {
    if (cells_[cell].child[q] < 0) {
      const Cell& c = cells_[cell];
      const double half = c.size / 2.0;
      const Cell child(c.x0 + (q & 1 ? half : 0.0), c.y0 + (q & 2 ? half : 0.0), half);
      cells_.push_back(child);
      cells_[cell].child[q] = static_cast<int>(cells_.size() - 1);
    }
    return cells_[cell].child[q];
  }

  void insert(int cell, int body, int depth) {
    {
      Cell& c = cells_[cell];
      const double m = mass_[body];
      c.cx = (c.cx * c.mass + pos_[body].x * m) / (c.mass + m);
      c.cy = (c.cy * c.mass + pos_[body].y * m) / (c.mass + m);
      c.mass += m;
      if (c.leaf && (c.bodies.empty() || depth >= kMaxDepth)) {
        c.bodies.push_back(body);
        return;
      }
    }
    if (cells_[cell].leaf) {
      // Split: push the resident body one level down.
      std::vector<int> resident = std::move(cells_[cell].bodies);
      cells_[cell].bodies.clear();
      cells_[cell].leaf = false;
      for (int r : resident) {
        const int q = quadrant(cells_[cell], relative(r));
        insert(child_of(cell, q), r, depth + 1);
      }
    }
    const int q = quadrant(cells_[cell], relative(body));
    insert(child_of(cell, q), body, depth + 1);
  }

  bool holds(const Cell& c, const Point& r) const {
    return r.x >= c.x0 && r.x < c.x0 + c.size && r.y >= c.y0 && r.y < c.y0 + c.size;
  }

  void add_pair(int body, double ox, double oy, double other_mass, double scaling,
                Point& f) const {
    const double dx = pos_[body].x - ox;
    const double dy = pos_[body].y - oy;
    const double d2 = dx * dx + dy * dy;
    if (d2 <= 0.0) return;
    const double factor = scaling * mass_[body] * other_mass / d2;
    f.x += dx * factor;
    f.y += dy * factor;
  }

  void accumulate(int cell, int body, const Point& r, double scaling, double theta,
                  Point& f) const {
    const Cell& c = cells_[cell];
    if (c.leaf) {
      for (int other : c.bodies) {
        if (other != body) add_pair(body, pos_[other].x, pos_[other].y, mass_[other], scaling, f);
      }
      return;
    }
    if (!holds(c, r)) {
      const double dx = pos_[body].x - c.cx;
      const double dy = pos_[body].y - c.cy;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (c.size < theta * dist) {
        add_pair(body, c.cx, c.cy, c.mass, scaling, f);
        return;
      }
    }
    for (int q : c.child) {
      if (q >= 0) accumulate(q, body, r, scaling, theta, f);
    }
  }

  std::span<const Point> pos_;
  std::span<const double> mass_;
  Point origin_;
  std::vector<Cell> cells_;
};

}  // namespace

std::vector<Point> repulsion_barnes_hut(std::span<const Point> pos, std::span<const double> mass,
                                        double scaling, double theta) {
  std::vector<Point> force(pos.size());
  if (pos.empty()) return force;
  QuadTree tree(pos, mass);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    force[i] = tree.force_on(static_cast<int>(i), scaling, theta);
  }
  return force;
}

std::vector<Point> initial_positions(std::size_t node_count, std::uint64_t seed) {
  Rng rng(seed);
  const double half = 10.0 * std::sqrt(static_cast<double>(std::max<std::size_t>(node_count, 1)));
  std::vector<Point> pos(node_count);
  double sx = 0.0, sy = 0.0;
  for (auto& p : pos) {
    p.x = rng.uniform(-half, half);
    p.y = rng.uniform(-half, half);
    sx += p.x;
    sy += p.y;
  }
  if (node_count > 0) {
    sx /= static_cast<double>(node_count);
    sy /= static_cast<double>(node_count);
    for (auto& p : pos) {
      p.x -= sx;
      p.y -= sy;
    }
  }
  return pos;
}

std::vector<Point> forceatlas2(const Adjacency& adj, const LayoutParams& params,
                               std::optional<std::vector<Point>> initial) {
  params.validate();
  const std::size_t n = adj.size();
  if (n == 0) throw Error(ErrorCode::EmptyGraph, "layout of an empty graph");
  std::vector<Point> pos = initial ? std::move(*initial) : initial_positions(n, params.seed);
  if (pos.size() != n) {
    throw Error(ErrorCode::MissingPosition, "initial positions do not cover every node");
  }
  std::vector<double> mass(n);
  for (std::size_t v = 0; v < n; ++v) mass[v] = static_cast<double>(adj[v].size()) + 1.0;

  std::vector<Point> force(n), previous(n);
  double speed = 1.0;
  double speed_efficiency = 1.0;
  const double nd = static_cast<double>(n);

  for (int iter = 0; iter < params.iterations; ++iter) {
    previous.swap(force);
    force = params.barnes_hut
                ? repulsion_barnes_hut(pos, mass, params.scaling, params.barnes_hut_theta)
                : repulsion_exact(pos, mass, params.scaling);

    for (std::size_t v = 0; v < n; ++v) {
      // gravity: k_g * m toward the origin
      const double d = std::sqrt(pos[v].x * pos[v].x + pos[v].y * pos[v].y);
      if (d > 0.0 && params.gravity > 0.0) {
        const double factor = params.gravity * mass[v] / d;
        force[v].x -= pos[v].x * factor;
        force[v].y -= pos[v].y * factor;
      }
      // linear attraction, each undirected edge once
      for (int w : adj[v]) {
        if (w <= static_cast<int>(v)) continue;
        const double dx = pos[v].x - pos[w].x;
        const double dy = pos[v].y - pos[w].y;
        force[v].x -= dx;
        force[v].y -= dy;
        force[w].x += dx;
        force[w].y += dy;
      }
    }

    double total_swinging = 0.0;
    double total_traction = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (!std::isfinite(force[v].x) || !std::isfinite(force[v].y)) {
        throw Error(ErrorCode::NonFiniteForce,
                    fmt::format("non-finite force on node {} at iteration {}", v, iter));
      }
      const double sx = previous[v].x - force[v].x;
      const double sy = previous[v].y - force[v].y;
      const double tx = previous[v].x + force[v].x;
      const double ty = previous[v].y + force[v].y;
      total_swinging += mass[v] * std::sqrt(sx * sx + sy * sy);
      total_traction += mass[v] * 0.5 * std::sqrt(tx * tx + ty * ty);
    }

    // Adaptive global speed.
    const double estimated_jt = 0.05 * std::sqrt(nd);
    const double min_jt = std::sqrt(estimated_jt);
    constexpr double kMaxJt = 10.0;
    double jt = params.jitter_tolerance *
                std::max(min_jt, std::min(kMaxJt, estimated_jt * total_traction / (nd * nd)));
    constexpr double kMinSpeedEfficiency = 0.05;
    if (total_traction > 0.0 && total_swinging / total_traction > 2.0) {
      if (speed_efficiency > kMinSpeedEfficiency) speed_efficiency *= 0.5;
      jt = std::max(jt, params.jitter_tolerance);
    }
    const double target_speed = total_swinging > 0.0
                                    ? jt * speed_efficiency * total_traction / total_swinging
                                    : std::numeric_limits<double>::infinity();
    if (total_swinging > jt * total_traction) {
      if (speed_efficiency > kMinSpeedEfficiency) speed_efficiency *= 0.7;
    } else if (speed < 1000.0) {
      speed_efficiency *= 1.3;
    }
    constexpr double kMaxRise = 0.5;
    speed = speed + std::min(target_speed - speed, kMaxRise * speed);

    for (std::size_t v = 0; v < n; ++v) {
      const double sx = previous[v].x - force[v].x;
      const double sy = previous[v].y - force[v].y;
      const double swinging = mass[v] * std::sqrt(sx * sx + sy * sy);
      const double factor = speed / (1.0 + std::sqrt(speed * swinging));
      pos[v].x += force[v].x * factor;
      pos[v].y += force[v].y * factor;
      if (!std::isfinite(pos[v].x) || !std::isfinite(pos[v].y)) {
        throw Error(ErrorCode::NonFiniteForce,
                    fmt::format("non-finite position for node {} at iteration {}", v, iter));
      }
    }
  }
  return pos;
}

NodePositions forceatlas2(const EquityGraph& graph, const LayoutParams& params) {
  const auto pos = forceatlas2(graph.undirected_adjacency(), params);
  NodePositions out;
  for (std::size_t v = 0; v < graph.node_count(); ++v) out.xy.emplace(graph.nodes()[v], pos[v]);
  return out;
}

void write_positions(std::ostream& out, const EquityGraph& graph, const NodePositions& positions,
                     char delimiter) {
  out << "firm_id" << delimiter << "x" << delimiter << "y\n";
  for (const auto& id : graph.nodes()) {
    auto it = positions.xy.find(id);
    if (it == positions.xy.end()) throw Error(ErrorCode::MissingPosition, id);
    out << csv::escape(id, delimiter) << delimiter << fmt::format("{}", it->second.x) << delimiter
        << fmt::format("{}", it->second.y) << '\n';
  }
}

NodePositions read_positions(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  csv::Reader reader(in, delimiter);
  const int id = reader.column("firm_id"), xc = reader.column("x"), yc = reader.column("y");
  if (id < 0 || xc < 0 || yc < 0) {
    throw ParseError(ErrorCode::MissingColumn, path.string(), 1, "positions need firm_id, x, y");
  }
  NodePositions out;
  std::vector<std::string> f;
  bool ok = true;
  while (reader.next(f, ok)) {
    try {
      if (!ok || f.size() <= static_cast<std::size_t>(std::max({id, xc, yc}))) {
        throw std::invalid_argument("short row");
      }
      out.xy[f[id]] = Point{std::stod(f[xc]), std::stod(f[yc])};
    } catch (const std::exception& e) {
      throw ParseError(ErrorCode::UnparsableValue, path.string(), reader.line(), e.what());
    }
  }
  return out;
}

}  // namespace equinet
