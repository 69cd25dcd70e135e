#include <ostream>
#include <string>

#include <fmt/format.h>

#include "equinet/error.hpp"
#include "equinet/layout.hpp"

namespace equinet {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Attr {
  const char* id;
  const char* title;
  const char* type;
};

constexpr Attr kAttrs[] = {
    {"modularity_class", "Modularity Class", "integer"},
    {"in_degree", "In-Degree", "integer"},
    {"out_degree", "Out-Degree", "integer"},
    {"degree", "Degree", "integer"},
    {"clustering", "Clustering Coefficient", "double"},
    {"betweenness", "Betweenness Centrality", "double"},
    {"closeness", "Closeness Centrality", "double"},
    {"eigenvector", "Eigenvector Centrality", "double"},
    {"eccentricity", "Eccentricity", "integer"},
};

}  // namespace

void export_gexf(std::ostream& out, const EquityGraph& graph, const NodePositions& positions,
                 const CommunityPartition* partition,
                 std::span<const NodeMetrics> node_metrics) {
  const auto& nodes = graph.nodes();
  for (const auto& id : nodes) {
    if (!positions.xy.contains(id)) {
      throw Error(ErrorCode::MissingPosition, fmt::format("no position for node {}", id));
    }
  }
  if (!node_metrics.empty() && node_metrics.size() != nodes.size()) {
    throw Error(ErrorCode::InvalidAssignment, "node metrics do not match the graph");
  }
  const auto adj = graph.undirected_adjacency();

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" "
         "xmlns:viz=\"http://www.gexf.net/1.2draft/viz\" version=\"1.2\">\n"
      << "  <meta>\n    <creator>equinet</creator>\n"
      << "    <description>" << xml_escape(graph.window()) << "</description>\n"
      << "  </meta>\n"
      << "  <graph mode=\"static\" defaultedgetype=\"directed\">\n";
  const bool with_class = partition != nullptr;
  const bool with_metrics = !node_metrics.empty();
  if (with_class || with_metrics) {
    out << "    <attributes class=\"node\">\n";
    for (std::size_t a = 0; a < std::size(kAttrs); ++a) {
      if (a == 0 ? !with_class : !with_metrics) continue;
      out << fmt::format("      <attribute id=\"{}\" title=\"{}\" type=\"{}\"/>\n", kAttrs[a].id,
                         kAttrs[a].title, kAttrs[a].type);
    }
    out << "    </attributes>\n";
  }

  out << "    <nodes>\n";
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const auto& id = nodes[v];
    const Point p = positions.xy.at(id);
    out << fmt::format("      <node id=\"{0}\" label=\"{0}\">\n", xml_escape(id));
    if (with_class || with_metrics) {
      out << "        <attvalues>\n";
      auto value = [&](const char* key, const std::string& val) {
        out << fmt::format("          <attvalue for=\"{}\" value=\"{}\"/>\n", key, val);
      };
      if (with_class) value("modularity_class", std::to_string(partition->class_of(id)));
      if (with_metrics) {
        const NodeMetrics& m = node_metrics[v];
        value("in_degree", std::to_string(m.in_degree));
        value("out_degree", std::to_string(m.out_degree));
        value("degree", std::to_string(m.degree));
        value("clustering", fmt::format("{}", m.clustering_coefficient));
        value("betweenness", fmt::format("{}", m.betweenness));
        value("closeness", fmt::format("{}", m.closeness));
        value("eigenvector", fmt::format("{}", m.eigenvector));
        value("eccentricity", std::to_string(m.eccentricity));
      }
      out << "        </attvalues>\n";
    }
    out << fmt::format("        <viz:position x=\"{}\" y=\"{}\" z=\"0\"/>\n", p.x, p.y);
    out << fmt::format("        <viz:size value=\"{}\"/>\n", adj[v].size() + 1);
    out << "      </node>\n";
  }
  out << "    </nodes>\n    <edges>\n";
  int eid = 0;
  for (const auto& e : graph.simple_edges()) {
    out << fmt::format("      <edge id=\"{}\" source=\"{}\" target=\"{}\" weight=\"{}\"/>\n",
                       eid++, xml_escape(nodes[e.src]), xml_escape(nodes[e.dst]), e.weight);
  }
  out << "    </edges>\n  </graph>\n</gexf>\n";
}

}  // namespace equinet
