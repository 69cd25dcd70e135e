#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "equinet/community.hpp"
#include "equinet/cross_section.hpp"
#include "equinet/graph.hpp"
#include "equinet/metrics.hpp"
#include "equinet/model_spec.hpp"

namespace equinet {

/// "***" for p < .01, "**" for p < .05, "*" for p < .1.
std::string stars(double p);

/// edges / nodes, fixed to three decimals.
std::string format_average_degree(std::size_t edges, std::size_t nodes);

/// Four significant digits.
std::string format_coefficient(double value);

/// 2540 -> "2,540".
std::string group_thousands(long long value);

/// Summary built from type counts; the total is their sum.
ConnectionSummary make_connection_summary(std::size_t type1, std::size_t type2,
                                          std::size_t type3);

struct WindowSummary {
  std::string label;
  ConnectionSummary connections;
  GraphMetrics graph;
  double modularity = 0.0;
  int class_count = 0;
  int significant_classes = 0;
  std::vector<ClassShare> census;
};

/// Window, total, Type 1..3.
std::string connections_table(std::span<const WindowSummary> windows);
/// Nodes, edges, average degree, diameter, clustering, path length,
/// modularity and significant class count, one column per window.
std::string network_table(std::span<const WindowSummary> windows);
/// Node share of every class, one column per window.
std::string census_table(std::span<const WindowSummary> windows);

/// Coefficients with stars and standard errors in parentheses beneath,
/// then R-square, the overall test and the sample size; one column per
/// model. Rows follow the union of coefficient names in first-seen order.
std::string regression_table(std::span<const ModelRun* const> runs,
                             std::span<const std::string> headers);

/// Lower triangle; "." marks an undefined correlation.
std::string correlation_table(const ModelRun& run);

std::string diagnostics_text(const ModelRun& run);
std::string cross_section_text(const CrossSection& cs);

/// name, coefficient, se, t, p per row.
void write_coefficients(std::ostream& out, const ModelRun& run, char delimiter = ',');

/// Fixed-width text table; the first column is left-aligned.
std::string align_columns(const std::vector<std::vector<std::string>>& rows);

}  // namespace equinet
