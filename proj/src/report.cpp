#include "equinet/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "equinet/csv.hpp"
#include "equinet/error.hpp"

namespace equinet {

std::string stars(double p) {
  if (!(p >= 0.0)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

std::string format_average_degree(std::size_t edges, std::size_t nodes) {
  if (nodes == 0) throw Error(ErrorCode::EmptyGraph, "average degree of an empty graph");
  return fmt::format("{:.3f}", static_cast<double>(edges) / static_cast<double>(nodes));
}

std::string format_coefficient(double value) {
  if (std::isnan(value)) return ".";
  return fmt::format("{:.4g}", value);
}

std::string group_thousands(long long value) {
  std::string digits = std::to_string(value < 0 ? -value : value);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return value < 0 ? "-" + out : out;
}

ConnectionSummary make_connection_summary(std::size_t type1, std::size_t type2,
                                          std::size_t type3) {
  return {type1, type2, type3, type1 + type2 + type3};
}

std::string align_columns(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (r.size() > width.size()) width.resize(r.size(), 0);
    for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j == 0) {
        line += fmt::format("{:<{}}", r[j], width[j]);
      } else {
        line += fmt::format("  {:>{}}", r[j], width[j]);
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

std::string connections_table(std::span<const WindowSummary> windows) {
  std::vector<std::vector<std::string>> rows{{"Window", "Total", "Type 1", "Type 2", "Type 3"}};
  for (const auto& w : windows) {
    rows.push_back({w.label, std::to_string(w.connections.total),
                    std::to_string(w.connections.type1), std::to_string(w.connections.type2),
                    std::to_string(w.connections.type3)});
  }
  return align_columns(rows);
}

std::string network_table(std::span<const WindowSummary> windows) {
  std::vector<std::vector<std::string>> rows(10);
  rows[0] = {""};
  rows[1] = {"Node"};
  rows[2] = {"Edge"};
  rows[3] = {"Average degree"};
  rows[4] = {"Network diameter"};
  rows[5] = {"Average clustering coefficient"};
  rows[6] = {"Average path length"};
  rows[7] = {"Modularity coefficient"};
  rows[8] = {"Modularity class (>5%)"};
  rows[9] = {"Layout"};
  for (const auto& w : windows) {
    rows[0].push_back(w.label);
    rows[1].push_back(std::to_string(w.graph.node_count));
    rows[2].push_back(std::to_string(w.graph.edge_count));
    rows[3].push_back(format_average_degree(w.graph.edge_count, w.graph.node_count));
    rows[4].push_back(std::to_string(w.graph.diameter));
    rows[5].push_back(fmt::format("{:.3f}", w.graph.average_clustering));
    rows[6].push_back(fmt::format("{:.3f}", w.graph.average_path_length));
    rows[7].push_back(fmt::format("{:.3f}", w.modularity));
    rows[8].push_back(std::to_string(w.significant_classes));
    rows[9].push_back("ForceAtlas2");
  }
  return align_columns(rows);
}

std::string census_table(std::span<const WindowSummary> windows) {
  int max_classes = 0;
  for (const auto& w : windows) max_classes = std::max(max_classes, w.class_count);
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Modularity class"});
  for (const auto& w : windows) rows[0].push_back(w.label);
  for (int c = 0; c < max_classes; ++c) {
    std::vector<std::string> row{std::to_string(c)};
    for (const auto& w : windows) {
      row.push_back(c < static_cast<int>(w.census.size())
                        ? fmt::format("{:.2f}%", w.census[c].percent)
                        : "");
    }
    rows.push_back(std::move(row));
  }
  return align_columns(rows);
}

std::string regression_table(std::span<const ModelRun* const> runs,
                             std::span<const std::string> headers) {
  std::vector<std::string> names;
  for (const auto* run : runs) {
    for (const auto& nm : run->result.names) {
      if (std::find(names.begin(), names.end(), nm) == names.end()) names.push_back(nm);
    }
  }
  // Constant after the regressors, class dummies last.
  std::stable_partition(names.begin(), names.end(), [](const std::string& nm) {
    return nm != "_cons" && nm.rfind("class_", 0) != 0;
  });
  std::stable_partition(names.begin(), names.end(),
                        [](const std::string& nm) { return nm.rfind("class_", 0) != 0; });

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{""};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    head.push_back(i < headers.size() ? headers[i] : runs[i]->spec.name);
  }
  rows.push_back(head);
  for (const auto& nm : names) {
    std::vector<std::string> coef{nm}, se{""};
    for (const auto* run : runs) {
      const int j = run->result.index_of(nm);
      if (j < 0) {
        coef.push_back("");
        se.push_back("");
      } else {
        coef.push_back(format_coefficient(run->result.coefficients[j]) +
                       stars(run->result.p_values[j]));
        se.push_back("(" + format_coefficient(run->result.standard_errors[j]) + ")");
      }
    }
    rows.push_back(std::move(coef));
    rows.push_back(std::move(se));
  }
  std::vector<std::string> r2{"R-square"}, test{"Overall test"}, n{"Sample size"};
  for (const auto* run : runs) {
    const auto& r = run->result;
    std::string r2s = fmt::format("{:.4f}", r.r_squared);
    if (!r.first_stage.empty()) {
      r2s += fmt::format(" / {:.4f} (1st stage)", r.first_stage.front().r_squared);
    }
    r2.push_back(r2s);
    if (r.f_df2 > 0) {
      test.push_back(fmt::format("F({},{}) = {:.2f}{}", r.f_df1, r.f_df2, r.f_stat, stars(r.f_p)));
    } else {
      test.push_back(fmt::format("Wald chi2({}) = {:.2f}{}", r.f_df1, r.f_stat, stars(r.f_p)));
    }
    n.push_back(group_thousands(r.n));
  }
  rows.push_back(std::move(r2));
  rows.push_back(std::move(test));
  rows.push_back(std::move(n));
  std::string out = align_columns(rows);
  out += "Standard errors are in parentheses.\n*** p<.01, ** p<.05, * p<.1\n";
  return out;
}

std::string correlation_table(const ModelRun& run) {
  const auto& names = run.correlation_names;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{""};
  head.insert(head.end(), names.begin(), names.end());
  rows.push_back(head);
  for (std::size_t a = 0; a < names.size(); ++a) {
    std::vector<std::string> row{names[a]};
    for (std::size_t b = 0; b <= a; ++b) {
      const double v = run.correlation.size() ? run.correlation(a, b) : std::nan("");
      row.push_back(std::isnan(v) ? "." : fmt::format("{:.4f}", v));
    }
    rows.push_back(std::move(row));
  }
  return align_columns(rows);
}

std::string diagnostics_text(const ModelRun& run) {
  std::string out;
  auto line = [&](const TestResult& t) {
    if (t.distribution == "F") {
      out += fmt::format("{}: F({},{}) = {:.4f}, p = {:.4f}\n", t.name, t.df1, t.df2,
                         t.statistic, t.p);
    } else {
      out += fmt::format("{}: chi2({}) = {:.4f}, p = {:.4f}\n", t.name, t.df1, t.statistic,
                         t.p);
    }
  };
  for (const auto& t : run.diagnostics) line(t);
  if (run.dwh) {
    line(run.dwh->score);
    line(run.dwh->f);
  }
  for (const auto& fs : run.result.first_stage) {
    out += fmt::format("First stage for {}: R-square = {:.4f}, F({},{}) = {:.4f}\n",
                       fs.endogenous, fs.r_squared, fs.df1, fs.df2, fs.partial_f);
  }
  if (run.turning_point) {
    out += fmt::format("Turning point in npf_d: {:.3f}\n", *run.turning_point);
  }
  for (const auto& w : run.result.warnings) out += "warning: " + w + "\n";
  for (const auto& n : run.notes) out += "note: " + n + "\n";
  return out;
}

std::string cross_section_text(const CrossSection& cs) {
  std::string out = fmt::format("window {}: {} observations\n", cs.window, cs.rows.size());
  for (const auto& [reason, count] : cs.dropped) {
    out += fmt::format("  dropped ({}): {}\n", reason, count);
  }
  out += fmt::format("  baseline class: {}\n", cs.baseline_class);
  std::string dummies;
  for (const auto& d : cs.dummy_names()) dummies += (dummies.empty() ? "" : " ") + d;
  out += fmt::format("  dummies: {}\n", dummies.empty() ? "(none)" : dummies);
  if (!cs.empty_classes.empty()) {
    std::string empty;
    for (int c : cs.empty_classes) empty += (empty.empty() ? "" : " ") + std::to_string(c);
    out += fmt::format("  classes without sample firms: {}\n", empty);
  }
  out += fmt::format("  net profit mean {} sd {}\n", cs.npf_mean, cs.npf_sd);
  return out;
}

void write_coefficients(std::ostream& out, const ModelRun& run, char delimiter) {
  const auto& r = run.result;
  out << "name" << delimiter << "coefficient" << delimiter << "se" << delimiter << "t"
      << delimiter << "p\n";
  for (int j = 0; j < r.k; ++j) {
    out << csv::escape(r.names[j], delimiter) << delimiter
        << fmt::format("{}", r.coefficients[j]) << delimiter
        << fmt::format("{}", r.standard_errors[j]) << delimiter
        << fmt::format("{}", r.t_stats[j]) << delimiter << fmt::format("{}", r.p_values[j])
        << '\n';
  }
}

}  // namespace equinet
