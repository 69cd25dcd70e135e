// equinet command-line front end.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "equinet/config.hpp"
#include "equinet/error.hpp"
#include "equinet/pipeline.hpp"
#include "equinet/version.hpp"

namespace fs = std::filesystem;
using namespace equinet;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kStageError = 2;

int cmd_validate(const fs::path& config) {
  const auto check = validate_config(config);
  if (check.errors.empty()) {
    const auto& c = *check.config;
    std::cout << fmt::format("{}: ok ({} window(s), {} model(s))\n", config.string(),
                             c.windows.size(), c.models.size());
    return kOk;
  }
  for (const auto& e : check.errors) std::cerr << e.to_string(config) << '\n';
  return kConfigError;
}

int cmd_run(const fs::path& config, bool resume, bool quiet) {
  RunConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }
  RunOptions opts;
  opts.resume = resume;
  opts.log = quiet ? nullptr : &std::cerr;
  const RunSummary summary = run(cfg, opts);
  std::cout << summary.output.string() << '\n';
  return kOk;
}

EquityGraph load_graph(const fs::path& edges, const fs::path& nodes, const std::string& window) {
  return read_graph(edges, nodes, window);
}

void report_skipped(const fs::path& file, const std::vector<SkippedRow>& skipped) {
  for (const auto& s : skipped) {
    std::cerr << fmt::format("{}:{}: skipped: {}\n", file.string(), s.line, s.reason);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-shareholding network construction, topology and return regressions"};
  app.set_version_flag("--version", EQUINET_VERSION);
  app.require_subcommand(1);

  fs::path config;
  bool resume = false, quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run every stage from a configuration file");
  run_cmd->add_option("--config", config, "Run configuration")->required();
  run_cmd->add_flag("--resume", resume, "Reuse stages whose inputs are unchanged");
  run_cmd->add_flag("--quiet", quiet, "No progress output");

  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration file");
  validate_cmd->add_option("--config", config, "Run configuration")->required();

  // per-stage commands
  fs::path shareholders, legal_reps, aliases, market, financials, edges, nodes, metrics_path,
      partition_path, out;
  std::string window;
  std::vector<fs::path> spec_files;
  std::uint64_t seed = 1;
  double resolution = 1.0, threshold = 0.05;
  int restarts = kDefaultLouvainRestarts;
  LayoutParams layout;
  bool exact = false;
  std::string dummies = "all";
  ParseOptions parse;
  auto add_parse_options = [&](CLI::App* cmd) {
    cmd->add_flag("--skip-bad-rows", parse.skip_bad_rows, "Skip and list malformed rows");
    cmd->add_option("--delimiter", parse.delimiter, "Field delimiter of the input files");
  };

  auto* graph_cmd = app.add_subcommand("graph", "Build one window's ownership graph");
  graph_cmd->add_option("--shareholders", shareholders)->required();
  graph_cmd->add_option("--legal-reps", legal_reps)->required();
  graph_cmd->add_option("--aliases", aliases);
  graph_cmd->add_option("--window", window, "label:YYYY-MM-DD:YYYY-MM-DD")->required();
  graph_cmd->add_option("--out", out)->required();
  add_parse_options(graph_cmd);

  auto add_graph_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--edges", edges, "edges.csv from the graph stage")->required();
    cmd->add_option("--nodes", nodes, "nodes.csv from the graph stage")->required();
    cmd->add_option("--out", out)->required();
  };
  auto* metrics_cmd = app.add_subcommand("metrics", "Topology metrics of a graph");
  add_graph_inputs(metrics_cmd);
  metrics_cmd->add_option("--window", window, "window label")->required();

  auto* comm_cmd = app.add_subcommand("communities", "Louvain communities of a graph");
  add_graph_inputs(comm_cmd);
  comm_cmd->add_option("--window", window, "window label")->required();
  comm_cmd->add_option("--seed", seed);
  comm_cmd->add_option("--resolution", resolution);
  comm_cmd->add_option("--restarts", restarts, "independent Louvain runs; best kept");
  comm_cmd->add_option("--threshold", threshold, "significant class share");

  auto* layout_cmd = app.add_subcommand("layout", "ForceAtlas2 layout and GEXF export");
  add_graph_inputs(layout_cmd);
  layout_cmd->add_option("--window", window, "window label")->required();
  layout_cmd->add_option("--partition", partition_path);
  layout_cmd->add_option("--metrics", metrics_path);
  layout_cmd->add_option("--seed", layout.seed);
  layout_cmd->add_option("--iterations", layout.iterations);
  layout_cmd->add_option("--gravity", layout.gravity);
  layout_cmd->add_option("--scaling", layout.scaling);
  layout_cmd->add_option("--theta", layout.barnes_hut_theta);
  layout_cmd->add_option("--jitter-tolerance", layout.jitter_tolerance);
  layout_cmd->add_flag("--exact", exact, "Exact O(n^2) repulsion");

  auto* regress_cmd = app.add_subcommand("regress", "Cross-section regressions for one window");
  add_graph_inputs(regress_cmd);
  regress_cmd->add_option("--window", window, "label:YYYY-MM-DD:YYYY-MM-DD")->required();
  regress_cmd->add_option("--market", market)->required();
  regress_cmd->add_option("--financials", financials)->required();
  regress_cmd->add_option("--metrics", metrics_path)->required();
  regress_cmd->add_option("--partition", partition_path)->required();
  regress_cmd->add_option("--spec", spec_files, "Model spec file (repeatable)");
  regress_cmd->add_option("--dummies", dummies)->check(CLI::IsMember({"all", "significant"}));
  regress_cmd->add_option("--threshold", threshold, "significant class share");
  add_parse_options(regress_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*validate_cmd) return cmd_validate(config);
    if (*run_cmd) return cmd_run(config, resume, quiet);

    if (*graph_cmd) {
      const PeriodWindow w = parse_window_spec(window);
      const auto sh = parse_records<ShareholderRecord>(shareholders, parse);
      const auto lr = parse_records<LegalRepRecord>(legal_reps, parse);
      report_skipped(shareholders, sh.skipped);
      report_skipped(legal_reps, lr.skipped);
      AliasTable table;
      if (!aliases.empty()) {
        const auto al = parse_records<FirmAlias>(aliases, parse);
        report_skipped(aliases, al.skipped);
        table = make_alias_table(al.records);
      }
      const EquityGraph g = build_window_graph(sh.records, lr.records, table, w);
      write_graph_outputs(out, g);
      const auto cs = connection_summary(g);
      std::cout << fmt::format("{} nodes, {} edges (type1 {}, type2 {}, type3 {})\n",
                               g.node_count(), cs.total, cs.type1, cs.type2, cs.type3);
      return kOk;
    }
    if (*metrics_cmd) {
      const EquityGraph g = load_graph(edges, nodes, window);
      write_metrics_outputs(out, compute_topology(g));
      return kOk;
    }
    if (*comm_cmd) {
      const EquityGraph g = load_graph(edges, nodes, window);
      const auto p = louvain(g, seed, resolution, restarts);
      write_community_outputs(out, p, threshold);
      std::cout << fmt::format("{} classes, modularity {:.4f}\n", p.class_count(), p.modularity);
      return kOk;
    }
    if (*layout_cmd) {
      const EquityGraph g = load_graph(edges, nodes, window);
      layout.barnes_hut = !exact;
      const NodePositions pos = forceatlas2(g, layout);
      std::optional<CommunityPartition> p;
      if (!partition_path.empty()) p = read_partition(partition_path, g, resolution);
      std::vector<NodeMetrics> m;
      if (!metrics_path.empty()) m = read_node_metrics(metrics_path);
      write_layout_outputs(out, g, pos, p ? &*p : nullptr, m);
      return kOk;
    }
    if (*regress_cmd) {
      const PeriodWindow w = parse_window_spec(window);
      const EquityGraph g = load_graph(edges, nodes, w.label);
      const auto mk_parsed = parse_records<MarketRecord>(market, parse);
      const auto fi_parsed = parse_records<FinancialRecord>(financials, parse);
      report_skipped(market, mk_parsed.skipped);
      report_skipped(financials, fi_parsed.skipped);
      const auto& mk = mk_parsed.records;
      const auto& fi = fi_parsed.records;
      const auto m = read_node_metrics(metrics_path);
      const auto p = read_partition(partition_path, g);
      CrossSectionOptions opts;
      opts.dummies = dummies == "all" ? DummyMode::AllClasses : DummyMode::SignificantClasses;
      opts.class_threshold = threshold;
      const CrossSection cs =
          build_cross_section(quarterly_average(mk, w), financials_for_window(fi, w), m, p, w, opts);
      std::vector<ModelSpec> specs;
      if (spec_files.empty()) {
        specs = default_model_specs();
      } else {
        for (const auto& f : spec_files) specs.push_back(read_model_spec(f));
      }
      std::vector<ModelRun> runs;
      for (const auto& s : specs) runs.push_back(run_model(cs, s));
      write_model_outputs(out, cs, runs);
      std::vector<const ModelRun*> ptrs;
      std::vector<std::string> headers;
      for (const auto& r : runs) {
        ptrs.push_back(&r);
        headers.push_back(r.spec.name);
      }
      std::cout << regression_table(ptrs, headers);
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::ConfigInvalid ? kConfigError : kStageError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kStageError;
  }
  return kOk;
}
