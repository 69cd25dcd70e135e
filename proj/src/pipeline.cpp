#include "equinet/pipeline.hpp"

#include <openssl/evp.h>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "equinet/error.hpp"
#include "equinet/version.hpp"

namespace equinet {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::StageFailed, "SHA-256 digest failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

fs::path resolve_output(const RunConfig& config) {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return config.output;
}

void write_text(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::StageFailed, fmt::format("cannot write {}", path.string()));
}

namespace {

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream s;
  fn(s);
  write_text(path, s.str());
}

}  // namespace

void write_graph_outputs(const fs::path& dir, const EquityGraph& graph) {
  write_with(dir / "edges.csv", [&](std::ostream& o) { write_edge_list(o, graph); });
  write_with(dir / "nodes.csv", [&](std::ostream& o) { write_node_list(o, graph); });
  const auto cs = connection_summary(graph);
  write_text(dir / "connections.csv",
             fmt::format("total,type1,type2,type3\n{},{},{},{}\n", cs.total, cs.type1, cs.type2,
                         cs.type3));
}

void write_metrics_outputs(const fs::path& dir, const TopologyReport& report) {
  write_with(dir / "node_metrics.csv", [&](std::ostream& o) { write_node_metrics(o, report.nodes); });
  write_with(dir / "degree_in.csv",
             [&](std::ostream& o) { write_histogram(o, report.graph.histograms.in); });
  write_with(dir / "degree_out.csv",
             [&](std::ostream& o) { write_histogram(o, report.graph.histograms.out); });
  write_with(dir / "degree_total.csv",
             [&](std::ostream& o) { write_histogram(o, report.graph.histograms.total); });
  const auto& g = report.graph;
  write_text(dir / "graph_metrics.csv",
             fmt::format("key,value\nnode_count,{}\nedge_count,{}\naverage_degree,{}\n"
                         "diameter,{}\naverage_clustering,{}\naverage_path_length,{}\n",
                         g.node_count, g.edge_count, g.average_degree, g.diameter,
                         g.average_clustering, g.average_path_length));
}

GraphMetrics read_graph_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma != std::string::npos) kv[line.substr(0, comma)] = line.substr(comma + 1);
  }
  GraphMetrics g;
  try {
    g.node_count = std::stoull(kv.at("node_count"));
    g.edge_count = std::stoull(kv.at("edge_count"));
    g.average_degree = std::stod(kv.at("average_degree"));
    g.diameter = std::stoi(kv.at("diameter"));
    g.average_clustering = std::stod(kv.at("average_clustering"));
    g.average_path_length = std::stod(kv.at("average_path_length"));
  } catch (const std::exception& e) {
    throw ParseError(ErrorCode::UnparsableValue, path.string(), 0, e.what());
  }
  return g;
}

void write_community_outputs(const fs::path& dir, const CommunityPartition& partition,
                             double class_threshold) {
  write_with(dir / "partition.csv", [&](std::ostream& o) { write_partition(o, partition); });
  std::string census = "class,nodes,percent\n";
  for (const auto& c : class_census(partition)) {
    census += fmt::format("{},{},{:.2f}\n", c.class_index, c.nodes, c.percent);
  }
  write_text(dir / "census.csv", census);
  write_text(dir / "modularity.txt",
             fmt::format("modularity {}\nclasses {}\nsignificant_classes {}\nseed {}\n",
                         partition.modularity, partition.class_count(),
                         significant_classes(partition, class_threshold).size(), partition.seed));
}

void write_layout_outputs(const fs::path& dir, const EquityGraph& graph,
                          const NodePositions& positions, const CommunityPartition* partition,
                          std::span<const NodeMetrics> metrics) {
  write_with(dir / "positions.csv",
             [&](std::ostream& o) { write_positions(o, graph, positions); });
  write_with(dir / "graph.gexf",
             [&](std::ostream& o) { export_gexf(o, graph, positions, partition, metrics); });
}

void write_model_outputs(const fs::path& dir, const CrossSection& cs,
                         std::span<const ModelRun> runs) {
  write_with(dir / "cross_section.csv", [&](std::ostream& o) { write_cross_section(o, cs); });
  write_text(dir / "cross_section.txt", cross_section_text(cs));
  std::vector<const ModelRun*> ptrs;
  std::vector<std::string> headers;
  for (const auto& run : runs) {
    const fs::path m = dir / "models" / run.spec.name;
    write_with(m / "coefficients.csv", [&](std::ostream& o) { write_coefficients(o, run); });
    const ModelRun* one[] = {&run};
    const std::string header[] = {run.spec.name};
    write_text(m / "table.txt", regression_table(one, header));
    write_text(m / "diagnostics.txt", diagnostics_text(run));
    write_text(m / "correlation.txt", correlation_table(run));
    write_with(m / "spec.txt", [&](std::ostream& o) { write_model_spec(o, run.spec); });
    ptrs.push_back(&run);
    headers.push_back(run.spec.name);
  }
  write_text(dir / "models" / "comparison.txt", regression_table(ptrs, headers));
}

namespace {

struct Inputs {
  std::vector<ShareholderRecord> shareholders;
  std::vector<LegalRepRecord> legal_reps;
  std::vector<MarketRecord> market;
  std::vector<FinancialRecord> financials;
  AliasTable aliases;
  std::map<std::string, std::string> hashes;
  std::string report;
};

class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& window, const std::exception& cause)
      : Error(ErrorCode::StageFailed,
              window.empty() ? fmt::format("stage {} failed: {}", stage, cause.what())
                             : fmt::format("stage {} failed for window {}: {}", stage, window,
                                           cause.what())) {}
};

template <typename Fn>
auto stage(const std::string& name, const std::string& window, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, window, e);
  }
}

template <typename Record>
std::string skipped_report(const std::string& label, const ParseResult<Record>& r) {
  std::string out = fmt::format("{}: {} records, {} skipped\n", label, r.records.size(),
                                r.skipped.size());
  for (const auto& s : r.skipped) out += fmt::format("  line {}: {}\n", s.line, s.reason);
  return out;
}

Inputs ingest(const RunConfig& cfg) {
  Inputs in;
  auto sh = parse_records<ShareholderRecord>(cfg.shareholders, cfg.parse);
  auto lr = parse_records<LegalRepRecord>(cfg.legal_reps, cfg.parse);
  auto mk = parse_records<MarketRecord>(cfg.market, cfg.parse);
  auto fi = parse_records<FinancialRecord>(cfg.financials, cfg.parse);
  in.report = skipped_report("shareholders", sh) + skipped_report("legal_reps", lr) +
              skipped_report("market", mk) + skipped_report("financials", fi);
  in.shareholders = std::move(sh.records);
  in.legal_reps = std::move(lr.records);
  in.market = std::move(mk.records);
  in.financials = std::move(fi.records);
  in.hashes["shareholders"] = file_sha256(cfg.shareholders);
  in.hashes["legal_reps"] = file_sha256(cfg.legal_reps);
  in.hashes["market"] = file_sha256(cfg.market);
  in.hashes["financials"] = file_sha256(cfg.financials);
  if (cfg.aliases) {
    auto al = parse_records<FirmAlias>(*cfg.aliases, cfg.parse);
    in.report += skipped_report("aliases", al);
    in.aliases = make_alias_table(al.records);
    in.hashes["aliases"] = file_sha256(*cfg.aliases);
  } else {
    in.hashes["aliases"] = "none";
  }
  return in;
}

std::string manifest(const RunConfig& cfg, const Inputs& in) {
  std::string out;
  out += fmt::format("equinet {}\n", EQUINET_VERSION);
  out += fmt::format("eigen {}.{}.{}\n", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                     EIGEN_MINOR_VERSION);
  out += fmt::format("fmt {}\n", FMT_VERSION);
  out += fmt::format("boost {}.{}.{}\n", BOOST_VERSION / 100000, BOOST_VERSION / 100 % 1000,
                     BOOST_VERSION % 100);
  out += fmt::format("config {}\n", cfg.source.filename().string());
  out += fmt::format("seed louvain {}\nseed layout {}\nseed monte_carlo {}\n", cfg.louvain_seed,
                     cfg.layout_seed, cfg.monte_carlo_seed);
  for (const auto& [name, hash] : in.hashes) out += fmt::format("input {} {}\n", name, hash);
  for (const auto& w : cfg.windows) {
    out += fmt::format("window {} {} {}\n", w.label, format_date(w.start), format_date(w.end));
  }
  for (std::size_t i = 0; i < cfg.models.size(); ++i) {
    out += fmt::format("model {} {}\n", cfg.models[i].name, cfg.model_sources[i]);
  }
  out += "--- config ---\n";
  out += cfg.text;
  if (!cfg.text.empty() && cfg.text.back() != '\n') out += '\n';
  return out;
}

std::map<std::string, std::string> read_stage_keys(const fs::path& bundle) {
  std::map<std::string, std::string> keys;
  std::ifstream in(bundle / "stage_keys.txt");
  std::string window, name, key;
  while (in >> window >> name >> key) keys[window + "/" + name] = key;
  return keys;
}

bool is_bundle(const fs::path& dir) {
  return fs::is_regular_file(dir / "manifest.txt") && fs::is_regular_file(dir / "stage_keys.txt");
}

// Copies the listed files of a previous bundle; false if any is missing.
bool reuse_files(const fs::path& from, const fs::path& to, std::initializer_list<const char*> files) {
  for (const char* f : files) {
    if (!fs::is_regular_file(from / f)) return false;
  }
  fs::create_directories(to);
  for (const char* f : files) {
    fs::copy_file(from / f, to / f, fs::copy_options::overwrite_existing);
  }
  return true;
}

void remove_partial(const fs::path& partial) {
  std::error_code ec;
  fs::remove_all(partial, ec);
}

}  // namespace

RunSummary run(const RunConfig& cfg, const RunOptions& options) {
  if (cfg.windows.empty()) throw Error(ErrorCode::ConfigInvalid, "no windows configured");
  if (cfg.models.empty()) throw Error(ErrorCode::ConfigInvalid, "no model specs configured");
  validate_windows(cfg.windows);
  cfg.layout.validate();

  RunSummary summary;
  summary.output = resolve_output(cfg);
  const fs::path out = summary.output;
  fs::path partial = out;
  partial += ".partial";
  if (fs::exists(out) && !(fs::is_directory(out) && (fs::is_empty(out) || is_bundle(out)))) {
    throw Error(ErrorCode::ConfigInvalid,
                fmt::format("output {} exists and is not a previous bundle; refusing to replace it",
                            out.string()));
  }
  remove_partial(partial);
  const auto previous_keys = options.resume && is_bundle(out) ? read_stage_keys(out)
                                                              : std::map<std::string, std::string>{};
  auto log = [&](const std::string& msg) {
    if (options.log) *options.log << msg << '\n';
  };

  try {
    fs::create_directories(partial);
    const Inputs in = stage("ingest", "", [&] { return ingest(cfg); });
    write_text(partial / "ingest.txt", in.report);
    const std::string manifest_text = manifest(cfg, in);
    const std::string base_key = sha256_hex(fmt::format(
        "{}|{}|{}", EQUINET_VERSION, cfg.parse.delimiter, cfg.parse.skip_bad_rows));

    std::string stage_keys;
    std::map<std::string, std::vector<ModelRun>> runs_by_window;

    for (const auto& w : cfg.windows) {
      const fs::path wdir = partial / "windows" / w.label;
      const fs::path prev = out / "windows" / w.label;
      auto reusable = [&](const std::string& name, const std::string& key) {
        auto it = previous_keys.find(w.label + "/" + name);
        return it != previous_keys.end() && it->second == key;
      };
      auto record = [&](const std::string& name, const std::string& key, bool reused) {
        summary.stages.push_back({w.label, name, key, reused});
        stage_keys += fmt::format("{} {} {}\n", w.label, name, key);
        log(fmt::format("[{}] {} {}", w.label, name, reused ? "reused" : "computed"));
      };

      // graph
      const std::string graph_key = sha256_hex(fmt::format(
          "graph|{}|{}|{}|{}|{}|{}|{}", base_key, in.hashes.at("shareholders"),
          in.hashes.at("legal_reps"), in.hashes.at("aliases"), w.label, format_date(w.start),
          format_date(w.end)));
      EquityGraph graph;
      bool reused = false;
      stage("graph", w.label, [&] {
        if (reusable("graph", graph_key) &&
            reuse_files(prev, wdir, {"edges.csv", "nodes.csv", "connections.csv"})) {
          graph = read_graph(wdir / "edges.csv", wdir / "nodes.csv", w.label);
          reused = true;
        } else {
          graph = build_window_graph(in.shareholders, in.legal_reps, in.aliases, w);
          if (graph.node_count() == 0) {
            throw Error(ErrorCode::EmptyGraph, "no listed firm files a shareholder list");
          }
          write_graph_outputs(wdir, graph);
        }
        return 0;
      });
      record("graph", graph_key, reused);

      // metrics
      const std::string metrics_key = sha256_hex(fmt::format(
          "metrics|{}|{}|{}|{}|{}", graph_key, static_cast<int>(cfg.metrics.closeness),
          static_cast<int>(cfg.metrics.betweenness_pairs), cfg.metrics.eigen_tol,
          cfg.metrics.eigen_max_iter));
      TopologyReport topo;
      reused = false;
      stage("metrics", w.label, [&] {
        if (reusable("metrics", metrics_key) &&
            reuse_files(prev, wdir,
                        {"node_metrics.csv", "degree_in.csv", "degree_out.csv",
                         "degree_total.csv", "graph_metrics.csv"})) {
          topo.nodes = read_node_metrics(wdir / "node_metrics.csv");
          topo.graph = read_graph_metrics(wdir / "graph_metrics.csv");
          topo.graph.histograms = degree_distribution(degrees(graph));
          reused = true;
        } else {
          topo = compute_topology(graph, cfg.metrics);
          write_metrics_outputs(wdir, topo);
        }
        return 0;
      });
      record("metrics", metrics_key, reused);

      // communities
      const std::string community_key = sha256_hex(fmt::format(
          "communities|{}|{}|{}|{}|{}", graph_key, cfg.louvain_seed, cfg.resolution,
          cfg.louvain_restarts, cfg.class_threshold));
      CommunityPartition partition;
      reused = false;
      stage("communities", w.label, [&] {
        if (reusable("communities", community_key) &&
            reuse_files(prev, wdir, {"partition.csv", "census.csv", "modularity.txt"})) {
          partition = read_partition(wdir / "partition.csv", graph, cfg.resolution);
          partition.seed = cfg.louvain_seed;
          reused = true;
        } else {
          partition = louvain(graph, cfg.louvain_seed, cfg.resolution, cfg.louvain_restarts);
          write_community_outputs(wdir, partition, cfg.class_threshold);
        }
        return 0;
      });
      record("communities", community_key, reused);

      // layout
      LayoutParams lp = cfg.layout;
      lp.seed = cfg.layout_seed;
      const std::string layout_key = sha256_hex(fmt::format(
          "layout|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}", graph_key, metrics_key, community_key,
          lp.iterations, lp.gravity, lp.scaling, lp.barnes_hut_theta, lp.jitter_tolerance,
          lp.seed, lp.barnes_hut));
      reused = false;
      stage("layout", w.label, [&] {
        if (reusable("layout", layout_key) &&
            reuse_files(prev, wdir, {"positions.csv", "graph.gexf"})) {
          reused = true;
        } else {
          const NodePositions positions = forceatlas2(graph, lp);
          write_layout_outputs(wdir, graph, positions, &partition, topo.nodes);
        }
        return 0;
      });
      record("layout", layout_key, reused);

      // econometrics: always recomputed
      stage("econometrics", w.label, [&] {
        RankToleranceScope tolerance(cfg.rank_tolerance);
        const auto market = quarterly_average(in.market, w);
        const auto fin = financials_for_window(in.financials, w);
        const CrossSection cs =
            build_cross_section(market, fin, topo.nodes, partition, w, cfg.cross_section);
        std::vector<ModelRun> runs;
        for (const auto& spec : cfg.models) runs.push_back(run_model(cs, spec));
        write_model_outputs(wdir, cs, runs);
        runs_by_window[w.label] = std::move(runs);
        return 0;
      });
      log(fmt::format("[{}] econometrics computed", w.label));

      WindowSummary ws;
      ws.label = w.label;
      ws.connections = connection_summary(graph);
      ws.graph = topo.graph;
      ws.modularity = partition.modularity;
      ws.class_count = partition.class_count();
      ws.significant_classes =
          static_cast<int>(significant_classes(partition, cfg.class_threshold).size());
      ws.census = class_census(partition);
      summary.windows.push_back(std::move(ws));
    }

    stage("report", "", [&] {
      write_text(partial / "tables" / "connections.txt", connections_table(summary.windows));
      write_text(partial / "tables" / "network.txt", network_table(summary.windows));
      write_text(partial / "tables" / "census.txt", census_table(summary.windows));
      for (const auto& spec : cfg.models) {
        std::vector<const ModelRun*> ptrs;
        std::vector<std::string> headers;
        for (const auto& w : cfg.windows) {
          for (const auto& r : runs_by_window.at(w.label)) {
            if (r.spec.name == spec.name) ptrs.push_back(&r);
          }
          headers.push_back(w.label);
        }
        write_text(partial / "tables" / fmt::format("model_{}.txt", spec.name),
                   regression_table(ptrs, headers));
      }
      write_text(partial / "stage_keys.txt", stage_keys);
      write_text(partial / "manifest.txt", manifest_text);
      return 0;
    });

    std::error_code ec;
    fs::remove_all(out, ec);
    if (ec) throw Error(ErrorCode::StageFailed, fmt::format("cannot replace {}", out.string()));
    fs::rename(partial, out);
  } catch (...) {
    remove_partial(partial);
    throw;
  }
  return summary;
}

}  // namespace equinet
