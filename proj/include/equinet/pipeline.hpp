#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "equinet/community.hpp"
#include "equinet/config.hpp"
#include "equinet/cross_section.hpp"
#include "equinet/graph.hpp"
#include "equinet/layout.hpp"
#include "equinet/metrics.hpp"
#include "equinet/model_spec.hpp"
#include "equinet/report.hpp"

namespace equinet {

/// Name of the environment variable that overrides the output directory.
inline constexpr const char* kOutputDirEnv = "EQUINET_OUTPUT_DIR";

struct RunOptions {
  /// Reuse graph, metrics, community and layout outputs of a previous
  /// bundle whose stage keys match.
  bool resume = false;
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
};

struct StageRecord {
  std::string window;
  std::string stage;
  std::string key;
  bool reused = false;
};

struct RunSummary {
  std::filesystem::path output;
  std::vector<StageRecord> stages;
  std::vector<WindowSummary> windows;
};

/// Output directory after the environment override.
std::filesystem::path resolve_output(const RunConfig& config);

/// Runs every stage for every window into `<output>.partial`, then swaps
/// it into place. On failure the partial directory is removed and
/// Error(StageFailed) names the stage, the window and the cause.
RunSummary run(const RunConfig& config, const RunOptions& options = {});

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

// Stage writers, shared with the per-stage CLI commands.
void write_text(const std::filesystem::path& path, std::string_view text);
void write_graph_outputs(const std::filesystem::path& dir, const EquityGraph& graph);
void write_metrics_outputs(const std::filesystem::path& dir, const TopologyReport& report);
GraphMetrics read_graph_metrics(const std::filesystem::path& path);
void write_community_outputs(const std::filesystem::path& dir, const CommunityPartition& partition,
                             double class_threshold);
void write_layout_outputs(const std::filesystem::path& dir, const EquityGraph& graph,
                          const NodePositions& positions, const CommunityPartition* partition,
                          std::span<const NodeMetrics> metrics);
void write_model_outputs(const std::filesystem::path& dir, const CrossSection& cs,
                         std::span<const ModelRun> runs);

}  // namespace equinet
