#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "equinet/community.hpp"
#include "equinet/cross_section.hpp"
#include "equinet/layout.hpp"
#include "equinet/metrics.hpp"
#include "equinet/model_spec.hpp"
#include "equinet/records.hpp"

namespace equinet {

struct RunConfig {
  std::filesystem::path source;
  /// Verbatim file contents, echoed into the manifest.
  std::string text;

  std::filesystem::path shareholders;
  std::filesystem::path legal_reps;
  std::filesystem::path market;
  std::filesystem::path financials;
  /// Optional name -> firm_id table for Type 1 edges.
  std::optional<std::filesystem::path> aliases;
  std::filesystem::path output;

  ParseOptions parse;
  std::vector<PeriodWindow> windows;

  std::uint64_t louvain_seed = 1;
  std::uint64_t layout_seed = 1;
  std::uint64_t monte_carlo_seed = 1;
  double resolution = 1.0;
  int louvain_restarts = kDefaultLouvainRestarts;
  double class_threshold = 0.05;
  double rank_tolerance = 1e-10;

  MetricsOptions metrics;
  LayoutParams layout;
  CrossSectionOptions cross_section;

  std::vector<ModelSpec> models;
  /// Spec file (relative to the config) or "builtin:<name>" per model.
  std::vector<std::string> model_sources;
};

struct ConfigDiagnostic {
  /// 0 when the problem is not tied to a line.
  std::size_t line = 0;
  std::string key;
  std::string message;

  std::string to_string(const std::filesystem::path& source) const;
};

struct ConfigCheck {
  std::optional<RunConfig> config;
  std::vector<ConfigDiagnostic> errors;
};

/// Parses and checks a run configuration, collecting every problem rather
/// than stopping at the first. Relative paths resolve against the config
/// file's directory.
ConfigCheck validate_config(const std::filesystem::path& path);

/// validate_config that throws ConfigInvalid listing all diagnostics.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace equinet
