#include "equinet/config.hpp"

#include <unistd.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "equinet/error.hpp"

namespace equinet {

namespace fs = std::filesystem;

std::string ConfigDiagnostic::to_string(const fs::path& source) const {
  std::string where = source.string();
  if (line > 0) where += ":" + std::to_string(line);
  if (!key.empty()) return fmt::format("{}: {}: {}", where, key, message);
  return fmt::format("{}: {}", where, message);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  std::size_t line;
};

struct Section {
  std::string kind;  // "", "window", "model"
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

class Checker {
 public:
  explicit Checker(std::vector<ConfigDiagnostic>& errors) : errors_(errors) {}

  void fail(std::size_t line, std::string key, std::string message) {
    errors_.push_back({line, std::move(key), std::move(message)});
  }

  template <typename T>
  void number(const Section& s, const std::string& key, T& out,
              const std::function<bool(T)>& ok = {}, const char* expect = nullptr) {
    auto it = s.entries.find(key);
    if (it == s.entries.end()) return;
    const std::string& v = it->second.value;
    T value{};
    bool parsed = false;
    if constexpr (std::is_floating_point_v<T>) {
      try {
        std::size_t pos = 0;
        value = static_cast<T>(std::stod(v, &pos));
        parsed = pos == v.size();
      } catch (const std::exception&) {
      }
    } else {
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
      parsed = ec == std::errc() && ptr == v.data() + v.size();
    }
    if (!parsed) {
      fail(it->second.line, key, fmt::format("cannot parse '{}' as a number", v));
      return;
    }
    if (ok && !ok(value)) {
      fail(it->second.line, key, fmt::format("value {} out of range ({})", v, expect));
      return;
    }
    out = value;
  }

  bool flag(const Section& s, const std::string& key, bool& out) {
    auto it = s.entries.find(key);
    if (it == s.entries.end()) return false;
    const auto& v = it->second.value;
    if (v == "yes" || v == "true" || v == "1") {
      out = true;
    } else if (v == "no" || v == "false" || v == "0") {
      out = false;
    } else {
      fail(it->second.line, key, fmt::format("expected yes/no, got '{}'", v));
    }
    return true;
  }

 private:
  std::vector<ConfigDiagnostic>& errors_;
};

const std::map<std::string, int>& global_keys() {
  static const std::map<std::string, int> keys = {
      {"shareholders", 0},     {"legal_reps", 0},        {"market", 0},
      {"financials", 0},       {"aliases", 0},           {"output", 0},
      {"delimiter", 0},        {"skip_bad_rows", 0},     {"louvain_seed", 0},
      {"layout_seed", 0},      {"monte_carlo_seed", 0},  {"resolution", 0},
      {"class_threshold", 0},  {"rank_tolerance", 0},    {"closeness", 0},
      {"betweenness_pairs", 0}, {"eigen_tolerance", 0},  {"eigen_max_iter", 0},
      {"layout_iterations", 0}, {"gravity", 0},          {"scaling", 0},
      {"theta", 0},            {"jitter_tolerance", 0},  {"barnes_hut", 0},
      {"dummies", 0},          {"louvain_restarts", 0},
  };
  return keys;
}

bool writable_target(const fs::path& out) {
  std::error_code ec;
  fs::path probe = out;
  while (!probe.empty() && !fs::exists(probe, ec)) {
    const auto parent = probe.parent_path();
    if (parent == probe) break;
    probe = parent;
  }
  if (probe.empty()) probe = ".";
  if (!fs::is_directory(probe, ec)) return false;
  return ::access(probe.c_str(), W_OK) == 0;
}

}  // namespace

ConfigCheck validate_config(const fs::path& path) {
  ConfigCheck check;
  auto& errors = check.errors;
  std::ifstream in(path);
  if (!in) {
    errors.push_back({0, "", "cannot open configuration file"});
    return check;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig cfg;
  cfg.source = path;
  cfg.text = buffer.str();
  const fs::path base = path.parent_path();
  Checker c(errors);

  // Pass 1: split into sections.
  std::vector<Section> sections(1);
  {
    std::istringstream lines(cfg.text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(lines, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          c.fail(line_no, "", fmt::format("malformed section header '{}'", line));
          continue;
        }
        const std::string kind = trim(line.substr(1, line.size() - 2));
        if (kind != "window" && kind != "model") {
          c.fail(line_no, "", fmt::format("unknown section [{}]", kind));
        }
        sections.push_back(Section{kind, line_no, {}});
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        c.fail(line_no, "", fmt::format("expected 'key = value', got '{}'", line));
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      auto& entries = sections.back().entries;
      if (entries.contains(key)) {
        c.fail(line_no, key, fmt::format("repeated key (first on line {})", entries[key].line));
        continue;
      }
      entries[key] = Entry{value, line_no};
    }
  }

  // Global settings.
  const Section& g = sections.front();
  for (const auto& [key, entry] : g.entries) {
    if (!global_keys().contains(key)) c.fail(entry.line, key, "unknown key");
  }
  auto input = [&](const std::string& key, bool required) -> std::optional<fs::path> {
    auto it = g.entries.find(key);
    if (it == g.entries.end()) {
      if (required) c.fail(0, key, "required input path is missing");
      return std::nullopt;
    }
    const fs::path p = base / it->second.value;
    if (!fs::is_regular_file(p)) {
      c.fail(it->second.line, key, fmt::format("input file not found: {}", p.string()));
    }
    return p;
  };
  if (auto p = input("shareholders", true)) cfg.shareholders = *p;
  if (auto p = input("legal_reps", true)) cfg.legal_reps = *p;
  if (auto p = input("market", true)) cfg.market = *p;
  if (auto p = input("financials", true)) cfg.financials = *p;
  cfg.aliases = input("aliases", false);

  if (auto it = g.entries.find("output"); it == g.entries.end()) {
    c.fail(0, "output", "output directory is missing");
  } else {
    cfg.output = base / it->second.value;
    if (!writable_target(cfg.output)) {
      c.fail(it->second.line, "output",
             fmt::format("output directory is not writable: {}", cfg.output.string()));
    }
  }
  if (auto it = g.entries.find("delimiter"); it != g.entries.end()) {
    const auto& v = it->second.value;
    if (v == "tab" || v == "\\t") {
      cfg.parse.delimiter = '\t';
    } else if (v.size() == 1 && v != "\"") {
      cfg.parse.delimiter = v[0];
    } else {
      c.fail(it->second.line, "delimiter", fmt::format("expected one character, got '{}'", v));
    }
  }
  c.flag(g, "skip_bad_rows", cfg.parse.skip_bad_rows);
  c.number<std::uint64_t>(g, "louvain_seed", cfg.louvain_seed);
  c.number<std::uint64_t>(g, "layout_seed", cfg.layout_seed);
  c.number<std::uint64_t>(g, "monte_carlo_seed", cfg.monte_carlo_seed);
  c.number<double>(g, "resolution", cfg.resolution, [](double v) { return v > 0; }, "> 0");
  c.number<int>(g, "louvain_restarts", cfg.louvain_restarts, [](int v) { return v >= 1; },
                ">= 1");
  c.number<double>(g, "class_threshold", cfg.class_threshold,
                   [](double v) { return v > 0 && v < 1; }, "between 0 and 1");
  c.number<double>(g, "rank_tolerance", cfg.rank_tolerance,
                   [](double v) { return v > 0 && v < 1e-2; }, "between 0 and 0.01");
  c.number<double>(g, "eigen_tolerance", cfg.metrics.eigen_tol,
                   [](double v) { return v > 0; }, "> 0");
  c.number<int>(g, "eigen_max_iter", cfg.metrics.eigen_max_iter, [](int v) { return v > 0; },
                "> 0");
  if (auto it = g.entries.find("closeness"); it != g.entries.end()) {
    if (it->second.value == "reachable_over_distance") {
      cfg.metrics.closeness = ClosenessConvention::ReachableOverDistance;
    } else if (it->second.value == "distance_over_reachable") {
      cfg.metrics.closeness = ClosenessConvention::DistanceOverReachable;
    } else {
      c.fail(it->second.line, "closeness",
             "expected reachable_over_distance or distance_over_reachable");
    }
  }
  if (auto it = g.entries.find("betweenness_pairs"); it != g.entries.end()) {
    if (it->second.value == "unordered") {
      cfg.metrics.betweenness_pairs = PairConvention::Unordered;
    } else if (it->second.value == "ordered") {
      cfg.metrics.betweenness_pairs = PairConvention::Ordered;
    } else {
      c.fail(it->second.line, "betweenness_pairs", "expected unordered or ordered");
    }
  }
  c.number<int>(g, "layout_iterations", cfg.layout.iterations, [](int v) { return v >= 0; },
                ">= 0");
  c.number<double>(g, "gravity", cfg.layout.gravity, [](double v) { return v >= 0; }, ">= 0");
  c.number<double>(g, "scaling", cfg.layout.scaling, [](double v) { return v > 0; }, "> 0");
  c.number<double>(g, "theta", cfg.layout.barnes_hut_theta,
                   [](double v) { return v > 0 && v <= 1; }, "in (0, 1]");
  c.number<double>(g, "jitter_tolerance", cfg.layout.jitter_tolerance,
                   [](double v) { return v > 0; }, "> 0");
  c.flag(g, "barnes_hut", cfg.layout.barnes_hut);
  cfg.layout.seed = cfg.layout_seed;
  if (auto it = g.entries.find("dummies"); it != g.entries.end()) {
    if (it->second.value == "all") {
      cfg.cross_section.dummies = DummyMode::AllClasses;
    } else if (it->second.value == "significant") {
      cfg.cross_section.dummies = DummyMode::SignificantClasses;
    } else {
      c.fail(it->second.line, "dummies", "expected all or significant");
    }
  }
  cfg.cross_section.class_threshold = cfg.class_threshold;

  // Windows and models.
  for (std::size_t i = 1; i < sections.size(); ++i) {
    const Section& s = sections[i];
    if (s.kind == "window") {
      for (const auto& [key, entry] : s.entries) {
        if (key != "label" && key != "start" && key != "end") {
          c.fail(entry.line, key, "unknown key in [window]");
        }
      }
      const auto label = s.entries.find("label");
      const auto start = s.entries.find("start");
      const auto end = s.entries.find("end");
      if (label == s.entries.end() || start == s.entries.end() || end == s.entries.end()) {
        c.fail(s.line, "window", "a window needs label, start and end");
        continue;
      }
      try {
        PeriodWindow w;
        w.label = label->second.value;
        w.start = parse_date(start->second.value);
        w.end = parse_date(end->second.value);
        if (w.label.empty() || w.label.find_first_of("/\\:") != std::string::npos) {
          c.fail(label->second.line, "label", "window labels must be non-empty path-safe names");
        }
        if (!w.spans_whole_months()) {
          c.fail(s.line, "window",
                 fmt::format("window {} must start on a month's first day and end on a month's "
                             "last day",
                             w.label));
        }
        cfg.windows.push_back(w);
      } catch (const Error& e) {
        c.fail(s.line, "window", e.what());
      }
    } else if (s.kind == "model") {
      for (const auto& [key, entry] : s.entries) {
        if (key != "spec" && key != "builtin") c.fail(entry.line, key, "unknown key in [model]");
      }
      const auto spec = s.entries.find("spec");
      const auto builtin = s.entries.find("builtin");
      if ((spec == s.entries.end()) == (builtin == s.entries.end())) {
        c.fail(s.line, "model", "a model needs exactly one of spec or builtin");
        continue;
      }
      if (builtin != s.entries.end()) {
        bool found = false;
        for (const auto& m : default_model_specs()) {
          if (m.name == builtin->second.value) {
            cfg.models.push_back(m);
            cfg.model_sources.push_back("builtin:" + m.name);
            found = true;
          }
        }
        if (!found) {
          c.fail(builtin->second.line, "builtin",
                 fmt::format("no built-in model named '{}'", builtin->second.value));
        }
        continue;
      }
      const fs::path p = base / spec->second.value;
      try {
        cfg.models.push_back(read_model_spec(p));
        cfg.model_sources.push_back(spec->second.value);
      } catch (const Error& e) {
        c.fail(spec->second.line, "spec", e.what());
      }
    }
  }
  if (cfg.windows.empty()) c.fail(0, "window", "at least one [window] section is required");
  if (cfg.models.empty()) c.fail(0, "model", "at least one [model] section is required");
  try {
    validate_windows(cfg.windows);
  } catch (const Error& e) {
    c.fail(0, "window", e.what());
  }
  for (std::size_t a = 0; a < cfg.models.size(); ++a) {
    for (std::size_t b = a + 1; b < cfg.models.size(); ++b) {
      if (cfg.models[a].name == cfg.models[b].name) {
        c.fail(0, "model", fmt::format("duplicate model name '{}'", cfg.models[a].name));
      }
    }
  }
  if (errors.empty()) check.config = std::move(cfg);
  return check;
}

RunConfig load_config(const fs::path& path) {
  auto check = validate_config(path);
  if (!check.errors.empty()) {
    std::string msg = fmt::format("{} problem(s) in {}", check.errors.size(), path.string());
    for (const auto& e : check.errors) msg += "\n  " + e.to_string(path);
    throw Error(ErrorCode::ConfigInvalid, msg);
  }
  return std::move(*check.config);
}

}  // namespace equinet
