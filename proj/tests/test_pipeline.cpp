#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <unistd.h>

#include "equinet/config.hpp"
#include "equinet/error.hpp"
#include "equinet/pipeline.hpp"

using namespace equinet;
namespace fs = std::filesystem;

namespace {

const fs::path kE2e = fs::path(EQUINET_FIXTURES) / "e2e";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("equinet_pipeline_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// relative path -> file bytes
std::map<std::string, std::string> read_bundle(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return files;
}

std::string inputs_block() {
  std::string s;
  for (const char* key : {"shareholders", "legal_reps", "aliases", "market", "financials"}) {
    s += std::string(key) + " = " + (kE2e / (std::string(key) + ".csv")).string() + "\n";
  }
  return s;
}

const std::string kModel = "[model]\nbuiltin = return_ols\n";

std::string window(const std::string& label, const std::string& start, const std::string& end) {
  return "[window]\nlabel = " + label + "\nstart = " + start + "\nend = " + end + "\n";
}

std::string all_errors(const ConfigCheck& check, const fs::path& source) {
  std::string s;
  for (const auto& e : check.errors) s += e.to_string(source) + "\n";
  return s;
}

RunConfig e2e_config(const fs::path& out) {
  RunConfig cfg = load_config(kE2e / "equinet.cfg");
  cfg.output = out;
  return cfg;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + std::string(EQUINET_CLI) + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ZeroWindowsIsRejected) {
  const fs::path dir = scratch("zero_windows");
  spit(dir / "run.cfg", inputs_block() + "output = out\n" + kModel);
  const auto check = validate_config(dir / "run.cfg");
  EXPECT_FALSE(check.config);
  EXPECT_NE(all_errors(check, dir / "run.cfg").find("at least one [window]"), std::string::npos);
  EXPECT_THROW(load_config(dir / "run.cfg"), Error);
  fs::remove_all(dir);
}

TEST(Config, OverlappingWindowsNameBoth) {
  const fs::path dir = scratch("overlap");
  spit(dir / "run.cfg", inputs_block() + "output = out\n" +
                            window("early", "2015-01-01", "2015-04-30") +
                            window("late", "2015-04-01", "2015-06-30") + kModel);
  const auto check = validate_config(dir / "run.cfg");
  const std::string errors = all_errors(check, dir / "run.cfg");
  EXPECT_NE(errors.find("'early'"), std::string::npos) << errors;
  EXPECT_NE(errors.find("'late'"), std::string::npos) << errors;
  fs::remove_all(dir);
}

TEST(Config, MissingInputsAndBadValuesAreAllReported) {
  const fs::path dir = scratch("missing");
  spit(dir / "run.cfg",
       "shareholders = nowhere.csv\nlegal_reps = " + (kE2e / "legal_reps.csv").string() +
           "\nmarket = " + (kE2e / "market.csv").string() + "\noutput = out\nresolution = -1\n" +
           window("q1", "2015-01-01", "2015-03-31") + kModel);
  const auto check = validate_config(dir / "run.cfg");
  const std::string errors = all_errors(check, dir / "run.cfg");
  EXPECT_NE(errors.find("nowhere.csv"), std::string::npos) << errors;
  EXPECT_NE(errors.find("financials"), std::string::npos) << errors;
  EXPECT_NE(errors.find("resolution"), std::string::npos) << errors;
  EXPECT_GE(check.errors.size(), 3u);
  fs::remove_all(dir);
}

TEST(Pipeline, ConnectionCountsMatchIndependentCensus) {
  const fs::path dir = scratch("census");
  const auto summary = run(e2e_config(dir / "out"));
  std::ifstream in(kE2e / "expected_counts.csv");
  std::string line;
  std::getline(in, line);
  std::size_t w = 0;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string label, f;
    std::vector<std::size_t> v;
    std::getline(row, label, ',');
    while (std::getline(row, f, ',')) v.push_back(std::stoul(f));
    ASSERT_LT(w, summary.windows.size());
    const auto& s = summary.windows[w++];
    EXPECT_EQ(s.label, label);
    EXPECT_EQ(s.graph.node_count, v[0]) << label;
    EXPECT_EQ(s.connections.type1, v[1]) << label;
    EXPECT_EQ(s.connections.type2, v[2]) << label;
    EXPECT_EQ(s.connections.type3, v[3]) << label;
    EXPECT_EQ(s.connections.total, v[4]) << label;
    EXPECT_EQ(s.graph.edge_count, v[5]) << label;
  }
  EXPECT_EQ(w, 3u);
  fs::remove_all(dir);
}

TEST(Pipeline, BundleMatchesGoldenDigests) {
  const fs::path dir = scratch("golden");
  run(e2e_config(dir / "out"));
  const auto files = read_bundle(dir / "out");
  std::ifstream sums(kE2e / "golden" / "SHA256SUMS");
  std::map<std::string, std::string> want;
  std::string digest, name;
  while (sums >> digest >> name) want[name] = digest;
  ASSERT_EQ(files.size(), want.size());
  for (const auto& [rel, bytes] : files) {
    ASSERT_TRUE(want.contains(rel)) << rel;
    EXPECT_EQ(sha256_hex(bytes), want[rel]) << rel;
  }
  for (const auto& e : fs::directory_iterator(kE2e / "golden" / "tables")) {
    EXPECT_EQ(files.at("tables/" + e.path().filename().string()), slurp(e.path()))
        << e.path().filename();
  }
  fs::remove_all(dir);
}

TEST(Pipeline, TwoRunsAreByteIdentical) {
  const fs::path dir = scratch("twice");
  run(e2e_config(dir / "a"));
  run(e2e_config(dir / "b"));
  EXPECT_EQ(read_bundle(dir / "a"), read_bundle(dir / "b"));
  fs::remove_all(dir);
}

TEST(Pipeline, ResumeReusesUnchangedStages) {
  const fs::path dir = scratch("resume");
  RunConfig cfg = e2e_config(dir / "out");
  const auto first = run(cfg);
  for (const auto& s : first.stages) EXPECT_FALSE(s.reused) << s.window << " " << s.stage;
  const auto before = read_bundle(dir / "out");

  const auto again = run(cfg, {.resume = true});
  for (const auto& s : again.stages) {
    if (s.stage != "econometrics") {
      EXPECT_TRUE(s.reused) << s.window << " " << s.stage;
    }
  }
  EXPECT_EQ(read_bundle(dir / "out"), before);

  cfg.layout_seed += 1;
  const auto moved = run(cfg, {.resume = true});
  for (const auto& s : moved.stages) {
    if (s.stage == "layout") {
      EXPECT_FALSE(s.reused) << s.window;
    } else if (s.stage != "econometrics") {
      EXPECT_TRUE(s.reused) << s.window << " " << s.stage;
    }
  }
  fs::remove_all(dir);
}

TEST(Pipeline, FailureLeavesNoPartialOutput) {
  const fs::path dir = scratch("failure");
  spit(dir / "market.csv", slurp(kE2e / "market.csv") + "600001,2015-01,oops,1,1\n");
  RunConfig cfg = e2e_config(dir / "out");
  cfg.market = dir / "market.csv";
  try {
    run(cfg);
    FAIL() << "expected a failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StageFailed);
  }
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_FALSE(fs::exists(dir / "out.partial"));
  fs::remove_all(dir);
}

TEST(Pipeline, RefusesToReplaceForeignDirectory) {
  const fs::path dir = scratch("foreign");
  fs::create_directories(dir / "out");
  spit(dir / "out" / "thesis.tex", "precious");
  try {
    run(e2e_config(dir / "out"));
    FAIL() << "expected a refusal";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
  }
  EXPECT_EQ(slurp(dir / "out" / "thesis.tex"), "precious");
  fs::remove_all(dir);
}

TEST(Cli, ExitCodesAndOutputOverride) {
  const fs::path dir = scratch("cli");
  const std::string cfg = "\"" + (kE2e / "equinet.cfg").string() + "\"";
  EXPECT_EQ(run_cli("validate --config " + cfg), 0);

  spit(dir / "bad.cfg", inputs_block() + "output = out\n" + kModel);
  EXPECT_EQ(run_cli("validate --config \"" + (dir / "bad.cfg").string() + "\""), 1);
  EXPECT_EQ(run_cli("run --no-such-flag"), 1);

  const std::string env = "EQUINET_OUTPUT_DIR=\"" + (dir / "bundle").string() + "\"";
  EXPECT_EQ(run_cli("run --quiet --config " + cfg, env), 0);
  EXPECT_TRUE(fs::exists(dir / "bundle" / "manifest.txt"));
  EXPECT_FALSE(fs::exists(kE2e / "out"));

  spit(dir / "market.csv", slurp(kE2e / "market.csv") + "600001,2015-01,oops,1,1\n");
  std::string broken = slurp(kE2e / "equinet.cfg");
  for (const char* key : {"shareholders", "legal_reps", "aliases", "financials"}) {
    const std::string from = std::string(key) + " = " + key + ".csv";
    broken.replace(broken.find(from), from.size(),
                   std::string(key) + " = " + (kE2e / (std::string(key) + ".csv")).string());
  }
  broken.replace(broken.find("market = market.csv"), 19,
                 "market = " + (dir / "market.csv").string());
  broken.replace(broken.find("[model]\nspec"), std::string::npos, "");
  spit(dir / "broken.cfg", broken);
  EXPECT_EQ(run_cli("run --quiet --config \"" + (dir / "broken.cfg").string() + "\""), 2);
  EXPECT_FALSE(fs::exists(dir / "out"));
  fs::remove_all(dir);
}
