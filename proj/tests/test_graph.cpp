#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "equinet/error.hpp"
#include "equinet/graph.hpp"
#include "equinet/records.hpp"

using namespace equinet;

namespace {

const std::string kFixtures = EQUINET_FIXTURES;

PeriodWindow q1() {
  return PeriodWindow{"Q1", parse_date("2015-03-01"), parse_date("2015-05-31")};
}

struct Small {
  std::vector<ShareholderRecord> sh =
      parse_records<ShareholderRecord>(kFixtures + "/shareholders_small.csv").records;
  std::vector<LegalRepRecord> reps =
      parse_records<LegalRepRecord>(kFixtures + "/legal_reps_small.csv").records;
  AliasTable aliases =
      make_alias_table(parse_records<FirmAlias>(kFixtures + "/aliases_small.csv").records);
};

ShareholderRecord row(std::string firm, std::string name, int rank = 1,
                      std::string date = "2015-03-31") {
  return {std::move(firm), std::move(name), rank, parse_date(date)};
}

std::size_t count(const std::vector<OwnershipEdge>& e, const std::string& a,
                  const std::string& b) {
  std::size_t c = 0;
  for (const auto& x : e) c += x.src == a && x.dst == b;
  return c;
}

}  // namespace

TEST(Type1, DirectHoldingOfListedFirm) {
  const std::vector<ShareholderRecord> sh{row("A", "B Corp"), row("B", "someone")};
  const AliasTable aliases{{"B Corp", "B"}};
  const std::vector<std::string> listed{"A", "B"};
  const auto e = build_type1(sh, aliases, listed);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].src, "A");
  EXPECT_EQ(e[0].dst, "B");
  EXPECT_EQ(e[0].relation, RelationType::Type1);
  EXPECT_TRUE(build_type1(sh, {}, listed).empty());
  // alias to an unlisted firm or to itself gives nothing
  EXPECT_TRUE(build_type1(sh, {{"B Corp", "Z"}}, listed).empty());
  EXPECT_TRUE(build_type1(sh, {{"B Corp", "A"}}, listed).empty());
}

TEST(Type1, RepeatedAcrossReportDatesGivesWeightTwo) {
  Small s;
  const auto g = build_window_graph(s.sh, s.reps, s.aliases, q1());
  const auto t1 = build_type1(window_slice<ShareholderRecord>(s.sh, q1()), s.aliases,
                              listed_firms(s.sh));
  EXPECT_EQ(count(t1, "600001", "600003"), 2u);
  const int a = g.index_of("600001"), b = g.index_of("600003");
  int type1_weight = 0;
  for (const auto& e : g.raw_edges()) {
    type1_weight += e.relation == RelationType::Type1 && e.src == "600001" && e.dst == "600003";
  }
  EXPECT_EQ(type1_weight, 2);
  // plus two Type 3 ties via Beta Capital and Zhang Wei
  for (const auto& e : g.simple_edges()) {
    if (e.src == a && e.dst == b) {
      EXPECT_EQ(e.weight, 4);
    }
  }
}

TEST(Type2, LegalRepresentativeLinks) {
  const std::vector<ShareholderRecord> sh{row("A", "X"), row("B", "p"), row("C", "q")};
  const std::vector<LegalRepRecord> reps{{"X", "B", parse_date("2015-03-31")},
                                         {"X", "C", parse_date("2015-03-31")}};
  const auto e = build_type2(sh, reps);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(count(e, "A", "B"), 1u);
  EXPECT_EQ(count(e, "A", "C"), 1u);
  const std::vector<LegalRepRecord> self{{"X", "A", parse_date("2015-03-31")}};
  EXPECT_TRUE(build_type2(sh, self).empty());
}

TEST(Type3, OrderedPairsAndCombinatorialCount) {
  EXPECT_EQ(build_type3(std::vector<ShareholderRecord>{row("A", "S"), row("B", "S")}).size(), 2u);
  EXPECT_TRUE(build_type3(std::vector<ShareholderRecord>{row("A", "S")}).empty());
  const auto three =
      build_type3(std::vector<ShareholderRecord>{row("A", "S"), row("B", "S"), row("C", "S")});
  EXPECT_EQ(three.size(), 6u);
  for (const auto& e : three) EXPECT_NE(e.src, e.dst);

  // random holdings: compare with brute force over (holder, ordered pair) triples
  std::mt19937_64 gen(5);
  std::vector<ShareholderRecord> sh;
  std::map<std::string, std::set<std::string>> holds;
  for (int f = 0; f < 25; ++f) {
    const std::string firm = "F" + std::to_string(f);
    std::set<int> picked;
    while (picked.size() < 6) picked.insert(static_cast<int>(gen() % 15));
    int rank = 1;
    for (int h : picked) {
      const std::string name = "H" + std::to_string(h);
      sh.push_back(row(firm, name, rank++));
      holds[name].insert(firm);
    }
  }
  std::size_t brute = 0;
  std::map<std::pair<std::string, std::string>, std::size_t> pair_count;
  for (const auto& [name, firms] : holds) {
    for (const auto& a : firms) {
      for (const auto& b : firms) {
        if (a != b) {
          ++brute;
          ++pair_count[{a, b}];
        }
      }
    }
  }
  const auto e = build_type3(sh);
  EXPECT_EQ(e.size(), brute);
  std::map<std::pair<std::string, std::string>, std::size_t> got;
  for (const auto& x : e) ++got[{x.src, x.dst}];
  EXPECT_EQ(got, pair_count);

  // monotone: one more record never removes an edge
  auto more = sh;
  more.push_back(row("F0", "H99", 10));
  more.push_back(row("F1", "H99", 10));
  const auto e2 = build_type3(more);
  EXPECT_EQ(e2.size(), e.size() + 2);
}

TEST(Assemble, NodesEdgesAndWeights) {
  const auto g = assemble_graph("w", {"A", "B", "C", "D", "E"}, {}, {}, {});
  EXPECT_EQ(g.node_count(), 5u);
  EXPECT_TRUE(g.simple_edges().empty());
  EXPECT_EQ(connection_summary(g), (ConnectionSummary{0, 0, 0, 0}));

  const std::vector<OwnershipEdge> par{{"A", "B", RelationType::Type1, "w"},
                                       {"A", "B", RelationType::Type2, "w"},
                                       {"A", "B", RelationType::Type3, "w"}};
  const auto g2 = assemble_graph("w", {"A", "B"}, par, {}, {});
  ASSERT_EQ(g2.simple_edges().size(), 1u);
  EXPECT_EQ(g2.simple_edges()[0].weight, 3);

  const std::vector<OwnershipEdge> bad{{"A", "Z", RelationType::Type1, "w"}};
  try {
    assemble_graph("w", {"A", "B"}, bad, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EdgeEndpointUnknown);
  }
  const std::vector<OwnershipEdge> loop{{"A", "A", RelationType::Type1, "w"}};
  EXPECT_THROW(assemble_graph("w", {"A"}, loop, {}, {}), Error);
}

TEST(Assemble, SmallFixtureCensusMatchesHandCount) {
  Small s;
  const auto g = build_window_graph(s.sh, s.reps, s.aliases, q1());
  EXPECT_EQ(g.node_count(), 6u);
  const auto c = connection_summary(g);
  EXPECT_EQ(c.type1, 3u);
  EXPECT_EQ(c.type2, 7u);
  EXPECT_EQ(c.type3, 28u);
  EXPECT_EQ(c.total, c.type1 + c.type2 + c.type3);
  EXPECT_EQ(g.simple_edges().size(), 19u);
  int weight = 0;
  for (const auto& e : g.simple_edges()) weight += e.weight;
  EXPECT_EQ(weight, static_cast<int>(g.raw_edges().size()));
  EXPECT_EQ(g.undirected_weighted_edges().size(), 10u);
  for (const auto& e : g.raw_edges()) EXPECT_NE(e.src, e.dst);
}

TEST(Assemble, CensusEqualsLineCountOfExport) {
  Small s;
  const auto g = build_window_graph(s.sh, s.reps, s.aliases, q1());
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "source,target,type");
  std::map<char, std::size_t> by_type;
  while (std::getline(lines, line)) ++by_type[line.back()];
  const auto c = connection_summary(g);
  EXPECT_EQ(by_type['1'], c.type1);
  EXPECT_EQ(by_type['2'], c.type2);
  EXPECT_EQ(by_type['3'], c.type3);
}

TEST(Assemble, OnlyFilingFirmsAreNodes) {
  Small s;
  const auto g = build_window_graph(s.sh, s.reps, s.aliases, q1());
  EXPECT_EQ(g.index_of("600099"), -1);
  // a window containing only the May filings keeps just the two filers
  const PeriodWindow may{"May", parse_date("2015-05-01"), parse_date("2015-05-31")};
  const auto gm = build_window_graph(s.sh, s.reps, s.aliases, may);
  EXPECT_EQ(gm.nodes(), (std::vector<std::string>{"600001", "600004"}));
}

TEST(Assemble, EdgeListRoundTrip) {
  Small s;
  const auto g = build_window_graph(s.sh, s.reps, s.aliases, q1());
  const auto dir = std::filesystem::temp_directory_path() / "equinet_graph_rt";
  std::filesystem::create_directories(dir);
  {
    std::ofstream e(dir / "edges.csv"), n(dir / "nodes.csv");
    write_edge_list(e, g);
    write_node_list(n, g);
  }
  const auto back = read_graph(dir / "edges.csv", dir / "nodes.csv", "Q1");
  EXPECT_EQ(back.nodes(), g.nodes());
  EXPECT_EQ(back.raw_edges(), g.raw_edges());
  EXPECT_EQ(back.simple_edges(), g.simple_edges());
  std::filesystem::remove_all(dir);
}
