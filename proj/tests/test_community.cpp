#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "equinet/community.hpp"
#include "equinet/error.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace equinet;
using namespace testing_util;

namespace {

const std::vector<std::array<int, 3>> kTriangles{{0, 1, 1}, {0, 2, 1}, {1, 2, 1},
                                                 {3, 4, 1}, {3, 5, 1}, {4, 5, 1}};

CommunityPartition partition_of(std::vector<int> classes) {
  CommunityPartition p;
  int m = 0;
  for (int c : classes) m = std::max(m, c + 1);
  p.class_sizes.assign(m, 0);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    p.firm_ids.push_back(node_name(static_cast<int>(i)));
    ++p.class_sizes[classes[i]];
  }
  p.classes = std::move(classes);
  return p;
}

}  // namespace

TEST(Modularity, HandValues) {
  const auto g = weighted(6, kTriangles);
  const std::vector<int> split{0, 0, 0, 1, 1, 1};
  EXPECT_NEAR(modularity(g, split), 0.5, 1e-15);
  const std::vector<int> one(6, 0);
  EXPECT_NEAR(modularity(g, one), 0.0, 1e-15);
  // relabelling classes changes nothing
  const std::vector<int> relabel{7, 7, 7, 2, 2, 2};
  EXPECT_NEAR(modularity(g, relabel), 0.5, 1e-15);
}

TEST(Modularity, MatchesPairwiseOracle) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto adj = oracle::random_graph(30, 0.15, 100 + trial);
    auto edges = unit_edges(adj);
    for (auto& e : edges) e[2] = 1 + static_cast<int>(gen() % 4);
    std::vector<int> cls(30);
    for (auto& c : cls) c = static_cast<int>(gen() % 5);
    const double gamma = trial % 2 ? 1.0 : 0.7;
    EXPECT_NEAR(modularity(weighted(30, edges), cls, gamma),
                oracle::modularity(30, edges, cls, gamma), 1e-12);
  }
}

TEST(Modularity, Errors) {
  const auto g = weighted(6, kTriangles);
  const std::vector<int> short_assign{0, 0};
  EXPECT_THROW(modularity(g, short_assign), Error);
  const std::vector<int> negative{0, 0, 0, 1, 1, -1};
  EXPECT_THROW(modularity(g, negative), Error);
  const std::vector<int> three{0, 0, 0};
  EXPECT_THROW(modularity(weighted(3, {}), three), Error);
}

TEST(Louvain, TwoTrianglesAndCompleteGraph) {
  const auto p = louvain(weighted(6, kTriangles), 1);
  EXPECT_EQ(p.class_count(), 2);
  EXPECT_NEAR(p.modularity, 0.5, 1e-12);
  EXPECT_EQ(p.classes, (std::vector<int>{0, 0, 0, 1, 1, 1}));

  const auto k6 = louvain(weighted(6, unit_edges(complete_graph(6))), 3);
  EXPECT_EQ(k6.class_count(), 1);
}

TEST(Louvain, PlantedCliquesForTenSeeds) {
  const auto g = weighted(40, unit_edges(clique_pair(20)));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = louvain(g, seed);
    ASSERT_EQ(p.class_count(), 2) << seed;
    for (int i = 0; i < 40; ++i) EXPECT_EQ(p.classes[i], i < 20 ? 0 : 1);
  }
}

TEST(Louvain, NearExhaustiveOptimumOnSmallGraphs) {
  int checked = 0;
  for (std::uint64_t s = 0; checked < 25; ++s) {
    const int n = 5 + static_cast<int>(s % 4);
    const auto edges = unit_edges(oracle::random_graph(n, 0.45, 900 + s));
    if (edges.empty()) continue;
    ++checked;
    const double best = oracle::best_modularity(n, edges);
    const auto p = louvain(weighted(n, edges), s);
    EXPECT_GE(p.modularity, best - 0.02) << "graph " << s;
    EXPECT_LE(p.modularity, best + 1e-12);
  }
}

TEST(Louvain, InvariantsOnRandomGraphs) {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto edges = unit_edges(oracle::random_graph(60, 0.08, 300 + s));
    const auto g = weighted(60, edges);
    const auto p = louvain(g, s);
    std::vector<int> singletons(60);
    for (int i = 0; i < 60; ++i) singletons[i] = i;
    EXPECT_GE(p.modularity, modularity(g, singletons) - 1e-12);
    EXPECT_NEAR(p.modularity, oracle::modularity(60, edges, p.classes), 1e-12);
    EXPECT_GE(p.modularity, -0.5);
    EXPECT_LE(p.modularity, 1.0);
    int total = 0;
    for (int c : p.class_sizes) total += c;
    EXPECT_EQ(total, 60);
    // dense numbering by first appearance
    int next = 0;
    for (int c : p.classes) {
      EXPECT_LE(c, next);
      if (c == next) ++next;
    }
    EXPECT_EQ(louvain(g, s).classes, p.classes);
  }
}

TEST(Louvain, FromEquityGraphUsesUndirectedWeights) {
  const auto g = from_adjacency(clique_pair(6));
  const auto w = WeightedGraph::from(g);
  EXPECT_EQ(w.node_count, 12u);
  for (const auto& e : w.edges) {
    EXPECT_LT(e.src, e.dst);
    EXPECT_EQ(e.weight, 2);
  }
  const auto p = louvain(g, 5);
  EXPECT_EQ(p.class_count(), 2);
  EXPECT_EQ(p.firm_ids, g.nodes());
  EXPECT_EQ(p.class_of(node_name(11)), 1);
  EXPECT_EQ(p.class_of("nope"), -1);
}

TEST(Classes, SignificanceThreshold) {
  EXPECT_EQ(significant_classes(partition_of(std::vector<int>(10, 0))), (std::vector<int>{0}));
  std::vector<int> cls;
  for (int c = 0; c < 4; ++c) {
    const int size = std::array<int, 4>{60, 30, 5, 5}[c];
    cls.insert(cls.end(), size, c);
  }
  const auto p = partition_of(cls);
  EXPECT_EQ(significant_classes(p, 0.05), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(significant_classes(p, 0.06), (std::vector<int>{0, 1}));
  EXPECT_EQ(largest_class(p), 0);
}

TEST(Classes, CensusPercentages) {
  std::vector<int> cls;
  for (int c = 0; c < 4; ++c) cls.insert(cls.end(), 25, c);
  for (const auto& s : class_census(partition_of(cls))) EXPECT_EQ(s.percent, 25.0);

  std::mt19937_64 gen(8);
  std::vector<int> r(137);
  for (auto& c : r) c = static_cast<int>(gen() % 6);
  const auto census = class_census(partition_of(r));
  double sum = 0.0;
  for (const auto& s : census) {
    const int count = static_cast<int>(std::count(r.begin(), r.end(), s.class_index));
    EXPECT_EQ(s.nodes, count);
    EXPECT_NEAR(s.percent, std::round(10000.0 * count / 137.0) / 100.0, 1e-12);
    sum += s.percent;
  }
  EXPECT_NEAR(sum, 100.0, 0.01 * census.size());
}

TEST(Classes, LargestClassTieGoesToLowestIndex) {
  EXPECT_EQ(largest_class(partition_of({0, 1, 1, 2, 2})), 1);
}

TEST(Dummies, EncodingRows) {
  const auto p = partition_of({0, 1, 2, 2, 1, 0, 2});
  const auto d = dummy_encode(p, 0);
  EXPECT_EQ(d.column_classes, (std::vector<int>{1, 2}));
  EXPECT_EQ(d.rows[0], (std::vector<int>{0, 0}));
  EXPECT_EQ(d.rows[2], (std::vector<int>{0, 1}));
  std::vector<int> col_sums(2, 0);
  for (const auto& row : d.rows) {
    EXPECT_LE(row[0] + row[1], 1);
    col_sums[0] += row[0];
    col_sums[1] += row[1];
  }
  EXPECT_EQ(col_sums, (std::vector<int>{p.class_sizes[1], p.class_sizes[2]}));
  try {
    dummy_encode(partition_of({0, 0, 0}), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
}

TEST(PartitionFile, RoundTrip) {
  const auto g = from_adjacency(clique_pair(5));
  const auto p = louvain(g, 2);
  const auto path = std::filesystem::temp_directory_path() / "equinet_partition_rt.csv";
  {
    std::ofstream out(path);
    write_partition(out, p);
  }
  const auto back = read_partition(path, g);
  EXPECT_EQ(back.classes, p.classes);
  EXPECT_EQ(back.class_sizes, p.class_sizes);
  EXPECT_NEAR(back.modularity, p.modularity, 1e-15);
  std::filesystem::remove(path);

  const std::vector<int> raw{4, 4, 4, 4, 4, 9, 9, 9, 9, 9};
  const auto m = make_partition(g, raw);
  EXPECT_EQ(m.classes, (std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
}
