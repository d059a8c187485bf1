#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "rwsm/errors.hpp"
#include "rwsm/graph.hpp"
#include "rwsm/random.hpp"

using namespace rwsm;

namespace {

Graph cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= n; ++i) e.emplace_back(i, i % n + 1);
  return Graph(n, e);
}

Graph random_graph(int n, double p, Rng& rng) {
  std::vector<std::pair<int, int>> e;
  for (int u = 1; u <= n; ++u)
    for (int v = u + 1; v <= n; ++v)
      if (uniform01(rng) < p) e.emplace_back(u, v);
  return Graph(n, e);
}

// Every labeling in {0..k}^n with all k labels used, evaluated through
// cheeger_objective directly.
double brute_force(const Graph& g, int k) {
  const int n = g.n();
  std::vector<int> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    SubPartition parts;
    parts.parts.assign(k, {});
    for (int v = 0; v < n; ++v)
      if (label[v] > 0) parts.parts[label[v] - 1].push_back(v + 1);
    if (std::all_of(parts.parts.begin(), parts.parts.end(), [](const auto& p) { return !p.empty(); }))
      best = std::min(best, cheeger_objective(g, parts));
    int i = 0;
    while (i < n && label[i] == k) label[i++] = 0;
    if (i == n) break;
    ++label[i];
  }
  return best;
}

}  // namespace

TEST(LoadGraph, HeaderFormat) {
  const LoadedGraph k2 = load_graph("p 2 1\ne 1 2\n");
  EXPECT_EQ(k2.graph.n(), 2);
  ASSERT_EQ(k2.graph.edge_count(), 1u);
  EXPECT_EQ(k2.graph.edges()[0], std::make_pair(1, 2));
  EXPECT_TRUE(k2.warnings.empty());

  const LoadedGraph p3 = load_graph("c path\np 3 2\ne 1 2\ne 2 3\n");
  EXPECT_EQ(p3.graph.n(), 3);
  EXPECT_EQ(p3.graph.degree(2), 2);
  EXPECT_EQ(p3.graph.neighbors(2), (std::vector<int>{1, 3}));
}

TEST(LoadGraph, HeaderAllowsIsolatedVertices) {
  const LoadedGraph g = load_graph("p 5 1\ne 2 1\n");
  EXPECT_EQ(g.graph.n(), 5);
  EXPECT_EQ(g.graph.edges()[0], std::make_pair(1, 2));
  EXPECT_EQ(g.graph.degree(5), 0);
}

TEST(LoadGraph, BareEdges) {
  const LoadedGraph g = load_graph("1 2\n\n2 3\nc trailing comment\n");
  EXPECT_EQ(g.graph.n(), 3);
  EXPECT_EQ(g.graph.edge_count(), 2u);
}

TEST(LoadGraph, DuplicatesCollapseWithWarning) {
  const LoadedGraph g = load_graph("p 3 3\ne 1 2\ne 2 1\ne 2 3\n");
  EXPECT_EQ(g.graph.edge_count(), 2u);
  ASSERT_EQ(g.warnings.size(), 1u);
  EXPECT_NE(g.warnings[0].find("duplicate"), std::string::npos);
}

TEST(LoadGraph, HeaderCountMismatchWarns) {
  const LoadedGraph g = load_graph("p 3 5\ne 1 2\n");
  EXPECT_EQ(g.warnings.size(), 1u);
}

TEST(LoadGraph, Errors) {
  EXPECT_THROW(load_graph("e 1 1\n"), ParseError);
  EXPECT_THROW(load_graph("p 2 1\ne 1 3\n"), ParseError);
  EXPECT_THROW(load_graph("p 2 1\ne 0 1\n"), ParseError);
  EXPECT_THROW(load_graph("p 2 1\ne 1 x\n"), ParseError);
  EXPECT_THROW(load_graph("p 2 1\n1 2\n"), ParseError);  // bare edge after header
  EXPECT_THROW(load_graph("q 1 2\n"), ParseError);
  EXPECT_THROW(load_graph("e 1 2\np 2 1\n"), ParseError);
  EXPECT_THROW(load_graph("c nothing\n"), ParseError);
  EXPECT_THROW(load_graph("p 2 1 7\n"), ParseError);
  try {
    load_graph("p 3 2\ne 1 2\ne 3 3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadGraph, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "rwsm_graph_test.txt";
  const Graph c5 = cycle(5);
  {
    std::ofstream f(path);
    f << c5.to_text();
  }
  const LoadedGraph g = load_graph_file(path.string());
  EXPECT_EQ(g.graph.edges(), c5.edges());
  std::filesystem::remove(path);
  EXPECT_THROW(load_graph_file("/nonexistent/graph.txt"), std::runtime_error);
}

TEST(GraphType, Invariants) {
  EXPECT_THROW(Graph(0, {}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{1, 2}, {2, 1}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{1, 3}}), std::invalid_argument);
}

TEST(CutBoundary, Examples) {
  const Graph p3(3, {{1, 2}, {2, 3}});
  EXPECT_EQ(cut_boundary(p3, {2}), 2);
  EXPECT_EQ(cut_boundary(p3, {1, 2, 3}), 0);
  EXPECT_EQ(cut_boundary(Graph(2, {{1, 2}}), {1}), 1);
  EXPECT_THROW(cut_boundary(p3, {4}), std::invalid_argument);
}

TEST(CutBoundary, ComplementSymmetry) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_graph(7, 0.4, rng);
    std::vector<int> a, b;
    for (int v = 1; v <= 7; ++v) (uniform01(rng) < 0.5 ? a : b).push_back(v);
    EXPECT_EQ(cut_boundary(g, a), cut_boundary(g, b));
  }
}

TEST(CheegerObjective, Examples) {
  EXPECT_EQ(cheeger_objective(Graph(4, {{1, 2}, {3, 4}}), {{{1, 2}, {3, 4}}}), 0.0);
  EXPECT_EQ(cheeger_objective(Graph(2, {{1, 2}}), {{{1}, {2}}}), 2.0);
  EXPECT_NEAR(cheeger_objective(cycle(4), {{{1, 2}, {3, 4}}}), 2.0 / std::sqrt(2.0) * 2.0, 1e-15);
  EXPECT_THROW(cheeger_objective(cycle(4), {{{1, 2}, {}}}), std::invalid_argument);
  EXPECT_THROW(cheeger_objective(cycle(4), {{{1, 2}, {2, 3}}}), std::invalid_argument);
}

TEST(ExactCheeger, Examples) {
  Rng rng(32);
  for (int i = 0; i < 10; ++i) {
    const ExactCheegerResult r = exact_cheeger(random_graph(2 + i % 6, 0.5, rng), 1);
    EXPECT_EQ(r.value, 0.0);
  }
  EXPECT_EQ(exact_cheeger(Graph(2, {{1, 2}}), 2).value, 2.0);
  const ExactCheegerResult c4 = exact_cheeger(cycle(4), 2);
  EXPECT_NEAR(c4.value, 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_EQ(c4.argmin.canonical(), (SubPartition{{{1, 2}, {3, 4}}}));
  EXPECT_EQ(exact_cheeger(Graph(4, {{1, 2}, {3, 4}}), 2).value, 0.0);
}

TEST(ExactCheeger, KOneUsesWholeVertexSet) {
  const ExactCheegerResult r = exact_cheeger(cycle(5), 1);
  EXPECT_EQ(r.argmin.parts[0], (std::vector<int>{1, 2, 3, 4, 5}));
}

TEST(ExactCheeger, MatchesBruteForce) {
  Rng rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 6;
    const int k = 1 + trial % std::min(n, 3);
    const Graph g = random_graph(n, 0.5, rng);
    const ExactCheegerResult r = exact_cheeger(g, k);
    EXPECT_NEAR(r.value, brute_force(g, k), 1e-12);
    EXPECT_NEAR(cheeger_objective(g, r.argmin), r.value, 1e-12);
    EXPECT_EQ(static_cast<int>(r.argmin.k()), k);
  }
}

TEST(ExactCheeger, InvariantUnderRelabeling) {
  Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(7, 0.4, rng);
    std::vector<int> perm(7);
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    const int k = 1 + trial % 3;
    EXPECT_NEAR(exact_cheeger(g, k).value, exact_cheeger(relabel(g, perm), k).value, 1e-12);
  }
}

TEST(ExactCheeger, VisitsOneRepresentativePerPermutation) {
  // n = 3, k = 2: labelings with both labels used, divided by 2! orderings:
  // (3^3 - 2 * 2^3 + 1) / 2 = 6.
  EXPECT_EQ(exact_cheeger(Graph(3, {{1, 2}}), 2).assignments_visited, 6u);
}

TEST(ExactCheeger, BudgetRefusal) {
  const Graph g(20, {{1, 2}});
  EXPECT_THROW(exact_cheeger(g, 3), BudgetExceeded);
  EXPECT_THROW(exact_cheeger(cycle(4), 2, 80), BudgetExceeded);  // 3^4 = 81
  EXPECT_NO_THROW(exact_cheeger(cycle(4), 2, 81));
  EXPECT_THROW(exact_cheeger(cycle(4), 0), std::invalid_argument);
  EXPECT_THROW(exact_cheeger(cycle(4), 5), std::invalid_argument);
}

TEST(SubPartitionType, Canonical) {
  const SubPartition p{{{4, 3}, {2, 1}}};
  EXPECT_EQ(p.canonical(), (SubPartition{{{1, 2}, {3, 4}}}));
}
