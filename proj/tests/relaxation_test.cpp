#include <gtest/gtest.h>

#include <cmath>

#include "rwsm/cheeger.hpp"
#include "rwsm/errors.hpp"

using namespace rwsm;

namespace {

Graph cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= n; ++i) e.emplace_back(i, i % n + 1);
  return Graph(n, e);
}

}  // namespace

TEST(Solver, TwoDisjointEdges) {
  const Graph g(4, {{1, 2}, {3, 4}});
  const ClusterReport r = solve_relaxation(g, 2, SolverConfig{});
  EXPECT_EQ(r.rounded_value, 0.0);
  EXPECT_EQ(r.rounded, (SubPartition{{{1, 2}, {3, 4}}}));
}

TEST(Solver, CompleteGraphOnTwoVertices) {
  const ClusterReport r = solve_relaxation(Graph(2, {{1, 2}}), 2, SolverConfig{});
  EXPECT_EQ(r.rounded_value, 2.0);
}

TEST(Solver, FourCycle) {
  const ClusterReport r = solve_relaxation(cycle(4), 2, SolverConfig{});
  EXPECT_NEAR(r.rounded_value, 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.rounded_value, exact_cheeger(cycle(4), 2).value, 1e-12);
}

TEST(Solver, ReportInvariants) {
  const Graph g = cycle(6);
  SolverConfig cfg;
  cfg.restarts = 5;
  cfg.max_iters = 300;
  const ClusterReport r = solve_relaxation(g, 2, cfg);
  EXPECT_LE(r.max_feasibility_residual, 1e-10);
  EXPECT_GE(r.best_continuous_value, 0.0);
  EXPECT_GE(r.best_penalty_value, r.best_continuous_value);
  EXPECT_NEAR(r.best_penalty_value,
              penalized_objective(g, r.best_iterate, 1.0, r.penalty_c), 1e-12);
  EXPECT_GT(r.penalty_c, 0.0);
  EXPECT_NEAR(r.penalty_c, 2.0 * r.lipschitz * r.c_hat, 1e-12);
  ASSERT_EQ(static_cast<int>(r.trace.size()), cfg.max_iters + 1);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    EXPECT_EQ(r.trace[i].iter, static_cast<int>(i));
    EXPECT_LE(r.trace[i].feasibility_residual, 1e-10);
    EXPECT_GE(r.trace[i].penalty, 0.0);
  }
  EXPECT_EQ(static_cast<int>(r.rounded.k()), 2);
  EXPECT_NEAR(cheeger_objective(g, r.rounded), r.rounded_value, 1e-15);
  EXPECT_GE(r.rounded_value, exact_cheeger(g, 2).value - 1e-12);
}

TEST(Solver, BestValueNeverExceedsTrace) {
  SolverConfig cfg;
  cfg.restarts = 1;
  cfg.max_iters = 200;
  const ClusterReport r = solve_relaxation(cycle(5), 2, cfg);
  double running = std::numeric_limits<double>::infinity();
  for (const auto& row : r.trace) running = std::min(running, row.objective);
  EXPECT_DOUBLE_EQ(r.best_penalty_value, running);
}

TEST(Solver, DeterministicAcrossThreadCounts) {
  const Graph g(6, {{1, 2}, {2, 3}, {3, 1}, {4, 5}, {5, 6}, {6, 4}, {3, 4}});
  SolverConfig a;
  a.restarts = 6;
  a.max_iters = 200;
  a.seed = 9;
  a.threads = 1;
  SolverConfig b = a;
  b.threads = 4;
  const ClusterReport ra = solve_relaxation(g, 2, a);
  const ClusterReport rb = solve_relaxation(g, 2, b);
  EXPECT_EQ(ra.best_restart, rb.best_restart);
  EXPECT_EQ(ra.rounded, rb.rounded);
  EXPECT_EQ(ra.best_iterate, rb.best_iterate);
  EXPECT_EQ(ra.best_penalty_value, rb.best_penalty_value);
}

TEST(Solver, BestIteratePolicyAndExplicitWeight) {
  SolverConfig cfg;
  cfg.round_policy = RoundPolicy::kBestIterate;
  cfg.penalty_c = 50.0;
  cfg.schedule = StepSchedule::kInv;
  const ClusterReport r = solve_relaxation(Graph(4, {{1, 2}, {3, 4}}), 2, cfg);
  EXPECT_EQ(r.penalty_c, 50.0);
  EXPECT_GE(r.rounded_value, 0.0);
  EXPECT_EQ(static_cast<int>(r.rounded.k()), 2);
}

TEST(Solver, RejectsInvalidConfig) {
  const Graph g = cycle(4);
  SolverConfig cfg;
  cfg.beta = 0.5;
  EXPECT_THROW(solve_relaxation(g, 2, cfg), DomainError);
  cfg = SolverConfig{};
  cfg.restarts = 0;
  EXPECT_THROW(solve_relaxation(g, 2, cfg), std::invalid_argument);
  EXPECT_THROW(solve_relaxation(g, 5, SolverConfig{}), std::invalid_argument);
}

TEST(PenaltyConstant, DeterministicAndPositive) {
  const double a = estimate_penalty_constant(5, 2);
  EXPECT_GT(a, 0.0);
  EXPECT_EQ(a, estimate_penalty_constant(5, 2));
  EXPECT_THROW(estimate_penalty_constant(2, 3), ShapeError);
}
