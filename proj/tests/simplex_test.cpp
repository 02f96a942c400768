#include <gtest/gtest.h>

#include <random>

#include "cashmgmt/simplex.hpp"
#include "support/random_instances.hpp"
#include "support/vertex_enumeration.hpp"

using namespace cashmgmt;

namespace {

LpProblem make_lp(std::vector<double> objective, std::vector<double> lower, std::vector<double> upper,
                  std::vector<LinearConstraint> rows = {}) {
  LpProblem lp;
  lp.num_vars = objective.size();
  lp.objective = std::move(objective);
  lp.lower = std::move(lower);
  lp.upper = std::move(upper);
  lp.constraints = std::move(rows);
  return lp;
}

void expect_feasible(const LpProblem& lp, const LpSolution& solution) {
  ASSERT_EQ(solution.status, LpStatus::Optimal);
  EXPECT_LT(max_row_violation(lp, solution.values), 1e-7);
  EXPECT_LT(max_bound_violation(lp, solution.values), 1e-9);
}

}  // namespace

TEST(SolveLp, SingleVariableBound) {
  const LpProblem lp = make_lp({-1}, {0}, {5});
  const LpSolution s = solve_lp(lp);
  expect_feasible(lp, s);
  EXPECT_DOUBLE_EQ(s.values[0], 5.0);
  EXPECT_DOUBLE_EQ(s.objective, -5.0);
}

TEST(SolveLp, ContradictoryRowsAreInfeasible) {
  const LpProblem lp = make_lp({1}, {0}, {kInfinity},
                               {{{{0, 1.0}}, Relation::GreaterEqual, 2.0}, {{{0, 1.0}}, Relation::LessEqual, 1.0}});
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(SolveLp, VertexOfSimplex) {
  const LpProblem lp =
      make_lp({1, 2}, {0, 0}, {kInfinity, kInfinity}, {{{{0, 1.0}, {1, 1.0}}, Relation::Equal, 1.0}});
  const LpSolution s = solve_lp(lp);
  expect_feasible(lp, s);
  EXPECT_DOUBLE_EQ(s.values[0], 1.0);
  EXPECT_DOUBLE_EQ(s.values[1], 0.0);
  EXPECT_DOUBLE_EQ(s.objective, 1.0);
}

TEST(SolveLp, UnboundedRay) {
  const LpProblem lp = make_lp({-1, 0}, {0, 0}, {kInfinity, kInfinity}, {{{{0, 1.0}, {1, -1.0}}, Relation::LessEqual, 1.0}});
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(SolveLp, NonzeroLowerBoundsAndOffset) {
  LpProblem lp = make_lp({1, 1}, {-2, 3}, {4, kInfinity}, {{{{0, 1.0}, {1, 1.0}}, Relation::GreaterEqual, 5.0}});
  lp.objective_offset = 10.0;
  const LpSolution s = solve_lp(lp);
  expect_feasible(lp, s);
  EXPECT_DOUBLE_EQ(s.objective, 15.0);
}

TEST(SolveLp, CrossedBoundsAreInfeasible) {
  EXPECT_EQ(solve_lp(make_lp({0}, {2}, {1})).status, LpStatus::Infeasible);
}

TEST(SolveLp, IterationLimit) {
  const LpProblem lp = make_lp({-1, -1, -1}, {0, 0, 0}, {kInfinity, kInfinity, kInfinity},
                               {{{{0, 1.0}, {1, 2.0}, {2, 1.0}}, Relation::LessEqual, 4.0},
                                {{{0, 2.0}, {1, 1.0}, {2, 3.0}}, Relation::LessEqual, 5.0}});
  EXPECT_EQ(solve_lp(lp, 0).status, LpStatus::IterationLimit);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Optimal);
}

TEST(SolveLp, MalformedProblemThrows) {
  LpProblem lp = make_lp({1}, {0}, {1});
  lp.lower[0] = -kInfinity;
  EXPECT_THROW(solve_lp(lp), std::invalid_argument);
  lp = make_lp({1}, {0}, {1}, {{{{3, 1.0}}, Relation::LessEqual, 1.0}});
  EXPECT_THROW(solve_lp(lp), std::invalid_argument);
}

// Beale's example cycles under textbook Dantzig pricing.
TEST(SolveLp, BealeCyclingExampleTerminates) {
  const LpProblem lp = make_lp({-0.75, 20, -0.5, 6}, {0, 0, 0, 0}, {kInfinity, kInfinity, kInfinity, kInfinity},
                               {{{{0, 0.25}, {1, -8}, {2, -1}, {3, 9}}, Relation::LessEqual, 0.0},
                                {{{0, 0.5}, {1, -12}, {2, -0.5}, {3, 3}}, Relation::LessEqual, 0.0},
                                {{{2, 1.0}}, Relation::LessEqual, 1.0}});
  const LpSolution s = solve_lp(lp);
  expect_feasible(lp, s);
  EXPECT_NEAR(s.objective, -1.25, 1e-9);
}

TEST(SolveLp, HighlyDegenerateAssignmentPolytope) {
  // 5x5 assignment LP: every vertex is heavily degenerate.
  const std::size_t k = 5;
  LpProblem lp;
  lp.num_vars = k * k;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cost(1, 9);
  for (std::size_t v = 0; v < lp.num_vars; ++v) {
    lp.objective.push_back(cost(rng));
    lp.lower.push_back(0);
    lp.upper.push_back(kInfinity);
  }
  for (std::size_t r = 0; r < k; ++r) {
    LinearConstraint row{{}, Relation::Equal, 1.0};
    LinearConstraint col{{}, Relation::Equal, 1.0};
    for (std::size_t c = 0; c < k; ++c) {
      row.terms.push_back({r * k + c, 1.0});
      col.terms.push_back({c * k + r, 1.0});
    }
    lp.constraints.push_back(row);
    lp.constraints.push_back(col);
  }
  const LpSolution s = solve_lp(lp);
  expect_feasible(lp, s);
  // Brute force over permutations.
  std::vector<std::size_t> perm{0, 1, 2, 3, 4};
  double best = kInfinity;
  do {
    double sum = 0.0;
    for (std::size_t r = 0; r < k; ++r) sum += lp.objective[r * k + perm[r]];
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_NEAR(s.objective, best, 1e-9);
}

TEST(SimplexProperties, MatchesVertexEnumeration) {
  std::mt19937_64 rng(31);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const LpProblem lp = test::random_small_lp(rng);
    const std::optional<double> reference = test::vertex_enumeration_optimum(lp);
    const LpSolution s = solve_lp(lp);
    if (!reference) {
      EXPECT_EQ(s.status, LpStatus::Infeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    expect_feasible(lp, s);
    EXPECT_NEAR(s.objective, *reference, 1e-6) << "trial " << trial;
  }
  EXPECT_GT(feasible, 100);
}

TEST(SimplexProperties, Deterministic) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const LpProblem lp = test::random_small_lp(rng);
    const LpSolution a = solve_lp(lp);
    const LpSolution b = solve_lp(lp);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.iterations, b.iterations);
  }
}
