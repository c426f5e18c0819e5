#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "robsched/lp.hpp"
#include "robsched/simplex.hpp"
#include "test_util.hpp"

using namespace robsched;
using testutil::figure1;
using testutil::job;
using testutil::make_schedule;

namespace {

// Worst violation of the interval constraints, computed independently.
double violation(const Schedule& s, const IntervalSolution& sol) {
  const auto g = oracle::plain_graph(s.inst(), s.machine_order);
  oracle::Intervals iv{sol.e, sol.l};
  return oracle::interval_violation(s.inst(), g, s.start, iv);
}

}  // namespace

TEST(Simplex, SmallProblems) {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3.
  LinearProgram lp;
  lp.vars = 2;
  lp.objective = {3, 2};
  lp.rows = {{1, 1}, {1, 3}, {1, 0}};
  lp.rhs = {4, 6, 3};
  const LpResult r = simplex_maximize(lp);
  ASSERT_EQ(r.status, LpResult::Status::optimal);
  EXPECT_NEAR(r.value, 11.0, 1e-12);
  EXPECT_NEAR(r.x[0], 3.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);

  LinearProgram unb;
  unb.vars = 2;
  unb.objective = {1, 1};
  unb.rows = {{1, -1}};
  unb.rhs = {1};
  EXPECT_EQ(simplex_maximize(unb).status, LpResult::Status::unbounded);
}

TEST(Rm13, Examples) {
  const IntervalSolution a = solve_rm13(figure1());
  EXPECT_NEAR(a.objective, 3.0, 1e-9);
  EXPECT_LE(violation(figure1(), a), 1e-9);

  Schedule tight = figure1();
  tight.start = {3, 6};
  EXPECT_NEAR(solve_rm13(tight).objective, 0.0, 1e-12);

  Instance one;
  one.deadline = 9;
  one.jobs = {job(5)};
  const IntervalSolution c = solve_rm13(make_schedule(one, {{0}}, {0}));
  EXPECT_NEAR(c.objective, 4.0, 1e-12);
  EXPECT_NEAR(c.e[0], 0.0, 1e-12);
  EXPECT_NEAR(c.l[0], 4.0, 1e-12);
}

TEST(Rm13, Infeasible) {
  Schedule late = figure1();
  late.start = {0, 7};
  EXPECT_THROW(solve_rm13(late), InfeasibleError);
}

TEST(Rm14, Examples) {
  const IntervalSolution a = solve_rm14(figure1());
  EXPECT_NEAR(a.objective, 1.5, 1e-12);
  EXPECT_NEAR(a.e[0], 0.0, 1e-12);
  EXPECT_NEAR(a.e[1], 4.5, 1e-12);
  EXPECT_NEAR(a.width(0), 1.5, 1e-12);
  EXPECT_NEAR(a.width(1), 1.5, 1e-12);

  IntervalWeights w;
  w.weights = {1, 2};
  const IntervalSolution b = solve_rm14(figure1(), w);
  EXPECT_NEAR(b.objective, 2.0, 1e-12);
  EXPECT_NEAR(b.width(0), 2.0, 1e-12);
  EXPECT_NEAR(b.width(1), 1.0, 1e-12);
  EXPECT_LE(violation(figure1(), b), 1e-9);

  Schedule tight = figure1();
  tight.start = {3, 6};
  EXPECT_NEAR(solve_rm14(tight).objective, 0.0, 1e-12);
}

TEST(Rm14, ZeroWeightExcludesJob) {
  IntervalWeights w;
  w.weights = {0, 1};
  const IntervalSolution s = solve_rm14(figure1(), w);
  EXPECT_NEAR(s.objective, 2.0, 1e-12);  // job 1 alone may use [4, 6]
  EXPECT_NEAR(s.width(0), 0.0, 1e-12);
}

TEST(Rm14, ArgumentErrors) {
  IntervalWeights w;
  w.weights = {1};
  EXPECT_THROW(solve_rm14(figure1(), w), std::invalid_argument);
  w.weights = {0, 0};
  EXPECT_THROW(solve_rm14(figure1(), w), std::invalid_argument);
  w.weights = {-1, 1};
  EXPECT_THROW(solve_rm14(figure1(), w), std::invalid_argument);
  EXPECT_THROW(solve_slack_insertion(figure1()), std::invalid_argument);  // all sigma zero
  Schedule late = figure1();
  late.start = {0, 7};
  EXPECT_THROW(solve_rm14(late), InfeasibleError);
}

TEST(Rm14, PerJobDeadlines) {
  IntervalWeights w;
  w.deadlines = {4, 10};
  const IntervalSolution s = solve_rm14(figure1(), w);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
  EXPECT_LE(s.l[0] + 3, 4 + 1e-12);
}

TEST(SlackInsertion, InverseStddevWeights) {
  Instance inst;
  inst.deadline = 10;
  inst.jobs = {job(3, 0, {DistKind::normal, 3, 1.0 / 3.0}), job(4, 0, {DistKind::normal, 4, 0.5})};
  const auto w = inverse_stddev_weights(inst);
  EXPECT_NEAR(w[0], 1.0, 1e-12);
  EXPECT_NEAR(w[1], 0.5, 1e-12);
  const Schedule s = make_schedule(inst, {{0, 1}}, {0, 4});
  const IntervalSolution sol = solve_slack_insertion(s);
  // Widths proportional to sigma = (1, 2): B + 2B = 3.
  EXPECT_NEAR(sol.objective, 1.0, 1e-12);
  EXPECT_NEAR(sol.width(1), 2.0, 1e-12);
}

TEST(ApplyBuffers, Examples) {
  const Schedule s = apply_buffers(figure1(), solve_rm14(figure1()));
  EXPECT_EQ(s.start, (std::vector<double>{0, 4.5}));
  EXPECT_TRUE(validate(s).empty());

  Schedule tight = figure1();
  tight.start = {3, 6};
  EXPECT_EQ(apply_buffers(tight, solve_rm14(tight)).start, tight.start);
  EXPECT_THROW(apply_buffers(tight, IntervalSolution{}), std::invalid_argument);
}

TEST(Rm14, AgreesWithBisection) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Schedule s = testutil::random_schedule(seed, 30, 4, 30, {DistKind::normal, 1, 0.25});
    const double ref = oracle::rm14_bisect(s.inst(), s.machine_order, s.start);
    const IntervalSolution sol = solve_rm14(s);
    EXPECT_NEAR(sol.objective, ref, 1e-6) << seed;
    EXPECT_LE(violation(s, sol), 1e-9);
    EXPECT_TRUE(validate(apply_buffers(s, sol)).empty());

    IntervalWeights w;
    w.weights = inverse_stddev_weights(s.inst());
    EXPECT_NEAR(solve_rm14(s, w).objective, oracle::rm14_bisect(s.inst(), s.machine_order, s.start, w.weights), 1e-6);
  }
}

TEST(Rm13, DominatesRandomIntervals) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Schedule s = testutil::random_schedule(seed, 20, 3, 20, {DistKind::normal, 1, 0.25});
    const IntervalSolution sol = solve_rm13(s);
    EXPECT_LE(violation(s, sol), 1e-9);
    EXPECT_TRUE(validate(apply_buffers(s, sol)).empty());
    const auto g = oracle::plain_graph(s.inst(), s.machine_order);
    for (int k = 0; k < 200; ++k) {
      const auto iv = oracle::random_feasible_intervals(s.inst(), g, s.start, rng);
      ASSERT_LE(oracle::interval_violation(s.inst(), g, s.start, iv), 1e-9);
      EXPECT_LE(iv.total_width(), sol.objective + 1e-7);
    }
    // The min-width optimum spread over every job is itself a feasible assignment.
    EXPECT_GE(sol.objective + 1e-7, solve_rm14(s).objective * s.n());
  }
}
