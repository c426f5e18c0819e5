#include "robsched/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robsched/simplex.hpp"

namespace robsched {

namespace {

std::vector<double> deadlines_for(const Instance& inst, const std::vector<double>& given) {
  if (given.empty()) return inst.job_deadlines();
  if (static_cast<int>(given.size()) != inst.n())
    throw std::invalid_argument("deadline vector size does not match job count");
  return given;
}

}  // namespace

IntervalSolution solve_rm13(const Schedule& schedule) {
  return solve_rm13(schedule, build_combined_order(schedule));
}

IntervalSolution solve_rm13(const Schedule& schedule, const ScheduleGraph& graph) {
  const Instance& inst = schedule.inst();
  const int n = inst.n();
  const auto un = static_cast<std::size_t>(n);
  const std::vector<double> deadline = inst.job_deadlines();
  const auto& s = schedule.start;

  // Variables: shift e_j - s_j >= 0 (index j) and width l_j - e_j >= 0 (index n + j).
  LinearProgram lp;
  lp.vars = 2 * n;
  lp.objective.assign(2 * un, 0.0);
  for (std::size_t j = 0; j < un; ++j) lp.objective[un + j] = 1.0;

  auto add_row = [&](std::vector<double> row, double rhs, const std::string& what) {
    if (rhs < -kTimeTol) throw InfeasibleError("interval LP infeasible: " + what);
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(std::max(rhs, 0.0));
  };
  for (const Arc& a : graph.direct_arcs()) {
    const auto j = static_cast<std::size_t>(a.from);
    const auto i = static_cast<std::size_t>(a.to);
    std::vector<double> row(2 * un, 0.0);
    row[j] = 1.0;
    row[un + j] = 1.0;
    row[i] = -1.0;
    add_row(std::move(row), s[i] - s[j] - inst.jobs[j].p,
            "job " + std::to_string(a.to) + " starts before " + std::to_string(a.from) + " completes");
  }
  for (std::size_t j = 0; j < un; ++j) {
    std::vector<double> row(2 * un, 0.0);
    row[j] = 1.0;
    row[un + j] = 1.0;
    add_row(std::move(row), deadline[j] - s[j] - inst.jobs[j].p, "job " + std::to_string(j) + " misses its deadline");
  }

  const LpResult res = simplex_maximize(lp);
  if (res.status != LpResult::Status::optimal) throw InfeasibleError("interval LP did not reach an optimum");

  IntervalSolution sol;
  sol.e.resize(un);
  sol.l.resize(un);
  for (std::size_t j = 0; j < un; ++j) {
    sol.e[j] = s[j] + res.x[j];
    sol.l[j] = sol.e[j] + res.x[un + j];
  }
  sol.objective = res.value;
  return sol;
}

std::vector<double> inverse_stddev_weights(const Instance& instance) {
  std::vector<double> w(static_cast<std::size_t>(instance.n()), 0.0);
  bool any = false;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double sd = instance.jobs[j].dist.stddev();
    if (sd > 0.0) {
      w[j] = 1.0 / sd;
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("slack insertion needs at least one job with positive standard deviation");
  return w;
}

IntervalSolution solve_rm14(const Schedule& schedule, const IntervalWeights& weights) {
  return solve_rm14(schedule, build_combined_order(schedule), weights);
}

IntervalSolution solve_rm14(const Schedule& schedule, const ScheduleGraph& graph, const IntervalWeights& weights) {
  const Instance& inst = schedule.inst();
  const auto un = static_cast<std::size_t>(inst.n());
  const std::vector<double> deadline = deadlines_for(inst, weights.deadlines);

  // Width demanded per unit of objective: h_j = 1 / w_j, 0 for excluded jobs.
  std::vector<double> h(un, 1.0);
  if (!weights.weights.empty()) {
    if (weights.weights.size() != un) throw std::invalid_argument("weight vector size does not match job count");
    bool any = false;
    for (std::size_t j = 0; j < un; ++j) {
      const double w = weights.weights[j];
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and non-negative");
      h[j] = w > 0.0 ? 1.0 / w : 0.0;
      any = any || w > 0.0;
    }
    if (!any) throw std::invalid_argument("at least one weight must be positive");
  }

  // Forward longest path for a given objective B. For each job we keep the
  // start bound reached and the (A, H) decomposition of the path realizing it:
  // start = A + B * H.
  std::vector<double> start(un), path_a(un), path_h(un);
  auto forward = [&](double b) {
    for (JobId jj : graph.topological_order()) {
      const auto j = static_cast<std::size_t>(jj);
      double best = schedule.start[j];
      double best_a = schedule.start[j];
      double best_h = 0.0;
      for (JobId ii : graph.direct_predecessors(jj)) {
        const auto i = static_cast<std::size_t>(ii);
        const double v = start[i] + inst.jobs[i].p + b * h[i];
        if (v > best) {
          best = v;
          best_a = path_a[i] + inst.jobs[i].p;
          best_h = path_h[i] + h[i];
        }
      }
      start[j] = best;
      path_a[j] = best_a;
      path_h[j] = best_h;
    }
  };
  // Smallest deadline slack and the job attaining it.
  auto tightest = [&](double b) {
    std::size_t arg = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < un; ++j) {
      const double f = deadline[j] - start[j] - inst.jobs[j].p - b * h[j];
      if (f < worst) {
        worst = f;
        arg = j;
      }
    }
    return std::pair{worst, arg};
  };

  forward(0.0);
  if (un > 0 && tightest(0.0).first < -kTimeTol)
    throw InfeasibleError("interval LP infeasible: job " + std::to_string(tightest(0.0).second) +
                          " cannot finish by its deadline");

  // Upper bound from single-job constraints at B = 0.
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < un; ++j)
    if (h[j] > 0.0) b = std::min(b, std::max(0.0, deadline[j] - start[j] - inst.jobs[j].p) / h[j]);
  if (!std::isfinite(b)) b = 0.0;

  // Dinkelbach: move B to the ratio of the most violated path until no path
  // is violated. Each step strictly decreases B and the path set is finite.
  for (int iter = 0; iter < 100000 && b > 0.0; ++iter) {
    forward(b);
    const auto [worst, j] = tightest(b);
    if (worst >= 0.0) break;
    const double total_h = path_h[j] + h[j];
    if (total_h <= 0.0) break;
    const double next = std::max(0.0, (deadline[j] - path_a[j] - inst.jobs[j].p) / total_h);
    if (!(next < b)) break;
    b = next;
  }

  forward(b);
  IntervalSolution sol;
  sol.e = start;
  sol.l.resize(un);
  for (std::size_t j = 0; j < un; ++j) sol.l[j] = sol.e[j] + b * h[j];
  sol.objective = b;
  return sol;
}

IntervalSolution solve_slack_insertion(const Schedule& schedule) {
  IntervalWeights w;
  w.weights = inverse_stddev_weights(schedule.inst());
  return solve_rm14(schedule, w);
}

Schedule apply_buffers(const Schedule& schedule, const IntervalSolution& solution) {
  if (solution.e.size() != schedule.start.size())
    throw std::invalid_argument("interval solution size does not match schedule");
  Schedule out = schedule;
  out.start = solution.e;
  return out;
}

}  // namespace robsched
