#pragma once

#include <stdexcept>
#include <vector>

#include "robsched/core.hpp"

namespace robsched {

/// Start-time interval [e_j, l_j] per job. A job started anywhere inside its
/// interval finishes before every direct successor's e and before d_j.
struct IntervalSolution {
  std::vector<double> e;
  std::vector<double> l;
  double objective = 0.0;

  double width(JobId j) const { return l[static_cast<std::size_t>(j)] - e[static_cast<std::size_t>(j)]; }
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maximizes the sum of interval widths subject to s_j <= e_j <= l_j,
/// l_j + p_j <= e_i on direct arcs j -> i and l_j + p_j <= d_j.
/// Throws InfeasibleError when the planned schedule already misses a deadline.
IntervalSolution solve_rm13(const Schedule& schedule);
IntervalSolution solve_rm13(const Schedule& schedule, const ScheduleGraph& graph);

struct IntervalWeights {
  /// Per-job w_j. Empty means w_j = 1 everywhere. A zero weight drops the job
  /// from the min (its width is only required to be non-negative).
  std::vector<double> weights;
  /// Per-job deadlines; empty means the instance's d_j.
  std::vector<double> deadlines;
};

/// Maximizes min over weighted jobs of w_j (l_j - e_j) under the same
/// constraints as solve_rm13. The optimum is found exactly by Dinkelbach's
/// iteration over the min-ratio path problem; the returned layout has the
/// pointwise smallest e with l_j = e_j + B / w_j, which is also the
/// lexicographically smallest e in topological order.
/// Throws InfeasibleError, or std::invalid_argument for bad weights.
IntervalSolution solve_rm14(const Schedule& schedule, const IntervalWeights& weights = {});
IntervalSolution solve_rm14(const Schedule& schedule, const ScheduleGraph& graph,
                            const IntervalWeights& weights = {});

/// w_j = 1 / sigma_j for jobs with sigma_j > 0 and 0 otherwise. Throws
/// std::invalid_argument when every sigma_j is zero.
std::vector<double> inverse_stddev_weights(const Instance& instance);

/// Standard-deviation-weighted slack insertion: solve_rm14 with
/// inverse_stddev_weights and the per-job deadlines.
IntervalSolution solve_slack_insertion(const Schedule& schedule);

/// New schedule with s_j := e_j.
Schedule apply_buffers(const Schedule& schedule, const IntervalSolution& solution);

}  // namespace robsched
