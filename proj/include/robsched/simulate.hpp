#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "robsched/core.hpp"

namespace robsched {

/// One execution under the no-early-start policy.
struct Realization {
  std::vector<double> start;       // X_j
  std::vector<double> completion;  // Y_j
};

/// Replication `rep` of a run seeded with `seed` draws job j from the stream
/// derive_seed(derive_seed(seed, rep), key_j). The key defaults to j; callers
/// that relabel jobs can pass stable keys so the draws follow the job.
Realization run_once(const Schedule& schedule, const ScheduleGraph& graph, std::uint64_t seed, std::uint64_t rep,
                     const std::vector<std::uint64_t>& job_keys = {});

struct SimulationOptions {
  int replications = 1000;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> job_keys;
};

/// Statistics over the jobs that carry their own deadline.
struct DueDateStats {
  double avg_total_deadline_delay = 0.0;  // mean of sum max(0, Y_j - d_j)
  double avg_late_jobs = 0.0;             // mean count of Y_j > d_j
  double frac_runs_with_late_job = 0.0;

  friend bool operator==(const DueDateStats&, const DueDateStats&) = default;
};

struct SimulationReport {
  int replications = 0;
  std::uint64_t seed = 0;
  double avg_makespan = 0.0;
  double frac_within_deadline = 0.0;
  double frac_on_time = 0.0;  // mean over runs of the fraction of jobs with X_j = s_j
  double total_delay = 0.0;   // mean over runs of sum (X_j - s_j)
  std::optional<DueDateStats> due;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

/// Throws std::invalid_argument when replications < 1.
SimulationReport simulate(const Schedule& schedule, const SimulationOptions& options);
SimulationReport simulate(const Schedule& schedule, const ScheduleGraph& graph, const SimulationOptions& options);

/// Sum by recursive halving; keeps rounding error at O(log n).
double pairwise_sum(const double* data, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace robsched
