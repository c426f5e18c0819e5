#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "robsched/core.hpp"
#include "robsched/stochastic.hpp"

namespace robsched {

struct InstanceGenConfig {
  int n = 30;
  int arcs = 15;  // number of precedence arcs
  int m = 4;
  std::uint64_t seed = 0;
  DistKind kind = DistKind::normal;
  double cv = 0.25;
  double p_min = 1.0;
  double p_max = 20.0;
  bool integer_release = true;
  /// Critical path length counts the release date of the path head.
  bool cp_includes_release = true;
};

/// Throws std::invalid_argument for n < 1, m < 1 or arcs outside [0, n(n-1)/2].
Instance gen_instance(const InstanceGenConfig& cfg);

struct DeadlineParts {
  double l_min = 0.0;  // (sum p + sum of the m smallest r) / m
  double l_cp = 0.0;   // longest precedence path
  int n_cp = 0;        // jobs on it; ties go to the shorter job count
  double deadline = 0.0;
};

/// d = max(l_cp (1 + 0.5 / sqrt(n_cp)), 1.3 l_min).
DeadlineParts deadline_parts(const Instance& instance, bool cp_includes_release = true);
double gen_deadline(const Instance& instance, bool cp_includes_release = true);

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Earliest starts for a machine order: s_j = max(r_j, completions of
/// precedence and machine predecessors). nullopt when the order is cyclic.
std::optional<std::vector<double>> earliest_starts(const Instance& instance, const MachineOrder& order);

/// Greedy list schedule: repeatedly starts the job that can start first, on a
/// machine free by then. Ties are broken uniformly with the given seed.
Schedule greedy_schedule(std::shared_ptr<const Instance> instance, std::uint64_t seed);

/// Alternates first-improvement scans of N0 (swap two jobs on one machine)
/// and N1 (move one job to any machine and position) in random order,
/// minimizing the earliest-start makespan, until both fail in a row.
Schedule hill_climb(const Schedule& start, std::uint64_t seed);

/// Greedy plus hill climbing, retried with fresh substreams until the
/// makespan meets the deadline. Throws GenerationError after `retry_cap` tries.
Schedule gen_earliest_start(std::shared_ptr<const Instance> instance, std::uint64_t seed, int retry_cap = 20);

/// Buffer multiplier ranges and repetitions used to diversify a schedule.
struct BufferPlan {
  std::vector<std::pair<double, double>> ranges;
  int repetitions = 5;
  bool include_max = true;   // mu = 1 for every job
  bool include_zero = true;  // mu = 0 for every job

  /// [0,0.1], [0,0.2], ..., [0,1], [0.1,1], ..., [0.9,1] with 5 repetitions.
  static BufferPlan standard();
  std::size_t size() const;
};

/// s_j = max(es_j, max over direct predecessors i of s_i + p_i + mu_i b_i).
Schedule buffered_schedule(const Schedule& es, const ScheduleGraph& graph, const std::vector<double>& buffers,
                           const std::vector<double>& mu);

/// Buffers b_j are the unweighted max-min interval widths of `es`. Each
/// (range, repetition) draws mu_j ~ U[lo, hi] per job from its own substream.
/// Output order: ranges by repetition, then max buffers, then zero buffers.
std::vector<Schedule> diversify_buffers(const Schedule& es, const BufferPlan& plan, std::uint64_t seed);

}  // namespace robsched
