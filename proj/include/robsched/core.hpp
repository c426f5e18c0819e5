#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "robsched/stochastic.hpp"

namespace robsched {

/// Absolute tolerance for every feasibility and threshold comparison on times.
inline constexpr double kTimeTol = 1e-9;

using JobId = int;

struct Job {
  double p = 1.0;  // expected processing time
  double r = 0.0;  // release date
  DistributionSpec dist;
  std::optional<double> due;  // individual deadline; the global one applies otherwise
};

/// `from` must finish before `to` starts.
struct Arc {
  JobId from = 0;
  JobId to = 0;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

struct Instance {
  int m = 1;
  double deadline = 0.0;
  std::vector<Job> jobs;
  std::vector<Arc> precedence;

  int n() const { return static_cast<int>(jobs.size()); }
  /// d_j: the job's own deadline when set, the global deadline otherwise.
  double job_deadline(JobId j) const;
  std::vector<double> job_deadlines() const;
  bool has_job_deadlines() const;
};

/// Instance invariants that do not involve a schedule (positive durations,
/// index ranges, acyclic precedence, ...). Empty result means valid.
std::vector<std::string> check_instance(const Instance& instance);

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using MachineOrder = std::vector<std::vector<JobId>>;

/// Machine assignment, per-machine job order and planned start times.
struct Schedule {
  std::shared_ptr<const Instance> instance;
  MachineOrder machine_order;
  std::vector<double> start;

  const Instance& inst() const { return *instance; }
  int n() const { return instance->n(); }
};

/// The combined order of a schedule: precedence arcs plus consecutive machine
/// pairs. Direct predecessors and successors refer to the transitive reduction
/// of that union; the full predecessor closure is kept as well.
class ScheduleGraph {
 public:
  ScheduleGraph() = default;

  /// Throws ScheduleError if the machine order is not a partition of the jobs
  /// or if the union of arcs has a cycle.
  static ScheduleGraph build(const Instance& instance, const MachineOrder& machine_order);

  int size() const { return n_; }
  /// Union arcs, deduplicated and sorted.
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::vector<Arc> direct_arcs() const;

  // Sorted by ascending job id.
  std::span<const JobId> direct_predecessors(JobId j) const;
  std::span<const JobId> direct_successors(JobId j) const;
  std::span<const JobId> predecessors(JobId j) const;

  /// Topological order; among ready jobs the smallest id goes first.
  std::span<const JobId> topological_order() const { return topo_; }

  bool precedes(JobId i, JobId j) const;

 private:
  int n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<JobId> topo_;
  // Row j of an adjacency list is ids[offset[j] .. offset[j + 1]).
  struct Adjacency {
    std::vector<int> offset;
    std::vector<JobId> ids;
    std::span<const JobId> row(JobId j) const;
  };
  Adjacency dpred_;
  Adjacency dsucc_;
  Adjacency pred_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> ancestors_;  // n_ rows of words_ bits
};

ScheduleGraph build_combined_order(const Schedule& schedule);

/// Backward recursion ls_j = min(d_j - p_j, min over direct successors i of ls_i - p_j).
std::vector<double> latest_start_times(const Schedule& schedule, const ScheduleGraph& graph,
                                       std::span<const double> deadlines);

/// Forward recursion s_j = max(r_j, max over predecessors i of s_i + p_i).
std::vector<double> earliest_start_times(const Instance& instance, const ScheduleGraph& graph);

struct SlackProfile {
  ScheduleGraph graph;
  std::vector<double> p;
  std::vector<double> ls;
  std::vector<double> ts;
  std::vector<double> fs;
  std::vector<int> ndp;
  std::vector<int> nds;

  int n() const { return static_cast<int>(p.size()); }
  std::span<const JobId> topo() const { return graph.topological_order(); }
};

/// Total and free slack of every job. A job without direct successors has
/// free slack d_j - s_j - p_j.
SlackProfile slack_profile(const Schedule& schedule);
SlackProfile slack_profile(const Schedule& schedule, ScheduleGraph graph);

struct Violation {
  enum class Kind { instance, structure, cycle, release, precedence, machine_overlap, deadline };
  Kind kind;
  std::vector<JobId> jobs;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

/// Every broken schedule invariant, including planned makespan above the
/// deadline. An empty list means the schedule is feasible.
std::vector<Violation> validate(const Schedule& schedule);

/// Throws ScheduleError carrying the first violation message.
void require_feasible(const Schedule& schedule);

}  // namespace robsched
