#include "robsched/simulate.hpp"

#include <algorithm>
#include <stdexcept>

#include "robsched/rng.hpp"

namespace robsched {

double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

Realization run_once(const Schedule& schedule, const ScheduleGraph& graph, std::uint64_t seed, std::uint64_t rep,
                     const std::vector<std::uint64_t>& job_keys) {
  const Instance& inst = schedule.inst();
  const auto un = static_cast<std::size_t>(inst.n());
  if (!job_keys.empty() && job_keys.size() != un) throw std::invalid_argument("job key count does not match job count");
  const std::uint64_t stream = derive_seed(seed, rep);
  Realization out;
  out.start.resize(un);
  out.completion.resize(un);
  for (JobId jj : graph.topological_order()) {
    const auto j = static_cast<std::size_t>(jj);
    double x = schedule.start[j];
    for (JobId i : graph.direct_predecessors(jj)) x = std::max(x, out.completion[static_cast<std::size_t>(i)]);
    SplitMix64 engine(derive_seed(stream, job_keys.empty() ? j : job_keys[j]));
    out.start[j] = x;
    out.completion[j] = x + sample(inst.jobs[j].dist, engine);
  }
  return out;
}

SimulationReport simulate(const Schedule& schedule, const SimulationOptions& options) {
  return simulate(schedule, build_combined_order(schedule), options);
}

SimulationReport simulate(const Schedule& schedule, const ScheduleGraph& graph, const SimulationOptions& options) {
  if (options.replications < 1) throw std::invalid_argument("replications must be at least 1");
  const Instance& inst = schedule.inst();
  const auto un = static_cast<std::size_t>(inst.n());
  const auto reps = static_cast<std::size_t>(options.replications);
  const bool due = inst.has_job_deadlines();

  std::vector<double> makespan(reps), within(reps), on_time(reps), delay(reps);
  std::vector<double> due_delay, late, any_late;
  if (due) {
    due_delay.resize(reps);
    late.resize(reps);
    any_late.resize(reps);
  }

  for (std::size_t k = 0; k < reps; ++k) {
    const Realization run = run_once(schedule, graph, options.seed, k, options.job_keys);
    double c = 0.0;
    double d = 0.0;
    int punctual = 0;
    for (std::size_t j = 0; j < un; ++j) {
      c = std::max(c, run.completion[j]);
      const double lag = run.start[j] - schedule.start[j];
      d += lag;
      if (lag <= kTimeTol) ++punctual;
    }
    makespan[k] = c;
    within[k] = c <= inst.deadline + kTimeTol ? 1.0 : 0.0;
    on_time[k] = un ? static_cast<double>(punctual) / static_cast<double>(un) : 1.0;
    delay[k] = d;
    if (due) {
      double over = 0.0;
      int count = 0;
      for (std::size_t j = 0; j < un; ++j) {
        if (!inst.jobs[j].due) continue;
        const double excess = run.completion[j] - *inst.jobs[j].due;
        if (excess > kTimeTol) {
          over += excess;
          ++count;
        }
      }
      due_delay[k] = over;
      late[k] = count;
      any_late[k] = count > 0 ? 1.0 : 0.0;
    }
  }

  const double r = static_cast<double>(reps);
  SimulationReport rep;
  rep.replications = options.replications;
  rep.seed = options.seed;
  rep.avg_makespan = pairwise_sum(makespan) / r;
  rep.frac_within_deadline = pairwise_sum(within) / r;
  rep.frac_on_time = pairwise_sum(on_time) / r;
  rep.total_delay = pairwise_sum(delay) / r;
  if (due) rep.due = DueDateStats{pairwise_sum(due_delay) / r, pairwise_sum(late) / r, pairwise_sum(any_late) / r};
  return rep;
}

}  // namespace robsched
