#pragma once

#include <memory>
#include <random>
#include <vector>

#include "robsched/core.hpp"
#include "robsched/generate.hpp"

namespace testutil {

using namespace robsched;

inline Schedule make_schedule(Instance inst, MachineOrder order, std::vector<double> start) {
  return Schedule{std::make_shared<const Instance>(std::move(inst)), std::move(order), std::move(start)};
}

inline Job job(double p, double r = 0.0, DistributionSpec dist = {}) {
  Job j;
  j.p = p;
  j.r = r;
  j.dist = dist;
  j.dist.mean = p;
  return j;
}

/// Two-job chain on one machine: p = (3, 4), s = (0, 4), d = 10.
inline Schedule figure1(DistributionSpec dist = {DistKind::deterministic, 1.0, 0.0}) {
  Instance inst;
  inst.m = 1;
  inst.deadline = 10.0;
  inst.jobs = {job(3, 0, dist), job(4, 0, dist)};
  return make_schedule(inst, {{0, 1}}, {0.0, 4.0});
}

/// Random feasible schedule: random instance, greedy machine order, starts
/// pushed forward by random gaps and a deadline at or above the makespan.
inline Schedule random_schedule(std::uint64_t seed, int n, int m, int arcs, DistributionSpec dist,
                                bool tight = false) {
  std::mt19937_64 rng(seed);
  InstanceGenConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.arcs = arcs;
  cfg.seed = seed;
  cfg.kind = dist.kind;
  cfg.cv = dist.cv;
  auto inst = std::make_shared<Instance>(gen_instance(cfg));
  Schedule base = greedy_schedule(inst, seed + 1);
  const ScheduleGraph g = ScheduleGraph::build(*inst, base.machine_order);
  std::uniform_real_distribution<double> gap(0.0, 3.0);
  std::bernoulli_distribution has_gap(tight ? 0.2 : 0.6);
  std::vector<double> s(static_cast<std::size_t>(n));
  for (JobId j : g.topological_order()) {
    double v = inst->jobs[static_cast<std::size_t>(j)].r;
    for (JobId i : g.direct_predecessors(j))
      v = std::max(v, s[static_cast<std::size_t>(i)] + inst->jobs[static_cast<std::size_t>(i)].p);
    s[static_cast<std::size_t>(j)] = v + (has_gap(rng) ? gap(rng) : 0.0);
  }
  double c = 0.0;
  for (int j = 0; j < n; ++j) c = std::max(c, s[static_cast<std::size_t>(j)] + inst->jobs[static_cast<std::size_t>(j)].p);
  inst->deadline = c + (tight ? 0.0 : gap(rng) * 2.0);
  return Schedule{inst, base.machine_order, s};
}

}  // namespace testutil
