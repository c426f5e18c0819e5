#include "robsched/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "robsched/lp.hpp"
#include "robsched/rng.hpp"

namespace robsched {

namespace {

std::size_t idx(JobId j) { return static_cast<std::size_t>(j); }

// Earliest-start evaluation of machine orders with reusable precedence data.
class OrderEvaluator {
 public:
  explicit OrderEvaluator(const Instance& inst) : inst_(inst), succ_(idx(inst.n())), indeg_(idx(inst.n()), 0) {
    for (const Arc& a : inst.precedence) {
      succ_[idx(a.from)].push_back(a.to);
      ++indeg_[idx(a.to)];
    }
  }

  bool starts(const MachineOrder& order, std::vector<double>& s) {
    const std::size_t n = idx(inst_.n());
    indeg_work_ = indeg_;
    next_.assign(n, -1);
    for (const auto& seq : order) {
      for (std::size_t k = 0; k < seq.size(); ++k) {
        if (k > 0) ++indeg_work_[idx(seq[k])];
        if (k + 1 < seq.size()) next_[idx(seq[k])] = seq[k + 1];
      }
    }
    s.resize(n);
    stack_.clear();
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = inst_.jobs[j].r;
      if (indeg_work_[j] == 0) stack_.push_back(static_cast<JobId>(j));
    }
    std::size_t done = 0;
    while (!stack_.empty()) {
      const JobId j = stack_.back();
      stack_.pop_back();
      ++done;
      const double c = s[idx(j)] + inst_.jobs[idx(j)].p;
      auto relax = [&](JobId i) {
        s[idx(i)] = std::max(s[idx(i)], c);
        if (--indeg_work_[idx(i)] == 0) stack_.push_back(i);
      };
      for (JobId i : succ_[idx(j)]) relax(i);
      if (next_[idx(j)] >= 0) relax(next_[idx(j)]);
    }
    return done == n;
  }

  std::optional<double> makespan(const MachineOrder& order) {
    if (!starts(order, scratch_)) return std::nullopt;
    double c = 0.0;
    for (std::size_t j = 0; j < scratch_.size(); ++j) c = std::max(c, scratch_[j] + inst_.jobs[j].p);
    return c;
  }

 private:
  const Instance& inst_;
  std::vector<std::vector<JobId>> succ_;
  std::vector<int> indeg_;
  std::vector<int> indeg_work_;
  std::vector<JobId> next_;
  std::vector<JobId> stack_;
  std::vector<double> scratch_;
};

void check_partition(const Instance& inst, const MachineOrder& order) {
  std::vector<int> seen(idx(inst.n()), 0);
  for (const auto& seq : order)
    for (JobId j : seq) {
      if (j < 0 || j >= inst.n()) throw ScheduleError("machine order refers to unknown job " + std::to_string(j));
      if (seen[idx(j)]++) throw ScheduleError("job " + std::to_string(j) + " appears twice in the machine order");
    }
  for (std::size_t j = 0; j < seen.size(); ++j)
    if (!seen[j]) throw ScheduleError("job " + std::to_string(j) + " is not assigned to a machine");
}

template <class T>
const T& pick(const std::vector<T>& items, SplitMix64& rng) {
  std::uniform_int_distribution<std::size_t> u(0, items.size() - 1);
  return items[u(rng)];
}

}  // namespace

Instance gen_instance(const InstanceGenConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("n must be at least 1");
  if (cfg.m < 1) throw std::invalid_argument("m must be at least 1");
  const long long max_arcs = static_cast<long long>(cfg.n) * (cfg.n - 1) / 2;
  if (cfg.arcs < 0 || cfg.arcs > max_arcs)
    throw std::invalid_argument("arc count " + std::to_string(cfg.arcs) + " exceeds n(n-1)/2 = " + std::to_string(max_arcs));
  if (!(cfg.p_min > 0.0) || cfg.p_max < cfg.p_min) throw std::invalid_argument("invalid duration range");

  SplitMix64 rng(cfg.seed);
  Instance inst;
  inst.m = cfg.m;
  inst.jobs.resize(idx(cfg.n));
  std::uniform_real_distribution<double> dur(cfg.p_min, cfg.p_max);
  std::uniform_int_distribution<int> rel_int(0, cfg.n / 2);
  std::uniform_real_distribution<double> rel_real(0.0, static_cast<double>(cfg.n / 2));
  for (Job& job : inst.jobs) {
    job.p = dur(rng);
    job.r = cfg.integer_release ? rel_int(rng) : rel_real(rng);
    job.dist = DistributionSpec{cfg.kind, job.p, cfg.cv};
  }

  // Arcs go forward in a random labeling, which keeps the graph acyclic.
  std::vector<JobId> label(idx(cfg.n));
  std::iota(label.begin(), label.end(), 0);
  std::shuffle(label.begin(), label.end(), rng);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(max_arcs));
  for (int a = 0; a < cfg.n; ++a)
    for (int b = a + 1; b < cfg.n; ++b) pairs.emplace_back(a, b);
  for (int k = 0; k < cfg.arcs; ++k) {
    std::uniform_int_distribution<std::size_t> u(static_cast<std::size_t>(k), pairs.size() - 1);
    std::swap(pairs[static_cast<std::size_t>(k)], pairs[u(rng)]);
    const auto [a, b] = pairs[static_cast<std::size_t>(k)];
    inst.precedence.push_back({label[idx(a)], label[idx(b)]});
  }
  std::sort(inst.precedence.begin(), inst.precedence.end());
  inst.deadline = gen_deadline(inst, cfg.cp_includes_release);
  return inst;
}

DeadlineParts deadline_parts(const Instance& instance, bool cp_includes_release) {
  const std::size_t n = idx(instance.n());
  DeadlineParts out;
  if (n == 0) return out;

  std::vector<double> r;
  double sum_p = 0.0;
  for (const Job& j : instance.jobs) {
    r.push_back(j.r);
    sum_p += j.p;
  }
  std::sort(r.begin(), r.end());
  const std::size_t m = std::min(n, idx(instance.m));
  out.l_min = (sum_p + std::accumulate(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(m), 0.0)) / instance.m;

  // Longest path over precedence arcs; equal lengths keep the shorter path.
  std::vector<std::vector<JobId>> pred(n);
  std::vector<std::vector<JobId>> succ(n);
  std::vector<int> indeg(n, 0);
  for (const Arc& a : instance.precedence) {
    pred[idx(a.to)].push_back(a.from);
    succ[idx(a.from)].push_back(a.to);
    ++indeg[idx(a.to)];
  }
  std::vector<JobId> order;
  for (std::size_t j = 0; j < n; ++j)
    if (indeg[j] == 0) order.push_back(static_cast<JobId>(j));
  for (std::size_t k = 0; k < order.size(); ++k)
    for (JobId i : succ[idx(order[k])])
      if (--indeg[idx(i)] == 0) order.push_back(i);
  if (order.size() != n) throw std::invalid_argument("precedence graph has a cycle");

  std::vector<double> len(n);
  std::vector<int> cnt(n);
  for (JobId j : order) {
    double best = cp_includes_release ? instance.jobs[idx(j)].r : 0.0;
    int best_n = 0;
    for (JobId i : pred[idx(j)]) {
      if (len[idx(i)] > best || (len[idx(i)] == best && cnt[idx(i)] < best_n)) {
        best = len[idx(i)];
        best_n = cnt[idx(i)];
      }
    }
    len[idx(j)] = best + instance.jobs[idx(j)].p;
    cnt[idx(j)] = best_n + 1;
    if (len[idx(j)] > out.l_cp || (len[idx(j)] == out.l_cp && cnt[idx(j)] < out.n_cp)) {
      out.l_cp = len[idx(j)];
      out.n_cp = cnt[idx(j)];
    }
  }
  out.deadline = std::max(out.l_cp * (1.0 + 0.5 / std::sqrt(static_cast<double>(out.n_cp))), 1.3 * out.l_min);
  return out;
}

double gen_deadline(const Instance& instance, bool cp_includes_release) {
  return deadline_parts(instance, cp_includes_release).deadline;
}

std::optional<std::vector<double>> earliest_starts(const Instance& instance, const MachineOrder& order) {
  check_partition(instance, order);
  OrderEvaluator ev(instance);
  std::vector<double> s;
  if (!ev.starts(order, s)) return std::nullopt;
  return s;
}

Schedule greedy_schedule(std::shared_ptr<const Instance> instance, std::uint64_t seed) {
  const Instance& inst = *instance;
  const std::size_t n = idx(inst.n());
  SplitMix64 rng(seed);
  std::vector<std::vector<JobId>> succ(n);
  std::vector<int> waiting(n, 0);
  for (const Arc& a : inst.precedence) {
    succ[idx(a.from)].push_back(a.to);
    ++waiting[idx(a.to)];
  }
  std::vector<double> ready(n);
  for (std::size_t j = 0; j < n; ++j) ready[j] = inst.jobs[j].r;
  std::vector<double> free_at(idx(inst.m), 0.0);
  std::vector<bool> placed(n, false);
  MachineOrder order(idx(inst.m));

  std::vector<JobId> jobs;
  std::vector<std::size_t> machines;
  for (std::size_t step = 0; step < n; ++step) {
    const double fmin = *std::min_element(free_at.begin(), free_at.end());
    double best = std::numeric_limits<double>::infinity();
    jobs.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (placed[j] || waiting[j] > 0) continue;
      const double est = std::max(ready[j], fmin);
      if (est < best - kTimeTol) {
        best = est;
        jobs.clear();
      }
      if (est <= best + kTimeTol) jobs.push_back(static_cast<JobId>(j));
    }
    if (jobs.empty()) throw std::invalid_argument("precedence graph has a cycle");
    const JobId j = pick(jobs, rng);
    const double est = std::max(ready[idx(j)], fmin);
    machines.clear();
    for (std::size_t k = 0; k < free_at.size(); ++k)
      if (free_at[k] <= est + kTimeTol) machines.push_back(k);
    const std::size_t k = pick(machines, rng);
    const double done = est + inst.jobs[idx(j)].p;
    free_at[k] = done;
    order[k].push_back(j);
    placed[idx(j)] = true;
    for (JobId i : succ[idx(j)]) {
      ready[idx(i)] = std::max(ready[idx(i)], done);
      --waiting[idx(i)];
    }
  }

  Schedule s;
  s.instance = std::move(instance);
  s.machine_order = std::move(order);
  OrderEvaluator ev(*s.instance);
  ev.starts(s.machine_order, s.start);
  return s;
}

Schedule hill_climb(const Schedule& start, std::uint64_t seed) {
  const Instance& inst = start.inst();
  check_partition(inst, start.machine_order);
  OrderEvaluator ev(inst);
  SplitMix64 rng(seed);
  MachineOrder cur = start.machine_order;
  const auto initial = ev.makespan(cur);
  if (!initial) throw ScheduleError("machine order is cyclic");
  double cost = *initial;

  struct Swap {
    std::size_t k, a, b;
  };
  struct Move {
    std::size_t from_k, from_i, to_k, to_i;
  };
  std::vector<Swap> swaps;
  std::vector<Move> moves;

  auto scan_swaps = [&] {
    swaps.clear();
    for (std::size_t k = 0; k < cur.size(); ++k)
      for (std::size_t a = 0; a < cur[k].size(); ++a)
        for (std::size_t b = a + 1; b < cur[k].size(); ++b) swaps.push_back({k, a, b});
    std::shuffle(swaps.begin(), swaps.end(), rng);
    for (const Swap& sw : swaps) {
      std::swap(cur[sw.k][sw.a], cur[sw.k][sw.b]);
      const auto c = ev.makespan(cur);
      if (c && *c < cost - kTimeTol) {
        cost = *c;
        return true;
      }
      std::swap(cur[sw.k][sw.a], cur[sw.k][sw.b]);
    }
    return false;
  };

  auto scan_moves = [&] {
    moves.clear();
    for (std::size_t k0 = 0; k0 < cur.size(); ++k0)
      for (std::size_t i0 = 0; i0 < cur[k0].size(); ++i0)
        for (std::size_t k = 0; k < cur.size(); ++k) {
          const std::size_t slots = cur[k].size() + (k == k0 ? 0 : 1);
          for (std::size_t t = 0; t < slots; ++t)
            if (k != k0 || t != i0) moves.push_back({k0, i0, k, t});
        }
    std::shuffle(moves.begin(), moves.end(), rng);
    for (const Move& mv : moves) {
      MachineOrder next = cur;
      const JobId j = next[mv.from_k][mv.from_i];
      next[mv.from_k].erase(next[mv.from_k].begin() + static_cast<std::ptrdiff_t>(mv.from_i));
      next[mv.to_k].insert(next[mv.to_k].begin() + static_cast<std::ptrdiff_t>(mv.to_i), j);
      const auto c = ev.makespan(next);
      if (c && *c < cost - kTimeTol) {
        cost = *c;
        cur = std::move(next);
        return true;
      }
    }
    return false;
  };

  int failures = 0;
  bool use_swaps = true;
  while (failures < 2) {
    const bool improved = use_swaps ? scan_swaps() : scan_moves();
    failures = improved ? 0 : failures + 1;
    use_swaps = !use_swaps;
  }

  Schedule out;
  out.instance = start.instance;
  out.machine_order = std::move(cur);
  ev.starts(out.machine_order, out.start);
  return out;
}

Schedule gen_earliest_start(std::shared_ptr<const Instance> instance, std::uint64_t seed, int retry_cap) {
  for (int attempt = 0; attempt < retry_cap; ++attempt) {
    const std::uint64_t sub = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    Schedule s = hill_climb(greedy_schedule(instance, derive_seed(sub, 0)), derive_seed(sub, 1));
    double c = 0.0;
    for (std::size_t j = 0; j < s.start.size(); ++j) c = std::max(c, s.start[j] + instance->jobs[j].p);
    if (c <= instance->deadline + kTimeTol) return s;
  }
  throw GenerationError("no schedule within the deadline after " + std::to_string(retry_cap) + " attempts");
}

BufferPlan BufferPlan::standard() {
  BufferPlan plan;
  for (int k = 1; k <= 10; ++k) plan.ranges.emplace_back(0.0, k / 10.0);
  for (int k = 1; k <= 9; ++k) plan.ranges.emplace_back(k / 10.0, 1.0);
  return plan;
}

std::size_t BufferPlan::size() const {
  return ranges.size() * static_cast<std::size_t>(std::max(repetitions, 0)) + (include_max ? 1 : 0) +
         (include_zero ? 1 : 0);
}

Schedule buffered_schedule(const Schedule& es, const ScheduleGraph& graph, const std::vector<double>& buffers,
                           const std::vector<double>& mu) {
  const Instance& inst = es.inst();
  Schedule out = es;
  for (JobId j : graph.topological_order()) {
    double s = es.start[idx(j)];
    for (JobId i : graph.direct_predecessors(j))
      s = std::max(s, out.start[idx(i)] + inst.jobs[idx(i)].p + mu[idx(i)] * buffers[idx(i)]);
    out.start[idx(j)] = s;
  }
  return out;
}

std::vector<Schedule> diversify_buffers(const Schedule& es, const BufferPlan& plan, std::uint64_t seed) {
  const ScheduleGraph graph = build_combined_order(es);
  const IntervalSolution sol = solve_rm14(es, graph);
  const std::size_t n = idx(es.n());
  std::vector<double> b(n);
  for (std::size_t j = 0; j < n; ++j) b[j] = std::max(0.0, sol.l[j] - sol.e[j]);

  std::vector<Schedule> out;
  out.reserve(plan.size());
  std::vector<double> mu(n);
  for (std::size_t q = 0; q < plan.ranges.size(); ++q) {
    const auto [lo, hi] = plan.ranges[q];
    for (int t = 0; t < plan.repetitions; ++t) {
      SplitMix64 rng(derive_seed(seed, q, static_cast<std::uint64_t>(t)));
      std::uniform_real_distribution<double> u(lo, hi);
      for (double& v : mu) v = u(rng);
      out.push_back(buffered_schedule(es, graph, b, mu));
    }
  }
  if (plan.include_max) out.push_back(buffered_schedule(es, graph, b, std::vector<double>(n, 1.0)));
  if (plan.include_zero) out.push_back(buffered_schedule(es, graph, b, std::vector<double>(n, 0.0)));
  return out;
}

}  // namespace robsched
