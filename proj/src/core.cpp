#include "robsched/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

namespace robsched {

double Instance::job_deadline(JobId j) const {
  const auto& due = jobs[static_cast<std::size_t>(j)].due;
  return due ? *due : deadline;
}

std::vector<double> Instance::job_deadlines() const {
  std::vector<double> d(jobs.size());
  for (int j = 0; j < n(); ++j) d[static_cast<std::size_t>(j)] = job_deadline(j);
  return d;
}

bool Instance::has_job_deadlines() const {
  return std::any_of(jobs.begin(), jobs.end(), [](const Job& job) { return job.due.has_value(); });
}

namespace {

// Kahn's algorithm with a min-heap so ties resolve to the smallest job id.
// Returns fewer than n ids when the arcs contain a cycle.
template <class Successors>
std::vector<JobId> kahn_order(int n, const Successors& succ, std::vector<int> indegree) {
  std::priority_queue<JobId, std::vector<JobId>, std::greater<>> ready;
  for (JobId j = 0; j < n; ++j)
    if (indegree[static_cast<std::size_t>(j)] == 0) ready.push(j);
  std::vector<JobId> order;
  order.reserve(static_cast<std::size_t>(n));
  while (!ready.empty()) {
    const JobId j = ready.top();
    ready.pop();
    order.push_back(j);
    for (JobId k : succ(j))
      if (--indegree[static_cast<std::size_t>(k)] == 0) ready.push(k);
  }
  return order;
}

}  // namespace

std::vector<std::string> check_instance(const Instance& instance) {
  std::vector<std::string> problems;
  const int n = instance.n();
  if (instance.m < 1) problems.push_back("machine count must be at least 1");
  if (!(instance.deadline > 0.0)) problems.push_back("deadline must be positive");
  for (int j = 0; j < n; ++j) {
    const Job& job = instance.jobs[static_cast<std::size_t>(j)];
    const std::string tag = "job " + std::to_string(j) + ": ";
    if (!(job.p > 0.0)) problems.push_back(tag + "processing time must be positive");
    if (!(job.r >= 0.0)) problems.push_back(tag + "release date must be non-negative");
    if (!(job.dist.cv >= 0.0)) problems.push_back(tag + "cv must be non-negative");
    if (std::abs(job.dist.mean - job.p) > 1e-9 * std::max(1.0, job.p))
      problems.push_back(tag + "distribution mean differs from p");
    if (job.due && !(*job.due > 0.0)) problems.push_back(tag + "due date must be positive");
  }
  std::vector<std::vector<JobId>> succ(static_cast<std::size_t>(std::max(n, 0)));
  std::vector<int> indegree(static_cast<std::size_t>(std::max(n, 0)), 0);
  bool ranges_ok = true;
  for (const Arc& a : instance.precedence) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n) {
      problems.push_back("precedence arc (" + std::to_string(a.from) + "," + std::to_string(a.to) +
                         ") references a job outside [0, n)");
      ranges_ok = false;
      continue;
    }
    if (a.from == a.to) {
      problems.push_back("precedence arc on job " + std::to_string(a.from) + " is a self loop");
      ranges_ok = false;
      continue;
    }
    succ[static_cast<std::size_t>(a.from)].push_back(a.to);
    ++indegree[static_cast<std::size_t>(a.to)];
  }
  auto row = [&succ](JobId j) -> const std::vector<JobId>& { return succ[static_cast<std::size_t>(j)]; };
  if (ranges_ok && static_cast<int>(kahn_order(n, row, indegree).size()) != n)
    problems.push_back("precedence relation contains a cycle");
  return problems;
}

ScheduleGraph ScheduleGraph::build(const Instance& instance, const MachineOrder& machine_order) {
  const int n = instance.n();
  if (static_cast<int>(machine_order.size()) != instance.m)
    throw ScheduleError("schedule has " + std::to_string(machine_order.size()) +
                        " machine sequences, instance has " + std::to_string(instance.m));

  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto& seq : machine_order) {
    for (JobId j : seq) {
      if (j < 0 || j >= n) throw ScheduleError("machine order references unknown job " + std::to_string(j));
      if (seen[static_cast<std::size_t>(j)]++ > 0)
        throw ScheduleError("job " + std::to_string(j) + " appears more than once in the machine order");
    }
  }
  for (JobId j = 0; j < n; ++j)
    if (seen[static_cast<std::size_t>(j)] == 0)
      throw ScheduleError("job " + std::to_string(j) + " is not assigned to any machine");

  ScheduleGraph g;
  g.n_ = n;
  for (const Arc& a : instance.precedence) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n || a.from == a.to)
      throw ScheduleError("invalid precedence arc");
    g.arcs_.push_back(a);
  }
  for (const auto& seq : machine_order)
    for (std::size_t k = 1; k < seq.size(); ++k) g.arcs_.push_back({seq[k - 1], seq[k]});
  std::sort(g.arcs_.begin(), g.arcs_.end());
  g.arcs_.erase(std::unique(g.arcs_.begin(), g.arcs_.end()), g.arcs_.end());

  const auto un = static_cast<std::size_t>(n);
  // Arcs are sorted by (from, to), so successor rows are contiguous ranges.
  std::vector<int> succ_offset(un + 1, 0), pred_offset(un + 1, 0);
  for (const Arc& a : g.arcs_) {
    ++succ_offset[static_cast<std::size_t>(a.from) + 1];
    ++pred_offset[static_cast<std::size_t>(a.to) + 1];
  }
  for (std::size_t j = 0; j < un; ++j) {
    succ_offset[j + 1] += succ_offset[j];
    pred_offset[j + 1] += pred_offset[j];
  }
  std::vector<JobId> pred_ids(g.arcs_.size());
  {
    std::vector<int> fill(pred_offset.begin(), pred_offset.end() - 1);
    for (const Arc& a : g.arcs_) pred_ids[static_cast<std::size_t>(fill[static_cast<std::size_t>(a.to)]++)] = a.from;
  }
  auto preds = [&](JobId j) {
    const auto k = static_cast<std::size_t>(j);
    return std::span<const JobId>(pred_ids.data() + pred_offset[k], pred_ids.data() + pred_offset[k + 1]);
  };
  std::vector<int> indegree(un);
  for (std::size_t j = 0; j < un; ++j) indegree[j] = pred_offset[j + 1] - pred_offset[j];
  std::vector<JobId> succ_ids(g.arcs_.size());
  for (std::size_t k = 0; k < g.arcs_.size(); ++k) succ_ids[k] = g.arcs_[k].to;
  g.topo_ = kahn_order(
      n,
      [&](JobId j) {
        const auto k = static_cast<std::size_t>(j);
        return std::span<const JobId>(succ_ids.data() + succ_offset[k], succ_ids.data() + succ_offset[k + 1]);
      },
      std::move(indegree));
  if (static_cast<int>(g.topo_.size()) != n) throw ScheduleError("combined order contains a cycle");

  g.words_ = (un + 63) / 64;
  g.ancestors_.assign(un * g.words_, 0);
  auto bits_of = [&g](JobId j) { return g.ancestors_.data() + static_cast<std::size_t>(j) * g.words_; };
  for (JobId j : g.topo_) {
    std::uint64_t* rj = bits_of(j);
    for (JobId i : preds(j)) {
      const std::uint64_t* ri = bits_of(i);
      for (std::size_t w = 0; w < g.words_; ++w) rj[w] |= ri[w];
      rj[static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (static_cast<std::size_t>(i) % 64);
    }
  }

  // Arc (i, j) is transitive when another union predecessor k of j already
  // has i among its ancestors. Kept arcs stay in (from, to) order, so the
  // direct successor rows come out sorted; predecessor rows are sorted by
  // the stable counting pass below.
  std::vector<char> keep(g.arcs_.size(), 0);
  g.dsucc_.offset.assign(un + 1, 0);
  g.dpred_.offset.assign(un + 1, 0);
  for (std::size_t k = 0; k < g.arcs_.size(); ++k) {
    const Arc& a = g.arcs_[k];
    bool redundant = false;
    for (JobId m : preds(a.to)) {
      if (m != a.from && g.precedes(a.from, m)) {
        redundant = true;
        break;
      }
    }
    if (redundant) continue;
    keep[k] = 1;
    ++g.dsucc_.offset[static_cast<std::size_t>(a.from) + 1];
    ++g.dpred_.offset[static_cast<std::size_t>(a.to) + 1];
  }
  for (std::size_t j = 0; j < un; ++j) {
    g.dsucc_.offset[j + 1] += g.dsucc_.offset[j];
    g.dpred_.offset[j + 1] += g.dpred_.offset[j];
  }
  g.dsucc_.ids.resize(static_cast<std::size_t>(g.dsucc_.offset[un]));
  g.dpred_.ids.resize(static_cast<std::size_t>(g.dpred_.offset[un]));
  {
    std::vector<int> fill(g.dpred_.offset.begin(), g.dpred_.offset.end() - 1);
    std::size_t out = 0;
    for (std::size_t k = 0; k < g.arcs_.size(); ++k) {
      if (!keep[k]) continue;
      const Arc& a = g.arcs_[k];
      g.dsucc_.ids[out++] = a.to;
      g.dpred_.ids[static_cast<std::size_t>(fill[static_cast<std::size_t>(a.to)]++)] = a.from;
    }
  }

  g.pred_.offset.assign(un + 1, 0);
  for (std::size_t j = 0; j < un; ++j) {
    int count = 0;
    for (std::size_t w = 0; w < g.words_; ++w) count += std::popcount(g.ancestors_[j * g.words_ + w]);
    g.pred_.offset[j + 1] = g.pred_.offset[j] + count;
  }
  g.pred_.ids.resize(static_cast<std::size_t>(g.pred_.offset[un]));
  for (JobId j = 0; j < n; ++j) {
    const std::uint64_t* rj = bits_of(j);
    auto out = g.pred_.ids.begin() + g.pred_.offset[static_cast<std::size_t>(j)];
    for (std::size_t w = 0; w < g.words_; ++w) {
      std::uint64_t bits = rj[w];
      while (bits != 0) {
        *out++ = static_cast<JobId>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }
  return g;
}

std::vector<Arc> ScheduleGraph::direct_arcs() const {
  std::vector<Arc> out;
  for (JobId i = 0; i < n_; ++i)
    for (JobId j : dsucc_.row(i)) out.push_back({i, j});
  return out;
}

std::span<const JobId> ScheduleGraph::direct_predecessors(JobId j) const {
  return dpred_.row(j);
}

std::span<const JobId> ScheduleGraph::direct_successors(JobId j) const {
  return dsucc_.row(j);
}

std::span<const JobId> ScheduleGraph::predecessors(JobId j) const {
  return pred_.row(j);
}

std::span<const JobId> ScheduleGraph::Adjacency::row(JobId j) const {
  const auto k = static_cast<std::size_t>(j);
  return {ids.data() + offset[k], ids.data() + offset[k + 1]};
}

bool ScheduleGraph::precedes(JobId i, JobId j) const {
  const std::uint64_t word = ancestors_[static_cast<std::size_t>(j) * words_ + static_cast<std::size_t>(i) / 64];
  return ((word >> (static_cast<std::size_t>(i) % 64)) & 1U) != 0;
}

ScheduleGraph build_combined_order(const Schedule& schedule) {
  return ScheduleGraph::build(schedule.inst(), schedule.machine_order);
}

std::vector<double> latest_start_times(const Schedule& schedule, const ScheduleGraph& graph,
                                       std::span<const double> deadlines) {
  const Instance& inst = schedule.inst();
  std::vector<double> ls(static_cast<std::size_t>(inst.n()));
  const auto topo = graph.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const JobId j = *it;
    const double p = inst.jobs[static_cast<std::size_t>(j)].p;
    double v = deadlines[static_cast<std::size_t>(j)] - p;
    for (JobId i : graph.direct_successors(j)) v = std::min(v, ls[static_cast<std::size_t>(i)] - p);
    ls[static_cast<std::size_t>(j)] = v;
  }
  return ls;
}

std::vector<double> earliest_start_times(const Instance& instance, const ScheduleGraph& graph) {
  std::vector<double> s(static_cast<std::size_t>(instance.n()));
  for (JobId j : graph.topological_order()) {
    double v = instance.jobs[static_cast<std::size_t>(j)].r;
    for (JobId i : graph.direct_predecessors(j))
      v = std::max(v, s[static_cast<std::size_t>(i)] + instance.jobs[static_cast<std::size_t>(i)].p);
    s[static_cast<std::size_t>(j)] = v;
  }
  return s;
}

SlackProfile slack_profile(const Schedule& schedule) {
  return slack_profile(schedule, build_combined_order(schedule));
}

SlackProfile slack_profile(const Schedule& schedule, ScheduleGraph graph) {
  const Instance& inst = schedule.inst();
  const auto n = static_cast<std::size_t>(inst.n());
  SlackProfile prof;
  const std::vector<double> deadlines = inst.job_deadlines();
  prof.ls = latest_start_times(schedule, graph, deadlines);
  prof.p.resize(n);
  prof.ts.resize(n);
  prof.fs.resize(n);
  prof.ndp.resize(n);
  prof.nds.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = inst.jobs[j].p;
    const double s = schedule.start[j];
    const auto succ = graph.direct_successors(static_cast<JobId>(j));
    prof.p[j] = p;
    prof.ts[j] = prof.ls[j] - s;
    double fs = succ.empty() ? deadlines[j] - s - p : std::numeric_limits<double>::infinity();
    for (JobId i : succ) fs = std::min(fs, schedule.start[static_cast<std::size_t>(i)] - s - p);
    prof.fs[j] = fs;
    prof.ndp[j] = static_cast<int>(graph.direct_predecessors(static_cast<JobId>(j)).size());
    prof.nds[j] = static_cast<int>(succ.size());
  }
  prof.graph = std::move(graph);
  return prof;
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::instance: return "instance";
    case Violation::Kind::structure: return "structure";
    case Violation::Kind::cycle: return "cycle";
    case Violation::Kind::release: return "release";
    case Violation::Kind::precedence: return "precedence";
    case Violation::Kind::machine_overlap: return "machine_overlap";
    case Violation::Kind::deadline: return "deadline";
  }
  return "unknown";
}

std::vector<Violation> validate(const Schedule& schedule) {
  std::vector<Violation> out;
  if (!schedule.instance) {
    out.push_back({Violation::Kind::structure, {}, "schedule has no instance"});
    return out;
  }
  const Instance& inst = schedule.inst();
  for (auto& msg : check_instance(inst)) out.push_back({Violation::Kind::instance, {}, std::move(msg)});
  if (!out.empty()) return out;

  const int n = inst.n();
  if (static_cast<int>(schedule.start.size()) != n) {
    out.push_back({Violation::Kind::structure, {},
                   "start vector has " + std::to_string(schedule.start.size()) + " entries, expected " +
                       std::to_string(n)});
    return out;
  }
  try {
    (void)build_combined_order(schedule);
  } catch (const ScheduleError& e) {
    const bool cycle = std::string_view(e.what()).find("cycle") != std::string_view::npos;
    out.push_back({cycle ? Violation::Kind::cycle : Violation::Kind::structure, {}, e.what()});
    return out;
  }

  auto fmt = [](double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  };
  const auto& s = schedule.start;
  for (JobId j = 0; j < n; ++j) {
    const Job& job = inst.jobs[static_cast<std::size_t>(j)];
    const double sj = s[static_cast<std::size_t>(j)];
    if (!std::isfinite(sj)) {
      out.push_back({Violation::Kind::structure, {j}, "start of job " + std::to_string(j) + " is not finite"});
      continue;
    }
    if (sj < job.r - kTimeTol)
      out.push_back({Violation::Kind::release, {j},
                     "job " + std::to_string(j) + " starts at " + fmt(sj) + " before its release date " +
                         fmt(job.r)});
    const double dj = inst.job_deadline(j);
    if (sj + job.p > dj + kTimeTol)
      out.push_back({Violation::Kind::deadline, {j},
                     "job " + std::to_string(j) + " completes at " + fmt(sj + job.p) + " after deadline " +
                         fmt(dj)});
  }
  for (const Arc& a : inst.precedence) {
    const double done = s[static_cast<std::size_t>(a.from)] + inst.jobs[static_cast<std::size_t>(a.from)].p;
    if (s[static_cast<std::size_t>(a.to)] < done - kTimeTol)
      out.push_back({Violation::Kind::precedence, {a.from, a.to},
                     "job " + std::to_string(a.to) + " starts before predecessor " + std::to_string(a.from) +
                         " completes"});
  }
  for (const auto& seq : schedule.machine_order) {
    for (std::size_t k = 1; k < seq.size(); ++k) {
      const JobId i = seq[k - 1];
      const JobId j = seq[k];
      const double done = s[static_cast<std::size_t>(i)] + inst.jobs[static_cast<std::size_t>(i)].p;
      if (s[static_cast<std::size_t>(j)] < done - kTimeTol)
        out.push_back({Violation::Kind::machine_overlap, {i, j},
                       "job " + std::to_string(j) + " overlaps machine predecessor " + std::to_string(i)});
    }
  }
  return out;
}

void require_feasible(const Schedule& schedule) {
  const auto violations = validate(schedule);
  if (!violations.empty()) throw ScheduleError("infeasible schedule: " + violations.front().message);
}

}  // namespace robsched
