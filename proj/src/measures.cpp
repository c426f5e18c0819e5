#include "robsched/measures.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "robsched/lp.hpp"

namespace robsched {

namespace {

constexpr std::array<std::string_view, kMeasureCount> kNames = {
    "RM1",  "RM2",  "RM3",  "RM4",  "RM5",  "RM6",  "RM7",  "RM8",  "RM9", "RM10",
    "RM11", "RM12", "RM13", "RM14", "RM15", "RM16", "RM17", "RM18", "Cmax"};

std::size_t idx(JobId j) { return static_cast<std::size_t>(j); }

double lambda_at(std::span<const double> lambda, std::size_t j) {
  if (j >= lambda.size()) throw std::invalid_argument("lambda vector shorter than job count");
  return lambda[j];
}

}  // namespace

std::string_view measure_name(MeasureId id) { return kNames.at(static_cast<std::size_t>(index_of(id))); }

std::optional<MeasureId> parse_measure(std::string_view name) {
  for (int i = 0; i < kMeasureCount; ++i) {
    const std::string_view n = kNames[static_cast<std::size_t>(i)];
    if (n.size() != name.size()) continue;
    bool same = true;
    for (std::size_t k = 0; k < n.size() && same; ++k)
      same = std::tolower(static_cast<unsigned char>(n[k])) == std::tolower(static_cast<unsigned char>(name[k]));
    if (same) return measure_at(i);
  }
  return std::nullopt;
}

Orientation orientation(MeasureId id) {
  switch (id) {
    case MeasureId::RM12:
    case MeasureId::RM18:
    case MeasureId::Cmax:
      return Orientation::lower_is_better;
    default:
      return Orientation::higher_is_better;
  }
}

std::bitset<kMeasureCount> parse_measure_list(std::string_view list) {
  std::bitset<kMeasureCount> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    std::string_view item = list.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "all") {
      out.set();
    } else if (!item.empty()) {
      const auto id = parse_measure(item);
      if (!id) throw std::invalid_argument("unknown measure: " + std::string(item));
      out.set(static_cast<std::size_t>(index_of(*id)));
    }
    pos = comma + 1;
  }
  if (out.none()) throw std::invalid_argument("empty measure list");
  return out;
}

double MeasureVector::at(MeasureId id) const {
  const auto& v = values[static_cast<std::size_t>(index_of(id))];
  if (!v) throw std::out_of_range("measure " + std::string(measure_name(id)) + " not computed");
  return *v;
}

std::vector<double> lambda_values(const Instance& instance, LambdaRule rule, double q) {
  std::vector<double> out;
  out.reserve(instance.jobs.size());
  for (const Job& job : instance.jobs)
    out.push_back(rule == LambdaRule::quantile ? lambda_factor(job.dist, q) : mad_factor(job.dist));
  return out;
}

double cmax(const Schedule& schedule) {
  double c = 0.0;
  for (std::size_t j = 0; j < schedule.start.size(); ++j)
    c = std::max(c, schedule.start[j] + schedule.inst().jobs[j].p);
  return c;
}

double rm1(const SlackProfile& prof) {
  double s = 0.0;
  for (double v : prof.ts) s += v;
  return s;
}

double rm2(const SlackProfile& prof) {
  double s = 0.0;
  for (double v : prof.fs) s += v;
  return s;
}

double rm3(const SlackProfile& prof) {
  if (prof.ts.empty()) return 0.0;
  return *std::min_element(prof.ts.begin(), prof.ts.end());
}

double rm4(const SlackProfile& prof) {
  if (prof.fs.empty()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < prof.fs.size(); ++j) m = std::min(m, prof.fs[j] / prof.p[j]);
  return m;
}

double rm5(const SlackProfile& prof, std::span<const double> lambda) {
  double s = 0.0;
  for (std::size_t j = 0; j < prof.fs.size(); ++j) s += std::min(prof.fs[j], lambda_at(lambda, j) * prof.p[j]);
  return s;
}

double rm6(const SlackProfile& prof) {
  return static_cast<double>(std::count_if(prof.fs.begin(), prof.fs.end(), [](double f) { return f > kTimeTol; }));
}

double rm7(const SlackProfile& prof) {
  double s = 0.0;
  for (std::size_t j = 0; j < prof.fs.size(); ++j) s += prof.fs[j] * prof.p[j];
  return s;
}

double rm8(const SlackProfile& prof) {
  double s = 0.0;
  for (std::size_t j = 0; j < prof.fs.size(); ++j) s += prof.fs[j] * prof.ndp[j];
  return s;
}

double rm9(const SlackProfile& prof) {
  double s = 0.0;
  for (std::size_t j = 0; j < prof.fs.size(); ++j) s += prof.fs[j] * prof.nds[j];
  return s;
}

double rm10(const SlackProfile& prof) {
  double s = 0.0;
  for (std::size_t j = 0; j < prof.fs.size(); ++j) s += prof.fs[j] * prof.nds[j] * prof.p[j];
  return s;
}

std::pair<double, double> rm11_rm12(const SlackProfile& prof, std::span<const double> lambda) {
  double good = 0.0;
  double bad = 0.0;
  for (JobId j = 0; j < prof.n(); ++j) {
    const double fs = prof.fs[idx(j)];
    auto check = [&](JobId i) {
      if (fs >= lambda_at(lambda, idx(i)) * prof.p[idx(i)] - kTimeTol)
        good += 1.0;
      else
        bad += 1.0;
    };
    for (JobId i : prof.graph.predecessors(j)) check(i);
    check(j);
  }
  return {good, bad};
}

NormalPropagation propagate_normal(const Schedule& schedule, const ScheduleGraph& graph) {
  const Instance& inst = schedule.inst();
  const auto un = static_cast<std::size_t>(inst.n());
  NormalPropagation out;
  out.start.resize(un);
  out.completion.resize(un);
  out.ready.resize(un);
  for (JobId j : graph.topological_order()) {
    std::optional<GaussianMoment> ready;
    for (JobId i : graph.direct_predecessors(j)) {
      const GaussianMoment& y = out.completion[idx(i)];
      ready = ready ? gaussian_max(*ready, y) : y;
    }
    const GaussianMoment planned{schedule.start[idx(j)], 0.0};
    const GaussianMoment x = ready ? gaussian_max(*ready, planned) : planned;
    const Job& job = inst.jobs[idx(j)];
    out.ready[idx(j)] = ready;
    out.start[idx(j)] = x;
    out.completion[idx(j)] = x + GaussianMoment{job.p, job.dist.variance()};
  }
  return out;
}

double rm15(const Schedule& schedule, const ScheduleGraph& graph) {
  return rm15(schedule, graph, propagate_normal(schedule, graph));
}

double rm15(const Schedule& schedule, const ScheduleGraph& graph, const NormalPropagation& prop) {
  std::optional<GaussianMoment> makespan;
  for (JobId j = 0; j < graph.size(); ++j) {
    if (!graph.direct_successors(j).empty()) continue;
    const GaussianMoment& y = prop.completion[idx(j)];
    makespan = makespan ? gaussian_max(*makespan, y) : y;
  }
  if (!makespan) return 1.0;
  return gaussian_cdf_at(*makespan, schedule.inst().deadline);
}

double rm16(const Schedule& schedule, const ScheduleGraph& graph) {
  return rm16(schedule, graph, propagate_normal(schedule, graph));
}

double rm16(const Schedule& schedule, const ScheduleGraph& graph, const NormalPropagation& prop) {
  double s = 0.0;
  for (JobId j = 0; j < graph.size(); ++j) {
    const auto& ready = prop.ready[idx(j)];
    s += ready ? gaussian_cdf_at(*ready, schedule.start[idx(j)]) : 1.0;
  }
  return s;
}

double rm17(const SlackProfile& prof, std::span<const double> lambda) {
  double s = 0.0;
  for (JobId j = 0; j < prof.n(); ++j) {
    const auto preds = prof.graph.direct_predecessors(j);
    if (preds.empty()) {
      s += 1.0;
      continue;
    }
    int ok = 0;
    for (JobId i : preds)
      if (prof.fs[idx(i)] >= lambda_at(lambda, idx(i)) * prof.p[idx(i)] - kTimeTol) ++ok;
    s += static_cast<double>(ok) / static_cast<double>(preds.size());
  }
  return s;
}

std::pair<double, EsdProfile> rm18(const SlackProfile& prof, std::span<const double> lambda, EsdScope scope) {
  EsdProfile out;
  out.esd.assign(static_cast<std::size_t>(prof.n()), 0.0);
  double total = 0.0;
  for (JobId j : prof.topo()) {
    const auto preds = scope == EsdScope::all_predecessors ? prof.graph.predecessors(j)
                                                           : prof.graph.direct_predecessors(j);
    double e = 0.0;
    for (JobId i : preds) {
      const double push = lambda_at(lambda, idx(i)) * prof.p[idx(i)] + out.esd[idx(i)] - prof.fs[idx(i)];
      if (push > kTimeTol) e = std::max(e, push);
    }
    out.esd[idx(j)] = e;
    total += e;
  }
  return {total, std::move(out)};
}

namespace {

using Clock = std::chrono::steady_clock;

struct Evaluator {
  const Schedule& schedule;
  const MeasureConfig& config;
  MeasureVector& out;

  template <class F>
  void run(MeasureId id, F&& f) {
    if (!config.is_enabled(id)) return;
    const auto t0 = Clock::now();
    try {
      out.set(id, f());
    } catch (const InfeasibleError& e) {
      out.errors[static_cast<std::size_t>(index_of(id))] = e.what();
    }
    if (config.timing)
      out.elapsed_ms[static_cast<std::size_t>(index_of(id))] =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
};

}  // namespace

MeasureVector evaluate_all(const Schedule& schedule, const MeasureConfig& config) {
  require_feasible(schedule);
  MeasureVector out;
  const SlackProfile prof = slack_profile(schedule);
  const Instance& inst = schedule.inst();
  const std::vector<double> lam = lambda_values(inst, config.threshold_rule, config.lambda_quantile);
  const std::vector<double> lam5 = config.rm5_rule == config.threshold_rule
                                       ? lam
                                       : lambda_values(inst, config.rm5_rule, config.lambda_quantile);
  Evaluator ev{schedule, config, out};

  ev.run(MeasureId::RM1, [&] { return rm1(prof); });
  ev.run(MeasureId::RM2, [&] { return rm2(prof); });
  ev.run(MeasureId::RM3, [&] { return rm3(prof); });
  ev.run(MeasureId::RM4, [&] { return rm4(prof); });
  ev.run(MeasureId::RM5, [&] { return rm5(prof, lam5); });
  ev.run(MeasureId::RM6, [&] { return rm6(prof); });
  ev.run(MeasureId::RM7, [&] { return rm7(prof); });
  ev.run(MeasureId::RM8, [&] { return rm8(prof); });
  ev.run(MeasureId::RM9, [&] { return rm9(prof); });
  ev.run(MeasureId::RM10, [&] { return rm10(prof); });
  if (config.is_enabled(MeasureId::RM11) || config.is_enabled(MeasureId::RM12)) {
    const auto t0 = Clock::now();
    const auto [good, bad] = rm11_rm12(prof, lam);
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    for (auto [id, v] : {std::pair{MeasureId::RM11, good}, std::pair{MeasureId::RM12, bad}}) {
      if (!config.is_enabled(id)) continue;
      out.set(id, v);
      if (config.timing) out.elapsed_ms[static_cast<std::size_t>(index_of(id))] = ms;
    }
  }
  ev.run(MeasureId::RM13, [&] { return solve_rm13(schedule, prof.graph).objective; });
  ev.run(MeasureId::RM14, [&] { return solve_rm14(schedule, prof.graph).objective; });
  if (config.is_enabled(MeasureId::RM15) || config.is_enabled(MeasureId::RM16)) {
    const NormalPropagation prop = propagate_normal(schedule, prof.graph);
    ev.run(MeasureId::RM15, [&] { return rm15(schedule, prof.graph, prop); });
    ev.run(MeasureId::RM16, [&] { return rm16(schedule, prof.graph, prop); });
  }
  ev.run(MeasureId::RM17, [&] { return rm17(prof, lam); });
  ev.run(MeasureId::RM18, [&] { return rm18(prof, lam, config.esd_scope).first; });
  ev.run(MeasureId::Cmax, [&] { return cmax(schedule); });
  return out;
}

double evaluate_single(const Schedule& schedule, MeasureId id, const MeasureConfig& config) {
  const Instance& inst = schedule.inst();
  switch (id) {
    case MeasureId::Cmax:
      return cmax(schedule);
    case MeasureId::RM13:
      return solve_rm13(schedule).objective;
    case MeasureId::RM14:
      return solve_rm14(schedule).objective;
    case MeasureId::RM15:
      return rm15(schedule, build_combined_order(schedule));
    case MeasureId::RM16:
      return rm16(schedule, build_combined_order(schedule));
    default:
      break;
  }
  const SlackProfile prof = slack_profile(schedule);
  switch (id) {
    case MeasureId::RM1: return rm1(prof);
    case MeasureId::RM2: return rm2(prof);
    case MeasureId::RM3: return rm3(prof);
    case MeasureId::RM4: return rm4(prof);
    case MeasureId::RM5: return rm5(prof, lambda_values(inst, config.rm5_rule, config.lambda_quantile));
    case MeasureId::RM6: return rm6(prof);
    case MeasureId::RM7: return rm7(prof);
    case MeasureId::RM8: return rm8(prof);
    case MeasureId::RM9: return rm9(prof);
    case MeasureId::RM10: return rm10(prof);
    case MeasureId::RM11:
      return rm11_rm12(prof, lambda_values(inst, config.threshold_rule, config.lambda_quantile)).first;
    case MeasureId::RM12:
      return rm11_rm12(prof, lambda_values(inst, config.threshold_rule, config.lambda_quantile)).second;
    case MeasureId::RM17: return rm17(prof, lambda_values(inst, config.threshold_rule, config.lambda_quantile));
    case MeasureId::RM18:
      return rm18(prof, lambda_values(inst, config.threshold_rule, config.lambda_quantile), config.esd_scope).first;
    default:
      throw std::invalid_argument("unhandled measure");
  }
}

}  // namespace robsched
