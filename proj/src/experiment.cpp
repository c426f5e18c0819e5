#include "robsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <unordered_map>

#include "robsched/lp.hpp"
#include "robsched/rng.hpp"

namespace robsched {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string instance_id(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "inst_%03zu", k);
  return buf;
}

std::string cv_text(double cv) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", cv);
  return buf;
}

std::string rule_name(LambdaRule r) { return r == LambdaRule::quantile ? "quantile" : "mad"; }

LambdaRule parse_rule(const std::string& s) {
  if (s == "quantile") return LambdaRule::quantile;
  if (s == "mad") return LambdaRule::mad;
  throw std::invalid_argument("unknown lambda rule: " + s);
}

std::vector<int> int_list(const json& j, const char* key) {
  if (!j.at(key).is_array()) return {j.at(key).get<int>()};
  return j.at(key).get<std::vector<int>>();
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct LoadedInstance {
  std::string id;
  std::shared_ptr<const Instance> instance;
  std::vector<ScheduleRecord> schedules;
};

/// Instances found under out/instances, sorted by id, with the schedule file
/// from `schedule_dir`.
std::vector<LoadedInstance> load_instances(const fs::path& out, const std::string& schedule_dir) {
  const fs::path dir = out / "instances";
  if (!fs::is_directory(dir)) throw IoError("no instances under " + dir.string() + "; run gen first");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  std::sort(ids.begin(), ids.end());
  std::vector<LoadedInstance> out_list;
  for (const auto& id : ids) {
    LoadedInstance li;
    li.id = id;
    li.instance = std::make_shared<const Instance>(read_instance(dir / (id + ".json")));
    const fs::path sched = out / schedule_dir / (id + ".jsonl");
    if (fs::exists(sched)) li.schedules = read_schedules(sched);
    out_list.push_back(std::move(li));
  }
  return out_list;
}

std::uint64_t instance_index(const std::string& id) {
  // "inst_007" -> 7; other names hash so that seeds stay distinct.
  if (id.rfind("inst_", 0) == 0) {
    try {
      return std::stoull(id.substr(5));
    } catch (const std::exception&) {
    }
  }
  return fnv1a(id);
}

std::vector<std::string> measure_columns() {
  std::vector<std::string> cols;
  for (int i = 0; i < kMeasureCount; ++i) cols.emplace_back(measure_name(measure_at(i)));
  return cols;
}

const std::vector<std::string> kDueColumns = {"total_deadline_delay", "late_jobs", "frac_runs_late"};

}  // namespace

DistLabel parse_dist_label(std::string_view text) {
  const std::string t(text);
  if (t == "N25") return {t, DistKind::normal, 0.25};
  if (t == "LN25") return {t, DistKind::lognormal, 0.25};
  if (t == "N50") return {t, DistKind::normal, 0.5};
  if (t == "LN50") return {t, DistKind::lognormal, 0.5};
  if (t == "Exp") return {t, DistKind::exponential, 1.0};
  if (t == "Det") return {t, DistKind::deterministic, 0.0};
  const auto colon = t.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown distribution label: " + t);
  DistLabel d;
  d.kind = parse_dist_kind(t.substr(0, colon));
  std::size_t used = 0;
  try {
    d.cv = std::stod(t.substr(colon + 1), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size() - colon - 1 || !(d.cv >= 0.0))
    throw std::invalid_argument("bad coefficient of variation in " + t);
  d.label = std::string(to_string(d.kind)) + "_" + cv_text(d.cv);
  return d;
}

Instance with_distribution(const Instance& instance, const DistLabel& dist) {
  Instance out = instance;
  for (Job& job : out.jobs) job.dist = DistributionSpec{dist.kind, job.p, dist.cv};
  return out;
}

ExperimentConfig::ExperimentConfig() {
  for (const char* l : {"N25", "LN25", "N50", "LN50", "Exp"}) dists.push_back(parse_dist_label(l));
}

ExperimentConfig ExperimentConfig::fast() {
  ExperimentConfig c;
  c.arcs = {15, 75};
  c.m = {4};
  c.replicates = 1;
  c.schedules_per_instance = 2;
  c.dists = {parse_dist_label("N25")};
  c.replications = 100;
  return c;
}

void ExperimentConfig::merge(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    if (j.contains("n")) n = int_list(j, "n");
    if (j.contains("arcs")) arcs = int_list(j, "arcs");
    if (j.contains("m")) m = int_list(j, "m");
    if (j.contains("replicates")) replicates = j.at("replicates").get<int>();
    if (j.contains("schedules_per_instance")) schedules_per_instance = j.at("schedules_per_instance").get<int>();
    if (j.contains("repetitions")) plan.repetitions = j.at("repetitions").get<int>();
    if (j.contains("replications")) replications = j.at("replications").get<int>();
    if (j.contains("timing_replications")) timing_replications = j.at("timing_replications").get<int>();
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) threads = j.at("threads").get<int>();
    if (j.contains("retry_cap")) retry_cap = j.at("retry_cap").get<int>();
    if (j.contains("timing")) timing = j.at("timing").get<bool>();
    if (j.contains("lambda_rule")) measures.threshold_rule = parse_rule(j.at("lambda_rule").get<std::string>());
    if (j.contains("rm5_rule")) measures.rm5_rule = parse_rule(j.at("rm5_rule").get<std::string>());
    if (j.contains("lambda_quantile")) measures.lambda_quantile = j.at("lambda_quantile").get<double>();
    if (j.contains("esd_scope")) {
      const auto s = j.at("esd_scope").get<std::string>();
      if (s == "all") measures.esd_scope = EsdScope::all_predecessors;
      else if (s == "direct") measures.esd_scope = EsdScope::direct_predecessors;
      else throw std::invalid_argument("esd_scope must be \"all\" or \"direct\"");
    }
    if (j.contains("measures")) {
      const json& ms = j.at("measures");
      std::string list;
      if (ms.is_string()) {
        list = ms.get<std::string>();
      } else {
        for (const auto& s : ms) list += s.get<std::string>() + ",";
      }
      measures.enabled = parse_measure_list(list);
    }
    if (j.contains("dists")) {
      dists.clear();
      for (const auto& d : j.at("dists")) {
        if (d.is_string()) {
          dists.push_back(parse_dist_label(d.get<std::string>()));
        } else {
          DistLabel l;
          l.kind = parse_dist_kind(d.at("kind").get<std::string>());
          l.cv = d.at("cv").get<double>();
          l.label = d.contains("label") ? d.at("label").get<std::string>()
                                        : std::string(to_string(l.kind)) + "_" + cv_text(l.cv);
          dists.push_back(l);
        }
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  check();
}

json ExperimentConfig::to_json() const {
  json ds = json::array();
  for (const auto& d : dists) ds.push_back({{"label", d.label}, {"kind", std::string(to_string(d.kind))}, {"cv", d.cv}});
  json ms = json::array();
  for (int i = 0; i < kMeasureCount; ++i)
    if (measures.is_enabled(measure_at(i))) ms.push_back(std::string(measure_name(measure_at(i))));
  return {{"n", n},
          {"arcs", arcs},
          {"m", m},
          {"replicates", replicates},
          {"schedules_per_instance", schedules_per_instance},
          {"repetitions", plan.repetitions},
          {"buffer_ranges", plan.ranges},
          {"dists", ds},
          {"replications", replications},
          {"timing_replications", timing_replications},
          {"seed", seed},
          {"threads", threads},
          {"retry_cap", retry_cap},
          {"timing", timing},
          {"lambda_rule", rule_name(measures.threshold_rule)},
          {"rm5_rule", rule_name(measures.rm5_rule)},
          {"lambda_quantile", measures.lambda_quantile},
          {"esd_scope", measures.esd_scope == EsdScope::all_predecessors ? "all" : "direct"},
          {"measures", ms}};
}

std::string ExperimentConfig::hash() const {
  json j = to_json();
  j.erase("threads");  // does not change any output
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

void ExperimentConfig::check() const {
  auto positive = [](const std::vector<int>& v, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
    for (int x : v)
      if (x < 1) throw std::invalid_argument(std::string(what) + " values must be at least 1");
  };
  positive(n, "n");
  positive(m, "m");
  if (arcs.empty()) throw std::invalid_argument("arcs list is empty");
  for (int a : arcs)
    if (a < 0) throw std::invalid_argument("arc counts must be non-negative");
  if (replicates < 1 || schedules_per_instance < 1 || replications < 1 || timing_replications < 1 || retry_cap < 1)
    throw std::invalid_argument("counts must be at least 1");
  if (plan.repetitions < 0) throw std::invalid_argument("repetitions must be non-negative");
  if (dists.empty()) throw std::invalid_argument("at least one distribution is required");
  for (const auto& d : dists) check_distribution(DistributionSpec{d.kind, 1.0, d.cv});
  if (!(measures.lambda_quantile > 0.0 && measures.lambda_quantile < 1.0))
    throw std::invalid_argument("lambda_quantile must lie in (0, 1)");
}

ExperimentConfig load_config(const fs::path& path) {
  ExperimentConfig c;
  try {
    c.merge(json::parse(read_text(path)));
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return c;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

const std::vector<std::string>& simulation_columns() {
  static const std::vector<std::string> cols = {"R",          "seed",         "avg_makespan",
                                                "frac_within_deadline", "frac_on_time", "total_delay"};
  return cols;
}

const std::vector<std::string>& sim_measure_names() {
  static const std::vector<std::string> names = {"avg_makespan", "frac_within_deadline", "frac_on_time",
                                                 "total_delay",  "total_deadline_delay", "late_jobs",
                                                 "frac_runs_late"};
  return names;
}

CsvTable simulation_table(const std::vector<std::string>& instance_ids, const std::vector<int>& schedule_ids,
                          const std::vector<SimulationReport>& reports) {
  CsvTable t;
  t.header = {"instance_id", "schedule_id"};
  for (const auto& c : simulation_columns()) t.header.push_back(c);
  const bool due = std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.due.has_value(); });
  if (due)
    for (const auto& c : kDueColumns) t.header.push_back(c);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const SimulationReport& r = reports[i];
    std::vector<std::string> row = {instance_ids[i],
                                    std::to_string(schedule_ids[i]),
                                    std::to_string(r.replications),
                                    std::to_string(r.seed),
                                    format_double(r.avg_makespan),
                                    format_double(r.frac_within_deadline),
                                    format_double(r.frac_on_time),
                                    format_double(r.total_delay)};
    if (due) {
      if (r.due) {
        row.push_back(format_double(r.due->avg_total_deadline_delay));
        row.push_back(format_double(r.due->avg_late_jobs));
        row.push_back(format_double(r.due->frac_runs_with_late_job));
      } else {
        row.insert(row.end(), 3, "");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable measures_table(const std::vector<std::string>& instance_ids, const std::vector<int>& schedule_ids,
                        const std::vector<MeasureVector>& vectors) {
  CsvTable t;
  t.header = {"instance_id", "schedule_id"};
  for (const auto& c : measure_columns()) t.header.push_back(c);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    std::vector<std::string> row = {instance_ids[i], std::to_string(schedule_ids[i])};
    for (const auto& v : vectors[i].values) row.push_back(v ? format_double(*v) : "");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void cmd_gen(const ExperimentConfig& cfg, const fs::path& out, StageLog& log) {
  cfg.check();
  struct Cell {
    int n, arcs, m;
  };
  std::vector<Cell> cells;
  for (int n : cfg.n)
    for (int a : cfg.arcs)
      for (int m : cfg.m)
        for (int rep = 0; rep < cfg.replicates; ++rep) cells.push_back({n, a, m});

  std::vector<std::shared_ptr<const Instance>> instances(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    InstanceGenConfig g;
    g.n = cells[k].n;
    g.arcs = cells[k].arcs;
    g.m = cells[k].m;
    g.seed = derive_seed(cfg.seed, 1, k);
    g.kind = cfg.dists.front().kind;
    g.cv = cfg.dists.front().cv;
    instances[k] = std::make_shared<const Instance>(gen_instance(g));
  }

  const auto ess_count = static_cast<std::size_t>(cfg.schedules_per_instance);
  const std::size_t per_ess = cfg.plan.size();
  std::vector<std::optional<Schedule>> ess(cells.size() * ess_count);
  std::vector<std::vector<Schedule>> buffered(ess.size());
  std::vector<std::string> failures(ess.size());
  parallel_for(ess.size(), cfg.threads, [&](std::size_t t) {
    const std::size_t k = t / ess_count;
    const std::size_t e = t % ess_count;
    const std::uint64_t inst_seed = derive_seed(cfg.seed, 1, k);
    try {
      Schedule es = gen_earliest_start(instances[k], derive_seed(inst_seed, 2, e), cfg.retry_cap);
      buffered[t] = diversify_buffers(es, cfg.plan, derive_seed(inst_seed, 3, e));
      ess[t] = std::move(es);
    } catch (const GenerationError& err) {
      failures[t] = instance_id(k) + " schedule " + std::to_string(e) + ": " + err.what();
    }
  });

  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::string id = instance_id(k);
    write_instance(out / "instances" / (id + ".json"), *instances[k]);
    std::vector<ScheduleRecord> pop;
    std::vector<ScheduleRecord> base;
    for (std::size_t e = 0; e < ess_count; ++e) {
      const std::size_t t = k * ess_count + e;
      if (!ess[t]) {
        ++log.generation_failures;
        log.messages.push_back(failures[t]);
        continue;
      }
      base.push_back({id, static_cast<int>(e), ess[t]->machine_order, ess[t]->start});
      for (std::size_t b = 0; b < buffered[t].size(); ++b)
        pop.push_back({id, static_cast<int>(e * per_ess + b), buffered[t][b].machine_order, buffered[t][b].start});
    }
    write_schedules(out / "ess" / (id + ".jsonl"), base);
    write_schedules(out / "schedules" / (id + ".jsonl"), pop);
  }
}

void cmd_eval(const ExperimentConfig& cfg, const fs::path& out, StageLog& log) {
  cfg.check();
  const auto loaded = load_instances(out, "schedules");
  for (const DistLabel& dist : cfg.dists) {
    struct Task {
      std::size_t inst;
      std::size_t sched;
    };
    std::vector<Task> tasks;
    std::vector<std::shared_ptr<const Instance>> variants;
    for (std::size_t k = 0; k < loaded.size(); ++k) {
      variants.push_back(std::make_shared<const Instance>(with_distribution(*loaded[k].instance, dist)));
      for (std::size_t s = 0; s < loaded[k].schedules.size(); ++s) tasks.push_back({k, s});
    }
    std::vector<SimulationReport> reports(tasks.size());
    std::vector<MeasureVector> vectors(tasks.size());
    std::vector<std::string> errors(tasks.size());
    parallel_for(tasks.size(), cfg.threads, [&](std::size_t t) {
      const auto& li = loaded[tasks[t].inst];
      const ScheduleRecord& rec = li.schedules[tasks[t].sched];
      SimulationOptions opt;
      opt.replications = cfg.replications;
      // Common random numbers: every schedule of an instance sees the same draws.
      opt.seed = derive_seed(derive_seed(cfg.seed, 4, instance_index(li.id)), fnv1a(dist.label));
      try {
        const Schedule s = to_schedule(rec, variants[tasks[t].inst]);
        vectors[t] = evaluate_all(s, cfg.measures);
        reports[t] = simulate(s, opt);
        for (int i = 0; i < kMeasureCount; ++i)
          if (!vectors[t].errors[static_cast<std::size_t>(i)].empty())
            errors[t] = li.id + " schedule " + std::to_string(rec.schedule_id) + " " +
                        std::string(measure_name(measure_at(i))) + ": " + vectors[t].errors[static_cast<std::size_t>(i)];
      } catch (const std::exception& e) {
        errors[t] = li.id + " schedule " + std::to_string(rec.schedule_id) + ": " + e.what();
        reports[t] = SimulationReport{};
        reports[t].replications = 0;
        reports[t].avg_makespan = reports[t].frac_within_deadline = reports[t].frac_on_time = reports[t].total_delay =
            std::numeric_limits<double>::quiet_NaN();
      }
    });
    std::vector<std::string> ids;
    std::vector<int> sids;
    for (const Task& t : tasks) {
      ids.push_back(loaded[t.inst].id);
      sids.push_back(loaded[t.inst].schedules[t.sched].schedule_id);
    }
    for (const auto& e : errors)
      if (!e.empty()) log.messages.push_back(dist.label + ": " + e);
    const fs::path dir = out / "eval" / dist.label;
    write_csv(dir / "simulation.csv", simulation_table(ids, sids, reports));
    write_csv(dir / "measures.csv", measures_table(ids, sids, vectors));
  }
}

std::string boxplot_svg(const std::string& title, const std::vector<std::string>& labels,
                        const std::vector<BoxSummary>& boxes) {
  const int left = 70, right = 20, top = 40, row_h = 22, width = 640;
  const int height = top + row_h * static_cast<int>(labels.size()) + 40;
  const double plot_w = width - left - right;
  auto x = [&](double v) { return left + plot_w * std::clamp(v, 0.0, 1.0); };
  char buf[512];
  std::string s;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" font-family=\"sans-serif\" "
                "font-size=\"11\">\n",
                width, height);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"20\" font-size=\"13\">%s</text>\n", left, title.c_str());
  s += buf;
  const int axis_y = top + row_h * static_cast<int>(labels.size());
  for (int tick = 0; tick <= 10; ++tick) {
    const double v = tick / 10.0;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" stroke=\"#ddd\"/>\n"
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">%.1f</text>\n",
                  x(v), top - 5, x(v), axis_y, x(v), axis_y + 15, v);
    s += buf;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int cy = top + row_h * static_cast<int>(i) + row_h / 2;
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%s</text>\n", left - 8, cy + 4,
                  labels[i].c_str());
    s += buf;
    const BoxSummary& b = boxes[i];
    if (b.n == 0) continue;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" stroke=\"black\"/>\n"
                  "<rect x=\"%.1f\" y=\"%d\" width=\"%.1f\" height=\"%d\" fill=\"%s\" stroke=\"black\"/>\n"
                  "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" stroke=\"black\" stroke-width=\"2\"/>\n"
                  "<circle cx=\"%.1f\" cy=\"%d\" r=\"2.5\" fill=\"red\"/>\n",
                  x(b.min), cy, x(b.max), cy, x(b.q1), cy - 7, std::max(1.0, x(b.q3) - x(b.q1)), 14,
                  b.mean > 0.9 ? "#9d9" : "#ccf", x(b.median), cy - 7, x(b.median), cy + 7, x(b.mean), cy);
    s += buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">|rho|</text>\n",
                left + plot_w / 2, axis_y + 32);
  s += buf;
  s += "</svg>\n";
  return s;
}

void correlate_files(const fs::path& simulation_csv, const fs::path& measures_csv, const fs::path& out_dir) {
  const CsvTable sim = read_csv(simulation_csv);
  const CsvTable mv = read_csv(measures_csv);
  if (sim.rows.empty() || mv.rows.empty()) throw SchemaError("correlate: no rows in the eval CSVs");

  const std::size_t sim_inst = sim.column("instance_id");
  const std::size_t sim_sched = sim.column("schedule_id");
  const std::size_t mv_inst = mv.column("instance_id");
  const std::size_t mv_sched = mv.column("schedule_id");
  std::unordered_map<std::string, std::size_t> sim_row;
  for (std::size_t i = 0; i < sim.rows.size(); ++i)
    sim_row[sim.rows[i][sim_inst] + "#" + sim.rows[i][sim_sched]] = i;

  std::vector<std::string> rms;
  for (const auto& c : measure_columns())
    if (mv.find_column(c)) rms.push_back(c);
  std::vector<std::string> sims;
  for (const auto& c : sim_measure_names())
    if (sim.find_column(c)) sims.push_back(c);
  if (rms.empty() || sims.empty()) throw SchemaError("correlate: no measure or simulation columns");

  std::map<std::string, std::vector<double>> rm_vals, sim_vals;
  for (const auto& c : rms) rm_vals[c] = mv.numeric(c);
  for (const auto& c : sims) sim_vals[c] = sim.numeric(c);

  // Instances in order of first appearance; each holds (measure row, sim row) pairs.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> groups;
  for (std::size_t i = 0; i < mv.rows.size(); ++i) {
    const auto it = sim_row.find(mv.rows[i][mv_inst] + "#" + mv.rows[i][mv_sched]);
    if (it == sim_row.end()) continue;
    auto& g = groups[mv.rows[i][mv_inst]];
    if (g.empty()) order.push_back(mv.rows[i][mv_inst]);
    g.emplace_back(i, it->second);
  }
  if (order.empty()) throw SchemaError("correlate: no schedule appears in both eval CSVs");

  CsvTable corr;
  corr.header = {"instance", "rm", "sim_measure", "rho", "abs_rho", "degenerate"};
  std::map<std::pair<std::string, std::string>, std::vector<double>> abs_by_pair;
  for (const auto& inst : order) {
    const auto& g = groups[inst];
    for (const auto& rm : rms) {
      for (const auto& sm : sims) {
        std::vector<double> x, y;
        for (auto [mi, si] : g) {
          const double a = rm_vals[rm][mi];
          const double b = sim_vals[sm][si];
          if (std::isnan(a) || std::isnan(b)) continue;
          x.push_back(a);
          y.push_back(b);
        }
        if (x.size() < 3) continue;
        const SpearmanResult r = spearman(x, y);
        corr.rows.push_back({inst, rm, sm, format_double(r.rho), format_double(std::abs(r.rho)),
                             r.degenerate ? "1" : "0"});
        if (!r.degenerate) abs_by_pair[{rm, sm}].push_back(std::abs(r.rho));
      }
    }
  }

  CsvTable box;
  box.header = {"rm", "sim_measure", "min", "q1", "median", "q3", "max", "mean", "n", "high"};
  for (const auto& sm : sims) {
    std::vector<BoxSummary> boxes;
    for (const auto& rm : rms) {
      const auto it = abs_by_pair.find({rm, sm});
      const BoxSummary b = it == abs_by_pair.end() ? BoxSummary{} : box_summary(it->second);
      boxes.push_back(b);
      if (b.n == 0) {
        box.rows.push_back({rm, sm, "", "", "", "", "", "", "0", "0"});
      } else {
        box.rows.push_back({rm, sm, format_double(b.min), format_double(b.q1), format_double(b.median),
                            format_double(b.q3), format_double(b.max), format_double(b.mean), std::to_string(b.n),
                            b.mean > 0.9 ? "1" : "0"});
      }
    }
    write_text(out_dir / ("box_" + sm + ".svg"), boxplot_svg("|rho| versus " + sm, rms, boxes));
  }
  write_csv(out_dir / "correlations.csv", corr);
  write_csv(out_dir / "boxplot.csv", box);
}

void cmd_correlate(const ExperimentConfig& cfg, const fs::path& out, StageLog& /*log*/) {
  for (const DistLabel& dist : cfg.dists) {
    const fs::path in = out / "eval" / dist.label;
    correlate_files(in / "simulation.csv", in / "measures.csv", out / "correlate" / dist.label);
  }
}

CsvTable compare_tables(const CsvTable& a, const CsvTable& b) {
  CsvTable t;
  t.header = {"sim_measure", "n1", "n2", "U", "p", "method"};
  for (const auto& sm : sim_measure_names()) {
    const bool in_a = a.find_column(sm).has_value();
    const bool in_b = b.find_column(sm).has_value();
    if (in_a != in_b) throw SchemaError("compare: column \"" + sm + "\" present in only one input");
    if (!in_a) continue;
    auto clean = [&](const CsvTable& tab) {
      std::vector<double> v;
      for (double x : tab.numeric(sm))
        if (!std::isnan(x)) v.push_back(x);
      return v;
    };
    const std::vector<double> va = clean(a);
    const std::vector<double> vb = clean(b);
    if (va.empty() || vb.empty()) continue;
    const MwuResult r = mann_whitney_u(va, vb);
    t.rows.push_back({sm, std::to_string(r.n1), std::to_string(r.n2), format_double(r.u), format_double(r.p),
                      r.method == MwuResult::Method::exact ? "exact" : "normal"});
  }
  if (t.rows.empty()) throw SchemaError("compare: no common simulation measure columns");
  return t;
}

void cmd_compare(const ExperimentConfig& cfg, const fs::path& out, StageLog& log) {
  cfg.check();
  const auto loaded = load_instances(out, "ess");
  for (const DistLabel& dist : cfg.dists) {
    if (dist.kind == DistKind::deterministic || dist.cv == 0.0) {
      log.messages.push_back(dist.label + ": compare skipped, weighted slack insertion needs positive deviations");
      continue;
    }
    struct Task {
      std::size_t inst;
      std::size_t sched;
    };
    std::vector<Task> tasks;
    std::vector<std::shared_ptr<const Instance>> variants;
    for (std::size_t k = 0; k < loaded.size(); ++k) {
      variants.push_back(std::make_shared<const Instance>(with_distribution(*loaded[k].instance, dist)));
      for (std::size_t s = 0; s < loaded[k].schedules.size(); ++s) tasks.push_back({k, s});
    }
    std::vector<SimulationReport> weighted(tasks.size()), plain(tasks.size());
    parallel_for(tasks.size(), cfg.threads, [&](std::size_t t) {
      const auto& li = loaded[tasks[t].inst];
      const ScheduleRecord& rec = li.schedules[tasks[t].sched];
      const Schedule es = to_schedule(rec, variants[tasks[t].inst]);
      const ScheduleGraph graph = build_combined_order(es);
      SimulationOptions opt;
      opt.replications = cfg.replications;
      opt.seed = derive_seed(derive_seed(cfg.seed, 5, instance_index(li.id)), fnv1a(dist.label));
      weighted[t] = simulate(apply_buffers(es, solve_slack_insertion(es)), graph, opt);
      plain[t] = simulate(apply_buffers(es, solve_rm14(es, graph)), graph, opt);
    });
    std::vector<std::string> ids;
    std::vector<int> sids;
    for (const Task& t : tasks) {
      ids.push_back(loaded[t.inst].id);
      sids.push_back(loaded[t.inst].schedules[t.sched].schedule_id);
    }
    if (tasks.empty()) continue;
    const fs::path dir = out / "compare" / dist.label;
    const CsvTable a = simulation_table(ids, sids, weighted);
    const CsvTable b = simulation_table(ids, sids, plain);
    write_csv(dir / "weighted.csv", a);
    write_csv(dir / "unweighted.csv", b);
    write_csv(dir / "mwu.csv", compare_tables(a, b));
  }
}

CsvTable timing_table(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.check();
  const auto loaded = load_instances(out, "schedules");
  if (loaded.empty() || loaded.front().schedules.empty()) throw IoError("time: no schedules to evaluate");
  const auto inst = std::make_shared<const Instance>(with_distribution(*loaded.front().instance, cfg.dists.front()));
  std::vector<Schedule> schedules;
  for (const auto& rec : loaded.front().schedules) schedules.push_back(to_schedule(rec, inst));

  using Clock = std::chrono::steady_clock;
  volatile double sink = 0.0;
  CsvTable t;
  t.header = {"measure", "schedules", "total_ms", "per_schedule_ms", "ratio_to_baseline"};
  std::vector<std::pair<std::string, double>> rows;
  for (int i = 0; i < kMeasureCount; ++i) {
    const MeasureId id = measure_at(i);
    if (!cfg.measures.is_enabled(id)) continue;
    const auto t0 = Clock::now();
    for (const auto& s : schedules) {
      try {
        sink = sink + evaluate_single(s, id, cfg.measures);
      } catch (const InfeasibleError&) {
      }
    }
    rows.emplace_back(std::string(measure_name(id)), ms_since(t0));
  }
  SimulationOptions opt;
  opt.replications = cfg.timing_replications;
  opt.seed = derive_seed(cfg.seed, 6);
  const auto t0 = Clock::now();
  for (const auto& s : schedules) sink = sink + simulate(s, opt).avg_makespan;
  const double base = ms_since(t0);
  const std::string base_name = std::to_string(cfg.timing_replications) + "Sim";
  rows.emplace_back(base_name, base);
  const double count = static_cast<double>(schedules.size());
  for (const auto& [name, ms] : rows)
    t.rows.push_back({name, std::to_string(schedules.size()), format_double(ms), format_double(ms / count),
                      format_double(base > 0.0 ? ms / base : 0.0)});
  return t;
}

void cmd_time(const ExperimentConfig& cfg, const fs::path& out, StageLog& /*log*/) {
  write_csv(out / "time" / "timings.csv", timing_table(cfg, out));
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& out, const StageLog& log) {
  std::vector<std::string> files;
  if (fs::is_directory(out)) {
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
      if (!entry.is_regular_file()) continue;
      const std::string rel = fs::relative(entry.path(), out).generic_string();
      if (rel != "manifest.json") files.push_back(rel);
    }
  }
  std::sort(files.begin(), files.end());
  json stages = json::array();
  for (const auto& [name, ms] : log.stage_ms) stages.push_back({{"stage", name}, {"ms", ms}});
  const json j = {{"config_hash", cfg.hash()},
                  {"seed", cfg.seed},
                  {"config", cfg.to_json()},
                  {"files", files},
                  {"stages", stages},
                  {"generation_failures", log.generation_failures},
                  {"messages", log.messages}};
  write_text(out / "manifest.json", j.dump(2) + "\n");
}

void run_pipeline(const ExperimentConfig& cfg, const fs::path& out, StageLog& log) {
  auto stage = [&](const char* name, void (*fn)(const ExperimentConfig&, const fs::path&, StageLog&)) {
    const auto t0 = std::chrono::steady_clock::now();
    fn(cfg, out, log);
    log.stage_ms.emplace_back(name, ms_since(t0));
  };
  stage("gen", cmd_gen);
  stage("eval", cmd_eval);
  stage("correlate", cmd_correlate);
  stage("compare", cmd_compare);
  if (cfg.timing) stage("time", cmd_time);
}

}  // namespace robsched
