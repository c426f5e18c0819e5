#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robsched/experiment.hpp"

namespace fs = std::filesystem;
using namespace robsched;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool fast = false;
  std::string measures;
  std::vector<std::string> dists;
  int replications = 0;
  int threads = -1;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&c](std::uint64_t s) { c.seed = s, c.seed_set = true; }, "master seed");
  cmd->add_flag("--fast", c.fast, "small grid, 2 schedules per instance, N25, R = 100");
  cmd->add_option("--measures", c.measures, "comma separated measure list, e.g. RM1,RM15,Cmax");
  cmd->add_option("--dist", c.dists, "distribution label (N25, LN25, N50, LN50, Exp, Det) or kind:cv");
  cmd->add_option("-R,--replications", c.replications, "simulation replications per schedule");
  cmd->add_option("--threads", c.threads, "worker threads (0: all cores)");
  cmd->add_flag("--timing", c.timing, "also write time/timings.csv");
}

ExperimentConfig build_config(const Common& c) {
  ExperimentConfig cfg = c.fast ? ExperimentConfig::fast() : ExperimentConfig{};
  if (!c.config.empty()) cfg.merge(nlohmann::json::parse(read_text(c.config)));
  if (c.seed_set) cfg.seed = c.seed;
  if (!c.measures.empty()) cfg.measures.enabled = parse_measure_list(c.measures);
  if (!c.dists.empty()) {
    cfg.dists.clear();
    for (const auto& d : c.dists) cfg.dists.push_back(parse_dist_label(d));
  }
  if (c.replications > 0) cfg.replications = c.replications;
  if (c.threads >= 0) cfg.threads = c.threads;
  if (c.timing) cfg.timing = true;
  cfg.check();
  return cfg;
}

void report(const StageLog& log) {
  if (log.generation_failures > 0)
    std::fprintf(stderr, "%d earliest-start schedule(s) could not meet the deadline\n", log.generation_failures);
  const std::size_t shown = std::min<std::size_t>(log.messages.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) std::fprintf(stderr, "warning: %s\n", log.messages[i].c_str());
  if (log.messages.size() > shown)
    std::fprintf(stderr, "... %zu more warnings in manifest.json\n", log.messages.size() - shown);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robustness measures for stochastic parallel machine schedules"};
  app.require_subcommand(1);

  Common common;
  auto* gen = app.add_subcommand("gen", "generate instances and buffered schedule populations");
  auto* eval = app.add_subcommand("eval", "simulate schedules and compute robustness measures");
  auto* corr = app.add_subcommand("correlate", "Spearman correlation of measures against simulation results");
  auto* cmp = app.add_subcommand("compare", "Mann-Whitney U test between two simulation CSVs");
  auto* tim = app.add_subcommand("time", "time every measure against the simulation baseline");
  auto* pipe = app.add_subcommand("pipeline", "gen, eval, correlate, compare (and time with --timing)");
  for (auto* cmd : {gen, eval, corr, cmp, tim, pipe}) add_common(cmd, common);

  std::string cmp_a, cmp_b, cmp_file;
  cmp->add_option("--a", cmp_a, "first simulation CSV")->check(CLI::ExistingFile);
  cmp->add_option("--b", cmp_b, "second simulation CSV")->check(CLI::ExistingFile);
  cmp->add_option("--mwu", cmp_file, "output CSV for --a/--b (default <out>/mwu.csv)");
  std::string corr_sim, corr_meas;
  corr->add_option("--simulation", corr_sim, "simulation CSV (with --measures-csv)")->check(CLI::ExistingFile);
  corr->add_option("--measures-csv", corr_meas, "measures CSV (with --simulation)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = build_config(common);
    const fs::path out = common.out;
    StageLog log;
    auto timed = [&](const char* name, auto&& fn) {
      const auto t0 = std::chrono::steady_clock::now();
      fn();
      log.stage_ms.emplace_back(name,
                                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    };
    if (gen->parsed()) {
      timed("gen", [&] { cmd_gen(cfg, out, log); });
    } else if (eval->parsed()) {
      timed("eval", [&] { cmd_eval(cfg, out, log); });
    } else if (corr->parsed()) {
      if (corr_sim.empty() != corr_meas.empty())
        throw std::invalid_argument("--simulation and --measures-csv go together");
      if (!corr_sim.empty()) {
        correlate_files(corr_sim, corr_meas, out);
        return 0;
      }
      timed("correlate", [&] { cmd_correlate(cfg, out, log); });
    } else if (cmp->parsed()) {
      if (cmp_a.empty() != cmp_b.empty()) throw std::invalid_argument("--a and --b go together");
      if (!cmp_a.empty()) {
        const fs::path dest = cmp_file.empty() ? out / "mwu.csv" : fs::path(cmp_file);
        write_csv(dest, compare_tables(read_csv(cmp_a), read_csv(cmp_b)));
        return 0;
      }
      timed("compare", [&] { cmd_compare(cfg, out, log); });
    } else if (tim->parsed()) {
      timed("time", [&] { cmd_time(cfg, out, log); });
    } else if (pipe->parsed()) {
      run_pipeline(cfg, out, log);
    }
    write_manifest(cfg, out, log);
    report(log);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
