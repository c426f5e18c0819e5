#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "robsched/generate.hpp"
#include "robsched/io.hpp"
#include "robsched/measures.hpp"
#include "robsched/simulate.hpp"
#include "robsched/stats.hpp"

namespace robsched {

/// A named processing-time law applied to every job of an instance.
struct DistLabel {
  std::string label;
  DistKind kind = DistKind::normal;
  double cv = 0.25;
};

/// "N25", "LN25", "N50", "LN50", "Exp", "Det", or "<kind>:<cv>" such as
/// "normal:0.3". Throws std::invalid_argument.
DistLabel parse_dist_label(std::string_view text);

/// Copy of the instance with every job's law replaced (mean stays p_j).
Instance with_distribution(const Instance& instance, const DistLabel& dist);

struct ExperimentConfig {
  std::vector<int> n{30};
  std::vector<int> arcs{15, 30, 75};
  std::vector<int> m{4, 8};
  int replicates = 2;
  int schedules_per_instance = 10;
  BufferPlan plan = BufferPlan::standard();
  std::vector<DistLabel> dists;
  int replications = 1000;
  int timing_replications = 100;
  MeasureConfig measures;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  int retry_cap = 20;
  bool timing = false;

  ExperimentConfig();
  /// n = 30, arcs {15, 75}, m = 4, one replicate, 2 ESS, N25, R = 100.
  static ExperimentConfig fast();
  /// Overrides fields present in `j`. Throws std::invalid_argument on bad values.
  void merge(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical JSON dump, as 16 hex digits.
  std::string hash() const;
  void check() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

/// Runs fn(i) for i in [0, count) on `threads` workers (0: hardware
/// concurrency). The first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

struct StageLog {
  std::vector<std::pair<std::string, double>> stage_ms;
  int generation_failures = 0;
  std::vector<std::string> messages;
};

/// Instance ids: "inst_000", ... in grid order (n, arcs, m, replicate).
void cmd_gen(const ExperimentConfig& cfg, const std::filesystem::path& out, StageLog& log);

/// Simulation and measure CSVs under out/eval/<DIST>/ for every instance.
void cmd_eval(const ExperimentConfig& cfg, const std::filesystem::path& out, StageLog& log);

/// Per-instance Spearman table, box-plot summary and SVG per distribution.
void cmd_correlate(const ExperimentConfig& cfg, const std::filesystem::path& out, StageLog& log);

/// Correlation outputs for one pair of eval CSVs.
void correlate_files(const std::filesystem::path& simulation_csv, const std::filesystem::path& measures_csv,
                     const std::filesystem::path& out_dir);

/// Mann-Whitney U per simulation measure between two simulation CSVs.
CsvTable compare_tables(const CsvTable& a, const CsvTable& b);

/// Weighted slack insertion versus unweighted max-min buffers on every
/// earliest-start schedule, simulated and compared per distribution.
void cmd_compare(const ExperimentConfig& cfg, const std::filesystem::path& out, StageLog& log);

/// Per-measure evaluation time over the first instance's schedules and the
/// timing_replications simulation baseline.
CsvTable timing_table(const ExperimentConfig& cfg, const std::filesystem::path& out);
void cmd_time(const ExperimentConfig& cfg, const std::filesystem::path& out, StageLog& log);

void write_manifest(const ExperimentConfig& cfg, const std::filesystem::path& out, const StageLog& log);

/// gen, eval, correlate, compare, then time when cfg.timing is set.
void run_pipeline(const ExperimentConfig& cfg, const std::filesystem::path& out, StageLog& log);

/// Column names of the simulation CSV after instance_id and schedule_id.
const std::vector<std::string>& simulation_columns();
/// The sim-measure columns that correlations are computed against.
const std::vector<std::string>& sim_measure_names();

CsvTable simulation_table(const std::vector<std::string>& instance_ids, const std::vector<int>& schedule_ids,
                          const std::vector<SimulationReport>& reports);
CsvTable measures_table(const std::vector<std::string>& instance_ids, const std::vector<int>& schedule_ids,
                        const std::vector<MeasureVector>& vectors);

/// Standalone SVG box plot of |rho| per measure for one simulation measure.
std::string boxplot_svg(const std::string& title, const std::vector<std::string>& labels,
                        const std::vector<BoxSummary>& boxes);

}  // namespace robsched
