#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "robsched/core.hpp"
#include "robsched/stochastic.hpp"

namespace robsched {

/// The robustness-measure catalog RM1..RM18 plus the planned makespan.
enum class MeasureId : int {
  RM1 = 0, RM2, RM3, RM4, RM5, RM6, RM7, RM8, RM9,
  RM10, RM11, RM12, RM13, RM14, RM15, RM16, RM17, RM18,
  Cmax
};

inline constexpr int kMeasureCount = 19;

constexpr MeasureId measure_at(int index) { return static_cast<MeasureId>(index); }
constexpr int index_of(MeasureId id) { return static_cast<int>(id); }

/// "RM1".."RM18", "Cmax".
std::string_view measure_name(MeasureId id);
std::optional<MeasureId> parse_measure(std::string_view name);

enum class Orientation { higher_is_better, lower_is_better };

/// RM12, RM18 and Cmax are lower-is-better; every other measure is higher-is-better.
Orientation orientation(MeasureId id);

enum class LambdaRule { quantile, mad };
enum class EsdScope { all_predecessors, direct_predecessors };

struct MeasureConfig {
  std::bitset<kMeasureCount> enabled = std::bitset<kMeasureCount>().set();
  /// Rule for the thresholds in RM11, RM12, RM17 and RM18.
  LambdaRule threshold_rule = LambdaRule::quantile;
  /// Rule for the expected overrun capped by RM5.
  LambdaRule rm5_rule = LambdaRule::mad;
  double lambda_quantile = 0.7;
  EsdScope esd_scope = EsdScope::all_predecessors;
  bool timing = false;

  bool is_enabled(MeasureId id) const { return enabled.test(static_cast<std::size_t>(index_of(id))); }
};

/// Parses a comma separated list such as "RM1,RM3,Cmax". Throws std::invalid_argument.
std::bitset<kMeasureCount> parse_measure_list(std::string_view list);

struct MeasureVector {
  std::array<std::optional<double>, kMeasureCount> values{};
  /// Non-empty when the measure was requested but could not be computed.
  std::array<std::string, kMeasureCount> errors{};
  /// Wall-clock per measure in milliseconds, filled in timing mode.
  std::array<double, kMeasureCount> elapsed_ms{};

  bool has(MeasureId id) const { return values[static_cast<std::size_t>(index_of(id))].has_value(); }
  /// Throws std::out_of_range when the measure is missing.
  double at(MeasureId id) const;
  void set(MeasureId id, double v) { values[static_cast<std::size_t>(index_of(id))] = v; }
};

/// Per-job lambda from the configured rule.
std::vector<double> lambda_values(const Instance& instance, LambdaRule rule, double q = 0.7);

double cmax(const Schedule& schedule);

double rm1(const SlackProfile& prof);  // sum of total slacks
double rm2(const SlackProfile& prof);  // sum of free slacks
double rm3(const SlackProfile& prof);  // minimum total slack
double rm4(const SlackProfile& prof);  // minimum of fs_j / p_j
/// Sum of min(fs_j, lambda_j p_j).
double rm5(const SlackProfile& prof, std::span<const double> lambda);
/// Number of jobs with fs_j > 1e-9.
double rm6(const SlackProfile& prof);
double rm7(const SlackProfile& prof);   // fs weighted by p
double rm8(const SlackProfile& prof);   // fs weighted by direct predecessor count
double rm9(const SlackProfile& prof);   // fs weighted by direct successor count
double rm10(const SlackProfile& prof);  // fs weighted by successor count and p

/// Slack sufficiency counts over prec_j plus j itself: (sufficient, insufficient).
std::pair<double, double> rm11_rm12(const SlackProfile& prof, std::span<const double> lambda);

/// Normal-approximation propagation of planned starts and completions.
struct NormalPropagation {
  std::vector<GaussianMoment> start;       // X_j
  std::vector<GaussianMoment> completion;  // Y_j
  /// Max over direct-predecessor completions; nullopt for jobs without predecessors.
  std::vector<std::optional<GaussianMoment>> ready;
};

/// Folds direct predecessors pairwise in ascending job id, then applies the
/// planned start as a point mass.
NormalPropagation propagate_normal(const Schedule& schedule, const ScheduleGraph& graph);

/// Approximated probability that the makespan stays within the global deadline.
double rm15(const Schedule& schedule, const ScheduleGraph& graph);
double rm15(const Schedule& schedule, const ScheduleGraph& graph, const NormalPropagation& prop);
/// Sum over jobs of the approximated probability of starting on time.
double rm16(const Schedule& schedule, const ScheduleGraph& graph);
double rm16(const Schedule& schedule, const ScheduleGraph& graph, const NormalPropagation& prop);

/// Sum of the fraction of direct predecessors with fs_i >= lambda_i p_i.
double rm17(const SlackProfile& prof, std::span<const double> lambda);

struct EsdProfile {
  std::vector<double> esd;
};

/// Estimated starting delays and their sum.
std::pair<double, EsdProfile> rm18(const SlackProfile& prof, std::span<const double> lambda,
                                   EsdScope scope = EsdScope::all_predecessors);

/// Validates the schedule (ScheduleError when infeasible), computes the
/// slack profile once and then every enabled measure. LP failures for RM13 and
/// RM14 are stored as per-measure errors.
MeasureVector evaluate_all(const Schedule& schedule, const MeasureConfig& config = {});

/// Computes a single measure from scratch, including the combined order and
/// any profile it needs. Used for timing comparisons.
double evaluate_single(const Schedule& schedule, MeasureId id, const MeasureConfig& config = {});

}  // namespace robsched
