// One line per acceptance criterion; exit status 1 when any of them fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oracles/brute_force.hpp"
#include "oracles/oracles.hpp"
#include "robsched/experiment.hpp"
#include "robsched/lp.hpp"
#include "robsched/measures.hpp"
#include "test_util.hpp"

using namespace robsched;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), sec);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome slack_figure1() {
  const SlackProfile p = slack_profile(testutil::figure1());
  const bool exact = p.ts == std::vector<double>{3, 2} && p.fs == std::vector<double>{1, 2};
  const bool caption = p.ts[0] > p.fs[0] && p.ts[1] == p.fs[1];
  return {exact && caption, fmt("ts=(%g,%g)", p.ts[0], p.ts[1]) + fmt(" fs=(%g,%g)", p.fs[0], p.fs[1])};
}

Outcome brute_force_equivalence() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 6;
    const int m = 1 + t % 2;
    const int arcs = static_cast<int>(rng() % static_cast<std::uint64_t>(n * (n - 1) / 2 + 1));
    const Schedule s = testutil::random_schedule(1000 + t, n, m, arcs, {DistKind::normal, 1, 0.25}, t % 3 == 0);
    const MeasureConfig cfg;
    const auto lam = lambda_values(s.inst(), cfg.threshold_rule, cfg.lambda_quantile);
    const auto lam5 = lambda_values(s.inst(), cfg.rm5_rule);
    const auto bf = oracle::brute_force(s.inst(), s.machine_order, s.start, lam, lam5);
    const SlackProfile prof = slack_profile(s);
    const MeasureVector v = evaluate_all(s, cfg);
    auto diff = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
    for (int j = 0; j < n; ++j) {
      diff(prof.ls[j], bf.ls[j]);
      diff(prof.ts[j], bf.ts[j]);
      diff(prof.fs[j], bf.fs[j]);
      diff(prof.ndp[j], bf.ndp[j]);
      diff(prof.nds[j], bf.nds[j]);
    }
    const std::map<MeasureId, double> ref = {
        {MeasureId::Cmax, bf.cmax}, {MeasureId::RM1, bf.rm1},   {MeasureId::RM2, bf.rm2},   {MeasureId::RM3, bf.rm3},
        {MeasureId::RM4, bf.rm4},   {MeasureId::RM5, bf.rm5},   {MeasureId::RM6, bf.rm6},   {MeasureId::RM7, bf.rm7},
        {MeasureId::RM8, bf.rm8},   {MeasureId::RM9, bf.rm9},   {MeasureId::RM10, bf.rm10}, {MeasureId::RM11, bf.rm11},
        {MeasureId::RM12, bf.rm12}, {MeasureId::RM17, bf.rm17}, {MeasureId::RM18, bf.rm18}};
    for (const auto& [id, value] : ref) diff(v.at(id), value);
  }
  return {worst <= 1e-9, fmt("50 instances, max abs difference %.3g", worst)};
}

Outcome normal_approximation() {
  const auto g = gaussian_max({0, 1}, {0, 1});
  const auto num = oracle::max_of_normals_numeric(0, 1, 0, 1);
  const double pi = std::acos(-1.0);
  const bool moments = std::abs(g.mu - 1 / std::sqrt(pi)) <= 1e-3 && std::abs(g.var - (1 - 1 / pi)) <= 1e-3 &&
                       std::abs(g.mu - num.mean) <= 1e-3 && std::abs(g.var - num.var) <= 1e-3;
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    const Schedule s = testutil::random_schedule(3000 + t, 6, 1 + t % 2, t % 8, {DistKind::normal, 1, 0.25}, t % 2);
    const double approx = rm15(s, build_combined_order(s));
    const double mc = oracle::mc_on_time_probability(s.inst(), s.machine_order, s.start, 1000000, 77 + t);
    worst = std::max(worst, std::abs(approx - mc));
  }
  return {moments && worst <= 0.03,
          fmt("max mean %.6f var %.6f; RM15 vs Monte Carlo max gap %.4f", g.mu, g.var, worst)};
}

Outcome lp_oracles() {
  double worst14 = 0.0, worst13 = -1e300;
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const Schedule s = testutil::random_schedule(5000 + t, 30, 2 + t % 7, 15 + t % 60, {DistKind::normal, 1, 0.25},
                                                 t % 4 == 0);
    worst14 = std::max(worst14, std::abs(solve_rm14(s).objective -
                                         oracle::rm14_bisect(s.inst(), s.machine_order, s.start)));
    const double obj = solve_rm13(s).objective;
    const auto g = oracle::plain_graph(s.inst(), s.machine_order);
    for (int k = 0; k < 1000; ++k) {
      const auto iv = oracle::random_feasible_intervals(s.inst(), g, s.start, rng);
      if (oracle::interval_violation(s.inst(), g, s.start, iv) > 1e-9) return {false, "oracle produced infeasible intervals"};
      worst13 = std::max(worst13, iv.total_width() - obj);
    }
  }
  return {worst14 <= 1e-6 && worst13 <= 1e-7,
          fmt("RM14 max gap %.3g; best random assignment minus RM13 %.3g", worst14, worst13)};
}

ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.n = {30};
  cfg.arcs = {15, 30, 75};
  cfg.m = {4, 8};
  cfg.replicates = 1;
  cfg.schedules_per_instance = 10;
  cfg.dists = {parse_dist_label("N25")};
  cfg.replications = 1000;
  cfg.timing_replications = 100;
  cfg.seed = 20240611;
  return cfg;
}

Outcome correlation(const fs::path& out) {
  const ExperimentConfig cfg = desk_config();
  StageLog log;
  cmd_gen(cfg, out, log);
  cmd_eval(cfg, out, log);
  cmd_correlate(cfg, out, log);
  const CsvTable box = read_csv(out / "correlate" / "N25" / "boxplot.csv");
  std::map<std::pair<std::string, std::string>, double> mean;
  for (const auto& row : box.rows)
    mean[{row[box.column("rm")], row[box.column("sim_measure")]}] =
        row[box.column("mean")].empty() ? std::nan("") : std::stod(row[box.column("mean")]);
  bool ok = log.generation_failures == 0;
  std::ostringstream d;
  auto at_least = [&](const char* rm, const char* sm, double bar) {
    const double v = mean[{rm, sm}];
    d << rm << "/" << sm << "=" << fmt("%.3f", v) << " ";
    ok = ok && v >= bar;
  };
  for (const char* rm : {"RM1", "RM3", "RM15"}) at_least(rm, "avg_makespan", 0.85);
  for (const char* rm : {"RM16", "RM17", "RM18"}) at_least(rm, "frac_on_time", 0.85);
  double rm6 = 0.0;
  for (const auto& sm : sim_measure_names()) {
    const auto it = mean.find({"RM6", sm});
    if (it != mean.end() && !std::isnan(it->second)) rm6 = std::max(rm6, it->second);
  }
  d << "RM6 max=" << fmt("%.3f", rm6);
  ok = ok && rm6 <= 0.3;
  return {ok, d.str()};
}

Outcome efficiency(const fs::path& out) {
  const CsvTable t = timing_table(desk_config(), out);
  std::map<std::string, double> ratio;
  for (const auto& row : t.rows) ratio[row[t.column("measure")]] = std::stod(row[t.column("ratio_to_baseline")]);
  bool ok = std::stoi(t.rows.front()[t.column("schedules")]) == 970;
  std::ostringstream d;
  auto bar = [&](const char* rm, double limit) {
    d << rm << "=" << fmt("%.3f", ratio.at(rm)) << " ";
    ok = ok && ratio.at(rm) <= limit;
  };
  for (const char* rm : {"RM1", "RM3", "RM5", "RM9", "RM10", "RM17", "RM18"}) bar(rm, 0.1);
  for (const char* rm : {"RM15", "RM16"}) bar(rm, 0.25);
  return {ok, "ratios to 100Sim over 970 schedules: " + d.str()};
}

Outcome stats_oracles() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> small(0, 5);
  double worst_rho = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng() % 18);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = t % 2 ? small(rng) : z(rng);
      y[i] = t % 3 ? x[i] + z(rng) : small(rng);
    }
    const SpearmanResult r = spearman(x, y);
    if (r.degenerate) continue;
    worst_rho = std::max(worst_rho, std::abs(r.rho - oracle::spearman_brute(x, y)));
  }
  double worst_p = 0.0;
  int cases = 0;
  for (std::size_t n1 = 1; n1 < 10; ++n1)
    for (std::size_t n2 = 1; n1 + n2 <= 10; ++n2)
      for (int t = 0; t < 10; ++t) {
        std::vector<double> a(n1), b(n2);
        for (double& v : a) v = t % 2 ? small(rng) : z(rng);
        for (double& v : b) v = t % 2 ? small(rng) + 1 : z(rng);
        const auto ref = oracle::mwu_enumerate(a, b);
        const MwuResult r = mann_whitney_u(a, b);
        worst_p = std::max({worst_p, std::abs(r.p - ref.p), std::abs(r.u - ref.u)});
        ++cases;
      }
  return {worst_rho <= 1e-12 && worst_p <= 1e-12,
          fmt("spearman max gap %.3g; MWU max gap %.3g over %g cases", worst_rho, worst_p, cases)};
}

std::map<std::string, std::string> csv_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".csv")
      files[fs::relative(e.path(), root).generic_string()] = read_text(e.path());
  return files;
}

Outcome determinism(const fs::path& work) {
  std::map<std::string, std::string> trees[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = work / ("run" + std::to_string(k));
    fs::remove_all(out);
    const std::string cmd =
        std::string("\"") + ROBSCHED_CLI + "\" pipeline --fast --seed 7 --out \"" + out.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "pipeline exited with an error"};
    trees[k] = csv_tree(out);
  }
  const bool same = trees[0] == trees[1] && !trees[0].empty();
  return {same, std::to_string(trees[0].size()) + " CSV files compared"};
}

}  // namespace

int main() {
  const fs::path work = fs::current_path() / "acceptance_work";
  fs::remove_all(work);
  run("slack oracle", slack_figure1);
  run("brute-force equivalence", brute_force_equivalence);
  run("normal approximation accuracy", normal_approximation);
  run("LP oracles", lp_oracles);
  run("correlation reproduction", [&] { return correlation(work / "desk"); });
  run("efficiency ordering", [&] { return efficiency(work / "desk"); });
  run("statistics oracles", stats_oracles);
  run("determinism", [&] { return determinism(work); });
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
