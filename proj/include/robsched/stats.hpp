#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace robsched {

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> x);

struct SpearmanResult {
  double rho = 0.0;
  /// Either series is constant; rho is then reported as 0.
  bool degenerate = false;
};

/// Pearson correlation of average ranks. Throws std::invalid_argument when the
/// lengths differ or are below 3.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

struct MwuResult {
  enum class Method { exact, normal };
  double u = 0.0;  // pairs (a, b) with a > b, ties counted one half
  double p = 1.0;  // two-sided
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  Method method = Method::normal;
};

/// Exact p when min(n1, n2) < 8 and n1 + n2 <= 1000, normal approximation
/// otherwise. Throws std::invalid_argument for empty samples.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Permutation distribution of the rank sum, ties kept at their average
/// ranks. p = min(1, 2 min(P(W <= w), P(W >= w))).
double mwu_exact_p(std::span<const double> a, std::span<const double> b);

/// Tie-corrected normal approximation with continuity correction.
double mwu_normal_p(std::span<const double> a, std::span<const double> b);

struct BoxSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t n = 0;
};

/// Linear-interpolation quantile (type 7) of sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

/// Five-number summary plus mean; all zero with n = 0 for empty input.
BoxSummary box_summary(std::span<const double> values);

}  // namespace robsched
