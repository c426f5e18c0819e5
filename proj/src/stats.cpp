#include "robsched/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>


namespace robsched {

std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
    i = j;
  }
  return rank;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: series lengths differ");
  if (x.size() < 3) throw std::invalid_argument("spearman: need at least 3 observations");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;  // ranks always average to this
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

namespace {

void require_samples(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
}

std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return all;
}

double u_statistic(const std::vector<double>& ranks, std::size_t n1) {
  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double m = static_cast<double>(n1);
  return r1 - m * (m + 1.0) / 2.0;
}

}  // namespace

double mwu_exact_p(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b);
  const std::vector<double> ranks = average_ranks(pooled(a, b));
  const std::size_t n1 = a.size();
  const std::size_t total = ranks.size();

  // Doubled average ranks are integers, so the rank sum has an integer grid.
  std::vector<int> r2(total);
  int observed = 0;
  for (std::size_t i = 0; i < total; ++i) {
    r2[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
    if (i < n1) observed += r2[i];
  }
  // No n1-subset can exceed the n1 largest doubled ranks.
  std::vector<int> desc = r2;
  std::sort(desc.begin(), desc.end(), std::greater<>());
  const int max_sum = std::accumulate(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(n1), 0);

  // ways[k][s]: number of k-subsets of the items seen so far with doubled rank sum s.
  const auto width = static_cast<std::size_t>(max_sum + 1);
  std::vector<double> ways((n1 + 1) * width, 0.0);
  ways[0] = 1.0;
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t kmax = std::min(n1, i + 1);
    for (std::size_t k = kmax; k >= 1; --k) {
      double* dst = &ways[k * width];
      const double* src = &ways[(k - 1) * width];
      const auto shift = static_cast<std::size_t>(r2[i]);
      for (std::size_t s = width; s-- > shift;) dst[s] += src[s - shift];
    }
  }
  const double* dist = &ways[n1 * width];
  double all = 0.0, lower = 0.0, upper = 0.0;
  for (std::size_t s = 0; s < width; ++s) {
    all += dist[s];
    if (static_cast<int>(s) <= observed) lower += dist[s];
    if (static_cast<int>(s) >= observed) upper += dist[s];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

double mwu_normal_p(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b);
  const std::vector<double> all = pooled(a, b);
  const std::vector<double> ranks = average_ranks(all);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  const double u = u_statistic(ranks, a.size());

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double var = n > 1.0 ? n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0))) : 0.0;
  if (!(var > 0.0)) return 1.0;
  const double z = std::max(0.0, std::abs(u - n1 * n2 / 2.0) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b);
  MwuResult res;
  res.n1 = a.size();
  res.n2 = b.size();
  res.u = u_statistic(average_ranks(pooled(a, b)), a.size());
  if (std::min(res.n1, res.n2) < 8 && res.n1 + res.n2 <= 1000) {
    res.method = MwuResult::Method::exact;
    res.p = mwu_exact_p(a, b);
  } else {
    res.method = MwuResult::Method::normal;
    res.p = mwu_normal_p(a, b);
  }
  return res;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxSummary box_summary(std::span<const double> values) {
  BoxSummary out;
  if (values.empty()) return out;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  out.n = v.size();
  out.min = v.front();
  out.max = v.back();
  out.q1 = quantile_sorted(v, 0.25);
  out.median = quantile_sorted(v, 0.5);
  out.q3 = quantile_sorted(v, 0.75);
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return out;
}

}  // namespace robsched
