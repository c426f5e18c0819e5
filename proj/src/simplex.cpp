#include "robsched/simplex.hpp"

#include <cstddef>
#include <limits>

namespace robsched {

namespace {
constexpr double kPivotEps = 1e-11;
}

LpResult simplex_maximize(const LinearProgram& lp) {
  LpResult result;
  const std::size_t m = lp.rows.size();
  const auto n = static_cast<std::size_t>(lp.vars);
  if (lp.rhs.size() != m || lp.objective.size() != n) return result;
  for (std::size_t i = 0; i < m; ++i) {
    if (lp.rows[i].size() != n || lp.rhs[i] < 0.0) return result;
  }

  // Tableau columns: n structural, m slack, 1 rhs. Row m is the reduced-cost row.
  const std::size_t width = n + m + 1;
  std::vector<double> t((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = lp.rows[i][j];
    at(i, n + i) = 1.0;
    at(i, width - 1) = lp.rhs[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) at(m, j) = -lp.objective[j];

  for (;;) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (at(m, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    // Minimum ratio test; ties go to the smallest basic variable index.
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = at(i, enter);
      if (a <= kPivotEps) continue;
      const double ratio = at(i, width - 1) / a;
      if (leave == m || ratio < best - 1e-12) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + 1e-12 && basis[i] < basis[leave]) {
        leave = i;
      }
    }
    if (leave == m) {
      result.status = LpResult::Status::unbounded;
      return result;
    }

    const double piv = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
    ++result.pivots;
  }

  result.status = LpResult::Status::optimal;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) result.x[basis[i]] = at(i, width - 1);
  result.value = at(m, width - 1);
  return result;
}

}  // namespace robsched
