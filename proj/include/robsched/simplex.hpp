#pragma once

#include <vector>

namespace robsched {

/// maximize c'x  subject to  A x <= b,  x >= 0,  with b >= 0 so the origin is
/// a feasible basis and no phase one is needed.
struct LinearProgram {
  int vars = 0;
  std::vector<std::vector<double>> rows;  // A, one entry per constraint
  std::vector<double> rhs;                // b
  std::vector<double> objective;          // c
};

struct LpResult {
  enum class Status { optimal, unbounded, invalid };
  Status status = Status::invalid;
  double value = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

/// Dense tableau simplex with Bland's rule (smallest-index entering and
/// leaving variables), which rules out cycling on degenerate vertices.
LpResult simplex_maximize(const LinearProgram& lp);

}  // namespace robsched
