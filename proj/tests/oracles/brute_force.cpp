#include "brute_force.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace oracle {

namespace {
constexpr double kTol = 1e-9;
}

BruteResult brute_force(const robsched::Instance& inst, const robsched::MachineOrder& order,
                        const std::vector<double>& s, const std::vector<double>& lambda,
                        const std::vector<double>& lambda5, bool direct_esd) {
  const int n = static_cast<int>(inst.jobs.size());
  auto p = [&](int j) { return inst.jobs[j].p; };
  auto dl = [&](int j) { return inst.jobs[j].due ? *inst.jobs[j].due : inst.deadline; };

  std::vector<std::vector<bool>> arc(n, std::vector<bool>(n, false));
  for (const auto& a : inst.precedence) arc[a.from][a.to] = true;
  for (const auto& seq : order)
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) arc[seq[k]][seq[k + 1]] = true;

  BruteResult r;
  r.reach.assign(n, std::vector<bool>(n, false));
  r.direct.assign(n, std::vector<bool>(n, false));

  // Every path from j, visited explicitly. The path cost callback sees the
  // sum of p over the path and its last node.
  std::vector<bool> on_path(n, false);
  std::function<void(int, int, double, const std::function<void(int, double)>&)> walk =
      [&](int start, int v, double sum, const std::function<void(int, double)>& visit) {
        visit(v, sum);
        on_path[v] = true;
        for (int w = 0; w < n; ++w)
          if (arc[v][w] && !on_path[w]) walk(start, w, sum + p(w), visit);
        on_path[v] = false;
      };

  r.ls.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double best = std::numeric_limits<double>::infinity();
    walk(j, j, p(j), [&](int v, double sum) {
      if (v != j) r.reach[j][v] = true;
      best = std::min(best, dl(v) - sum);
    });
    r.ls[j] = best;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!arc[i][j]) continue;
      bool implied = false;
      for (int k = 0; k < n && !implied; ++k) implied = k != i && k != j && r.reach[i][k] && r.reach[k][j];
      r.direct[i][j] = !implied;
    }

  r.ts.assign(n, 0.0);
  r.fs.assign(n, 0.0);
  r.ndp.assign(n, 0);
  r.nds.assign(n, 0);
  for (int j = 0; j < n; ++j) {
    r.ts[j] = r.ls[j] - s[j];
    double f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (r.direct[j][i]) {
        f = std::min(f, s[i] - s[j] - p(j));
        ++r.nds[j];
      }
      if (r.direct[i][j]) ++r.ndp[j];
    }
    r.fs[j] = r.nds[j] == 0 ? dl(j) - s[j] - p(j) : f;
    r.cmax = std::max(r.cmax, s[j] + p(j));
  }

  r.rm3 = std::numeric_limits<double>::infinity();
  r.rm4 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    r.rm1 += r.ts[j];
    r.rm2 += r.fs[j];
    r.rm3 = std::min(r.rm3, r.ts[j]);
    r.rm4 = std::min(r.rm4, r.fs[j] / p(j));
    r.rm5 += std::min(r.fs[j], lambda5[j] * p(j));
    if (r.fs[j] > kTol) r.rm6 += 1;
    r.rm7 += r.fs[j] * p(j);
    r.rm8 += r.fs[j] * r.ndp[j];
    r.rm9 += r.fs[j] * r.nds[j];
    r.rm10 += r.fs[j] * r.nds[j] * p(j);
    for (int i = 0; i < n; ++i) {
      if (i != j && !r.reach[i][j]) continue;
      if (r.fs[j] >= lambda[i] * p(i) - kTol)
        r.rm11 += 1;
      else
        r.rm12 += 1;
    }
    int preds = 0, ok = 0;
    for (int i = 0; i < n; ++i) {
      if (!r.direct[i][j]) continue;
      ++preds;
      if (r.fs[i] >= lambda[i] * p(i) - kTol) ++ok;
    }
    r.rm17 += preds == 0 ? 1.0 : static_cast<double>(ok) / preds;
  }

  // ESD by memoized recursion over the predecessor sets.
  r.esd.assign(n, -1.0);
  std::function<double(int)> esd = [&](int j) {
    if (r.esd[j] >= 0.0) return r.esd[j];
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const bool pred = direct_esd ? r.direct[i][j] : r.reach[i][j];
      if (!pred) continue;
      const double push = lambda[i] * p(i) + esd(i) - r.fs[i];
      if (push > kTol) e = std::max(e, push);
    }
    return r.esd[j] = e;
  };
  for (int j = 0; j < n; ++j) r.rm18 += esd(j);
  return r;
}

}  // namespace oracle
