#include "robsched/stochastic.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <stdexcept>

namespace robsched {

std::string_view to_string(DistKind kind) {
  switch (kind) {
    case DistKind::normal: return "normal";
    case DistKind::lognormal: return "lognormal";
    case DistKind::exponential: return "exponential";
    case DistKind::deterministic: return "deterministic";
  }
  return "deterministic";
}

DistKind parse_dist_kind(std::string_view text) {
  if (text == "normal" || text == "n") return DistKind::normal;
  if (text == "lognormal" || text == "ln") return DistKind::lognormal;
  if (text == "exponential" || text == "exp") return DistKind::exponential;
  if (text == "deterministic" || text == "det") return DistKind::deterministic;
  throw std::invalid_argument("unknown distribution kind: " + std::string(text));
}

double DistributionSpec::effective_cv() const {
  switch (kind) {
    case DistKind::exponential: return 1.0;
    case DistKind::deterministic: return 0.0;
    default: return cv;
  }
}

void check_distribution(const DistributionSpec& dist) {
  if (!(dist.mean > 0.0)) throw std::invalid_argument("distribution mean must be positive");
  if (!(dist.cv >= 0.0)) throw std::invalid_argument("distribution cv must be non-negative");
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");

  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x = 0.0;
  if (q < p_low) {
    const double t = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else if (q <= 1.0 - p_low) {
    const double t = q - 0.5;
    const double r = t * t;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double t = std::sqrt(-2.0 * std::log1p(-q));
    x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }

  // Halley refinement against the erfc-based cdf.
  const double e = normal_cdf(x) - q;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double cdf(const DistributionSpec& dist, double t) {
  switch (dist.kind) {
    case DistKind::deterministic:
      return t >= dist.mean ? 1.0 : 0.0;
    case DistKind::normal:
      if (dist.cv <= 0.0) return t >= dist.mean ? 1.0 : 0.0;
      return normal_cdf((t - dist.mean) / dist.stddev());
    case DistKind::lognormal: {
      if (dist.cv <= 0.0) return t >= dist.mean ? 1.0 : 0.0;
      if (t <= 0.0) return 0.0;
      const double var_log = std::log1p(dist.cv * dist.cv);
      const double mu_log = std::log(dist.mean) - 0.5 * var_log;
      return normal_cdf((std::log(t) - mu_log) / std::sqrt(var_log));
    }
    case DistKind::exponential:
      return t <= 0.0 ? 0.0 : -std::expm1(-t / dist.mean);
  }
  return 0.0;
}

double quantile(const DistributionSpec& dist, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  switch (dist.kind) {
    case DistKind::deterministic:
      return dist.mean;
    case DistKind::normal:
      return dist.mean + dist.stddev() * normal_quantile(q);
    case DistKind::lognormal: {
      if (dist.cv <= 0.0) return dist.mean;
      const double var_log = std::log1p(dist.cv * dist.cv);
      const double mu_log = std::log(dist.mean) - 0.5 * var_log;
      return std::exp(mu_log + std::sqrt(var_log) * normal_quantile(q));
    }
    case DistKind::exponential:
      return -dist.mean * std::log1p(-q);
  }
  return dist.mean;
}

double lambda_factor(const DistributionSpec& dist, double q) {
  return std::max(0.0, (quantile(dist, q) - dist.mean) / dist.mean);
}

double mad_factor(const DistributionSpec& dist) {
  switch (dist.kind) {
    case DistKind::deterministic:
      return 0.0;
    case DistKind::normal:
      return dist.cv * std::sqrt(2.0 / std::numbers::pi);
    case DistKind::exponential:
      return 2.0 / std::numbers::e;
    case DistKind::lognormal: {
      // E|X - m| = 2m (2 Phi(s/2) - 1) for a lognormal with mean m and log-sd s.
      const double s = std::sqrt(std::log1p(dist.cv * dist.cv));
      return 2.0 * (2.0 * normal_cdf(0.5 * s) - 1.0);
    }
  }
  return 0.0;
}

GaussianMoment gaussian_max(GaussianMoment a, GaussianMoment b) {
  const double theta2 = a.var + b.var;
  if (!(theta2 > 0.0)) return {std::max(a.mu, b.mu), 0.0};
  const double theta = std::sqrt(theta2);
  const double alpha = (a.mu - b.mu) / theta;
  const double pa = normal_cdf(alpha);
  const double pb = normal_cdf(-alpha);
  const double dens = normal_pdf(alpha);
  const double mean = a.mu * pa + b.mu * pb + theta * dens;
  const double second = (a.mu * a.mu + a.var) * pa + (b.mu * b.mu + b.var) * pb +
                        (a.mu + b.mu) * theta * dens;
  return {mean, std::max(0.0, second - mean * mean)};
}

double gaussian_cdf_at(GaussianMoment g, double t) {
  // Point masses use the same 1e-9 tie tolerance as the slack comparisons.
  if (!(g.var > 0.0)) return g.mu <= t + 1e-9 ? 1.0 : 0.0;
  return normal_cdf((t - g.mu) / std::sqrt(g.var));
}

}  // namespace robsched
