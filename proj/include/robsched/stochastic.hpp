#pragma once

#include <cmath>
#include <random>
#include <string>
#include <string_view>

namespace robsched {

enum class DistKind { normal, lognormal, exponential, deterministic };

std::string_view to_string(DistKind kind);
/// Accepts "normal", "lognormal", "exponential", "deterministic" (and the
/// short forms "n", "ln", "exp", "det"). Throws std::invalid_argument.
DistKind parse_dist_kind(std::string_view text);

/// Processing-time law, parameterized by its mean and coefficient of variation.
/// The cv is ignored for exponential (always 1) and deterministic (always 0).
struct DistributionSpec {
  DistKind kind = DistKind::deterministic;
  double mean = 1.0;
  double cv = 0.0;

  double effective_cv() const;
  double stddev() const { return mean * effective_cv(); }
  double variance() const { return stddev() * stddev(); }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

/// Throws std::invalid_argument unless mean > 0 and cv >= 0.
void check_distribution(const DistributionSpec& dist);

// Standard normal helpers. The cdf goes through std::erfc; the quantile uses
// Acklam's rational approximation refined by one Halley step.
double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double q);

/// Maximum rejection attempts for the zero-truncated normal law.
inline constexpr int kTruncationAttempts = 100;

/// One draw from `dist`. Normal draws are truncated at zero by rejection;
/// after kTruncationAttempts rejections the draw is 0.
template <class Engine>
double sample(const DistributionSpec& dist, Engine& engine) {
  switch (dist.kind) {
    case DistKind::deterministic:
      return dist.mean;
    case DistKind::normal: {
      if (dist.cv <= 0.0) return dist.mean;
      std::normal_distribution<double> law(dist.mean, dist.stddev());
      for (int attempt = 0; attempt < kTruncationAttempts; ++attempt) {
        const double x = law(engine);
        if (x >= 0.0) return x;
      }
      return 0.0;
    }
    case DistKind::lognormal: {
      if (dist.cv <= 0.0) return dist.mean;
      const double var_log = std::log1p(dist.cv * dist.cv);
      const double mu_log = std::log(dist.mean) - 0.5 * var_log;
      std::lognormal_distribution<double> law(mu_log, std::sqrt(var_log));
      return law(engine);
    }
    case DistKind::exponential: {
      std::exponential_distribution<double> law(1.0 / dist.mean);
      return law(engine);
    }
  }
  return dist.mean;
}

/// Cumulative distribution function of the (untruncated) law.
double cdf(const DistributionSpec& dist, double t);

/// Inverse cdf. Throws std::invalid_argument unless 0 < q < 1.
double quantile(const DistributionSpec& dist, double q);

/// Relative q-quantile overrun, (quantile(q) - mean) / mean clamped at 0.
double lambda_factor(const DistributionSpec& dist, double q = 0.7);

/// Relative mean absolute deviation E|D - mean| / mean.
double mad_factor(const DistributionSpec& dist);

/// Mean/variance pair of a normal approximation.
struct GaussianMoment {
  double mu = 0.0;
  double var = 0.0;
};

inline GaussianMoment operator+(GaussianMoment a, GaussianMoment b) {
  return {a.mu + b.mu, a.var + b.var};
}

/// Moment-matched normal for max(A, B) with A, B independent normals (Clark).
GaussianMoment gaussian_max(GaussianMoment a, GaussianMoment b);

/// P(G <= t). A zero-variance moment is a point mass at mu.
double gaussian_cdf_at(GaussianMoment g, double t);

}  // namespace robsched
