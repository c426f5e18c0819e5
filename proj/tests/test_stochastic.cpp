#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles/oracles.hpp"
#include "robsched/rng.hpp"
#include "robsched/stochastic.hpp"

using namespace robsched;

namespace {

struct SampleMoments {
  double mean, sd;
};

SampleMoments draw(const DistributionSpec& d, int count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  double s = 0, s2 = 0;
  for (int i = 0; i < count; ++i) {
    const double x = sample(d, rng);
    s += x;
    s2 += x * x;
  }
  const double m = s / count;
  return {m, std::sqrt(s2 / count - m * m)};
}

}  // namespace

TEST(Sample, DeterministicIsConstant) {
  SplitMix64 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample({DistKind::deterministic, 5, 0}, rng), 5.0);
}

TEST(Sample, LognormalMomentMatching) {
  const auto m = draw({DistKind::lognormal, 10, 0.25}, 1000000, 42);
  EXPECT_NEAR(m.mean, 10.0, 0.03);
  EXPECT_NEAR(m.sd, 2.5, 0.03);
}

TEST(Sample, ExponentialHasUnitCv) {
  const auto m = draw({DistKind::exponential, 4, 0}, 1000000, 7);
  EXPECT_NEAR(m.sd / m.mean, 1.0, 0.01);
}

TEST(Sample, NormalIsNonNegative) {
  SplitMix64 rng(3);
  for (int i = 0; i < 100000; ++i) EXPECT_GE(sample({DistKind::normal, 1, 0.8}, rng), 0.0);
}

TEST(Sample, SameSeedSameStream) {
  SplitMix64 a(99), b(99);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample({DistKind::normal, 3, 0.5}, a), sample({DistKind::normal, 3, 0.5}, b));
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 3, 4), derive_seed(derive_seed(5, 3), 4));
}

TEST(Quantile, Examples) {
  EXPECT_NEAR(quantile({DistKind::exponential, 1, 0}, 0.5), std::log(2.0), 1e-12);
  EXPECT_NEAR(quantile({DistKind::normal, 10, 0.25}, 0.5), 10.0, 1e-12);
  EXPECT_NEAR(quantile({DistKind::normal, 10, 0.25}, 0.7), 11.311, 1e-3);
  EXPECT_THROW(quantile({DistKind::normal, 10, 0.25}, 0.0), std::invalid_argument);
  EXPECT_THROW(quantile({DistKind::normal, 10, 0.25}, 1.0), std::invalid_argument);
}

TEST(Quantile, RightInverseOfCdf) {
  for (DistKind k : {DistKind::normal, DistKind::lognormal, DistKind::exponential}) {
    const DistributionSpec d{k, 7.0, 0.4};
    for (int i = 1; i <= 9; ++i) {
      const double q = i / 10.0;
      EXPECT_NEAR(cdf(d, quantile(d, q)), q, 1e-9) << to_string(k) << " q=" << q;
    }
  }
}

TEST(NormalQuantile, StandardTable) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.7), 0.5244005127080407, 1e-12);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-9);
}

TEST(LambdaFactor, Examples) {
  EXPECT_EQ(lambda_factor({DistKind::deterministic, 4, 0}), 0.0);
  EXPECT_NEAR(lambda_factor({DistKind::normal, 10, 0.25}), 0.1311, 1e-4);
  EXPECT_NEAR(lambda_factor({DistKind::exponential, 10, 0}), (-10 * std::log(0.3) - 10) / 10, 1e-12);
  // Clamped at zero below the mean.
  EXPECT_EQ(lambda_factor({DistKind::normal, 10, 0.25}, 0.3), 0.0);
}

TEST(MadFactor, ClosedForms) {
  EXPECT_NEAR(mad_factor({DistKind::normal, 10, 0.25}), 0.25 * std::sqrt(2 / std::acos(-1.0)), 1e-12);
  EXPECT_NEAR(mad_factor({DistKind::normal, 10, 0.25}), 0.1995, 1e-4);
  EXPECT_NEAR(mad_factor({DistKind::exponential, 3, 0}), 2 / std::exp(1.0), 1e-12);
  EXPECT_EQ(mad_factor({DistKind::deterministic, 3, 0}), 0.0);
}

TEST(MadFactor, LognormalMatchesNumericIntegration) {
  for (double cv : {0.1, 0.25, 0.5, 1.0}) {
    const double vl = std::log1p(cv * cv);
    const double sl = std::sqrt(vl);
    const double ml = -0.5 * vl;  // mean 1
    // E|X - 1| by Simpson over log space, split at the kink y = 0.
    auto simpson = [&](double lo, double hi) {
      const int n = 20000;
      const double h = (hi - lo) / n;
      double acc = 0;
      for (int k = 0; k <= n; ++k) {
        const double y = lo + k * h;
        const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
        const double z = (y - ml) / sl;
        acc += w * std::abs(std::exp(y) - 1) * std::exp(-0.5 * z * z) / (sl * std::sqrt(2 * std::acos(-1.0)));
      }
      return acc * h / 3;
    };
    const double numeric = simpson(ml - 12 * sl, 0.0) + simpson(0.0, ml + 12 * sl);
    EXPECT_NEAR(mad_factor({DistKind::lognormal, 5, cv}), numeric, 1e-9) << cv;
  }
}

TEST(GaussianMax, IidStandardNormals) {
  const auto g = gaussian_max({0, 1}, {0, 1});
  const double pi = std::acos(-1.0);
  EXPECT_NEAR(g.mu, 1 / std::sqrt(pi), 1e-12);
  EXPECT_NEAR(g.var, 1 - 1 / pi, 1e-12);
  const auto num = oracle::max_of_normals_numeric(0, 1, 0, 1);
  EXPECT_NEAR(g.mu, num.mean, 1e-6);
  EXPECT_NEAR(g.var, num.var, 1e-6);
}

TEST(GaussianMax, MatchesNumericForUnequalInputs) {
  const auto g = gaussian_max({2, 4}, {1, 0.25});
  const auto num = oracle::max_of_normals_numeric(2, 4, 1, 0.25);
  EXPECT_NEAR(g.mu, num.mean, 1e-6);
  EXPECT_NEAR(g.var, num.var, 1e-6);
}

TEST(GaussianMax, DominatedAndDegenerate) {
  const auto g = gaussian_max({5, 1}, {-100, 0});
  EXPECT_NEAR(g.mu, 5, 1e-9);
  EXPECT_NEAR(g.var, 1, 1e-9);
  const auto d = gaussian_max({0, 0}, {3, 0});
  EXPECT_EQ(d.mu, 3);
  EXPECT_EQ(d.var, 0);
}

TEST(GaussianMax, CommutativeAndMeanAboveInputs) {
  SplitMix64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5), v(0, 3);
  for (int i = 0; i < 1000; ++i) {
    const GaussianMoment a{u(rng), v(rng)}, b{u(rng), v(rng)};
    const auto x = gaussian_max(a, b), y = gaussian_max(b, a);
    EXPECT_NEAR(x.mu, y.mu, 1e-12);
    EXPECT_NEAR(x.var, y.var, 1e-12);
    EXPECT_GE(x.mu, std::max(a.mu, b.mu) - 1e-12);
    EXPECT_GE(x.var, 0.0);
  }
}

TEST(GaussianMax, FarShiftReproducesDominant) {
  const GaussianMoment a{3, 2};
  const double shift = 10 * (std::sqrt(2.0) + 1) + 3;
  const auto g = gaussian_max(a, {a.mu - shift, 1});
  EXPECT_NEAR(g.mu, a.mu, 1e-6);
  EXPECT_NEAR(g.var, a.var, 1e-6);
}

TEST(GaussianCdf, Examples) {
  EXPECT_NEAR(gaussian_cdf_at({5, 1}, 5), 0.5, 1e-15);
  EXPECT_NEAR(gaussian_cdf_at({0, 1}, 1.96), 0.975, 1e-4);
  EXPECT_EQ(gaussian_cdf_at({7, 0}, 6), 0.0);
  EXPECT_EQ(gaussian_cdf_at({7, 0}, 7), 1.0);
}

TEST(Distribution, Validation) {
  EXPECT_THROW(check_distribution({DistKind::normal, -1, 0.2}), std::invalid_argument);
  EXPECT_THROW(check_distribution({DistKind::normal, 1, -0.2}), std::invalid_argument);
  EXPECT_NO_THROW(check_distribution({DistKind::exponential, 1, 0}));
  EXPECT_EQ(parse_dist_kind("ln"), DistKind::lognormal);
  EXPECT_THROW(parse_dist_kind("cauchy"), std::invalid_argument);
  EXPECT_EQ((DistributionSpec{DistKind::exponential, 4, 0.3}).stddev(), 4.0);
  EXPECT_EQ((DistributionSpec{DistKind::deterministic, 4, 0.3}).stddev(), 0.0);
}
