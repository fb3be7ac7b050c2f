#include <swde/benchmark.hpp>
#include <swde/oracle_checks.hpp>
#include <swde/simulation.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace swde;

TEST(Rng, SubstreamsAreReproducibleAndDistinct)
{
  EXPECT_EQ(substream_seed(5, {1, 2}), substream_seed(5, {1, 2}));
  EXPECT_NE(substream_seed(5, {1, 2}), substream_seed(5, {2, 1}));
  EXPECT_NE(substream_seed(5, {1}), substream_seed(6, {1}));
  Rng a = make_rng(9, {3}), b = make_rng(9, {3});
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(a(), b());
}

TEST(SampleMixture, SingleTightComponent)
{
  const double var = 1e-4;
  const MixtureSpec spec("tight", {{1.0, {0.4, 0.6}, {var, 0.0, 0.0, var}}}, Box::unit(2));
  Rng rng = make_rng(1, {});
  const std::size_t n = 4000;
  const PointSet p = sample_mixture(spec, n, rng);
  ASSERT_EQ(p.size(), n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ASSERT_TRUE(spec.domain().contains(p[i]));
    mx += p[i][0];
    my += p[i][1];
  }
  const double se = std::sqrt(var / static_cast<double>(n));
  EXPECT_LT(std::fabs(mx / n - 0.4), 3 * se);
  EXPECT_LT(std::fabs(my / n - 0.6), 3 * se);
}

TEST(SampleMixture, DeterministicAndInsideDomain)
{
  const auto spec = registry_density("c");
  Rng r1 = make_rng(42, {7}), r2 = make_rng(42, {7});
  const PointSet a = sample_mixture(spec, 500, r1);
  const PointSet b = sample_mixture(spec, 500, r2);
  EXPECT_EQ(a.coords(), b.coords());
  for (std::size_t i = 0; i < a.size(); ++i)
    ASSERT_TRUE(spec.domain().contains(a[i]));
}

TEST(SampleMixture, DegenerateTruncationIsAConfigurationError)
{
  const MixtureSpec far("far", {{1.0, {1.3, 1.3}, {0.01, 0.0, 0.0, 0.01}}}, Box::unit(2));
  Rng rng = make_rng(0, {});
  EXPECT_THROW(sample_mixture(far, 10, rng), ConfigError);
}

TEST(MixtureSpec, InvalidSpecsAreRejected)
{
  EXPECT_THROW(MixtureSpec("w", {{0.7, {0.5, 0.5}, {1, 0, 0, 1}}}, Box::unit(2)), ConfigError);
  EXPECT_THROW(MixtureSpec("pd", {{1.0, {0.5, 0.5}, {1, 2, 2, 1}}}, Box::unit(2)), ConfigError);
  EXPECT_THROW(MixtureSpec("sym", {{1.0, {0.5, 0.5}, {1, 0.1, 0, 1}}}, Box::unit(2)), ConfigError);
  EXPECT_THROW(registry_density("z"), ConfigError);
}

TEST(TrueDensityField, HugeBoxMatchesGaussian)
{
  const MixtureSpec spec("std", {{1.0, {0.0, 0.0}, {1, 0, 0, 1}}}, Box{{-40, -40}, {40, 40}});
  for (double x : {-1.3, 0.0, 0.4, 2.5})
    for (double y : {-0.7, 0.2, 1.9}) {
      const double pt[] = {x, y};
      const double expected = std::exp(-0.5 * (x * x + y * y)) / (2.0 * std::numbers::pi);
      EXPECT_NEAR(spec.pdf(pt), expected, 1e-9);
    }
  const double out[] = {41.0, 0.0};
  EXPECT_EQ(spec.pdf(out), 0.0);
}

TEST(TrueDensityField, UnitMassAndSymmetry)
{
  for (const char* id : {"a", "b", "c", "uniform"}) {
    const auto spec = registry_density(id);
    const Field f = true_density_field(spec, GridSpec::unit(2, 128));
    EXPECT_NEAR(mass(f), 1.0, 1e-3) << id;
    EXPECT_GE(min_value(f), 0.0);
  }
  // Two equal components placed symmetrically about the centre.
  const MixtureSpec sym("sym",
                        {{0.5, {0.3, 0.4}, {0.01, 0.002, 0.002, 0.02}},
                         {0.5, {0.7, 0.6}, {0.01, 0.002, 0.002, 0.02}}},
                        Box::unit(2));
  const Field f = true_density_field(sym, GridSpec::unit(2, 64));
  const std::size_t N = f.values.size();
  for (std::size_t i = 0; i < N; ++i)
    ASSERT_NEAR(f.values[i], f.values[N - 1 - i], 1e-12 * (1.0 + f.values[i]));
}

TEST(Ks, StatisticAndSelfTest)
{
  const std::vector<double> one{0.5};
  EXPECT_DOUBLE_EQ(ks_statistic(std::span<const double>(one), [](double x) { return x; }), 0.5);

  Rng rng = make_rng(2024, {});
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> draws(5000);
  for (double& v : draws)
    v = expo(rng);
  const double d = ks_statistic(std::span<const double>(draws), exponential_cdf);
  EXPECT_GT(ks_p_value(d, draws.size()), 0.05);
  // A shifted law is rejected.
  for (double& v : draws)
    v += 0.1;
  EXPECT_LT(ks_p_value(ks_statistic(std::span<const double>(draws), exponential_cdf), 5000), 1e-6);
}

TEST(OracleChecks, ExpLawIsPreAsymptoticAtSmallN)
{
  const auto small = exp_law_check(16, 400, 3);
  const auto large = exp_law_check(4096, 5, 3);
  EXPECT_GT(small.ks, 2.0 * large.ks);
  EXPECT_LT(large.ks, 0.03);
}

TEST(OracleChecks, MomentIdentityAtModerateN)
{
  const auto m = moment_identity_check(1.0, 1, 512, 40, 8);
  EXPECT_NEAR(m.empirical_mean, 1.0, 0.08);
  EXPECT_NEAR(m.raw_mean, m.empirical_mean, 1e-12); // Gamma(2)/Gamma(1) = 1
  EXPECT_THROW(moment_identity_check(0.0, 1, 512, 40, 8), ArgumentError);
}

TEST(OracleChecks, HaarTrendIsNearlyUnbiased)
{
  const auto reps = haar_trend_replicates(1024, 1, 200, 77);
  double mean = 0.0;
  for (double v : reps)
    mean += v;
  mean /= static_cast<double>(reps.size());
  EXPECT_NEAR(mean, 1.0, 0.05);
}

TEST(Benchmark, UniformDensityHasZeroMise)
{
  BenchmarkConfig config;
  config.densities = {"uniform"};
  config.sample_sizes = {128};
  config.replications = 1;
  config.J_values = {-1};
  config.k_values = {1};
  config.wavelet_order = 1;
  config.seed = 1;
  const auto report = run_benchmark(config);
  ASSERT_EQ(report.rows.size(), 2u);
  const auto* sp = report.find("uniform", 128, -1, 1, EstimatorKind::shape_preserving);
  ASSERT_NE(sp, nullptr);
  EXPECT_EQ(sp->mise, 0.0);
  EXPECT_EQ(sp->mean_negative_mass, 0.0);
  EXPECT_TRUE(std::isnan(sp->mise_se));
  const auto* cl = report.find("uniform", 128, -1, 1, EstimatorKind::classical);
  ASSERT_NE(cl, nullptr);
  EXPECT_NEAR(cl->mise, 0.0, 1e-24);
}

TEST(Benchmark, CrossProductAndThreadInvariance)
{
  BenchmarkConfig config;
  config.densities = {"b", "uniform"};
  config.sample_sizes = {64, 100};
  config.replications = 3;
  config.J_values = {-1, 1};
  config.k_values = {1, 3};
  config.wavelet_order = 2;
  config.grid_resolution = 32;
  config.seed = 99;
  config.threads = 1;
  const auto a = run_benchmark(config);
  EXPECT_EQ(a.rows.size(), 2u * 2u * 2u * 2u * 2u);
  EXPECT_FALSE(a.any_failed());
  config.threads = 4;
  const auto b = run_benchmark(config);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].mise, b.rows[i].mise);
    EXPECT_EQ(a.rows[i].mise_se, b.rows[i].mise_se);
    EXPECT_EQ(a.rows[i].mean_negative_mass, b.rows[i].mean_negative_mass);
    if (a.rows[i].estimator == EstimatorKind::shape_preserving)
      EXPECT_EQ(a.rows[i].mean_negative_mass, 0.0);
    else
      EXPECT_LE(a.rows[i].mean_negative_mass, 0.0);
  }
}

TEST(Benchmark, FailedRowsAreMarkedNotFatal)
{
  BenchmarkConfig config;
  config.densities = {"b"};
  config.sample_sizes = {6};
  config.replications = 2;
  config.J_values = {0};
  config.k_values = {1, 8};
  config.wavelet_order = 2;
  config.grid_resolution = 16;
  config.seed = 3;
  const auto report = run_benchmark(config);
  EXPECT_TRUE(report.any_failed());
  const auto* bad = report.find("b", 6, 0, 8, EstimatorKind::shape_preserving);
  ASSERT_NE(bad, nullptr);
  EXPECT_TRUE(bad->failed);
  EXPECT_FALSE(bad->error.empty());
  EXPECT_FALSE(report.find("b", 6, 0, 1, EstimatorKind::shape_preserving)->failed);
}
