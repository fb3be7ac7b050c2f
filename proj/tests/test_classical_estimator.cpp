#include "test_support.hpp"

#include <swde/classical_estimator.hpp>
#include <swde/evaluation_metrics.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace swde;
using swde::testing::clustered_points;
using swde::testing::manual_coefficients;
using swde::testing::uniform_points;

namespace {

EstimatorConfig config_for(int order, int j0, int J)
{
  EstimatorConfig c;
  c.wavelet_order = order;
  c.j0 = j0;
  c.J = J;
  return c;
}

} // namespace

TEST(ClassicalCoefficients, HaarIndicatorAverage)
{
  const auto haar = build_family(1);
  const auto c = classical_coefficients(uniform_points(77, 2, 4), config_for(1, 0, -1), *haar);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c.at({0, {0, 0}, 0}), 1.0);
  EXPECT_EQ(c.meta.kind, EstimatorKind::classical);
}

TEST(ClassicalCoefficients, SinglePointAtLevelTwo)
{
  const auto haar = build_family(1);
  const auto c = classical_coefficients(PointSet(2, {0.3, 0.6}), config_for(1, 2, 1), *haar);
  ASSERT_EQ(c.size(), 1u);
  // 2^{dj/2} / n with d = 2, j = 2, n = 1
  EXPECT_DOUBLE_EQ(c.at({2, {1, 2}, 0}), 4.0);
}

TEST(ClassicalCoefficients, NoDetailsForTrendOnly)
{
  const auto f = build_family(3);
  const auto c = classical_coefficients(uniform_points(50, 2, 1), config_for(3, 1, 0), *f);
  for (const auto& [idx, v] : c.entries)
    EXPECT_EQ(idx.orientation, 0);
  EXPECT_THROW(classical_coefficients(PointSet(2, std::vector<double>{}), config_for(3, 1, 0), *f),
               EstimationError);
}

TEST(ClassicalCoefficients, MatchesDirectAverage)
{
  const auto f = build_family(2);
  const auto p = uniform_points(30, 2, 19);
  const auto c = classical_coefficients(p, config_for(2, 0, 1), *f);
  for (const auto& [idx, v] : c.entries) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      s += tensor_basis_at(*f, idx, p[i]);
    ASSERT_NEAR(v, s / 30.0, 1e-14);
  }
}

TEST(ClassicalDensity, HaarTrendOnUniformData)
{
  const auto haar = build_family(1);
  const auto model = fit_classical(uniform_points(200, 2, 2), config_for(1, 0, -1), haar);
  const double x[] = {0.4, 0.9};
  EXPECT_DOUBLE_EQ(classical_density_at(model, x), 1.0);
  const Field field = grid_eval(
    [&](std::span<const double> y) { return classical_density_at(model, y); }, GridSpec::unit(2, 64));
  EXPECT_NEAR(mass(field), 1.0, 1e-12);

  // The shape-preserving estimate coincides after normalisation.
  EstimatorConfig sp = config_for(1, 0, -1);
  const auto sp_model = fit_shape_preserving(uniform_points(200, 2, 2), sp, haar);
  EXPECT_DOUBLE_EQ(density_at(sp_model, x), classical_density_at(model, x));
}

TEST(ClassicalDensity, NegativityWitness)
{
  const auto f = build_family(6);
  const auto p = clustered_points(400, 42);
  const auto config = config_for(6, 0, 2);
  const auto classical = fit_classical(p, config, f);
  const GridSpec grid = GridSpec::unit(2, 128);
  const Field cf = grid_eval(
    [&](std::span<const double> x) { return classical_density_at(classical, x); }, grid);
  EXPECT_LT(min_value(cf), 0.0);
  EXPECT_LT(negative_mass(cf), 0.0);

  const auto sp = fit_shape_preserving(p, config, f);
  const Field sf = grid_eval([&](std::span<const double> x) { return density_at(sp, x); }, grid);
  EXPECT_GE(min_value(sf), 0.0);
  EXPECT_EQ(negative_mass(sf), 0.0);
}

TEST(RescaleClassical, Examples)
{
  const auto haar = build_family(1);
  auto c = manual_coefficients(2, 1, 0, -1);
  c.meta.kind = EstimatorKind::classical;
  c.entries[{0, {0, 0}, 0}] = 2.0;
  const DensityModel doubled(haar, c);
  const GridSpec grid = GridSpec::unit(2, 32);
  const auto halved = rescale_classical(doubled, grid);
  const double x[] = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(classical_density_at(halved, x), 1.0);

  const auto again = rescale_classical(halved, grid);
  EXPECT_NEAR(classical_density_at(again, x), 1.0, 1e-12);

  const auto f = build_family(6);
  const auto model = fit_classical(clustered_points(300, 3), config_for(6, 0, 1), f);
  const auto unit = rescale_classical(model, grid);
  const Field field = grid_eval(
    [&](std::span<const double> y) { return classical_density_at(unit, y); }, grid);
  EXPECT_NEAR(mass(field), 1.0, 1e-12);

  c.entries[{0, {0, 0}, 0}] = -1.0;
  EXPECT_THROW(rescale_classical(DensityModel(haar, c), grid), DegenerateError);
}
