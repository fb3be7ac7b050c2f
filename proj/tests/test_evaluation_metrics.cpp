#include "test_support.hpp"

#include <swde/evaluation_metrics.hpp>
#include <swde/sqrt_density_estimator.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace swde;

namespace {

Field constant_field(std::size_t resolution, double value)
{
  const GridSpec g = GridSpec::unit(2, resolution);
  return Field{g, std::vector<double>(g.cell_count(), value)};
}

} // namespace

TEST(GridSpec, Geometry)
{
  const GridSpec g{Box{{0.0, -1.0}, {2.0, 1.0}}, 4};
  EXPECT_EQ(g.cell_count(), 16u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
  double x[2];
  g.cell_center(0, x);
  EXPECT_DOUBLE_EQ(x[0], 0.25);
  EXPECT_DOUBLE_EQ(x[1], -0.75);
  g.cell_center(1, x); // last axis fastest
  EXPECT_DOUBLE_EQ(x[0], 0.25);
  EXPECT_DOUBLE_EQ(x[1], -0.25);
  g.cell_center(15, x);
  EXPECT_DOUBLE_EQ(x[0], 1.75);
  EXPECT_DOUBLE_EQ(x[1], 0.75);
  EXPECT_THROW(grid_eval([](std::span<const double>) { return 1.0; }, GridSpec::unit(2, 1)),
               ArgumentError);
}

TEST(GridEval, ConstantAndHaarModel)
{
  const Field ones = grid_eval([](std::span<const double>) { return 1.0; }, GridSpec::unit(2, 4));
  EXPECT_EQ(ones.values, std::vector<double>(16, 1.0));
  EXPECT_EQ(mass(ones), 1.0);

  const auto haar = build_family(1);
  auto c = swde::testing::manual_coefficients(2, 1, 1, 0, Representation::single_trend);
  c.entries[{1, {0, 0}, 0}] = 1.0;
  c.entries[{1, {1, 1}, 0}] = -0.5;
  const DensityModel model(haar, c);
  const Field f = grid_eval([&](std::span<const double> x) { return reconstruct_g(model, x); },
                            GridSpec::unit(2, 4));
  const std::vector<double> expected = {2, 2, 0, 0, 2, 2, 0, 0, 0, 0, -1, -1, 0, 0, -1, -1};
  EXPECT_EQ(f.values, expected);
}

TEST(GridEval, ThreadCountDoesNotChangeOutput)
{
  auto fn = [](std::span<const double> x) { return std::sin(13.0 * x[0]) * std::cos(7.0 * x[1]); };
  const GridSpec g = GridSpec::unit(2, 97);
  const Field a = grid_eval(fn, g, 1);
  const Field b = grid_eval(fn, g, 5);
  EXPECT_EQ(a.values, b.values);
}

TEST(Ise, Examples)
{
  const Field one = constant_field(8, 1.0);
  EXPECT_EQ(ise(one, one), 0.0);
  EXPECT_DOUBLE_EQ(ise(constant_field(8, 0.0), one), 1.0);
  EXPECT_DOUBLE_EQ(ise(constant_field(8, 1.5), one), 0.25);
  EXPECT_THROW(ise(constant_field(8, 1.0), constant_field(4, 1.0)), ArgumentError);
}

TEST(Ise, SymmetricAndZeroOnlyWhenIdentical)
{
  const GridSpec g = GridSpec::unit(2, 16);
  const Field a = grid_eval([](std::span<const double> x) { return x[0] * x[1]; }, g);
  Field b = grid_eval([](std::span<const double> x) { return x[0] + x[1]; }, g);
  EXPECT_EQ(ise(a, b), ise(b, a));
  EXPECT_GT(ise(a, b), 0.0);
  b = a;
  b.values[37] += 1e-6;
  EXPECT_GT(ise(a, b), 0.0);
}

TEST(Ise, ConvergesUnderRefinement)
{
  auto f = [](std::span<const double> x) { return std::exp(-x[0]) * (1.0 + x[1] * x[1]); };
  auto g = [](std::span<const double> x) { return std::cos(x[0]) + 0.5 * x[1]; };
  std::vector<double> values;
  for (std::size_t res : {32, 64, 128, 256}) {
    const GridSpec grid = GridSpec::unit(2, res);
    values.push_back(ise(grid_eval(f, grid), grid_eval(g, grid)));
  }
  for (std::size_t i = 2; i < values.size(); ++i)
    EXPECT_LT(std::fabs(values[i] - values[i - 1]), std::fabs(values[i - 1] - values[i - 2]));
}

TEST(Mass, Examples)
{
  EXPECT_EQ(mass(constant_field(8, 1.0)), 1.0);
  EXPECT_EQ(mass(constant_field(8, 2.0)), 2.0);
  Field half = constant_field(8, 0.0);
  for (std::size_t i = 0; i < half.values.size() / 2; ++i)
    half.values[i] = 2.0;
  EXPECT_EQ(mass(half), 1.0);
}

TEST(NegativeMass, Examples)
{
  EXPECT_EQ(negative_mass(constant_field(8, 0.3)), 0.0);
  Field f = constant_field(2, 1.0);
  f.values[2] = -1.0;
  EXPECT_DOUBLE_EQ(negative_mass(f), -0.25);
  EXPECT_DOUBLE_EQ(min_value(f), -1.0);
}

TEST(MiseAggregate, Examples)
{
  const std::vector<double> ones{1, 1, 1};
  const auto a = mise_aggregate(ones);
  EXPECT_EQ(a.mean, 1.0);
  EXPECT_EQ(a.standard_error, 0.0);
  const std::vector<double> pair{0, 2};
  const auto b = mise_aggregate(pair);
  EXPECT_EQ(b.mean, 1.0);
  EXPECT_DOUBLE_EQ(b.standard_error, 1.0);
  const std::vector<double> single{0.7};
  const auto c = mise_aggregate(single);
  EXPECT_EQ(c.mean, 0.7);
  EXPECT_TRUE(std::isnan(c.standard_error));
  EXPECT_THROW(mise_aggregate(std::vector<double>{}), ArgumentError);
}
