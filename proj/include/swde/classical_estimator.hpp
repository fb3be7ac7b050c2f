#pragma once

#include "basis_sums.hpp"
#include "density_model.hpp"
#include "evaluation_metrics.hpp"
#include "sqrt_density_estimator.hpp"

namespace swde {

//! Empirical-average coefficients of f itself:
//! alpha*_{j,z} = n^{-1} sum_i phi_{j,z}(X_i), likewise for the details.
//! Uses the same translate enumeration as estimate_coefficients; k and the
//! threshold of `config` are ignored.
inline CoefficientSet classical_coefficients(const PointSet& points,
                                             const EstimatorConfig& config,
                                             const WaveletFamily& family)
{
  if (points.empty())
    throw EstimationError("classical estimator needs at least one point");
  config.validate(family);
  CoefficientSet out;
  out.meta = detail::make_meta(points, config, EstimatorKind::classical);
  detail::check_inside(points, out.meta.domain);
  detail::accumulate_basis_sums(family,
                                points,
                                {},
                                1.0 / static_cast<double>(points.size()),
                                out.meta.domain,
                                detail::level_plan(out.meta),
                                out.entries);
  return out;
}

//! Linear reconstruction; may be negative.
inline double classical_density_at(const DensityModel& model, std::span<const double> x)
{
  return model.expansion_at(x);
}

//! Divides the classical estimate by its mass on `grid`, i.e. rescales every
//! coefficient (the reconstruction is linear in them).
inline DensityModel rescale_classical(const DensityModel& model,
                                      const GridSpec& grid,
                                      unsigned threads = 1)
{
  const Field field = grid_eval(
    [&](std::span<const double> x) { return model.expansion_at(x); }, grid, threads);
  const double m = mass(field);
  if (!(m > 0.0))
    throw DegenerateError("classical estimate has non-positive grid mass; cannot rescale");
  CoefficientSet coeffs = model.coefficients();
  for (auto& [idx, value] : coeffs.entries)
    value /= m;
  coeffs.meta.normalized = true;
  return DensityModel(model.family_ptr(), std::move(coeffs));
}

inline DensityModel fit_classical(const PointSet& points,
                                  const EstimatorConfig& config,
                                  FamilyPtr family)
{
  auto coeffs = classical_coefficients(points, config, *family);
  return DensityModel(std::move(family), std::move(coeffs));
}

} // namespace swde
