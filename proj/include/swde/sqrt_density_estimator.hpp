#pragma once

#include "basis_sums.hpp"
#include "coefficients.hpp"
#include "density_model.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "nn_geometry.hpp"
#include "wavelet_basis.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace swde {

//! Settings of the shape-preserving estimator (defaults: db6, j0 = 0, k = 1,
//! normalised, no thresholding).
struct EstimatorConfig
{
  int wavelet_order = 6;
  int j0 = 0;
  int J = 1; //!< top detail level; J = j0 - 1 keeps the trend only
  int k = 1;
  bool normalize = true;
  std::optional<double> threshold_constant;
  Box domain; //!< empty means the unit cube of the data dimension
  int dyadic_resolution = 12;
  Representation representation = Representation::trend_plus_details;

  Box domain_for(std::size_t d) const { return domain.dim() == 0 ? Box::unit(d) : domain; }

  void validate(const WaveletFamily& family) const
  {
    if (j0 < 0)
      throw ConfigError("j0 must be >= 0");
    if (J < j0 - 1)
      throw ConfigError("J must be >= j0 - 1");
    if (J + 1 > family.max_level())
      throw ConfigError("J + 1 = " + std::to_string(J + 1) + " exceeds the finest level " +
                        std::to_string(family.max_level()) +
                        " supported at dyadic resolution " +
                        std::to_string(family.dyadic_resolution()));
    if (k < 1)
      throw ConfigError("k must be >= 1");
    if (threshold_constant && !(*threshold_constant >= 0.0))
      throw ConfigError("threshold constant must be >= 0");
    if (family.order() != wavelet_order)
      throw ConfigError("family order does not match the configuration");
  }
};

//! Gamma(k) / Gamma(k + 1/2), via log-gamma so that large k does not overflow.
inline double consistency_factor(int k)
{
  if (k < 1)
    throw ArgumentError("consistency_factor: k must be >= 1");
  const double kk = static_cast<double>(k);
  return std::exp(std::lgamma(kk) - std::lgamma(kk + 0.5));
}

namespace detail {

inline CoefficientMeta make_meta(const PointSet& points,
                                 const EstimatorConfig& config,
                                 EstimatorKind kind)
{
  CoefficientMeta meta;
  meta.d = static_cast<int>(points.dim());
  meta.n = points.size();
  meta.k = config.k;
  meta.j0 = config.j0;
  meta.J = config.J;
  meta.wavelet_order = config.wavelet_order;
  meta.normalized = false;
  meta.representation = config.representation;
  meta.kind = kind;
  meta.domain = config.domain_for(points.dim());
  return meta;
}

inline void check_inside(const PointSet& points, const Box& domain)
{
  if (domain.dim() != points.dim())
    throw ArgumentError("estimation domain dimension does not match the data");
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!domain.contains(points[i]))
      throw DataError("sample point " + std::to_string(i) +
                      " lies outside the estimation domain; rescale the data first "
                      "(rescale_to_domain, or `fit --rescale`)");
}

} // namespace detail

//! Coefficients of sqrt(f):
//!   (Gamma(k)/Gamma(k+1/2)) n^{-1/2} sum_i basis(X_i) sqrt(V_(k);i)
//! for every basis function that is non-zero at some sample point.
//! `stats`, when given, must be knn_stats(points, config.k).
inline CoefficientSet estimate_coefficients(const PointSet& points,
                                            const EstimatorConfig& config,
                                            const WaveletFamily& family,
                                            const NeighborStats* stats = nullptr)
{
  config.validate(family);
  check_neighbor_query(points.size(), config.k);
  CoefficientSet out;
  out.meta = detail::make_meta(points, config, EstimatorKind::shape_preserving);
  detail::check_inside(points, out.meta.domain);

  NeighborStats own;
  if (stats == nullptr) {
    own = knn_stats(points, config.k);
    stats = &own;
  } else if (stats->k != config.k || stats->volumes.size() != points.size()) {
    throw ArgumentError("neighbour statistics do not match the sample or k");
  }
  std::vector<double> weights(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    weights[i] = std::sqrt(stats->volumes[i]);

  const double scale =
    consistency_factor(config.k) / std::sqrt(static_cast<double>(points.size()));
  detail::accumulate_basis_sums(
    family, points, weights, scale, out.meta.domain, detail::level_plan(out.meta), out.entries);
  return out;
}

//! Divides every coefficient by sqrt(kappa) so that the squared expansion
//! integrates to one.
inline CoefficientSet normalize(CoefficientSet coeffs)
{
  const double kappa = normalization_mass(coeffs);
  if (!(kappa > 0.0))
    throw DegenerateError("cannot normalise: all coefficients are zero");
  const double root = std::sqrt(kappa);
  for (auto& [idx, value] : coeffs.entries)
    value /= root;
  coeffs.meta.normalized = true;
  return coeffs;
}

//! Soft-thresholds detail coefficients with t_j = C sqrt(j + 1) / sqrt(n);
//! trend coefficients pass through and zeroed details are dropped.
inline CoefficientSet soft_threshold(CoefficientSet coeffs, double C, std::size_t n)
{
  if (!(C >= 0.0))
    throw ArgumentError("threshold constant must be >= 0");
  if (n == 0)
    throw ArgumentError("soft_threshold: n must be >= 1");
  if (coeffs.meta.representation != Representation::trend_plus_details)
    throw RepresentationError("soft thresholding needs the trend-plus-details "
                              "representation; convert with dilation_coefficients");
  if (C == 0.0)
    return coeffs;
  const double root_n = std::sqrt(static_cast<double>(n));
  for (auto it = coeffs.entries.begin(); it != coeffs.entries.end();) {
    if (it->first.orientation == 0) {
      ++it;
      continue;
    }
    const double t = C * std::sqrt(static_cast<double>(it->first.level) + 1.0) / root_n;
    const double mag = std::fabs(it->second) - t;
    if (mag > 0.0) {
      it->second = std::copysign(mag, it->second);
      ++it;
    } else {
      it = coeffs.entries.erase(it);
    }
  }
  coeffs.meta.normalized = false;
  return coeffs;
}

//! Synthesis: folds the details into the trend level by level, returning
//! the equivalent father-only expansion at level J + 1.
inline CoefficientSet to_single_trend(const CoefficientSet& coeffs, const WaveletFamily& family)
{
  if (coeffs.meta.representation == Representation::single_trend)
    return coeffs;
  const int d = coeffs.meta.d;
  const int n_orient = 1 << d;
  std::vector<std::map<std::vector<int>, double>> filters;
  for (int q = 0; q < n_orient; ++q)
    filters.push_back(refinement_coefficients(family, d, q));

  std::map<std::vector<int>, double> trend;
  for (const auto& [idx, value] : coeffs.entries)
    if (idx.orientation == 0 && idx.level == coeffs.meta.j0)
      trend[idx.translate] = value;

  for (int j = coeffs.meta.j0; j <= coeffs.meta.J; ++j) {
    std::map<std::vector<int>, double> fine;
    auto spread = [&](const std::vector<int>& z, int q, double value) {
      std::vector<int> m(static_cast<std::size_t>(d));
      for (const auto& [tap, c] : filters[q]) {
        for (int a = 0; a < d; ++a)
          m[a] = 2 * z[a] + tap[a];
        fine[m] += c * value;
      }
    };
    for (const auto& [z, value] : trend)
      spread(z, 0, value);
    for (const auto& [idx, value] : coeffs.entries)
      if (idx.level == j && idx.orientation != 0)
        spread(idx.translate, idx.orientation, value);
    trend = std::move(fine);
  }

  CoefficientSet out;
  out.meta = coeffs.meta;
  out.meta.representation = Representation::single_trend;
  const int level = coeffs.meta.J + 1;
  for (auto& [z, value] : trend)
    out.entries.emplace(BasisIndex{level, z, 0}, value);
  return out;
}

//! Analysis: filters a single-trend expansion at level L down to trend
//! coefficients at `target_j0` plus details at target_j0..L-1.
//! target_j0 defaults to L - 1.
inline CoefficientSet dilation_coefficients(const CoefficientSet& fine,
                                            const WaveletFamily& family,
                                            std::optional<int> target_j0 = std::nullopt)
{
  if (fine.meta.representation != Representation::single_trend)
    throw RepresentationError("dilation_coefficients expects a single-trend expansion");
  const int d = fine.meta.d;
  const int top = fine.meta.J + 1;
  const int target = target_j0.value_or(top - 1);
  if (target >= top || target < 0)
    throw ArgumentError("target level must lie in [0, " + std::to_string(top - 1) + "]");
  const int n_orient = 1 << d;
  std::vector<std::map<std::vector<int>, double>> filters;
  for (int q = 0; q < n_orient; ++q)
    filters.push_back(refinement_coefficients(family, d, q));

  CoefficientSet out;
  out.meta = fine.meta;
  out.meta.representation = Representation::trend_plus_details;
  out.meta.j0 = target;

  std::map<std::vector<int>, double> trend;
  for (const auto& [idx, value] : fine.entries)
    trend[idx.translate] = value;

  for (int j = top - 1; j >= target; --j) {
    // coef_{j,z,q} = sum_k c^{(q)}_k alpha_{j+1, 2z+k}
    std::vector<std::map<std::vector<int>, double>> coarse(static_cast<std::size_t>(n_orient));
    std::vector<int> z(static_cast<std::size_t>(d));
    for (const auto& [m, value] : trend) {
      for (const auto& [tap, c0] : filters[0]) {
        bool even = true;
        for (int a = 0; a < d && even; ++a) {
          const int diff = m[a] - tap[a];
          even = (diff % 2) == 0;
          z[a] = diff / 2;
        }
        if (!even)
          continue;
        for (int q = 0; q < n_orient; ++q)
          coarse[q][z] += filters[q].at(tap) * value;
      }
    }
    for (int q = 1; q < n_orient; ++q)
      for (auto& [zz, v] : coarse[q])
        out.entries.emplace(BasisIndex{j, zz, q}, v);
    trend = std::move(coarse[0]);
  }
  for (auto& [zz, v] : trend)
    out.entries.emplace(BasisIndex{target, zz, 0}, v);
  return out;
}

//! g(x), the linear expansion of the model at x.
inline double reconstruct_g(const DensityModel& model, std::span<const double> x)
{
  return model.expansion_at(x);
}

//! f(x) = g(x)^2 for shape-preserving models.
inline double density_at(const DensityModel& model, std::span<const double> x)
{
  return model.density_at(x);
}

//! estimate -> soft threshold (when configured) -> normalise (when configured).
inline DensityModel fit_shape_preserving(const PointSet& points,
                                         const EstimatorConfig& config,
                                         FamilyPtr family,
                                         const NeighborStats* stats = nullptr)
{
  auto coeffs = estimate_coefficients(points, config, *family, stats);
  if (config.threshold_constant)
    coeffs = soft_threshold(std::move(coeffs), *config.threshold_constant, points.size());
  if (config.normalize)
    coeffs = normalize(std::move(coeffs));
  return DensityModel(std::move(family), std::move(coeffs));
}

//! Per-axis affine map y = offset + scale * x.
struct AffineMap
{
  std::vector<double> scale;
  std::vector<double> offset;

  std::size_t dim() const { return scale.size(); }

  static AffineMap identity(std::size_t d)
  {
    return {std::vector<double>(d, 1.0), std::vector<double>(d, 0.0)};
  }

  bool is_identity() const
  {
    for (std::size_t a = 0; a < dim(); ++a)
      if (scale[a] != 1.0 || offset[a] != 0.0)
        return false;
    return true;
  }

  //! |det| of the map, the factor converting a density in y back to x.
  double jacobian() const
  {
    double j = 1.0;
    for (double s : scale)
      j *= s;
    return std::fabs(j);
  }

  std::vector<double> apply(std::span<const double> x) const
  {
    std::vector<double> y(x.size());
    for (std::size_t a = 0; a < x.size(); ++a)
      y[a] = offset[a] + scale[a] * x[a];
    return y;
  }

  PointSet apply(const PointSet& points) const
  {
    std::vector<double> coords(points.coords().size());
    const std::size_t d = points.dim();
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t a = 0; a < d; ++a)
        coords[i * d + a] = offset[a] + scale[a] * points[i][a];
    return PointSet(d, std::move(coords));
  }
};

struct Rescaled
{
  PointSet points;
  AffineMap map;
};

//! Maps the data's bounding box, widened by `padding` times its range on
//! each side, onto `target`. Data that already lie inside `target` are left
//! untouched (identity map) unless `force` is set.
inline Rescaled rescale_to_domain(const PointSet& points,
                                  const Box& target,
                                  double padding = 0.0,
                                  bool force = false)
{
  if (points.empty())
    throw ArgumentError("rescale_to_domain: empty point set");
  const std::size_t d = points.dim();
  if (target.dim() != d)
    throw ArgumentError("rescale_to_domain: target dimension does not match the data");
  if (padding < 0.0)
    throw ArgumentError("rescale_to_domain: padding must be >= 0");

  bool inside = true;
  for (std::size_t i = 0; i < points.size() && inside; ++i)
    inside = target.contains(points[i]);

  AffineMap map = AffineMap::identity(d);
  for (std::size_t a = 0; a < d; ++a) {
    double lo = points[0][a], hi = lo;
    for (std::size_t i = 1; i < points.size(); ++i) {
      lo = std::min(lo, points[i][a]);
      hi = std::max(hi, points[i][a]);
    }
    if (!(hi > lo))
      throw DegenerateError("axis " + std::to_string(a) + " has zero range; cannot rescale");
    if (inside && !force)
      continue;
    const double range = hi - lo;
    lo -= padding * range;
    hi += padding * range;
    map.scale[a] = target.length(a) / (hi - lo);
    map.offset[a] = target.lower[a] - map.scale[a] * lo;
  }
  if (map.is_identity())
    return {points, map};

  PointSet mapped = map.apply(points);
  // Clamp rounding spill-over at the box faces.
  std::vector<double> coords = mapped.coords();
  for (std::size_t i = 0; i < mapped.size(); ++i)
    for (std::size_t a = 0; a < d; ++a)
      coords[i * d + a] = std::clamp(coords[i * d + a], target.lower[a], target.upper[a]);
  return {PointSet(d, std::move(coords)), map};
}

} // namespace swde
