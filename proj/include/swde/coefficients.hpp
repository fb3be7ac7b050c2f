#pragma once

#include "errors.hpp"
#include "geometry.hpp"
#include "wavelet_basis.hpp"

#include <cstddef>
#include <map>
#include <string>

namespace swde {

enum class Representation
{
  trend_plus_details, // father terms at j0, mother terms at j0..J
  single_trend        // father terms at J + 1 only
};

enum class EstimatorKind
{
  shape_preserving, // coefficients of sqrt(f); density is the square
  classical         // coefficients of f itself; linear reconstruction
};

inline std::string to_string(Representation r)
{
  return r == Representation::single_trend ? "single-trend" : "trend-plus-details";
}

inline std::string to_string(EstimatorKind k)
{
  return k == EstimatorKind::classical ? "classical" : "shape-preserving";
}

inline Representation representation_from_string(const std::string& s)
{
  if (s == "single-trend")
    return Representation::single_trend;
  if (s == "trend-plus-details")
    return Representation::trend_plus_details;
  throw DataError("unknown representation '" + s + "'");
}

inline EstimatorKind kind_from_string(const std::string& s)
{
  if (s == "classical")
    return EstimatorKind::classical;
  if (s == "shape-preserving")
    return EstimatorKind::shape_preserving;
  throw DataError("unknown estimator kind '" + s + "'");
}

struct CoefficientMeta
{
  int d = 1;
  std::size_t n = 0;
  int k = 1;
  int j0 = 0;
  int J = -1;
  int wavelet_order = 1;
  bool normalized = false;
  Representation representation = Representation::trend_plus_details;
  EstimatorKind kind = EstimatorKind::shape_preserving;
  Box domain;

  //! Level holding the father terms.
  int trend_level() const
  {
    return representation == Representation::single_trend ? J + 1 : j0;
  }
};

//! Sparse wavelet coefficients keyed by (level, translate, orientation),
//! iterated in a fixed (lexicographic) order.
struct CoefficientSet
{
  CoefficientMeta meta;
  std::map<BasisIndex, double> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  double at(const BasisIndex& idx) const
  {
    const auto it = entries.find(idx);
    return it == entries.end() ? 0.0 : it->second;
  }
};

//! Sum of squared coefficient values; the L2 mass of the expansion.
inline double normalization_mass(const CoefficientSet& coeffs)
{
  double kappa = 0.0;
  for (const auto& [idx, value] : coeffs.entries)
    kappa += value * value;
  return kappa;
}

} // namespace swde
