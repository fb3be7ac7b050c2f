#pragma once

#include "errors.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <thread>
#include <vector>

namespace swde {

//! Regular partition of a box into resolution^d cells, sampled at the cell
//! centres (midpoint rule).
struct GridSpec
{
  Box box;
  std::size_t resolution = 128;

  static GridSpec unit(std::size_t d, std::size_t resolution)
  {
    return GridSpec{Box::unit(d), resolution};
  }

  std::size_t dim() const { return box.dim(); }

  std::size_t cell_count() const
  {
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim(); ++a)
      total *= resolution;
    return total;
  }

  double cell_volume() const
  {
    return box.volume() / std::pow(static_cast<double>(resolution), static_cast<double>(dim()));
  }

  //! Centre of cell `flat`; the last axis varies fastest.
  void cell_center(std::size_t flat, std::span<double> out) const
  {
    for (std::size_t a = dim(); a-- > 0;) {
      const std::size_t i = flat % resolution;
      flat /= resolution;
      out[a] = box.lower[a] + box.length(a) * (static_cast<double>(i) + 0.5) /
                                static_cast<double>(resolution);
    }
  }

  void validate() const
  {
    if (dim() == 0)
      throw ArgumentError("grid box has no dimensions");
    if (resolution < 2)
      throw ArgumentError("grid resolution must be >= 2");
  }

  bool operator==(const GridSpec&) const = default;
};

//! Values of a function at the cell centres of a grid.
struct Field
{
  GridSpec grid;
  std::vector<double> values;
};

//! Evaluates `density(x)` at every cell centre. Cells are split into
//! contiguous chunks across `threads` workers; output order is fixed.
template<typename Density>
Field grid_eval(const Density& density, const GridSpec& grid, unsigned threads = 1)
{
  grid.validate();
  Field field{grid, std::vector<double>(grid.cell_count())};
  const std::size_t cells = field.values.size();
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(grid.dim());
    for (std::size_t c = begin; c < end; ++c) {
      grid.cell_center(c, x);
      field.values[c] = density(std::span<const double>(x));
    }
  };
  if (threads <= 1) {
    work(0, cells);
    return field;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (cells + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(cells, begin + chunk);
      if (begin < end)
        pool.emplace_back(work, begin, end);
    }
  } // joins
  return field;
}

inline void check_same_grid(const Field& a, const Field& b)
{
  if (!(a.grid == b.grid) || a.values.size() != b.values.size())
    throw ArgumentError("fields are defined on different grids");
}

//! Integrated squared error by the midpoint rule.
inline double ise(const Field& estimate, const Field& truth)
{
  check_same_grid(estimate, truth);
  double acc = 0.0;
  for (std::size_t i = 0; i < estimate.values.size(); ++i) {
    const double diff = estimate.values[i] - truth.values[i];
    acc += diff * diff;
  }
  return acc * estimate.grid.cell_volume();
}

inline double mass(const Field& field)
{
  double acc = 0.0;
  for (double v : field.values)
    acc += v;
  return acc * field.grid.cell_volume();
}

//! Integral of min(f, 0); never positive.
inline double negative_mass(const Field& field)
{
  double acc = 0.0;
  for (double v : field.values)
    if (v < 0.0)
      acc += v;
  return acc * field.grid.cell_volume();
}

inline double min_value(const Field& field)
{
  double lo = std::numeric_limits<double>::infinity();
  for (double v : field.values)
    lo = std::min(lo, v);
  return lo;
}

struct MiseEstimate
{
  double mean = 0.0;
  //! Standard error of the mean; NaN for a single replication.
  double standard_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;
};

inline MiseEstimate mise_aggregate(std::span<const double> ise_values)
{
  if (ise_values.empty())
    throw ArgumentError("mise_aggregate: no ISE values");
  MiseEstimate out;
  out.count = ise_values.size();
  double sum = 0.0;
  for (double v : ise_values)
    sum += v;
  out.mean = sum / static_cast<double>(out.count);
  if (out.count > 1) {
    double ss = 0.0;
    for (double v : ise_values)
      ss += (v - out.mean) * (v - out.mean);
    const double var = ss / static_cast<double>(out.count - 1);
    out.standard_error = std::sqrt(var / static_cast<double>(out.count));
  }
  return out;
}

} // namespace swde
