#pragma once

#include "errors.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace swde {

//! Axis-aligned box [lower_a, upper_a] in R^d.
struct Box
{
  std::vector<double> lower;
  std::vector<double> upper;

  static Box unit(std::size_t d)
  {
    return Box{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  }

  std::size_t dim() const { return lower.size(); }

  double length(std::size_t axis) const { return upper[axis] - lower[axis]; }

  double volume() const
  {
    double v = 1.0;
    for (std::size_t a = 0; a < dim(); ++a)
      v *= length(a);
    return v;
  }

  bool contains(std::span<const double> x) const
  {
    for (std::size_t a = 0; a < dim(); ++a)
      if (!(x[a] >= lower[a] && x[a] <= upper[a]))
        return false;
    return true;
  }

  bool operator==(const Box&) const = default;
};

//! n points in R^d, stored row-major.
class PointSet
{
public:
  PointSet() = default;

  PointSet(std::size_t d, std::vector<double> coords)
    : d_(d)
    , coords_(std::move(coords))
  {
    if (d_ == 0)
      throw ArgumentError("point set dimension must be >= 1");
    if (coords_.size() % d_ != 0)
      throw ArgumentError("coordinate count is not a multiple of the dimension");
    for (double c : coords_)
      if (!std::isfinite(c))
        throw DataError("point coordinates must be finite");
  }

  std::size_t size() const { return d_ == 0 ? 0 : coords_.size() / d_; }
  std::size_t dim() const { return d_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const
  {
    return {coords_.data() + i * d_, d_};
  }

  const std::vector<double>& coords() const { return coords_; }

private:
  std::size_t d_ = 0;
  std::vector<double> coords_;
};

} // namespace swde
