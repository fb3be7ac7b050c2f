#pragma once

#include "coefficients.hpp"
#include "errors.hpp"
#include "wavelet_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace swde {

//! A fitted expansion sum_idx c_idx basis_idx(x) together with its family.
//! Coefficients are packed into dense per-(level, orientation) blocks so
//! that evaluation only visits the support_length()^d translates live at x.
class DensityModel
{
public:
  static constexpr int max_dimension = 8;

  DensityModel(FamilyPtr family, CoefficientSet coeffs)
    : family_(std::move(family))
    , coeffs_(std::move(coeffs))
  {
    if (!family_)
      throw ArgumentError("DensityModel: missing wavelet family");
    if (family_->order() != coeffs_.meta.wavelet_order)
      throw ArgumentError("DensityModel: family order does not match coefficients");
    if (coeffs_.meta.d < 1 || coeffs_.meta.d > max_dimension)
      throw ArgumentError("DensityModel: dimension must lie in [1, 8]");
    compile();
  }

  const WaveletFamily& family() const { return *family_; }
  const FamilyPtr& family_ptr() const { return family_; }
  const CoefficientSet& coefficients() const { return coeffs_; }
  int dim() const { return coeffs_.meta.d; }
  EstimatorKind kind() const { return coeffs_.meta.kind; }

  //! Value of the linear expansion at x (g for the shape-preserving model).
  double expansion_at(std::span<const double> x) const
  {
    if (static_cast<int>(x.size()) != dim())
      throw ArgumentError("point dimension does not match the model");
    const int len = family_->support_length();
    const std::size_t d = x.size();
    std::vector<double> father(d * len), mother(d * len);
    std::vector<std::int64_t> top(d);
    double total = 0.0;
    for (const auto& group : levels_) {
      for (std::size_t a = 0; a < d; ++a)
        top[a] = family_->axis_factors(x[a],
                                       group.level,
                                       std::span(father).subspan(a * len, len),
                                       group.needs_mother
                                         ? std::span(mother).subspan(a * len, len)
                                         : std::span<double>{});
      double level_sum = 0.0;
      for (std::size_t b = group.first; b < group.last; ++b)
        level_sum += block_sum(blocks_[b], top, father, mother, len);
      total += level_sum * group.scale;
    }
    return total;
  }

  //! Density estimate: the squared expansion for shape-preserving models
  //! (never negative), the expansion itself for classical ones.
  double density_at(std::span<const double> x) const
  {
    const double g = expansion_at(x);
    return kind() == EstimatorKind::shape_preserving ? g * g : g;
  }

private:
  struct Block
  {
    int level = 0;
    int orientation = 0;
    std::vector<std::int64_t> lo;
    std::vector<std::int64_t> extent;
    std::vector<double> values; // row-major over translates
  };

  struct LevelGroup
  {
    int level = 0;
    double scale = 1.0; // 2^{dj/2}
    bool needs_mother = false;
    std::size_t first = 0, last = 0; // block range
  };

  void compile()
  {
    const std::size_t d = static_cast<std::size_t>(dim());
    // Entries are ordered by level, then translate; group by (level, q).
    std::map<std::pair<int, int>, std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> bounds;
    for (const auto& [idx, value] : coeffs_.entries) {
      if (idx.dim() != d)
        throw DataError("coefficient translate dimension does not match d");
      check_level(*family_, idx.level);
      auto [it, inserted] = bounds.try_emplace({idx.level, idx.orientation});
      auto& [lo, hi] = it->second;
      if (inserted) {
        lo.assign(idx.translate.begin(), idx.translate.end());
        hi = lo;
      }
      for (std::size_t a = 0; a < d; ++a) {
        lo[a] = std::min<std::int64_t>(lo[a], idx.translate[a]);
        hi[a] = std::max<std::int64_t>(hi[a], idx.translate[a]);
      }
    }
    std::map<std::pair<int, int>, std::size_t> where;
    for (const auto& [key, range] : bounds) {
      Block block;
      block.level = key.first;
      block.orientation = key.second;
      block.lo = range.first;
      std::size_t total = 1;
      for (std::size_t a = 0; a < d; ++a) {
        block.extent.push_back(range.second[a] - range.first[a] + 1);
        total *= static_cast<std::size_t>(block.extent[a]);
      }
      block.values.assign(total, 0.0);
      where[key] = blocks_.size();
      blocks_.push_back(std::move(block));
    }
    for (const auto& [idx, value] : coeffs_.entries) {
      Block& block = blocks_[where[{idx.level, idx.orientation}]];
      std::size_t flat = 0;
      for (std::size_t a = 0; a < d; ++a)
        flat = flat * static_cast<std::size_t>(block.extent[a]) +
               static_cast<std::size_t>(idx.translate[a] - block.lo[a]);
      block.values[flat] = value;
    }
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (levels_.empty() || levels_.back().level != blocks_[b].level) {
        LevelGroup g;
        g.level = blocks_[b].level;
        g.scale = std::exp2(0.5 * static_cast<double>(d) * g.level);
        g.first = b;
        levels_.push_back(g);
      }
      levels_.back().last = b + 1;
      if (blocks_[b].orientation != 0)
        levels_.back().needs_mother = true;
    }
  }

  static double block_sum(const Block& block,
                          const std::vector<std::int64_t>& top,
                          const std::vector<double>& father,
                          const std::vector<double>& mother,
                          int len)
  {
    const std::size_t d = top.size();
    // Per-axis window of live translates that fall inside the block.
    std::int64_t i_lo[8], i_hi[8];
    for (std::size_t a = 0; a < d; ++a) {
      // z = top - i must satisfy lo <= z < lo + extent.
      i_lo[a] = std::max<std::int64_t>(0, top[a] - (block.lo[a] + block.extent[a] - 1));
      i_hi[a] = std::min<std::int64_t>(len - 1, top[a] - block.lo[a]);
      if (i_lo[a] > i_hi[a])
        return 0.0;
    }
    auto factor = [&](std::size_t a, std::int64_t i) {
      const bool m = ((block.orientation >> a) & 1) != 0;
      return (m ? mother : father)[a * len + static_cast<std::size_t>(i)];
    };
    return accumulate(block, top, i_lo, i_hi, factor, 0, 0, 1.0);
  }

  template<typename Factor>
  static double accumulate(const Block& block,
                           const std::vector<std::int64_t>& top,
                           const std::int64_t* i_lo,
                           const std::int64_t* i_hi,
                           Factor& factor,
                           std::size_t axis,
                           std::size_t flat,
                           double weight)
  {
    const std::size_t d = top.size();
    double sum = 0.0;
    for (std::int64_t i = i_lo[axis]; i <= i_hi[axis]; ++i) {
      const double w = weight * factor(axis, i);
      if (w == 0.0)
        continue;
      const std::size_t f = flat * static_cast<std::size_t>(block.extent[axis]) +
                            static_cast<std::size_t>(top[axis] - i - block.lo[axis]);
      if (axis + 1 == d)
        sum += w * block.values[f];
      else
        sum += accumulate(block, top, i_lo, i_hi, factor, axis + 1, f, w);
    }
    return sum;
  }

  FamilyPtr family_;
  CoefficientSet coeffs_;
  std::vector<Block> blocks_;
  std::vector<LevelGroup> levels_;
};

} // namespace swde
