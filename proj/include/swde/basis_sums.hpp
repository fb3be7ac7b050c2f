#pragma once

#include "coefficients.hpp"
#include "geometry.hpp"
#include "wavelet_basis.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace swde::detail {

//! Which basis functions of one level enter a coefficient set.
struct LevelRequest
{
  int level = 0;
  bool father = false;
  bool mothers = false;
};

inline std::vector<LevelRequest> level_plan(const CoefficientMeta& meta)
{
  std::vector<LevelRequest> plan;
  if (meta.representation == Representation::single_trend) {
    plan.push_back({meta.J + 1, true, false});
    return plan;
  }
  plan.push_back({meta.j0, true, meta.J >= meta.j0});
  for (int j = meta.j0 + 1; j <= meta.J; ++j)
    plan.push_back({j, false, true});
  return plan;
}

//! Adds scale * sum_i weights[i] * basis_idx(X_i) into `out` for every basis
//! index of the plan whose support contains at least one sample point with a
//! non-zero basis value. Points are visited in index order, so the sums are
//! reproducible bit for bit.
inline void accumulate_basis_sums(const WaveletFamily& family,
                                  const PointSet& points,
                                  std::span<const double> weights,
                                  double scale,
                                  const Box& domain,
                                  const std::vector<LevelRequest>& plan,
                                  std::map<BasisIndex, double>& out)
{
  const std::size_t d = points.dim();
  const int len = family.support_length();
  const int n_orient = 1 << d;

  std::vector<double> father(d * len), mother(d * len);
  std::vector<std::int64_t> top(d);
  std::vector<int> combo(d);

  for (const auto& req : plan) {
    check_level(family, req.level);
    // Dense translate window covering every z whose support meets the domain.
    std::vector<std::int64_t> zlo(d), ext(d);
    std::size_t cells = 1;
    for (std::size_t a = 0; a < d; ++a) {
      zlo[a] = static_cast<std::int64_t>(std::floor(std::ldexp(domain.lower[a], req.level))) - len + 1;
      const auto zhi = static_cast<std::int64_t>(std::floor(std::ldexp(domain.upper[a], req.level)));
      ext[a] = zhi - zlo[a] + 1;
      cells *= static_cast<std::size_t>(ext[a]);
    }
    const int q_first = req.father ? 0 : 1;
    const int q_last = req.mothers ? n_orient : 1;
    const int n_q = q_last - q_first;
    std::vector<double> sums(cells * n_q, 0.0);
    std::vector<char> touched(cells * n_q, 0);

    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto x = points[i];
      for (std::size_t a = 0; a < d; ++a)
        top[a] = family.axis_factors(x[a],
                                     req.level,
                                     std::span(father).subspan(a * len, len),
                                     req.mothers ? std::span(mother).subspan(a * len, len)
                                                 : std::span<double>{});
      const double w = weights.empty() ? 1.0 : weights[i];
      std::fill(combo.begin(), combo.end(), 0);
      while (true) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < d; ++a)
          flat = flat * static_cast<std::size_t>(ext[a]) +
                 static_cast<std::size_t>(top[a] - combo[a] - zlo[a]);
        for (int q = q_first; q < q_last; ++q) {
          double v = 1.0;
          for (std::size_t a = 0; a < d && v != 0.0; ++a)
            v *= (((q >> a) & 1) ? mother : father)[a * len + combo[a]];
          if (v == 0.0)
            continue;
          const std::size_t slot = flat * n_q + static_cast<std::size_t>(q - q_first);
          sums[slot] += w * v;
          touched[slot] = 1;
        }
        std::size_t a = d;
        bool done = true;
        while (a-- > 0) {
          if (++combo[a] < len) {
            done = false;
            break;
          }
          combo[a] = 0;
        }
        if (done)
          break;
      }
    }

    const double level_scale = scale * std::exp2(0.5 * static_cast<double>(d) * req.level);
    BasisIndex idx{req.level, std::vector<int>(d), 0};
    for (std::size_t flat = 0; flat < cells; ++flat) {
      std::size_t rem = flat;
      for (std::size_t a = d; a-- > 0;) {
        idx.translate[a] = static_cast<int>(zlo[a] + static_cast<std::int64_t>(rem % ext[a]));
        rem /= static_cast<std::size_t>(ext[a]);
      }
      for (int q = q_first; q < q_last; ++q) {
        const std::size_t slot = flat * n_q + static_cast<std::size_t>(q - q_first);
        if (!touched[slot])
          continue;
        idx.orientation = q;
        out[idx] = level_scale * sums[slot];
      }
    }
  }
}

} // namespace swde::detail
