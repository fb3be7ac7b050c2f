#pragma once

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace swde {

//! Two-sided Kolmogorov-Smirnov distance between the empirical law of
//! `samples` and the continuous CDF `cdf`.
template<typename Cdf>
double ks_statistic(std::span<const double> samples, Cdf&& cdf)
{
  if (samples.empty())
    throw ArgumentError("ks_statistic: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

//! Asymptotic p-value P(sqrt(n) D > t) from the Kolmogorov distribution,
//! with the usual small-sample correction t = D (sqrt(n) + 0.12 + 0.11/sqrt(n)).
inline double ks_p_value(double d, std::size_t n)
{
  const double rn = std::sqrt(static_cast<double>(n));
  const double t = d * (rn + 0.12 + 0.11 / rn);
  if (t < 1e-3)
    return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16)
      break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double exponential_cdf(double x)
{
  return x <= 0.0 ? 0.0 : -std::expm1(-x);
}

} // namespace swde
