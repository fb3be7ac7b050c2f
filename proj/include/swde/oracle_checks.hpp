#pragma once

#include "ks.hpp"
#include "nn_geometry.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sqrt_density_estimator.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace swde {

namespace detail {

inline PointSet uniform_unit_square(std::size_t n, Rng& rng)
{
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> coords(2 * n);
  for (auto& c : coords)
    c = unif(rng);
  return PointSet(2, std::move(coords));
}

} // namespace detail

struct MomentCheck
{
  double empirical_mean = 0.0; //!< mean of n^a c0^a Gamma(k)/Gamma(k+a) R^{ad}
  double predicted = 1.0;
  double standard_error = 0.0;
  double z_score = 0.0;
  double raw_mean = 0.0; //!< mean of (n c0)^a R^{ad}; predicted Gamma(k+a)/Gamma(k)
};

//! Moment identity E[phi(X) R_(k)^{ad}] ~ n^{-a} Gamma(k+a)/Gamma(k) c0^{-a}
//! int phi f^{1-a}, checked with phi = 1 and f uniform on [0,1]^2, where the
//! normalised statistic has mean 1. Replication r uses substream (seed, r).
inline MomentCheck moment_identity_check(double a,
                                         int k,
                                         std::size_t n,
                                         std::size_t replications,
                                         std::uint64_t seed,
                                         unsigned threads = 1)
{
  if (!(a > 0.0))
    throw ArgumentError("moment_identity_check: a must be > 0");
  if (replications < 2)
    throw ArgumentError("moment_identity_check: need at least 2 replications");
  check_neighbor_query(n, k);
  const double d = 2.0;
  const double c0 = unit_ball_volume(2);
  const double norm = std::exp(std::lgamma(static_cast<double>(k)) - std::lgamma(k + a));
  const double nc = std::pow(static_cast<double>(n) * c0, a);

  std::vector<double> raw(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    Rng rng = make_rng(seed, {r});
    const PointSet pts = detail::uniform_unit_square(n, rng);
    const NeighborStats stats = knn_stats(pts, k);
    double acc = 0.0;
    for (double radius : stats.radii)
      acc += nc * std::pow(radius, a * d);
    raw[r] = acc / static_cast<double>(n);
  });

  double mean = 0.0;
  for (double v : raw)
    mean += v;
  mean /= static_cast<double>(replications);
  double ss = 0.0;
  for (double v : raw)
    ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / static_cast<double>(replications - 1) /
                              static_cast<double>(replications));

  MomentCheck out;
  out.raw_mean = mean;
  out.empirical_mean = norm * mean;
  out.standard_error = norm * se;
  out.z_score = (out.empirical_mean - out.predicted) / out.standard_error;
  return out;
}

struct ExpLawCheck
{
  double ks = 0.0;
  double p_value = 0.0;
  std::size_t pooled = 0;
};

//! Pools n V_(1);i over points at distance > n^{-1/2} from the boundary of
//! [0,1]^2 (uniform f, so the limit law is Exp(1)) and measures the KS
//! distance to Exp(1).
inline ExpLawCheck exp_law_check(std::size_t n,
                                 std::size_t replications,
                                 std::uint64_t seed,
                                 unsigned threads = 1)
{
  check_neighbor_query(n, 1);
  if (replications < 1)
    throw ArgumentError("exp_law_check: need at least one replication");
  const double margin = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<std::vector<double>> draws(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    Rng rng = make_rng(seed, {r});
    const PointSet pts = detail::uniform_unit_square(n, rng);
    const NeighborStats stats = knn_stats(pts, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = pts[i];
      if (x[0] > margin && x[0] < 1.0 - margin && x[1] > margin && x[1] < 1.0 - margin)
        draws[r].push_back(static_cast<double>(n) * stats.volumes[i]);
    }
  });
  std::vector<double> pooled;
  for (const auto& d : draws)
    pooled.insert(pooled.end(), d.begin(), d.end());
  if (pooled.empty())
    throw DegenerateError("exp_law_check: no interior points");
  ExpLawCheck out;
  out.pooled = pooled.size();
  out.ks = ks_statistic(std::span<const double>(pooled), exponential_cdf);
  out.p_value = ks_p_value(out.ks, pooled.size());
  return out;
}

//! Replicates of the Haar trend coefficient alpha_{0,(0,0)} (before
//! normalisation) on uniform samples from [0,1]^2; its target is
//! int sqrt(f) = 1.
inline std::vector<double> haar_trend_replicates(std::size_t n,
                                                 int k,
                                                 std::size_t replications,
                                                 std::uint64_t seed,
                                                 unsigned threads = 1)
{
  const auto haar = build_family(1, 10);
  EstimatorConfig config;
  config.wavelet_order = 1;
  config.j0 = 0;
  config.J = -1;
  config.k = k;
  config.normalize = false;
  config.dyadic_resolution = 10;
  std::vector<double> out(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    Rng rng = make_rng(seed, {r});
    const PointSet pts = detail::uniform_unit_square(n, rng);
    const CoefficientSet c = estimate_coefficients(pts, config, *haar);
    out[r] = c.at(BasisIndex{0, {0, 0}, 0});
  });
  return out;
}

} // namespace swde
