#pragma once

#include "classical_estimator.hpp"
#include "errors.hpp"
#include "evaluation_metrics.hpp"
#include "geometry.hpp"
#include "ks.hpp"
#include "nn_geometry.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sqrt_density_estimator.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace swde {

struct GaussianComponent
{
  double weight = 1.0;
  std::vector<double> mean;
  std::vector<double> covariance; //!< d x d, row-major
};

//! Gaussian mixture truncated to a box and renormalised there. A spec with
//! no components is the uniform density on the box.
class MixtureSpec
{
public:
  MixtureSpec(std::string name, std::vector<GaussianComponent> components, Box domain)
    : name_(std::move(name))
    , components_(std::move(components))
    , domain_(std::move(domain))
  {
    const std::size_t d = domain_.dim();
    if (d == 0)
      throw ConfigError("mixture domain has no dimensions");
    for (std::size_t a = 0; a < d; ++a)
      if (!(domain_.length(a) > 0.0))
        throw ConfigError("mixture domain has an empty axis");
    double wsum = 0.0;
    for (const auto& c : components_) {
      if (!(c.weight > 0.0))
        throw ConfigError("mixture weights must be positive");
      if (c.mean.size() != d || c.covariance.size() != d * d)
        throw ConfigError("mixture component has the wrong dimension");
      wsum += c.weight;
      factor(c);
    }
    if (!components_.empty() && std::fabs(wsum - 1.0) > 1e-9)
      throw ConfigError("mixture weights must sum to 1");
    normalizer_ = components_.empty() ? 1.0 : compute_normalizer();
    if (!(normalizer_ > 0.0))
      throw ConfigError("truncated mixture has no mass inside its domain");
  }

  const std::string& name() const { return name_; }
  const Box& domain() const { return domain_; }
  std::size_t dim() const { return domain_.dim(); }
  const std::vector<GaussianComponent>& components() const { return components_; }
  bool is_uniform() const { return components_.empty(); }
  //! Mass of the untruncated mixture inside the domain.
  double normalizer() const { return normalizer_; }

  //! Untruncated mixture density.
  double mixture_pdf(std::span<const double> x) const
  {
    const std::size_t d = dim();
    double total = 0.0;
    std::vector<double> y(d);
    for (std::size_t c = 0; c < components_.size(); ++c) {
      const auto& f = factors_[c];
      // Solve L y = x - mu.
      for (std::size_t r = 0; r < d; ++r) {
        double acc = x[r] - components_[c].mean[r];
        for (std::size_t s = 0; s < r; ++s)
          acc -= f.chol[r * d + s] * y[s];
        y[r] = acc / f.chol[r * d + r];
      }
      double q = 0.0;
      for (double v : y)
        q += v * v;
      total += components_[c].weight * std::exp(-0.5 * q - f.log_norm);
    }
    return total;
  }

  //! Truncated, renormalised density; zero outside the domain.
  double pdf(std::span<const double> x) const
  {
    if (!domain_.contains(x))
      return 0.0;
    if (is_uniform())
      return 1.0 / domain_.volume();
    return mixture_pdf(x) / normalizer_;
  }

  //! n draws by rejection against the domain box.
  PointSet sample(std::size_t n, Rng& rng) const
  {
    if (n == 0)
      throw ArgumentError("sample_mixture: n must be >= 1");
    const std::size_t d = dim();
    std::vector<double> coords;
    coords.reserve(n * d);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(d), x(d);
    std::size_t accepted = 0, attempts = 0;
    while (accepted < n) {
      ++attempts;
      if (is_uniform()) {
        for (std::size_t a = 0; a < d; ++a)
          x[a] = domain_.lower[a] + domain_.length(a) * unif(rng);
      } else {
        const double u = unif(rng);
        std::size_t c = 0;
        double cum = components_[0].weight;
        while (u >= cum && c + 1 < components_.size())
          cum += components_[++c].weight;
        for (auto& v : z)
          v = normal(rng);
        const auto& chol = factors_[c].chol;
        for (std::size_t r = 0; r < d; ++r) {
          double acc = components_[c].mean[r];
          for (std::size_t s = 0; s <= r; ++s)
            acc += chol[r * d + s] * z[s];
          x[r] = acc;
        }
      }
      if (domain_.contains(x)) {
        coords.insert(coords.end(), x.begin(), x.end());
        ++accepted;
      } else if (attempts >= 1000 && static_cast<double>(accepted) < 1e-3 * static_cast<double>(attempts)) {
        throw ConfigError("mixture '" + name_ + "': rejection acceptance rate below 1e-3");
      }
    }
    return PointSet(d, std::move(coords));
  }

private:
  struct Factor
  {
    std::vector<double> chol; // lower triangular
    double log_norm = 0.0;    // log((2 pi)^{d/2} |Sigma|^{1/2})
  };

  void factor(const GaussianComponent& c)
  {
    const std::size_t d = dim();
    Factor f;
    f.chol.assign(d * d, 0.0);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t s = 0; s < d; ++s)
        if (std::fabs(c.covariance[r * d + s] - c.covariance[s * d + r]) > 1e-12)
          throw ConfigError("covariance matrix is not symmetric");
    double log_det = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t s = 0; s <= r; ++s) {
        double acc = c.covariance[r * d + s];
        for (std::size_t t = 0; t < s; ++t)
          acc -= f.chol[r * d + t] * f.chol[s * d + t];
        if (r == s) {
          if (!(acc > 0.0))
            throw ConfigError("covariance matrix is not positive definite");
          f.chol[r * d + r] = std::sqrt(acc);
          log_det += std::log(acc);
        } else {
          f.chol[r * d + s] = acc / f.chol[s * d + s];
        }
      }
    }
    f.log_norm = 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + 0.5 * log_det;
    factors_.push_back(std::move(f));
  }

  double compute_normalizer() const
  {
    const std::size_t res = dim() <= 2 ? 1024 : (dim() == 3 ? 128 : 32);
    const Field f = grid_eval(
      [this](std::span<const double> x) { return mixture_pdf(x); }, GridSpec{domain_, res});
    return mass(f);
  }

  std::string name_;
  std::vector<GaussianComponent> components_;
  Box domain_;
  std::vector<Factor> factors_;
  double normalizer_ = 1.0;
};

inline PointSet sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng)
{
  return spec.sample(n, rng);
}

inline Field true_density_field(const MixtureSpec& spec, const GridSpec& grid)
{
  return grid_eval([&](std::span<const double> x) { return spec.pdf(x); }, grid);
}

//! Built-in bivariate test densities on [0,1]^2:
//!   a       - two peaks with very different spread and orientation
//!   b       - two similar peaks
//!   c       - four peaks of geometrically decreasing spread (smooth comb)
//!   uniform - the flat density
inline MixtureSpec registry_density(const std::string& id)
{
  const Box unit = Box::unit(2);
  auto cov = [](double sxx, double syy, double rho) {
    const double sxy = rho * std::sqrt(sxx * syy);
    return std::vector<double>{sxx, sxy, sxy, syy};
  };
  if (id == "a")
    return MixtureSpec("a",
                       {{0.5, {0.3, 0.68}, cov(0.0025, 0.0025, 0.0)},
                        {0.5, {0.6, 0.38}, cov(0.03, 0.012, 0.7)}},
                       unit);
  if (id == "b")
    return MixtureSpec("b",
                       {{0.5, {0.32, 0.35}, cov(0.01, 0.01, 0.2)},
                        {0.5, {0.68, 0.65}, cov(0.01, 0.01, 0.2)}},
                       unit);
  if (id == "c")
    return MixtureSpec("c",
                       {{8.0 / 15.0, {0.3, 0.3}, cov(0.012, 0.012, 0.0)},
                        {4.0 / 15.0, {0.62, 0.62}, cov(0.003, 0.003, 0.0)},
                        {2.0 / 15.0, {0.79, 0.79}, cov(0.00075, 0.00075, 0.0)},
                        {1.0 / 15.0, {0.89, 0.89}, cov(0.0001875, 0.0001875, 0.0)}},
                       unit);
  if (id == "uniform")
    return MixtureSpec("uniform", {}, unit);
  throw ConfigError("unknown test density '" + id + "' (available: a, b, c, uniform)");
}

} // namespace swde
