#pragma once

#include "daubechies_filters.hpp"
#include "errors.hpp"

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace swde {

//! Index (level j, translate z, orientation q) of a tensor-product basis
//! function. Orientation 0 is the father product; bit a of q selects the
//! mother wavelet on axis a.
struct BasisIndex
{
  int level = 0;
  std::vector<int> translate;
  int orientation = 0;

  std::size_t dim() const { return translate.size(); }

  auto operator<=>(const BasisIndex&) const = default;
  bool operator==(const BasisIndex&) const = default;
};

//! Compactly supported orthonormal Daubechies family with father and mother
//! wavelets tabulated on the dyadic grid m / 2^r of their common support
//! [0, 2p - 1].
//!
//! Evaluation at level j interpolates on the grid of spacing 2^-(r - j) in
//! the argument 2^j x - z, i.e. on the same absolute grid 2^-r in x at every
//! level. With that convention the two-scale relation
//!   phi_{j,z} = sum_k h_k phi_{j+1,2z+k},  psi_{j,z} = sum_k g_k phi_{j+1,2z+k}
//! holds exactly (up to rounding) at every x, not just at dyadic points.
class WaveletFamily
{
public:
  static constexpr int min_resolution = 4;
  static constexpr int max_resolution = 16;

  WaveletFamily(int order, int dyadic_resolution);

  int order() const { return order_; }
  //! Length 2p - 1 of the support [0, 2p - 1].
  int support_length() const { return support_; }
  int dyadic_resolution() const { return resolution_; }
  //! Highest level whose interpolation grid is still at least 2^-1.
  int max_level() const { return resolution_ - 1; }
  //! Haar is evaluated as a step function; every other order is
  //! interpolated linearly between table entries.
  bool piecewise_constant() const { return order_ == 1; }

  std::span<const double> lowpass() const { return lowpass_; }
  std::span<const double> highpass() const { return highpass_; }
  std::span<const double> father_table() const { return father_; }
  std::span<const double> mother_table() const { return mother_; }

  //! Abscissa of table entry m.
  double table_abscissa(std::size_t m) const
  {
    return std::ldexp(static_cast<double>(m), -resolution_);
  }

  //! phi(y) interpolated on the level-`level` grid (spacing 2^-(r - level)).
  double father(double y, int level = 0) const
  {
    return interpolate(father_, std::ldexp(y, resolution_ - level), level);
  }

  double mother(double y, int level = 0) const
  {
    return interpolate(mother_, std::ldexp(y, resolution_ - level), level);
  }

  //! Unscaled factor u(2^level x - z) on one axis, with u the father or
  //! mother wavelet. The table position is derived from x * 2^r, which is
  //! exact, so that every level sees identical interpolation weights.
  double axis_factor(bool mother_wavelet, double x, int level, std::int64_t z) const
  {
    const double s = std::ldexp(x, resolution_);
    const double fl = std::floor(s);
    const auto m = static_cast<std::int64_t>(fl) - (z << (resolution_ - level));
    return lookup(mother_wavelet ? mother_ : father_, m, s - fl, level);
  }

  //! Fills father/mother factors for the support_length() translates that
  //! can be non-zero at x on `level`: entry i corresponds to z = top - i.
  //! Returns top = floor(2^level x).
  std::int64_t axis_factors(double x,
                            int level,
                            std::span<double> father_out,
                            std::span<double> mother_out) const
  {
    const double s = std::ldexp(x, resolution_);
    const double fl = std::floor(s);
    const double frac = s - fl;
    const auto base = static_cast<std::int64_t>(fl);
    const std::int64_t top = static_cast<std::int64_t>(std::floor(std::ldexp(x, level)));
    for (int i = 0; i < support_; ++i) {
      const std::int64_t m = base - ((top - i) << (resolution_ - level));
      father_out[i] = lookup(father_, m, frac, level);
      if (!mother_out.empty())
        mother_out[i] = lookup(mother_, m, frac, level);
    }
    return top;
  }

private:
  double interpolate(const std::vector<double>& table, double t, int level) const
  {
    if (!(t >= 0.0))
      return 0.0;
    const double fl = std::floor(t);
    return lookup(table, static_cast<std::int64_t>(fl), t - fl, level);
  }

  // m indexes the grid of resolution r - level; frac in [0, 1).
  double lookup(const std::vector<double>& table,
                std::int64_t m,
                double frac,
                int level) const
  {
    const std::int64_t last = static_cast<std::int64_t>(support_) << (resolution_ - level);
    if (m < 0 || m > last)
      return 0.0;
    const double v0 = table[static_cast<std::size_t>(m << level)];
    if (piecewise_constant() || frac == 0.0)
      return v0;
    if (m == last)
      return 0.0;
    const double v1 = table[static_cast<std::size_t>((m + 1) << level)];
    return v0 + frac * (v1 - v0);
  }

  void build_tables();

  int order_;
  int support_;
  int resolution_;
  std::vector<double> lowpass_;
  std::vector<double> highpass_;
  std::vector<double> father_;
  std::vector<double> mother_;
};

using FamilyPtr = std::shared_ptr<const WaveletFamily>;

namespace detail {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
inline std::vector<long double> solve_dense(std::vector<std::vector<long double>> a,
                                            std::vector<long double> b)
{
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col]))
        piv = r;
    if (a[piv][col] == 0.0L)
      throw ConfigError("singular refinement system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const long double f = a[r][col] / a[col][col];
      if (f == 0.0L)
        continue;
      for (std::size_t c = col; c < n; ++c)
        a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<long double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c)
      acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

inline void check_filter(std::span<const double> h, int order)
{
  long double sum = 0.0L;
  for (double v : h)
    sum += v;
  if (std::fabs(sum - std::sqrt(2.0L)) > 1e-12L)
    throw ConfigError("db" + std::to_string(order) + " filter does not sum to sqrt(2)");
  const std::size_t len = h.size();
  for (std::size_t shift = 0; 2 * shift < len; ++shift) {
    long double acc = 0.0L;
    for (std::size_t k = 0; k + 2 * shift < len; ++k)
      acc += static_cast<long double>(h[k]) * h[k + 2 * shift];
    const long double expected = shift == 0 ? 1.0L : 0.0L;
    if (std::fabs(acc - expected) > 1e-12L)
      throw ConfigError("db" + std::to_string(order) + " filter is not shift-orthonormal");
  }
}

} // namespace detail

inline WaveletFamily::WaveletFamily(int order, int dyadic_resolution)
  : order_(order)
  , support_(2 * order - 1)
  , resolution_(dyadic_resolution)
{
  if (order < 1 || order > detail::max_daubechies_order)
    throw ConfigError("unsupported Daubechies order " + std::to_string(order) +
                      " (available: 1.." + std::to_string(detail::max_daubechies_order) + ")");
  if (dyadic_resolution < min_resolution || dyadic_resolution > max_resolution)
    throw ConfigError("dyadic resolution must lie in [4, 16]");

  const auto h = detail::daubechies_lowpass(order);
  detail::check_filter(h, order);
  lowpass_.assign(h.begin(), h.end());
  highpass_.resize(lowpass_.size());
  for (std::size_t k = 0; k < lowpass_.size(); ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    highpass_[k] = sign * lowpass_[lowpass_.size() - 1 - k];
  }
  build_tables();
}

inline void WaveletFamily::build_tables()
{
  const std::int64_t scale = std::int64_t{1} << resolution_;
  const std::int64_t last = support_ * scale;
  std::vector<long double> phi(static_cast<std::size_t>(last + 1), 0.0L);
  const long double root2 = std::sqrt(2.0L);

  // Integer abscissae: eigenvector of M[i][l] = sqrt(2) h_{2i-l} for the
  // eigenvalue 1, normalised by sum_k phi(k) = 1.
  if (order_ == 1) {
    phi[0] = 1.0L;
  } else {
    const int interior = support_ - 1; // phi(1), ..., phi(S - 1)
    std::vector<std::vector<long double>> a(interior, std::vector<long double>(interior, 0.0L));
    std::vector<long double> b(interior, 0.0L);
    for (int i = 1; i <= interior; ++i)
      for (int l = 1; l <= interior; ++l) {
        const int k = 2 * i - l;
        if (k >= 0 && k <= support_)
          a[i - 1][l - 1] = root2 * lowpass_[k];
        if (i == l)
          a[i - 1][l - 1] -= 1.0L;
      }
    // The system is rank deficient by one; swap the last equation for the
    // normalisation.
    for (int l = 0; l < interior; ++l)
      a[interior - 1][l] = 1.0L;
    b[interior - 1] = 1.0L;
    const auto v = detail::solve_dense(std::move(a), std::move(b));
    for (int i = 1; i <= interior; ++i)
      phi[static_cast<std::size_t>(i * scale)] = v[i - 1];
  }

  // Odd nodes of level l from the two-scale relation at level l - 1.
  for (int lvl = 1; lvl <= resolution_; ++lvl) {
    const std::int64_t stride = std::int64_t{1} << (resolution_ - lvl);
    const std::int64_t coarse = std::int64_t{1} << (lvl - 1);
    const std::int64_t nodes = support_ * (std::int64_t{1} << lvl);
    for (std::int64_t m = 1; m < nodes; m += 2) {
      long double acc = 0.0L;
      for (int k = 0; k <= support_; ++k) {
        const std::int64_t idx = m - k * coarse; // node on the level-(l-1) grid
        if (idx < 0 || idx > support_ * coarse)
          continue;
        acc += lowpass_[k] * phi[static_cast<std::size_t>(idx * 2 * stride)];
      }
      phi[static_cast<std::size_t>(m * stride)] = root2 * acc;
    }
  }

  father_.resize(phi.size());
  mother_.assign(phi.size(), 0.0);
  for (std::size_t i = 0; i < phi.size(); ++i)
    father_[i] = static_cast<double>(phi[i]);
  for (std::int64_t m = 0; m <= last; ++m) {
    long double acc = 0.0L;
    for (int k = 0; k <= support_; ++k) {
      const std::int64_t idx = 2 * m - k * scale;
      if (idx < 0 || idx > last)
        continue;
      acc += highpass_[k] * phi[static_cast<std::size_t>(idx)];
    }
    mother_[static_cast<std::size_t>(m)] = static_cast<double>(root2 * acc);
  }
  // The recursion above is off by an ulp for Haar because h is not exactly
  // representable; use the closed form instead.
  if (order_ == 1)
    for (std::int64_t m = 0; m <= last; ++m) {
      father_[static_cast<std::size_t>(m)] = m < scale ? 1.0 : 0.0;
      mother_[static_cast<std::size_t>(m)] = m < scale / 2 ? 1.0 : (m < scale ? -1.0 : 0.0);
    }
}

//! Builds a Daubechies family with `order` vanishing moments (1 = Haar).
inline FamilyPtr build_family(int order, int dyadic_resolution = 10)
{
  return std::make_shared<const WaveletFamily>(order, dyadic_resolution);
}

//! Parses "dbP" / "haar" / "P" into a Daubechies order.
inline int parse_wavelet_name(const std::string& name)
{
  if (name == "haar")
    return 1;
  std::string digits = name;
  if (digits.rfind("db", 0) == 0)
    digits = digits.substr(2);
  try {
    std::size_t used = 0;
    const int order = std::stoi(digits, &used);
    if (used == digits.size())
      return order;
  } catch (const std::exception&) {
  }
  throw ConfigError("unknown wavelet '" + name + "' (expected dbP or haar)");
}

inline double father_at(const WaveletFamily& family, double x, int level = 0)
{
  return family.father(x, level);
}

inline double mother_at(const WaveletFamily& family, double x, int level = 0)
{
  return family.mother(x, level);
}

inline void check_level(const WaveletFamily& family, int level)
{
  if (level < 0 || level > family.max_level())
    throw ArgumentError("level " + std::to_string(level) + " outside [0, " +
                        std::to_string(family.max_level()) + "] for dyadic resolution " +
                        std::to_string(family.dyadic_resolution()));
}

//! 2^{dj/2} prod_a u_a(2^j x_a - z_a), u_a = mother if bit a of q is set.
inline double tensor_basis_at(const WaveletFamily& family,
                              const BasisIndex& index,
                              std::span<const double> x)
{
  if (index.dim() != x.size())
    throw ArgumentError("basis index dimension does not match the point");
  check_level(family, index.level);
  double value = 1.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const bool mother = ((index.orientation >> a) & 1) != 0;
    value *= family.axis_factor(mother, x[a], index.level, index.translate[a]);
    if (value == 0.0)
      return 0.0;
  }
  const double d = static_cast<double>(x.size());
  return value * std::exp2(0.5 * d * index.level);
}

//! Translates z with 2^j x_a - z_a in [0, 2p - 1) on every axis, in
//! lexicographic order.
inline std::vector<std::vector<int>> supported_translates(const WaveletFamily& family,
                                                          int level,
                                                          std::span<const double> x)
{
  const std::size_t d = x.size();
  const int len = family.support_length();
  std::vector<int> lo(d);
  for (std::size_t a = 0; a < d; ++a)
    lo[a] = static_cast<int>(std::floor(std::ldexp(x[a], level))) - len + 1;

  std::vector<std::vector<int>> out;
  if (d == 0)
    return out;
  std::vector<int> z = lo;
  while (true) {
    out.push_back(z);
    std::size_t a = d;
    while (a-- > 0) {
      if (++z[a] < lo[a] + len)
        break;
      z[a] = lo[a];
      if (a == 0)
        return out;
    }
  }
}

//! Two-scale coefficients c^{(q)}: the tensor product of lowpass (bit clear)
//! and highpass (bit set) taps, so that
//! psi^{(q)}_{j,z} = sum_m c^{(q)}_{m - 2z} phi_{j+1,m}.
inline std::map<std::vector<int>, double> refinement_coefficients(const WaveletFamily& family,
                                                                  int d,
                                                                  int q)
{
  if (d < 1)
    throw ArgumentError("dimension must be >= 1");
  if (q < 0 || q >= (1 << d))
    throw ArgumentError("orientation out of range");
  const int taps = family.support_length() + 1;
  std::map<std::vector<int>, double> out;
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  while (true) {
    double c = 1.0;
    for (int a = 0; a < d; ++a)
      c *= ((q >> a) & 1) ? family.highpass()[k[a]] : family.lowpass()[k[a]];
    out.emplace(k, c);
    int a = d;
    while (a-- > 0) {
      if (++k[a] < taps)
        break;
      k[a] = 0;
      if (a == 0)
        return out;
    }
  }
}

//! Projection kernel K_j(x, y) = sum_z phi_{j,z}(x) phi_{j,z}(y).
inline double approx_kernel(const WaveletFamily& family,
                            int level,
                            std::span<const double> x,
                            std::span<const double> y)
{
  if (x.size() != y.size())
    throw ArgumentError("approx_kernel: points differ in dimension");
  check_level(family, level);
  double sum = 0.0;
  BasisIndex idx{level, {}, 0};
  for (auto& z : supported_translates(family, level, x)) {
    idx.translate = std::move(z);
    const double fx = tensor_basis_at(family, idx, x);
    if (fx == 0.0)
      continue;
    sum += fx * tensor_basis_at(family, idx, y);
  }
  return sum;
}

} // namespace swde
