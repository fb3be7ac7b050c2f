// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "test_support.hpp"

#include <swde/benchmark.hpp>
#include <swde/oracle_checks.hpp>
#include <swde/swde.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace swde;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

constexpr std::uint64_t seed = 20240611;

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome hand_oracle()
{
  const auto haar = build_family(1);
  EstimatorConfig c;
  c.wavelet_order = 1;
  c.J = -1;
  c.normalize = false;
  const auto coeffs = estimate_coefficients(PointSet(1, {0.2, 0.4, 0.7}), c, *haar);
  const double alpha = coeffs.at({0, {0}, 0});
  return {coeffs.size() == 1 && std::fabs(alpha - 1.32867) <= 1e-5, "alpha = " + fmt(alpha)};
}

Outcome cascade()
{
  std::ostringstream why;
  bool ok = true;
  // db2 integer values: phi(1) = sqrt2 (h1 phi(1) + h0 phi(2)) with phi(1) + phi(2) = 1.
  const double s3 = std::sqrt(3.0), r2 = std::sqrt(2.0), den = 4.0 * r2;
  const double h0 = (1 + s3) / den, h1 = (3 + s3) / den;
  const double phi1 = r2 * h0 / (1.0 - r2 * h1 + r2 * h0);
  const auto db2 = build_family(2, 10);
  const double e1 = std::fabs(father_at(*db2, 1.0) - phi1);
  const double e2 = std::fabs(father_at(*db2, 2.0) - (1.0 - phi1));
  ok = ok && e1 <= 1e-10 && e2 <= 1e-10;
  why << "db2 integer error " << fmt(std::max(e1, e2));

  double pou = 0.0, int_phi = 0.0, int_phi2 = 0.0, moment = 0.0;
  for (int p = 1; p <= 10; ++p) {
    const auto f = build_family(p, 10);
    const auto phi = f->father_table();
    const auto psi = f->mother_table();
    const std::size_t unit = std::size_t{1} << 10;
    for (std::size_t m = 0; m < unit; ++m) {
      double acc = 0.0;
      for (std::size_t i = m; i < phi.size(); i += unit)
        acc += phi[i];
      pou = std::max(pou, std::fabs(acc - 1.0));
    }
    double s1 = 0.0, s2 = 0.0;
    for (double v : phi) {
      s1 += v;
      s2 += v * v;
    }
    int_phi = std::max(int_phi, std::fabs(std::ldexp(s1, -10) - 1.0));
    int_phi2 = std::max(int_phi2, std::fabs(std::ldexp(s2, -10) - 1.0));
    if (p <= 8)
      for (int j = 0; j < p; ++j) {
        double acc = 0.0;
        for (std::size_t m = 0; m < psi.size(); ++m)
          acc += std::pow(f->table_abscissa(m), j) * psi[m];
        moment = std::max(moment, std::fabs(std::ldexp(acc, -10)));
      }
  }
  ok = ok && pou <= 1e-8 && int_phi <= 5e-4 && int_phi2 <= 5e-4 && moment <= 1e-6;
  why << ", partition of unity " << fmt(pou) << ", int phi " << fmt(int_phi) << ", int phi^2 "
      << fmt(int_phi2) << ", max moment " << fmt(moment);
  return {ok, why.str()};
}

Outcome dilation()
{
  double worst = 0.0;
  for (int order : {2, 6}) {
    const auto f = build_family(order);
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng rng = make_rng(seed, {3, static_cast<std::uint64_t>(order), s});
      const PointSet p = detail::uniform_unit_square(200, rng);
      const auto stats = knn_stats(p, 1);
      for (int j : {0, 1, 2, 3}) {
        EstimatorConfig fine;
        fine.wavelet_order = order;
        fine.j0 = j + 1;
        fine.J = j;
        fine.normalize = false;
        fine.representation = Representation::single_trend;
        EstimatorConfig coarse = fine;
        coarse.j0 = j;
        coarse.J = j;
        coarse.representation = Representation::trend_plus_details;
        const auto direct = estimate_coefficients(p, coarse, *f, &stats);
        const auto filtered =
          dilation_coefficients(estimate_coefficients(p, fine, *f, &stats), *f);
        worst = std::max(worst, swde::testing::max_entry_difference(direct, filtered));
      }
    }
  }
  return {worst <= 1e-10, "max entry difference " + fmt(worst)};
}

Outcome shape_preservation()
{
  const GridSpec grid = GridSpec::unit(2, 128);
  double min_f = 0.0, mass_err = 0.0;
  int models = 0;
  std::vector<PointSet> samples;
  samples.push_back(swde::testing::uniform_points(300, 2, seed));
  samples.push_back(swde::testing::clustered_points(300, seed));
  for (const char* id : {"a", "b", "c"}) {
    Rng rng = make_rng(seed, {4, static_cast<std::uint64_t>(id[0])});
    samples.push_back(registry_density(id).sample(400, rng));
  }
  bool first = true;
  for (int order : {1, 2, 6}) {
    const auto f = build_family(order);
    for (const auto& p : samples)
      for (int J : {-1, 0, 1, 2, 3})
        for (int k : {1, 2, 8}) {
          EstimatorConfig c;
          c.wavelet_order = order;
          c.J = J;
          c.k = k;
          if (J == 2)
            c.threshold_constant = 0.3;
          const auto model = fit_shape_preserving(p, c, f);
          const Field field = grid_eval(
            [&](std::span<const double> x) { return density_at(model, x); }, grid);
          const double m = min_value(field);
          min_f = first ? m : std::min(min_f, m);
          first = false;
          mass_err = std::max(mass_err, std::fabs(normalization_mass(model.coefficients()) - 1.0));
          ++models;
        }
  }
  // Negativity witness for the classical estimator.
  const auto db6 = build_family(6);
  EstimatorConfig c;
  c.J = 2;
  const auto classical = fit_classical(swde::testing::clustered_points(400, 42), c, db6);
  const double neg = negative_mass(grid_eval(
    [&](std::span<const double> x) { return classical_density_at(classical, x); }, grid));
  const bool ok = min_f >= 0.0 && mass_err <= 1e-10 && neg < 0.0;
  return {ok,
          std::to_string(models) + " models, min f " + fmt(min_f) + ", mass error " +
            fmt(mass_err) + ", classical negative mass " + fmt(neg)};
}

struct LemmaStats
{
  MomentCheck half, one, one_k2;
  bool operator==(const LemmaStats& o) const
  {
    auto same = [](const MomentCheck& a, const MomentCheck& b) {
      return a.empirical_mean == b.empirical_mean && a.standard_error == b.standard_error &&
             a.raw_mean == b.raw_mean;
    };
    return same(half, o.half) && same(one, o.one) && same(one_k2, o.one_k2);
  }
};

LemmaStats lemma_stats(unsigned threads)
{
  return {moment_identity_check(0.5, 1, 1024, 200, seed, threads),
          moment_identity_check(1.0, 1, 1024, 200, seed, threads),
          moment_identity_check(1.0, 2, 1024, 200, seed, threads)};
}

Outcome lemma(const LemmaStats& s)
{
  const double ratio = s.one_k2.raw_mean / s.one.raw_mean;
  const bool ok = std::fabs(s.half.empirical_mean - 1.0) <= 0.05 &&
                  std::fabs(s.one.empirical_mean - 1.0) <= 0.05 && std::fabs(ratio - 2.0) <= 0.2;
  return {ok,
          "a=1/2 mean " + fmt(s.half.empirical_mean) + ", a=1 mean " + fmt(s.one.empirical_mean) +
            ", k2/k1 ratio " + fmt(ratio)};
}

std::vector<double> variance_stats(unsigned threads)
{
  auto var = [](const std::vector<double>& r) {
    double m = 0.0, v = 0.0;
    for (double x : r)
      m += x;
    m /= static_cast<double>(r.size());
    for (double x : r)
      v += (x - m) * (x - m);
    return v / static_cast<double>(r.size() - 1);
  };
  return {var(haar_trend_replicates(256, 1, 500, seed, threads)),
          var(haar_trend_replicates(1024, 1, 500, seed + 1, threads))};
}

Outcome variance(const std::vector<double>& v)
{
  const double ratio = v[0] / v[1];
  return {ratio >= 2.0 && ratio <= 8.0, "Var(n=256)/Var(n=1024) = " + fmt(ratio)};
}

Outcome exp_law(const ExpLawCheck& e)
{
  return {e.ks < 0.03,
          "KS = " + fmt(e.ks) + " over " + std::to_string(e.pooled) + " interior draws"};
}

BenchmarkReport table_report(unsigned threads)
{
  BenchmarkConfig c;
  c.densities = {"b"};
  c.sample_sizes = {128, 512, 2048};
  c.replications = 50;
  c.J_values = {-1, 0, 1, 2, 3};
  c.k_values = {1, 8};
  c.classical = false;
  c.seed = seed;
  c.threads = threads;
  return run_benchmark(c);
}

Outcome table(const BenchmarkReport& r)
{
  auto best = [&](std::size_t n, int k) {
    const BenchmarkRow* b = nullptr;
    for (int J : r.config.J_values) {
      const auto* row = r.find("b", n, J, k, EstimatorKind::shape_preserving);
      if (row && !row->failed && (!b || row->mise < b->mise))
        b = row;
    }
    return b;
  };
  std::ostringstream why;
  bool decreasing = true, argmin_ok = true;
  const BenchmarkRow* prev = nullptr;
  why << "best (J+1, MISE +- SE) at k=1:";
  for (std::size_t n : r.config.sample_sizes) {
    const BenchmarkRow* b = best(n, 1);
    if (!b)
      return {false, "missing rows"};
    why << " n=" << n << " (" << b->J + 1 << ", " << fmt(b->mise) << " +- " << fmt(b->mise_se)
        << ")";
    if (prev) {
      const double se = std::hypot(prev->mise_se, b->mise_se);
      decreasing = decreasing && prev->mise - b->mise > 2.0 * se;
      argmin_ok = argmin_ok && b->J >= prev->J;
    }
    prev = b;
  }
  const BenchmarkRow* k1 = best(512, 1);
  const BenchmarkRow* k8 = best(512, 8);
  const double se = std::hypot(k1->mise_se, k8->mise_se);
  const bool k_ok = k1->mise <= k8->mise + 2.0 * se;
  why << "; (i) " << (decreasing ? "ok" : "fails") << ", (ii) " << (argmin_ok ? "ok" : "fails")
      << ", (iii) n=512 best MISE k=1 " << fmt(k1->mise) << " vs k=8 " << fmt(k8->mise)
      << " + 2 SE " << fmt(2.0 * se) << " -> " << (k_ok ? "ok" : "fails");
  return {decreasing && argmin_ok && k_ok, why.str()};
}

bool same_report(const BenchmarkReport& a, const BenchmarkReport& b)
{
  if (a.rows.size() != b.rows.size())
    return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto &x = a.rows[i], &y = b.rows[i];
    if (x.mise != y.mise || !(x.mise_se == y.mise_se || (std::isnan(x.mise_se) && std::isnan(y.mise_se))) ||
        x.mean_negative_mass != y.mean_negative_mass || x.failed != y.failed)
      return false;
  }
  return true;
}

bool same_exp(const ExpLawCheck& a, const ExpLawCheck& b)
{
  return a.ks == b.ks && a.pooled == b.pooled;
}

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body)
{
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass)
    ++failures;
  std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

} // namespace

int main()
{
  report(1, "hand-oracle coefficient", hand_oracle);
  report(2, "cascade correctness", cascade);
  report(3, "dilation identity", dilation);
  report(4, "shape preservation", shape_preservation);

  LemmaStats lemma1;
  std::vector<double> var1;
  ExpLawCheck exp1;
  BenchmarkReport table1;
  report(5, "moment identity", [&] {
    lemma1 = lemma_stats(1);
    return lemma(lemma1);
  });
  report(6, "variance scaling", [&] {
    var1 = variance_stats(1);
    return variance(var1);
  });
  report(7, "exponential limit law", [&] {
    exp1 = exp_law_check(4096, 50, seed, 1);
    return exp_law(exp1);
  });
  report(8, "scaled MISE protocol", [&] {
    table1 = table_report(1);
    return table(table1);
  });
  report(9, "determinism", [&] {
    const unsigned many = std::max(4u, std::thread::hardware_concurrency());
    bool ok = true;
    std::ostringstream why;
    for (unsigned t : {1u, many}) {
      const bool l = lemma_stats(t) == lemma1;
      const bool v = variance_stats(t) == var1;
      const bool e = same_exp(exp_law_check(4096, 50, seed, t), exp1);
      const bool b = same_report(table_report(t), table1);
      ok = ok && l && v && e && b;
      why << t << " thread(s): " << (l && v && e && b ? "identical" : "differs") << "; ";
    }
    return Outcome{ok, why.str()};
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
