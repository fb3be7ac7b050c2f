#pragma once

#include "simulation.hpp"

#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace swde {

inline constexpr const char* library_version = "0.1.0";

struct BenchmarkConfig
{
  std::vector<std::string> densities{"a", "b", "c"};
  std::vector<std::size_t> sample_sizes{128, 512, 2048};
  std::size_t replications = 50;
  std::vector<int> J_values{-1, 0, 1, 2, 3};
  std::vector<int> k_values{1, 2, 4, 8};
  int wavelet_order = 6;
  int j0 = 0;
  int dyadic_resolution = 12;
  std::size_t grid_resolution = 128;
  std::uint64_t seed = 0;
  bool shape_preserving = true;
  bool classical = true;
  //! Worker threads; results do not depend on it.
  unsigned threads = 1;

  void validate() const
  {
    if (densities.empty() || sample_sizes.empty() || J_values.empty() || k_values.empty())
      throw ConfigError("benchmark sweep axes must be non-empty");
    if (replications < 1)
      throw ConfigError("benchmark needs at least one replication");
    if (!shape_preserving && !classical)
      throw ConfigError("benchmark needs at least one estimator");
    if (grid_resolution < 2)
      throw ConfigError("grid resolution must be >= 2");
    for (int J : J_values)
      if (J < j0 - 1)
        throw ConfigError("J values must be >= j0 - 1");
  }
};

struct BenchmarkRow
{
  std::string density;
  std::size_t n = 0;
  int J = 0;
  int k = 1;
  EstimatorKind estimator = EstimatorKind::shape_preserving;
  double mise = 0.0;
  double mise_se = 0.0;
  double mean_negative_mass = 0.0;
  double wall_seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct BenchmarkReport
{
  BenchmarkConfig config;
  std::string version = library_version;
  std::vector<BenchmarkRow> rows;

  bool any_failed() const
  {
    for (const auto& r : rows)
      if (r.failed)
        return true;
    return false;
  }

  const BenchmarkRow* find(const std::string& density,
                           std::size_t n,
                           int J,
                           int k,
                           EstimatorKind kind) const
  {
    for (const auto& r : rows)
      if (r.density == density && r.n == n && r.J == J && r.k == k && r.estimator == kind)
        return &r;
    return nullptr;
  }
};

namespace detail {

struct CellResult
{
  double ise = 0.0;
  double negative_mass = 0.0;
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

} // namespace detail

//! Monte-Carlo MISE sweep over densities x n x J x k x estimator. Each
//! replication draws one sample from its own substream (seed, density, n,
//! replication) shared by every J, k and estimator, so comparisons across
//! those axes are paired. Reduction runs in a fixed order: the report is
//! independent of `threads` apart from the wall-time fields.
inline BenchmarkReport run_benchmark(const BenchmarkConfig& config)
{
  config.validate();
  const auto family = build_family(config.wavelet_order, config.dyadic_resolution);

  std::vector<MixtureSpec> specs;
  std::vector<Field> truths;
  for (const auto& id : config.densities) {
    specs.push_back(registry_density(id));
    truths.push_back(true_density_field(
      specs.back(), GridSpec{specs.back().domain(), config.grid_resolution}));
  }

  const std::size_t n_d = specs.size(), n_n = config.sample_sizes.size(),
                    n_J = config.J_values.size(), n_k = config.k_values.size(),
                    M = config.replications;
  // Per task (density, n, replication): results indexed [J][k] for the
  // shape-preserving estimator and [J] for the classical one.
  struct TaskResult
  {
    std::vector<detail::CellResult> sp;
    std::vector<detail::CellResult> cl;
  };
  std::vector<TaskResult> results(n_d * n_n * M);

  parallel_for(results.size(), config.threads, [&](std::size_t task) {
    const std::size_t rep = task % M;
    const std::size_t ni = (task / M) % n_n;
    const std::size_t di = task / (M * n_n);
    const std::size_t n = config.sample_sizes[ni];
    const MixtureSpec& spec = specs[di];
    const Field& truth = truths[di];
    const GridSpec& grid = truth.grid;
    TaskResult& out = results[task];
    out.sp.resize(n_J * n_k);
    out.cl.resize(n_J);

    Rng rng = make_rng(config.seed, {di, n, rep});
    const PointSet points = spec.sample(n, rng);

    auto base_config = [&](int J) {
      EstimatorConfig ec;
      ec.wavelet_order = config.wavelet_order;
      ec.j0 = config.j0;
      ec.J = J;
      ec.normalize = true;
      ec.domain = spec.domain();
      ec.dyadic_resolution = config.dyadic_resolution;
      // g_J equals the father-only expansion at J + 1; the ISE only needs g.
      ec.representation = Representation::single_trend;
      return ec;
    };
    using clock = std::chrono::steady_clock;

    if (config.shape_preserving) {
      for (std::size_t ki = 0; ki < n_k; ++ki) {
        const int k = config.k_values[ki];
        std::optional<NeighborStats> stats;
        std::string stats_error;
        const auto t0 = clock::now();
        try {
          stats = knn_stats(points, k);
        } catch (const Error& e) {
          stats_error = e.what();
        }
        const double knn_seconds = std::chrono::duration<double>(clock::now() - t0).count();
        for (std::size_t Ji = 0; Ji < n_J; ++Ji) {
          auto& cell = out.sp[Ji * n_k + ki];
          if (!stats) {
            cell.failed = true;
            cell.error = stats_error;
            continue;
          }
          const auto t1 = clock::now();
          try {
            EstimatorConfig ec = base_config(config.J_values[Ji]);
            ec.k = k;
            const DensityModel model = fit_shape_preserving(points, ec, family, &*stats);
            const Field est = grid_eval(
              [&](std::span<const double> x) { return model.density_at(x); }, grid);
            cell.ise = ise(est, truth);
            cell.negative_mass = negative_mass(est);
          } catch (const Error& e) {
            cell.failed = true;
            cell.error = e.what();
          }
          cell.seconds =
            knn_seconds / static_cast<double>(n_J) +
            std::chrono::duration<double>(clock::now() - t1).count();
        }
      }
    }
    if (config.classical) {
      for (std::size_t Ji = 0; Ji < n_J; ++Ji) {
        auto& cell = out.cl[Ji];
        const auto t1 = clock::now();
        try {
          const DensityModel raw = fit_classical(points, base_config(config.J_values[Ji]), family);
          const DensityModel model = rescale_classical(raw, grid);
          const Field est = grid_eval(
            [&](std::span<const double> x) { return model.density_at(x); }, grid);
          cell.ise = ise(est, truth);
          cell.negative_mass = negative_mass(est);
        } catch (const Error& e) {
          cell.failed = true;
          cell.error = e.what();
        }
        cell.seconds = std::chrono::duration<double>(clock::now() - t1).count();
      }
    }
  });

  BenchmarkReport report;
  report.config = config;
  auto reduce = [&](std::size_t di, std::size_t ni, auto&& pick, BenchmarkRow row) {
    std::vector<double> ises;
    ises.reserve(M);
    double neg = 0.0;
    for (std::size_t rep = 0; rep < M; ++rep) {
      const detail::CellResult& c = pick(results[(di * n_n + ni) * M + rep]);
      row.wall_seconds += c.seconds;
      if (c.failed) {
        row.failed = true;
        if (row.error.empty())
          row.error = c.error;
        continue;
      }
      ises.push_back(c.ise);
      neg += c.negative_mass;
    }
    if (!row.failed) {
      const MiseEstimate m = mise_aggregate(ises);
      row.mise = m.mean;
      row.mise_se = m.standard_error;
      row.mean_negative_mass = neg / static_cast<double>(M);
    }
    report.rows.push_back(std::move(row));
  };

  for (std::size_t di = 0; di < n_d; ++di)
    for (std::size_t ni = 0; ni < n_n; ++ni)
      for (std::size_t Ji = 0; Ji < n_J; ++Ji)
        for (std::size_t ki = 0; ki < n_k; ++ki) {
          BenchmarkRow row;
          row.density = config.densities[di];
          row.n = config.sample_sizes[ni];
          row.J = config.J_values[Ji];
          row.k = config.k_values[ki];
          if (config.shape_preserving) {
            row.estimator = EstimatorKind::shape_preserving;
            reduce(
              di, ni, [&](const TaskResult& t) -> const detail::CellResult& { return t.sp[Ji * n_k + ki]; }, row);
          }
          if (config.classical) {
            // The classical estimator does not use k; its rows repeat per k.
            row.estimator = EstimatorKind::classical;
            reduce(
              di, ni, [&](const TaskResult& t) -> const detail::CellResult& { return t.cl[Ji]; }, row);
          }
        }
  return report;
}

} // namespace swde
