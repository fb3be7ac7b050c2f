// swde: fit, evaluate and benchmark shape-preserving wavelet density estimates.

#include <swde/benchmark.hpp>
#include <swde/io.hpp>
#include <swde/oracle_checks.hpp>
#include <swde/swde.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace swde;
using io::json;

namespace {

json g_provenance;

json provenance(const std::string& command, std::optional<std::uint64_t> seed)
{
  json p = g_provenance;
  p["command"] = command;
  p["seed"] = seed ? json(*seed) : json(nullptr);
  return p;
}

// Opens `path` for writing, or hands back stdout for "-".
class Output
{
public:
  explicit Output(const std::string& path)
  {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw DataError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

void warn(const std::string& message)
{
  std::cerr << "swde: warning: " << message << '\n';
}

void write_check_line(bool pass, const std::string& name, const std::string& detail)
{
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
}

std::string num(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ------------------------------------------------------------------ fit

struct FitOptions
{
  std::string input;
  std::string output = "-";
  std::string wavelet = "db6";
  int j0 = 0;
  int J = 1;
  int k = 1;
  std::optional<double> threshold;
  bool no_normalize = false;
  bool rescale = false;
  double padding = 0.05;
  std::optional<std::size_t> dim;
  std::size_t grid = 0;
  std::string grid_out;
  int resolution = 12;
  bool classical = false;
  std::optional<std::uint64_t> seed;
  std::size_t threads = default_thread_count();
};

int run_fit(const FitOptions& o)
{
  const auto table = io::read_points_csv_file(o.input, o.dim);
  PointSet points = table.points;
  const std::size_t d = points.dim();

  EstimatorConfig config;
  config.wavelet_order = parse_wavelet_name(o.wavelet);
  config.j0 = o.j0;
  config.J = o.J;
  config.k = o.k;
  config.normalize = !o.no_normalize;
  config.threshold_constant = o.threshold;
  config.dyadic_resolution = o.resolution;
  config.domain = Box::unit(d);

  std::optional<AffineMap> affine;
  if (o.rescale) {
    auto r = rescale_to_domain(points, config.domain, o.padding, true);
    points = std::move(r.points);
    affine = r.map;
  }
  const auto family = build_family(config.wavelet_order, config.dyadic_resolution);
  config.validate(*family);
  const unsigned threads = static_cast<unsigned>(std::max<std::size_t>(1, o.threads));

  std::optional<DensityModel> model;
  if (o.classical) {
    const GridSpec grid{config.domain, o.grid >= 2 ? o.grid : 128};
    model.emplace(rescale_classical(fit_classical(points, config, family), grid, threads));
  } else {
    if (const auto verdict = validate_k(points.size(), config.k); !verdict.ok)
      warn(verdict.message);
    model.emplace(fit_shape_preserving(points, config, family));
  }

  json prov = provenance("fit", o.seed);
  prov["input"] = o.input;
  prov["config"] = {{"wavelet", "db" + std::to_string(config.wavelet_order)},
                    {"j0", config.j0},
                    {"J", config.J},
                    {"k", config.k},
                    {"threshold", o.threshold ? json(*o.threshold) : json(nullptr)},
                    {"normalize", config.normalize},
                    {"rescale", o.rescale},
                    {"padding", o.rescale ? json(o.padding) : json(nullptr)},
                    {"estimator", o.classical ? "classical" : "shape-preserving"}};
  {
    Output out(o.output);
    out.stream() << io::to_json(io::ModelFile{model->coefficients(), config.dyadic_resolution,
                                              affine, prov})
                      .dump(2)
                 << '\n';
  }
  if (o.grid >= 2 && !o.grid_out.empty()) {
    const GridSpec grid{config.domain, o.grid};
    const Field field = grid_eval(
      [&](std::span<const double> x) { return model->density_at(x); }, grid, threads);
    Output out(o.grid_out);
    io::write_field_csv(out.stream(), field, prov);
  } else if (o.grid >= 2) {
    warn("--grid given without --grid-out; no grid written");
  }
  std::cerr << "swde: fitted " << model->coefficients().size() << " coefficients from "
            << points.size() << " points (d = " << d << ")\n";
  return 0;
}

// ----------------------------------------------------------------- eval

struct EvalOptions
{
  std::string model;
  std::string points;
  std::size_t grid = 0;
  std::string output = "-";
  std::size_t threads = default_thread_count();
};

int run_eval(const EvalOptions& o)
{
  const auto file = io::model_from_json(io::read_json_file(o.model));
  const auto& meta = file.coefficients.meta;
  const auto family = build_family(meta.wavelet_order, file.dyadic_resolution);
  const DensityModel model(family, file.coefficients);
  const std::size_t d = static_cast<std::size_t>(meta.d);
  const double jac = file.affine ? file.affine->jacobian() : 1.0;

  // Points are given in data coordinates; the model lives on its domain.
  auto to_model = [&](std::span<const double> x) {
    return file.affine ? file.affine->apply(x) : std::vector<double>(x.begin(), x.end());
  };

  std::vector<double> coords;
  if (!o.points.empty()) {
    const auto table = io::read_points_csv_file(o.points);
    if (table.points.dim() != d)
      throw DataError("points have " + std::to_string(table.points.dim()) +
                      " columns but the model has d = " + std::to_string(d));
    coords = table.points.coords();
  } else {
    // Cell centres of the model domain, mapped back to data coordinates.
    Box box = meta.domain;
    if (file.affine)
      for (std::size_t a = 0; a < d; ++a) {
        box.lower[a] = (meta.domain.lower[a] - file.affine->offset[a]) / file.affine->scale[a];
        box.upper[a] = (meta.domain.upper[a] - file.affine->offset[a]) / file.affine->scale[a];
      }
    const GridSpec grid{box, o.grid};
    grid.validate();
    std::vector<double> x(d);
    coords.reserve(grid.cell_count() * d);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      grid.cell_center(c, x);
      coords.insert(coords.end(), x.begin(), x.end());
    }
  }
  const std::size_t count = coords.size() / d;
  std::vector<double> g(count), f(count);
  parallel_for(count, static_cast<unsigned>(std::max<std::size_t>(1, o.threads)), [&](std::size_t i) {
    const auto y = to_model(std::span<const double>(coords).subspan(i * d, d));
    g[i] = model.expansion_at(y);
    f[i] = (model.kind() == EstimatorKind::shape_preserving ? g[i] * g[i] : g[i]) * jac;
  });

  json prov = provenance("eval", std::nullopt);
  prov["model"] = o.model;
  prov["model_provenance"] = file.provenance;
  Output out(o.output);
  auto& s = out.stream();
  io::write_provenance_comment(s, prov);
  for (std::size_t a = 0; a < d; ++a)
    s << 'x' << (a + 1) << ',';
  s << "g,f\n";
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t a = 0; a < d; ++a)
      s << io::format_double(coords[i * d + a]) << ',';
    s << io::format_double(g[i]) << ',' << io::format_double(f[i]) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchOptions
{
  std::string config;
  std::uint64_t seed = 0;
  std::string output = "-";
  std::string csv;
  std::optional<std::size_t> replications;
  std::size_t threads = default_thread_count();
};

int run_bench(const BenchOptions& o)
{
  BenchmarkConfig config;
  if (!o.config.empty())
    config = io::benchmark_config_from_json(io::read_json_file(o.config));
  config.seed = o.seed;
  if (o.replications)
    config.replications = *o.replications;
  config.threads = static_cast<unsigned>(std::max<std::size_t>(1, o.threads));
  for (std::size_t n : config.sample_sizes)
    for (int k : config.k_values)
      if (config.shape_preserving && static_cast<std::size_t>(k) < n)
        if (const auto verdict = validate_k(n, k); !verdict.ok)
          warn(verdict.message);

  std::cerr << "swde: running benchmark (" << config.densities.size() << " densities x "
            << config.sample_sizes.size() << " sample sizes x " << config.replications
            << " replications, " << config.threads << " thread(s))\n";
  const BenchmarkReport report = run_benchmark(config);

  json j = io::to_json(report);
  j["provenance"]["command"] = "bench";
  j["provenance"]["tool"] = g_provenance;
  {
    Output out(o.output);
    out.stream() << j.dump(2) << '\n';
  }
  if (!o.csv.empty()) {
    Output out(o.csv);
    io::write_report_csv(out.stream(), report);
  }
  if (report.any_failed()) {
    for (const auto& row : report.rows)
      if (row.failed)
        std::cerr << "swde: row failed (density " << row.density << ", n " << row.n << ", J "
                  << row.J << ", k " << row.k << ", " << to_string(row.estimator)
                  << "): " << row.error << '\n';
    return static_cast<int>(ExitCode::data);
  }
  return 0;
}

// ---------------------------------------------------------------- check

struct CheckOptions
{
  std::string suite;
  std::optional<std::uint64_t> seed;
  std::size_t n = 0;
  std::size_t replications = 0;
  int k = 1;
  std::string input;
  std::string output = "-";
  int resolution = 10;
  std::size_t threads = default_thread_count();
};

bool check_wavelet(const CheckOptions& o)
{
  bool all = true;
  for (int p = 1; p <= detail::max_daubechies_order; ++p) {
    const auto f = build_family(p, o.resolution);
    const auto h = f->lowpass();
    double orth = 0.0, sum = 0.0;
    for (double v : h)
      sum += v;
    orth = std::fabs(sum - std::sqrt(2.0));
    for (std::size_t m = 0; 2 * m < h.size(); ++m) {
      double acc = 0.0;
      for (std::size_t i = 0; i + 2 * m < h.size(); ++i)
        acc += h[i] * h[i + 2 * m];
      orth = std::max(orth, std::fabs(acc - (m == 0 ? 1.0 : 0.0)));
    }
    const auto phi = f->father_table();
    const auto psi = f->mother_table();
    const std::size_t unit = std::size_t{1} << o.resolution;
    double pou = 0.0;
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
    const double i1 = std::fabs(std::ldexp(s1, -o.resolution) - 1.0);
    const double i2 = std::fabs(std::ldexp(s2, -o.resolution) - 1.0);
    double moment = 0.0;
    for (int j = 0; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < psi.size(); ++m)
        acc += std::pow(f->table_abscissa(m), j) * psi[m];
      moment = std::max(moment, std::fabs(std::ldexp(acc, -o.resolution)));
    }
    const bool integrals = o.resolution < 10 || (i1 <= 5e-4 && i2 <= 5e-4);
    const bool pass = orth <= 1e-12 && pou <= 1e-8 && integrals && moment <= 1e-6;
    all = all && pass;
    write_check_line(pass,
                     "wavelet db" + std::to_string(p),
                     "filter " + num(orth) + ", partition of unity " + num(pou) + ", int phi " +
                       num(i1) + ", int phi^2 " + num(i2) + ", max |moment| " + num(moment));
  }
  return all;
}

bool check_dilation(const CheckOptions& o)
{
  const std::size_t n = o.n ? o.n : 200;
  const std::size_t samples = o.replications ? o.replications : 20;
  bool all = true;
  for (int order : {2, 6}) {
    const auto f = build_family(order);
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      Rng rng = make_rng(*o.seed, {static_cast<std::uint64_t>(order), s});
      const PointSet p = detail::uniform_unit_square(n, rng);
      const auto stats = knn_stats(p, o.k);
      EstimatorConfig fine;
      fine.wavelet_order = order;
      fine.k = o.k;
      fine.j0 = 3;
      fine.J = 2;
      fine.normalize = false;
      fine.representation = Representation::single_trend;
      EstimatorConfig coarse = fine;
      coarse.j0 = 2;
      coarse.representation = Representation::trend_plus_details;
      const auto direct = estimate_coefficients(p, coarse, *f, &stats);
      const auto filtered = dilation_coefficients(estimate_coefficients(p, fine, *f, &stats), *f);
      for (const auto& [idx, v] : direct.entries)
        worst = std::max(worst, std::fabs(v - filtered.at(idx)));
      for (const auto& [idx, v] : filtered.entries)
        worst = std::max(worst, std::fabs(v - direct.at(idx)));
    }
    const bool pass = worst <= 1e-10;
    all = all && pass;
    write_check_line(pass,
                     "dilation db" + std::to_string(order),
                     std::to_string(samples) + " samples of n = " + std::to_string(n) +
                       ", max |direct - filtered| = " + num(worst));
  }
  return all;
}

bool check_lemma(const CheckOptions& o, unsigned threads)
{
  const std::size_t n = o.n ? o.n : 1024;
  const std::size_t reps = o.replications ? o.replications : 200;
  bool all = true;
  MomentCheck base;
  for (const auto& [a, k] : std::vector<std::pair<double, int>>{{0.5, 1}, {1.0, 1}, {1.0, 2}}) {
    const auto m = moment_identity_check(a, k, n, reps, *o.seed, threads);
    if (a == 1.0 && k == 1)
      base = m;
    const bool pass = std::fabs(m.empirical_mean - 1.0) <= 0.05;
    all = all && pass;
    write_check_line(pass,
                     "lemma-a1 a=" + num(a) + " k=" + std::to_string(k),
                     "normalised mean " + num(m.empirical_mean) + " (target 1, tolerance 0.05), SE " +
                       num(m.standard_error) + ", z " + num(m.z_score));
    if (a == 1.0 && k == 2) {
      const double ratio = m.raw_mean / base.raw_mean;
      const bool ok = std::fabs(ratio - 2.0) <= 0.2;
      all = all && ok;
      write_check_line(ok, "lemma-a1 ratio", "k=2 / k=1 at a=1: " + num(ratio) + " (target 2)");
    }
  }
  return all;
}

bool check_exp(const CheckOptions& o, unsigned threads)
{
  const std::size_t n = o.n ? o.n : 4096;
  const std::size_t reps = o.replications ? o.replications : 50;
  const auto e = exp_law_check(n, reps, *o.seed, threads);
  const bool pass = e.ks < 0.03;
  write_check_line(pass,
                   "exp-law",
                   "KS distance of n V_(1) to Exp(1) = " + num(e.ks) + " over " +
                     std::to_string(e.pooled) + " interior draws (n = " + std::to_string(n) +
                     ", p = " + num(e.p_value) + ")");
  return pass;
}

void check_knn(const CheckOptions& o)
{
  if (o.input.empty())
    throw ArgumentError("check knn needs --input");
  const auto points = io::read_points_csv_file(o.input).points;
  const auto stats = knn_stats(points, o.k);
  Output out(o.output);
  auto& s = out.stream();
  json prov = provenance("check knn", std::nullopt);
  prov["input"] = o.input;
  prov["k"] = o.k;
  io::write_provenance_comment(s, prov);
  s << "index,radius,volume\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    s << i << ',' << io::format_double(stats.radii[i]) << ','
      << io::format_double(stats.volumes[i]) << '\n';
}

int run_check(const CheckOptions& o)
{
  const unsigned threads = static_cast<unsigned>(std::max<std::size_t>(1, o.threads));
  const bool stochastic = o.suite == "dilation" || o.suite == "lemma-a1" || o.suite == "exp-law";
  if (stochastic && !o.seed)
    throw ArgumentError("check " + o.suite + " draws random samples; --seed is required");
  if (o.suite == "knn") {
    check_knn(o);
    return 0;
  }
  std::cout << "# " << provenance("check " + o.suite, o.seed).dump() << '\n';
  bool pass = false;
  if (o.suite == "wavelet")
    pass = check_wavelet(o);
  else if (o.suite == "dilation")
    pass = check_dilation(o);
  else if (o.suite == "lemma-a1")
    pass = check_lemma(o, threads);
  else if (o.suite == "exp-law")
    pass = check_exp(o, threads);
  return pass ? 0 : static_cast<int>(ExitCode::numeric);
}

// -------------------------------------------------------- wavelet-table

int run_table(const std::string& wavelet, int resolution, const std::string& output)
{
  const auto family = build_family(parse_wavelet_name(wavelet), resolution);
  Output out(output);
  auto& s = out.stream();
  json prov = provenance("wavelet-table", std::nullopt);
  prov["wavelet"] = "db" + std::to_string(family->order());
  prov["dyadic_resolution"] = resolution;
  io::write_provenance_comment(s, prov);
  s << "x,phi,psi\n";
  const auto phi = family->father_table();
  const auto psi = family->mother_table();
  for (std::size_t m = 0; m < phi.size(); ++m)
    s << io::format_double(family->table_abscissa(m)) << ',' << io::format_double(phi[m]) << ','
      << io::format_double(psi[m]) << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Shape-preserving wavelet density estimation"};
  app.set_version_flag("--version", std::string(library_version));
  app.require_subcommand(1);

  g_provenance = {{"tool", "swde"}, {"version", library_version}};
  std::vector<std::string> args(argv, argv + argc);
  g_provenance["argv"] = args;

  auto add_threads = [](CLI::App* sub, std::size_t& threads) {
    sub->add_option("--threads", threads, "Worker threads (default: available cores)")
      ->check(CLI::PositiveNumber);
  };

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a density model to a CSV point set");
  fit_cmd->add_option("input", fit.input, "CSV file of points, one per row")->required();
  fit_cmd->add_option("-o,--output", fit.output, "Coefficient JSON file ('-' for stdout)");
  fit_cmd->add_option("--wavelet", fit.wavelet, "Daubechies family: db1 (haar) ... db10");
  fit_cmd->add_option("--j0", fit.j0, "Base (trend) level");
  fit_cmd->add_option("--J", fit.J, "Top detail level; j0 - 1 keeps the trend only");
  fit_cmd->add_option("--k", fit.k, "Nearest-neighbour rank");
  fit_cmd->add_option("--threshold", fit.threshold, "Soft-threshold constant C");
  fit_cmd->add_flag("--no-normalize", fit.no_normalize, "Skip the unit-mass normalisation");
  fit_cmd->add_flag("--rescale", fit.rescale, "Map the data's bounding box into the unit cube");
  fit_cmd->add_option("--padding", fit.padding, "Relative padding used by --rescale");
  fit_cmd->add_option("--dim", fit.dim, "Expected number of columns");
  fit_cmd->add_option("--grid", fit.grid, "Grid resolution for --grid-out");
  fit_cmd->add_option("--grid-out", fit.grid_out, "Write the fitted density on the grid as CSV");
  fit_cmd->add_option("--resolution", fit.resolution, "Dyadic resolution of the wavelet tables");
  fit_cmd->add_flag("--classical", fit.classical, "Fit the classical linear estimator instead");
  fit_cmd->add_option("--seed", fit.seed, "Recorded in the provenance (fitting is deterministic)");
  add_threads(fit_cmd, fit.threads);

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a fitted model at points or on a grid");
  eval_cmd->add_option("model", ev.model, "Coefficient JSON file")->required();
  auto* pts_opt = eval_cmd->add_option("--points", ev.points, "CSV file of query points");
  auto* grid_opt = eval_cmd->add_option("--grid", ev.grid, "Evaluate on a regular grid");
  pts_opt->excludes(grid_opt);
  eval_cmd->add_option("-o,--output", ev.output, "Output CSV ('-' for stdout)");
  add_threads(eval_cmd, ev.threads);

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the Monte-Carlo MISE benchmark");
  bench_cmd->add_option("config", bench.config, "Benchmark config JSON (default: desk-scale)");
  bench_cmd->add_option("--seed", bench.seed, "Master seed")->required();
  bench_cmd->add_option("-o,--output", bench.output, "Report JSON ('-' for stdout)");
  bench_cmd->add_option("--csv", bench.csv, "Also write the MISE table as CSV");
  bench_cmd->add_option("--replications", bench.replications, "Override M");
  add_threads(bench_cmd, bench.threads);

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "Run a built-in verification suite");
  check_cmd->add_option("suite", check.suite, "wavelet | dilation | lemma-a1 | exp-law | knn")
    ->required()
    ->check(CLI::IsMember({"wavelet", "dilation", "lemma-a1", "exp-law", "knn"}));
  check_cmd->add_option("--seed", check.seed, "Master seed (required by stochastic suites)");
  check_cmd->add_option("--n", check.n, "Sample size");
  check_cmd->add_option("--replications", check.replications, "Number of replications");
  check_cmd->add_option("--k", check.k, "Nearest-neighbour rank (knn, dilation)");
  check_cmd->add_option("--input", check.input, "Point CSV (knn)");
  check_cmd->add_option("-o,--output", check.output, "Output CSV for knn ('-' for stdout)");
  check_cmd->add_option("--resolution", check.resolution, "Dyadic resolution (wavelet)");
  add_threads(check_cmd, check.threads);

  std::string tw = "db6", to = "-";
  int tr = 10;
  auto* table_cmd = app.add_subcommand("wavelet-table", "Dump tabulated father/mother values");
  table_cmd->add_option("--wavelet", tw, "Daubechies family");
  table_cmd->add_option("--resolution", tr, "Dyadic resolution r (values at m / 2^r)");
  table_cmd->add_option("-o,--output", to, "Output CSV ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    if (fit_cmd->parsed())
      return run_fit(fit);
    if (eval_cmd->parsed()) {
      if (ev.points.empty() && ev.grid == 0)
        throw ArgumentError("eval needs --points or --grid");
      return run_eval(ev);
    }
    if (bench_cmd->parsed())
      return run_bench(bench);
    if (check_cmd->parsed())
      return run_check(check);
    if (table_cmd->parsed())
      return run_table(tw, tr, to);
  } catch (const Error& e) {
    std::cerr << "swde: error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "swde: error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numeric);
  }
  return static_cast<int>(ExitCode::usage);
}
