#pragma once

#include "benchmark.hpp"
#include "coefficients.hpp"
#include "errors.hpp"
#include "evaluation_metrics.hpp"
#include "geometry.hpp"
#include "sqrt_density_estimator.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace swde::io {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

// ---------------------------------------------------------------- CSV

struct CsvTable
{
  std::vector<std::string> header; // empty when the file has none
  PointSet points;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos)
      return out;
    start = comma + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s)
{
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

} // namespace detail

//! Reads comma-separated reals. Lines starting with '#' and blank lines are
//! skipped; the first remaining line is a header iff it is not numeric.
//! `dim`, when given, must match the column count.
inline CsvTable read_points_csv(std::istream& in, std::optional<std::size_t> dim = std::nullopt)
{
  CsvTable table;
  std::vector<double> coords;
  std::size_t cols = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = detail::trim(line);
    if (view.empty() || view.front() == '#')
      continue;
    const auto fields = detail::split(view);
    std::vector<double> row;
    bool numeric = true;
    for (auto f : fields) {
      const auto v = detail::parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (first) {
      first = false;
      cols = fields.size();
      if (!numeric) {
        for (auto f : fields)
          table.header.emplace_back(f);
        continue;
      }
    }
    if (!numeric)
      throw DataError("line " + std::to_string(line_no) + ": non-numeric field");
    if (row.size() != cols)
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                      " columns, found " + std::to_string(row.size()));
    for (double v : row)
      if (!std::isfinite(v))
        throw DataError("line " + std::to_string(line_no) + ": non-finite value");
    coords.insert(coords.end(), row.begin(), row.end());
  }
  if (cols == 0)
    throw DataError("CSV input is empty");
  if (dim && *dim != cols)
    throw DataError("expected " + std::to_string(*dim) + " columns, found " + std::to_string(cols));
  table.points = PointSet(cols, std::move(coords));
  return table;
}

inline CsvTable read_points_csv_file(const std::string& path,
                                     std::optional<std::size_t> dim = std::nullopt)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open '" + path + "'");
  return read_points_csv(in, dim);
}

//! Shortest decimal form that reads back to the same double.
inline std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_provenance_comment(std::ostream& out, const json& provenance)
{
  out << "# " << provenance.dump() << '\n';
}

//! Field as CSV rows x_1,...,x_d,value.
inline void write_field_csv(std::ostream& out, const Field& field, const json& provenance)
{
  write_provenance_comment(out, provenance);
  const std::size_t d = field.grid.dim();
  for (std::size_t a = 0; a < d; ++a)
    out << 'x' << (a + 1) << ',';
  out << "value\n";
  std::vector<double> x(d);
  for (std::size_t c = 0; c < field.values.size(); ++c) {
    field.grid.cell_center(c, x);
    for (double v : x)
      out << format_double(v) << ',';
    out << format_double(field.values[c]) << '\n';
  }
}

// ------------------------------------------------------ coefficient file

inline json box_to_json(const Box& box)
{
  return json{{"lower", box.lower}, {"upper", box.upper}};
}

inline Box box_from_json(const json& j)
{
  return Box{j.at("lower").get<std::vector<double>>(), j.at("upper").get<std::vector<double>>()};
}

struct ModelFile
{
  CoefficientSet coefficients;
  int dyadic_resolution = 12;
  std::optional<AffineMap> affine; //!< data -> estimation domain, if rescaled
  json provenance = json::object();
};

inline json to_json(const ModelFile& file)
{
  const auto& m = file.coefficients.meta;
  json j;
  j["schema_version"] = schema_version;
  j["kind"] = to_string(m.kind);
  j["d"] = m.d;
  j["n"] = m.n;
  j["k"] = m.k;
  j["j0"] = m.j0;
  j["J"] = m.J;
  j["wavelet_order"] = m.wavelet_order;
  j["dyadic_resolution"] = file.dyadic_resolution;
  j["normalized"] = m.normalized;
  j["representation"] = to_string(m.representation);
  j["domain"] = box_to_json(m.domain);
  if (file.affine)
    j["affine"] = json{{"scale", file.affine->scale}, {"offset", file.affine->offset}};
  j["provenance"] = file.provenance;
  json entries = json::array();
  for (const auto& [idx, value] : file.coefficients.entries)
    entries.push_back(
      json{{"j", idx.level}, {"z", idx.translate}, {"q", idx.orientation}, {"value", value}});
  j["entries"] = std::move(entries);
  return j;
}

inline ModelFile model_from_json(const json& j)
{
  try {
    if (j.at("schema_version").get<int>() != schema_version)
      throw DataError("unsupported coefficient schema_version");
    ModelFile file;
    auto& m = file.coefficients.meta;
    m.kind = kind_from_string(j.value("kind", std::string("shape-preserving")));
    m.d = j.at("d").get<int>();
    m.n = j.at("n").get<std::size_t>();
    m.k = j.at("k").get<int>();
    m.j0 = j.at("j0").get<int>();
    m.J = j.at("J").get<int>();
    m.wavelet_order = j.at("wavelet_order").get<int>();
    m.normalized = j.at("normalized").get<bool>();
    m.representation = representation_from_string(j.at("representation").get<std::string>());
    m.domain = j.contains("domain") ? box_from_json(j["domain"]) : Box::unit(m.d);
    file.dyadic_resolution = j.value("dyadic_resolution", 12);
    if (j.contains("affine"))
      file.affine = AffineMap{j["affine"].at("scale").get<std::vector<double>>(),
                              j["affine"].at("offset").get<std::vector<double>>()};
    if (j.contains("provenance"))
      file.provenance = j["provenance"];
    for (const auto& e : j.at("entries")) {
      BasisIndex idx{e.at("j").get<int>(), e.at("z").get<std::vector<int>>(), e.at("q").get<int>()};
      if (static_cast<int>(idx.dim()) != m.d)
        throw DataError("coefficient entry has a translate of the wrong dimension");
      file.coefficients.entries[idx] = e.at("value").get<double>();
    }
    return file;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed coefficient file: ") + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

inline json read_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// ------------------------------------------------------------ benchmark

inline json to_json(const BenchmarkConfig& c)
{
  json estimators = json::array();
  if (c.shape_preserving)
    estimators.push_back("shape-preserving");
  if (c.classical)
    estimators.push_back("classical");
  return json{{"schema_version", schema_version},
              {"densities", c.densities},
              {"sample_sizes", c.sample_sizes},
              {"replications", c.replications},
              {"J_values", c.J_values},
              {"k_values", c.k_values},
              {"wavelet_order", c.wavelet_order},
              {"j0", c.j0},
              {"dyadic_resolution", c.dyadic_resolution},
              {"grid_resolution", c.grid_resolution},
              {"seed", c.seed},
              {"estimators", estimators}};
}

inline BenchmarkConfig benchmark_config_from_json(const json& j)
{
  try {
    BenchmarkConfig c;
    if (j.contains("schema_version") && j["schema_version"].get<int>() != schema_version)
      throw ConfigError("unsupported benchmark config schema_version");
    c.densities = j.value("densities", c.densities);
    c.sample_sizes = j.value("sample_sizes", c.sample_sizes);
    c.replications = j.value("replications", c.replications);
    c.J_values = j.value("J_values", c.J_values);
    c.k_values = j.value("k_values", c.k_values);
    c.wavelet_order = j.value("wavelet_order", c.wavelet_order);
    c.j0 = j.value("j0", c.j0);
    c.dyadic_resolution = j.value("dyadic_resolution", c.dyadic_resolution);
    c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
    c.seed = j.value("seed", c.seed);
    if (j.contains("estimators")) {
      c.shape_preserving = c.classical = false;
      for (const auto& e : j["estimators"]) {
        const auto kind = kind_from_string(e.get<std::string>());
        (kind == EstimatorKind::classical ? c.classical : c.shape_preserving) = true;
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed benchmark config: ") + e.what());
  }
}

inline json to_json(const BenchmarkReport& r)
{
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr{{"density", row.density},
            {"n", row.n},
            {"J", row.J},
            {"J_plus_1", row.J + 1},
            {"k", row.k},
            {"estimator", to_string(row.estimator)},
            {"failed", row.failed}};
    if (row.failed) {
      jr["error"] = row.error;
    } else {
      jr["mise"] = row.mise;
      jr["mise_se"] = std::isfinite(row.mise_se) ? json(row.mise_se) : json(nullptr);
      jr["mean_negative_mass"] = row.mean_negative_mass;
    }
    jr["wall_seconds"] = row.wall_seconds;
    rows.push_back(std::move(jr));
  }
  return json{{"schema_version", schema_version},
              {"provenance",
               {{"version", r.version},
                {"seed", r.config.seed},
                {"config", to_json(r.config)},
                {"grid", {{"resolution", r.config.grid_resolution}, {"sampling", "cell-center"}}},
                {"normalization",
                 {{"shape-preserving", "coefficient mass (sum of squares) = 1"},
                  {"classical", "divided by grid-integrated mass"}}}}},
              {"rows", std::move(rows)}};
}

//! One line per (density, n, k, J+1) with the SP and Class. MISE side by side.
inline void write_report_csv(std::ostream& out, const BenchmarkReport& r)
{
  json prov{{"version", r.version}, {"seed", r.config.seed}, {"config", to_json(r.config)}};
  write_provenance_comment(out, prov);
  out << "density,n,k,J+1,SP,SP_se,Class.,Class._se,SP_negative_mass,Class._negative_mass\n";
  auto num = [](const BenchmarkRow* row, double BenchmarkRow::*field) -> std::string {
    if (row == nullptr || row->failed)
      return "";
    const double v = row->*field;
    return std::isfinite(v) ? format_double(v) : "";
  };
  for (const auto& d : r.config.densities)
    for (std::size_t n : r.config.sample_sizes)
      for (int k : r.config.k_values)
        for (int J : r.config.J_values) {
          const auto* sp = r.find(d, n, J, k, EstimatorKind::shape_preserving);
          const auto* cl = r.find(d, n, J, k, EstimatorKind::classical);
          out << d << ',' << n << ',' << k << ',' << (J + 1) << ',' << num(sp, &BenchmarkRow::mise)
              << ',' << num(sp, &BenchmarkRow::mise_se) << ',' << num(cl, &BenchmarkRow::mise) << ','
              << num(cl, &BenchmarkRow::mise_se) << ','
              << num(sp, &BenchmarkRow::mean_negative_mass) << ','
              << num(cl, &BenchmarkRow::mean_negative_mass) << '\n';
        }
}

} // namespace swde::io
