#include "rotstokes/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "rotstokes/fields.hpp"
#include "rotstokes/fundsol.hpp"
#include "rotstokes/quad.hpp"

namespace rotstokes::cli {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::set<std::string> kScanQuantities{"gamma_remainder", "gamma_mirror", "grad_gamma", "velocity_remainder",
                                            "pressure_remainder"};

// ---------------------------------------------------------------------------
// Config parsing

template <class T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field, "wrong type");
  }
}

Vec2 get_vec2(const json& j, const std::string& field) {
  const auto v = get_as<std::vector<double>>(j, field);
  if (v.size() != 2) throw ConfigError(field, "expected two numbers");
  return {v[0], v[1]};
}

// Visits each key of `obj`, rejecting keys without a handler.
void for_each_key(const json& obj, const std::string& prefix,
                  const std::map<std::string, std::function<void(const json&, const std::string&)>>& handlers) {
  if (!obj.is_object()) throw ConfigError(prefix.empty() ? "config" : prefix, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    const std::string field = prefix.empty() ? key : prefix + "." + key;
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError(field, "unknown key");
    it->second(value, field);
  }
}

OutputFormat parse_format(const std::string& s, const std::string& field) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError(field, "expected 'csv' or 'json'");
}

// ---------------------------------------------------------------------------
// Number formatting

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson mat_json(const Mat22& m) { return ojson::array({ojson::array({m.a11, m.a12}), ojson::array({m.a21, m.a22})}); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("output", "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw ConfigError("output", "write to '" + path + "' failed");
}

void emit(const RunConfig& config, std::ostream& out, const std::string& text) {
  if (config.output.empty()) {
    out << text;
  } else {
    write_text(config.output, text);
  }
}

// ---------------------------------------------------------------------------
// Source fields

SourceField load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("field.grid_file", "cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x1,x2,f1,f2") throw ConfigError("field.grid_file", "header must be 'x1,x2,f1,f2'");
  struct Row {
    double x1, x2, f1, f2;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    Row r{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r.x1, &r.x2, &r.f1, &r.f2) != 4) {
      throw ConfigError("field.grid_file", "malformed line " + std::to_string(lineno));
    }
    rows.push_back(r);
  }
  std::set<double> xs, ys;
  for (const Row& r : rows) {
    xs.insert(r.x1);
    ys.insert(r.x2);
  }
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  if (nx < 2 || ny < 2) throw ConfigError("field.grid_file", "need at least 2 distinct x1 and x2 values");
  if (static_cast<std::size_t>(nx) * ny != rows.size()) {
    throw ConfigError("field.grid_file", "rows do not form a complete grid");
  }
  const std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
  auto uniform = [](const std::vector<double>& v) {
    const double h = (v.back() - v.front()) / (v.size() - 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::fabs(v[i] - (v.front() + i * h)) > 1e-9 * std::fmax(1.0, std::fabs(v[i]))) return false;
    }
    return true;
  };
  if (!uniform(xv) || !uniform(yv)) throw ConfigError("field.grid_file", "grid spacing is not uniform");
  std::vector<Vec2> values(rows.size());
  std::vector<char> seen(rows.size(), 0);
  for (const Row& r : rows) {
    const auto i = std::lower_bound(xv.begin(), xv.end(), r.x1) - xv.begin();
    const auto j = std::lower_bound(yv.begin(), yv.end(), r.x2) - yv.begin();
    const std::size_t k = static_cast<std::size_t>(j) * nx + i;
    if (seen[k]) throw ConfigError("field.grid_file", "duplicate grid point");
    seen[k] = 1;
    values[k] = {r.f1, r.f2};
  }
  return SourceField::grid(xv.front(), xv.back(), yv.front(), yv.back(), nx, ny, std::move(values));
}

SourceField make_field(const FieldSpec& spec) {
  if (!spec.grid_file.empty()) return load_grid_file(spec.grid_file);
  try {
    return SourceField::preset(spec.preset, spec.parameters);
  } catch (const DomainError& e) {
    throw ConfigError("field.preset", e.what());
  }
}

// ---------------------------------------------------------------------------
// Parallel row evaluation with ordered output

template <class T, class F>
std::vector<T> evaluate_rows(int n_rows, int threads, F&& row) {
  std::vector<T> out(n_rows);
  std::vector<std::exception_ptr> errors(n_rows);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int j = next++; j < n_rows; j = next++) {
      try {
        out[j] = row(j);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, std::max(1, n_rows));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  RunConfig c;
  KernelParams& p = c.params;
  auto dbl = [](double& dst) { return [&dst](const json& v, const std::string& f) { dst = get_as<double>(v, f); }; };
  auto integer = [](int& dst) { return [&dst](const json& v, const std::string& f) { dst = get_as<int>(v, f); }; };
  auto str = [](std::string& dst) {
    return [&dst](const json& v, const std::string& f) { dst = get_as<std::string>(v, f); };
  };
  auto boolean = [](bool& dst) { return [&dst](const json& v, const std::string& f) { dst = get_as<bool>(v, f); }; };
  auto vec = [](Vec2& dst) { return [&dst](const json& v, const std::string& f) { dst = get_vec2(v, f); }; };

  for_each_key(root, "",
               {
                   {"a", dbl(p.a)},
                   {"eps", dbl(p.eps)},
                   {"tol_abs", dbl(p.tol_abs)},
                   {"tol_rel", dbl(p.tol_rel)},
                   {"t_split", dbl(p.t_split)},
                   {"max_periods", integer(p.max_periods)},
                   {"threads", integer(c.threads)},
                   {"output", str(c.output)},
                   {"suite", str(c.suite)},
                   {"format",
                    [&c](const json& v, const std::string& f) { c.format = parse_format(get_as<std::string>(v, f), f); }},
                   {"kernel",
                    [&](const json& v, const std::string& f) {
                      for_each_key(v, f,
                                   {{"x", vec(c.kernel.x)}, {"y", vec(c.kernel.y)}, {"decompose", boolean(c.kernel.decompose)}});
                    }},
                   {"grid",
                    [&](const json& v, const std::string& f) {
                      GridSpec& g = c.grid;
                      for_each_key(v, f,
                                   {{"xmin", dbl(g.xmin)},
                                    {"xmax", dbl(g.xmax)},
                                    {"ymin", dbl(g.ymin)},
                                    {"ymax", dbl(g.ymax)},
                                    {"nx", integer(g.nx)},
                                    {"ny", integer(g.ny)}});
                    }},
                   {"field",
                    [&](const json& v, const std::string& f) {
                      FieldSpec& s = c.field;
                      for_each_key(
                          v, f,
                          {{"preset", str(s.preset)},
                           {"grid_file", str(s.grid_file)},
                           {"gradient", boolean(s.gradient)},
                           {"residual", boolean(s.residual)},
                           {"fd_step", dbl(s.fd_step)},
                           {"parameters", [&s](const json& pv, const std::string& pf) {
                              if (!pv.is_object()) throw ConfigError(pf, "expected an object");
                              s.parameters.clear();
                              for (const auto& [k, val] : pv.items()) {
                                s.parameters.emplace_back(k, get_as<double>(val, pf + "." + k));
                              }
                            }}});
                    }},
                   {"scan",
                    [&](const json& v, const std::string& f) {
                      ScanSpec& s = c.scan;
                      for_each_key(v, f,
                                   {{"quantity", str(s.quantity)},
                                    {"radii",
                                     [&s](const json& rv, const std::string& rf) {
                                       s.radii = get_as<std::vector<double>>(rv, rf);
                                     }},
                                    {"y", vec(s.y)},
                                    {"directions", integer(s.directions)},
                                    {"expected_exponent", dbl(s.expected_exponent)},
                                    {"tolerance", dbl(s.tolerance)}});
                    }},
               });
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c, const std::string& command) {
  const KernelParams& p = c.params;
  if (!(p.tol_abs > 0.0)) throw ConfigError("tol_abs", "must be positive");
  if (!(p.tol_rel > 0.0)) throw ConfigError("tol_rel", "must be positive");
  if (!(p.t_split > 0.0)) throw ConfigError("t_split", "must be positive");
  if (p.max_periods < 1) throw ConfigError("max_periods", "must be at least 1");
  if (!(p.eps >= 0.0)) throw ConfigError("eps", "must be nonnegative");
  if (!std::isfinite(p.a) || p.a == 0.0) throw ConfigError("a", "must be nonzero and finite");
  if (c.threads < 1) throw ConfigError("threads", "must be at least 1");

  if (command == "field") {
    const GridSpec& g = c.grid;
    if (g.nx < 2) throw ConfigError("grid.nx", "must be at least 2");
    if (g.ny < 2) throw ConfigError("grid.ny", "must be at least 2");
    if (!(g.xmax > g.xmin)) throw ConfigError("grid.xmax", "must exceed grid.xmin");
    if (!(g.ymax > g.ymin)) throw ConfigError("grid.ymax", "must exceed grid.ymin");
  }
  if (command == "field" || (command == "scan" && (c.scan.quantity == "velocity_remainder" ||
                                                   c.scan.quantity == "pressure_remainder"))) {
    if (!(c.field.fd_step > 0.0)) throw ConfigError("field.fd_step", "must be positive");
  }
  if (command == "kernel") {
    if (norm(c.kernel.x - c.kernel.y) < kEtaMin) throw ConfigError("kernel.y", "too close to kernel.x");
  }
  if (command == "scan") {
    const ScanSpec& s = c.scan;
    if (!kScanQuantities.count(s.quantity)) throw ConfigError("scan.quantity", "unknown quantity '" + s.quantity + "'");
    if (s.radii.size() < 4) throw ConfigError("scan.radii", "need at least 4 radii");
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
      if (!(s.radii[i] > 0.0)) throw ConfigError("scan.radii", "radii must be positive");
      if (i > 0 && !(s.radii[i] > s.radii[i - 1])) throw ConfigError("scan.radii", "radii must be increasing");
    }
    if (s.directions < 1) throw ConfigError("scan.directions", "must be at least 1");
    if (!(s.tolerance >= 0.0)) throw ConfigError("scan.tolerance", "must be nonnegative");
    if (c.output.empty()) throw ConfigError("output", "scan needs an output path stem");
  }
  if (command == "verify") {
    const auto& names = suite_names();
    if (c.suite != "all" && std::find(names.begin(), names.end(), c.suite) == names.end()) {
      throw ConfigError("suite", "unknown suite '" + c.suite + "'");
    }
  }
}

// ---------------------------------------------------------------------------

std::string verify_report_json(const VerifyReport& report) {
  ojson checks = ojson::array();
  for (const Check& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"status", c.passed ? "pass" : "fail"},
                      {"measured", c.measured},
                      {"expected", c.expected},
                      {"tolerance", c.tolerance}});
  }
  ojson doc{{"suite", report.suite}, {"checks", checks}};
  return doc.dump(2) + "\n";
}

int cmd_kernel(const RunConfig& config, std::ostream& out) {
  validate(config, "kernel");
  const KernelSpec& k = config.kernel;
  const GammaEval e = gamma(k.x, k.y, config.params, k.decompose);
  ojson doc{{"x", {k.x.x1, k.x.x2}},
            {"y", {k.y.x1, k.y.x2}},
            {"a", config.params.a},
            {"value", mat_json(e.value)},
            {"abs_error_estimate", e.abs_error_estimate},
            {"evaluations", e.evaluations}};
  if (config.format == OutputFormat::csv) {
    std::vector<std::pair<std::string, double>> cols{
        {"x1", k.x.x1}, {"x2", k.x.x2}, {"y1", k.y.x1}, {"y2", k.y.x2}, {"a", config.params.a}};
    auto add_matrix = [&cols](const std::string& prefix, const Mat22& m) {
      cols.insert(cols.end(), {{prefix + "11", m.a11}, {prefix + "12", m.a12}, {prefix + "21", m.a21}, {prefix + "22", m.a22}});
    };
    add_matrix("g", e.value);
    cols.push_back({"abs_error_estimate", e.abs_error_estimate});
    cols.push_back({"evaluations", static_cast<double>(e.evaluations)});
    if (e.decomposition) {
      add_matrix("g0_", e.decomposition->gamma0);
      add_matrix("g11_", e.decomposition->gamma11);
      add_matrix("g12_", e.decomposition->gamma12);
    }
    std::string header, row;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      header += (i ? "," : "") + cols[i].first;
      row += (i ? "," : "") + num(cols[i].second);
    }
    emit(config, out, header + "\n" + row + "\n");
    return kPass;
  }
  if (e.decomposition) {
    doc["decomposition"] = {{"gamma0", mat_json(e.decomposition->gamma0)},
                            {"gamma11", mat_json(e.decomposition->gamma11)},
                            {"gamma12", mat_json(e.decomposition->gamma12)}};
  }
  emit(config, out, doc.dump(2) + "\n");
  return kPass;
}

int cmd_field(const RunConfig& config, std::ostream& out) {
  validate(config, "field");
  const SourceField f = make_field(config.field);
  const GridSpec& g = config.grid;
  const bool grad = config.field.gradient;
  const bool res = config.field.residual;

  std::vector<std::string> columns{"x1", "x2", "u1", "u2", "p"};
  if (grad) columns.insert(columns.end(), {"du11", "du12", "du21", "du22"});
  if (res) columns.insert(columns.end(), {"res1", "res2", "div"});

  auto point_values = [&](int i, int j) {
    const Vec2 x{g.xmin + (g.xmax - g.xmin) * i / (g.nx - 1), g.ymin + (g.ymax - g.ymin) * j / (g.ny - 1)};
    const FieldSample s = sample_field(f, x, config.params, grad);
    std::vector<double> v{x.x1, x.x2, s.u.x1, s.u.x2, s.p};
    if (grad) v.insert(v.end(), {s.grad_u.a11, s.grad_u.a12, s.grad_u.a21, s.grad_u.a22});
    if (res) {
      const ResidualReport r = pde_residual(f, x, config.params, config.field.fd_step);
      v.insert(v.end(), {r.momentum_residual.x1, r.momentum_residual.x2, r.divergence});
    }
    return v;
  };

  using Row = std::vector<std::vector<double>>;
  const std::vector<Row> rows = evaluate_rows<Row>(g.ny, config.threads, [&](int j) {
    Row r;
    for (int i = 0; i < g.nx; ++i) r.push_back(point_values(i, j));
    return r;
  });

  std::string text;
  if (config.format == OutputFormat::json) {
    ojson doc{{"columns", columns}, {"rows", ojson::array()}};
    for (const Row& r : rows)
      for (const auto& v : r) doc["rows"].push_back(v);
    text = doc.dump(2) + "\n";
  } else {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) text += ',';
      text += columns[k];
    }
    text += '\n';
    for (const Row& r : rows) {
      for (const auto& v : r) {
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (k) text += ',';
          text += num(v[k]);
        }
        text += '\n';
      }
    }
  }
  emit(config, out, text);
  return kPass;
}

int cmd_verify(const RunConfig& config, std::ostream& out) {
  validate(config, "verify");
  const VerifyReport report = run_verify(config.suite, config.params, config.threads);
  emit(config, out, verify_report_json(report));
  return report.passed() ? kPass : kCheckFailed;
}

DecayReport run_scan(const RunConfig& config) {
  validate(config, "scan");
  const ScanSpec& s = config.scan;
  const KernelParams& p = config.params;
  std::function<double(const Vec2&)> q;
  std::optional<SourceField> field;

  if (s.quantity == "gamma_remainder") {
    q = [&](const Vec2& x) { return max_abs(gamma(x, s.y, p).value - gamma_leading(x, s.y)); };
  } else if (s.quantity == "gamma_mirror") {
    q = [&](const Vec2& y) {
      const Mat22 lead = (1.0 / (4.0 * std::numbers::pi * norm2(y))) * outer(perp(s.y), perp(y));
      return max_abs(gamma(s.y, y, p).value - lead);
    };
  } else if (s.quantity == "grad_gamma") {
    q = [&](const Vec2& x) { return quad_norm(grad_gamma(x, s.y, p)); };
  } else if (s.quantity == "velocity_remainder") {
    field = make_field(config.field);
    const double torque = field->moment_torque();
    q = [&, torque](const Vec2& x) {
      const Vec2 lead = (torque / (4.0 * std::numbers::pi * norm2(x))) * perp(x);
      return norm(velocity_potential(*field, x, p) - lead);
    };
  } else {
    field = make_field(config.field);
    const Vec2 force = field->moment_force();
    q = [&, force](const Vec2& x) {
      return std::fabs(pressure_potential(*field, x, p) - dot(force, x) / (2.0 * std::numbers::pi * norm2(x)));
    };
  }
  const std::vector<double> values = max_over_directions(q, s.radii, s.directions, config.threads);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) {
      throw DomainError("scan: quantity vanished at radius " + num(s.radii[i]) + "; a log-log fit is undefined");
    }
  }
  return decay_fit(s.radii, values, s.expected_exponent, s.tolerance);
}

int cmd_scan(const RunConfig& config, std::ostream& out) {
  const DecayReport r = run_scan(config);
  write_text(config.output + ".json", decay_report_json(r));
  write_text(config.output + ".csv", decay_report_csv(r));
  out << "fitted_exponent " << num(r.fitted_exponent) << (r.passed ? " pass" : " fail") << "\n";
  return r.passed ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rotating-obstacle Stokes kernels, potentials and verification suites", "rotstokes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<double> a, eps, tol_abs, tol_rel;
  std::optional<int> threads;
  std::optional<std::string> output, format;
  app.add_option("--config", config_path, "JSON config file; flags override its fields");
  app.add_option("--a", a, "angular velocity (nonzero)");
  app.add_option("--eps", eps, "resolvent damping");
  app.add_option("--tol-abs", tol_abs, "absolute quadrature tolerance");
  app.add_option("--tol-rel", tol_rel, "relative quadrature tolerance");
  app.add_option("--threads", threads, "worker threads for grids and scans");
  app.add_option("-o,--output", output, "output path (scan: path stem)");
  app.add_option("--format", format, "csv or json (kernel, field)");

  auto* kernel = app.add_subcommand("kernel", "evaluate the velocity kernel at one point pair");
  std::optional<std::vector<double>> kx, ky;
  bool decompose = false;
  kernel->add_option("--x", kx, "x1 x2")->expected(2);
  kernel->add_option("--y", ky, "y1 y2")->expected(2);
  kernel->add_flag("--decompose", decompose, "also report the three kernel pieces");

  auto* field = app.add_subcommand("field", "tabulate u, p on a grid");
  auto* scan = app.add_subcommand("scan", "decay sweep with log-log regression");
  std::optional<std::string> preset, grid_file;
  std::vector<std::string> params;
  std::optional<double> xmin, xmax, ymin, ymax, fd_step;
  std::optional<int> nx, ny;
  bool gradient = false, residual = false;
  for (CLI::App* sub : {field, scan}) {
    sub->add_option("--preset", preset, "source field preset");
    sub->add_option("--param", params, "preset parameter key=value (repeatable)");
    sub->add_option("--grid-file", grid_file, "CSV source field x1,x2,f1,f2");
  }
  field->add_option("--xmin", xmin);
  field->add_option("--xmax", xmax);
  field->add_option("--ymin", ymin);
  field->add_option("--ymax", ymax);
  field->add_option("--nx", nx);
  field->add_option("--ny", ny);
  field->add_option("--fd-step", fd_step, "relative finite-difference step for residuals");
  field->add_flag("--gradient", gradient, "add du11,du12,du21,du22 columns");
  field->add_flag("--residual", residual, "add res1,res2,div columns");

  std::optional<std::string> quantity;
  std::optional<std::vector<double>> radii, sy;
  std::optional<int> directions;
  std::optional<double> expected, tolerance;
  scan->add_option("--quantity", quantity, "gamma_remainder, gamma_mirror, grad_gamma, velocity_remainder, "
                                           "pressure_remainder");
  scan->add_option("--radii", radii, "increasing radii (at least 4)");
  scan->add_option("--y", sy, "fixed second argument y1 y2")->expected(2);
  scan->add_option("--directions", directions);
  scan->add_option("--expected-exponent", expected);
  scan->add_option("--tolerance", tolerance);

  auto* verify = app.add_subcommand("verify", "run a verification suite and write a JSON report");
  std::optional<std::string> suite;
  verify->add_option("suite", suite, "centering, kernels, decay, potentials, exact or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (a) c.params.a = *a;
    if (eps) c.params.eps = *eps;
    if (tol_abs) c.params.tol_abs = *tol_abs;
    if (tol_rel) c.params.tol_rel = *tol_rel;
    if (threads) c.threads = *threads;
    if (output) c.output = *output;
    if (format) c.format = parse_format(*format, "format");
    if (kx) c.kernel.x = {(*kx)[0], (*kx)[1]};
    if (ky) c.kernel.y = {(*ky)[0], (*ky)[1]};
    if (decompose) c.kernel.decompose = true;
    if (preset) c.field.preset = *preset;
    if (grid_file) c.field.grid_file = *grid_file;
    if (!params.empty()) {
      c.field.parameters.clear();
      for (const std::string& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("field.parameters", "expected key=value, got '" + kv + "'");
        try {
          std::size_t used = 0;
          const std::string v = kv.substr(eq + 1);
          const double value = std::stod(v, &used);
          if (used != v.size()) throw std::invalid_argument(v);
          c.field.parameters.emplace_back(kv.substr(0, eq), value);
        } catch (const std::logic_error&) {
          throw ConfigError("field.parameters." + kv.substr(0, eq), "not a number");
        }
      }
    }
    if (xmin) c.grid.xmin = *xmin;
    if (xmax) c.grid.xmax = *xmax;
    if (ymin) c.grid.ymin = *ymin;
    if (ymax) c.grid.ymax = *ymax;
    if (nx) c.grid.nx = *nx;
    if (ny) c.grid.ny = *ny;
    if (fd_step) c.field.fd_step = *fd_step;
    if (gradient) c.field.gradient = true;
    if (residual) c.field.residual = true;
    if (quantity) c.scan.quantity = *quantity;
    if (radii) c.scan.radii = *radii;
    if (sy) c.scan.y = {(*sy)[0], (*sy)[1]};
    if (directions) c.scan.directions = *directions;
    if (expected) c.scan.expected_exponent = *expected;
    if (tolerance) c.scan.tolerance = *tolerance;
    if (suite) c.suite = *suite;

    if (*kernel) return cmd_kernel(c, out);
    if (*field) return cmd_field(c, out);
    if (*verify) return cmd_verify(c, out);
    return cmd_scan(c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NonConvergence& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const ToleranceNotMet& e) {
    err << "numerical failure: " << e.what() << " (error bound " << num(e.error_bound()) << ")\n";
    return kNumericalFailure;
  } catch (const SingularityError& e) {
    err << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace rotstokes::cli
