// SPDX-License-Identifier: Apache-2.0

#include "hsf/cli/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "hsf/errors.hpp"

namespace hsf::cli
{

namespace
{

std::string join(const std::string &path, const std::string &key)
{
  return path.empty() ? key : path + "." + key;
}

void require_object(const json &j, const std::string &field)
{
  if (!j.is_object())
    throw ConfigError(field.empty() ? "<root>" : field, "expected an object");
}

void reject_unknown(const json &j, const std::string &path, const std::set<std::string> &allowed)
{
  for (const auto &[key, value] : j.items())
  {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError(join(path, key), "unknown field");
  }
}

double as_number(const json &j, const std::string &field)
{
  if (!j.is_number())
    throw ConfigError(field, "expected a number");
  return j.get<double>();
}

long long as_integer(const json &j, const std::string &field)
{
  if (!j.is_number_integer())
    throw ConfigError(field, "expected an integer");
  return j.get<long long>();
}

int as_positive_int(const json &j, const std::string &field)
{
  const long long v = as_integer(j, field);
  if (v <= 0 || v > 1'000'000)
    throw ConfigError(field, "expected a positive integer");
  return static_cast<int>(v);
}

std::string as_string(const json &j, const std::string &field)
{
  if (!j.is_string())
    throw ConfigError(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_number_list(const json &j, const std::string &field)
{
  if (!j.is_array())
    throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Interval as_interval(const json &j, const std::string &field)
{
  const auto v = as_number_list(j, field);
  if (v.size() != 2 || !(v[0] < v[1]))
    throw ConfigError(field, "expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

Rect as_rect(const json &j, const std::string &field)
{
  const auto v = as_number_list(j, field);
  if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3]))
    throw ConfigError(field, "expected [x0, x1, y0, y1] with x0 < x1 and y0 < y1");
  return {v[0], v[1], v[2], v[3]};
}

cplx as_complex(const json &j, const std::string &field)
{
  if (j.is_number())
    return {j.get<double>(), 0.0};
  const auto v = as_number_list(j, field);
  if (v.size() != 2)
    throw ConfigError(field, "expected a number or [re, im]");
  return {v[0], v[1]};
}

std::uint64_t as_seed(const json &j, const std::string &field)
{
  if (j.is_number_unsigned())
    return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0)
    return static_cast<std::uint64_t>(j.get<long long>());
  throw ConfigError(field, "expected a non-negative integer");
}

json rect_to_json(const Rect &r) { return json::array({r.x0, r.x1, r.y0, r.y1}); }

FunctionSpec parse_function(const json &j, const std::string &path)
{
  require_object(j, path);
  FunctionSpec f;
  if (j.contains("expr"))
  {
    reject_unknown(j, path, {"expr", "support", "max_order"});
    f.kind = FunctionSpec::Kind::Real;
    f.expr = as_string(j["expr"], join(path, "expr"));
  }
  else if (j.contains("pullback_expr"))
  {
    reject_unknown(j, path, {"pullback_expr", "support", "max_order"});
    f.kind = FunctionSpec::Kind::Pullback;
    f.expr = as_string(j["pullback_expr"], join(path, "pullback_expr"));
  }
  else if (j.contains("angle_expr"))
  {
    reject_unknown(j, path, {"angle_expr", "theta_support", "max_order"});
    f.kind = FunctionSpec::Kind::Angle;
    f.expr = as_string(j["angle_expr"], join(path, "angle_expr"));
  }
  else
  {
    throw ConfigError(join(path, "expr"), "one of expr, pullback_expr, angle_expr is required");
  }

  if (f.kind == FunctionSpec::Kind::Angle)
  {
    if (!j.contains("theta_support"))
      throw ConfigError(join(path, "theta_support"), "missing");
    f.theta_support = as_interval(j["theta_support"], join(path, "theta_support"));
  }
  else
  {
    if (!j.contains("support"))
      throw ConfigError(join(path, "support"), "missing");
    f.support = as_interval(j["support"], join(path, "support"));
  }
  if (j.contains("max_order"))
    f.max_order = as_positive_int(j["max_order"], join(path, "max_order"));

  // Surface parse and support errors here, tagged with the field.
  const std::string expr_field =
      join(path, f.kind == FunctionSpec::Kind::Real       ? "expr"
                 : f.kind == FunctionSpec::Kind::Pullback ? "pullback_expr"
                                                          : "angle_expr");
  try
  {
    if (f.is_circle())
      (void)f.circle_function();
    else
      (void)f.real_function();
  }
  catch (const ParseError &e)
  {
    throw ConfigError(expr_field, e.what());
  }
  catch (const Error &e)
  {
    throw ConfigError(path, e.what());
  }
  return f;
}

MatrixSource parse_matrix(const json &j, const std::string &path, const std::string &base_dir)
{
  MatrixSource m;
  if (j.is_string())
  {
    m.kind = MatrixSource::Kind::File;
    std::filesystem::path p(j.get<std::string>());
    if (p.is_relative())
      p = std::filesystem::path(base_dir) / p;
    m.path = j.get<std::string>();
    if (!std::filesystem::exists(p))
      throw ConfigError(path, "file not found: " + p.string());
    try
    {
      m.matrix = read_matrix_file(p.string());
    }
    catch (const ConfigError &e)
    {
      throw ConfigError(path, e.what());
    }
    return m;
  }
  require_object(j, path);
  if (j.contains("file"))
  {
    reject_unknown(j, path, {"file"});
    return parse_matrix(j["file"], join(path, "file"), base_dir);
  }
  if (j.contains("entries"))
  {
    reject_unknown(j, path, {"n", "entries"});
    m.kind = MatrixSource::Kind::Inline;
    m.matrix = matrix_from_json(j);
    return m;
  }
  const bool herm = j.contains("lambdas");
  const bool unit = j.contains("thetas");
  if (herm == unit)
    throw ConfigError(path, "expected a file path, {n, entries}, {lambdas, seed} or {thetas, seed}");
  reject_unknown(j, path, {herm ? "lambdas" : "thetas", "seed", "identity_basis"});
  m.kind = herm ? MatrixSource::Kind::SynthHermitian : MatrixSource::Kind::SynthUnitary;
  const std::string key = herm ? "lambdas" : "thetas";
  m.spectrum = as_number_list(j[key], join(path, key));
  if (m.spectrum.empty())
    throw ConfigError(join(path, key), "must not be empty");
  if (!j.contains("seed"))
    throw ConfigError(join(path, "seed"), "missing");
  m.seed = as_seed(j["seed"], join(path, "seed"));
  if (j.contains("identity_basis"))
  {
    if (!j["identity_basis"].is_boolean())
      throw ConfigError(join(path, "identity_basis"), "expected a boolean");
    m.identity_basis = j["identity_basis"].get<bool>();
  }
  m.matrix = herm ? synth_hermitian(m.spectrum, m.seed, m.identity_basis).first
                  : synth_unitary(m.spectrum, m.seed, m.identity_basis).first;
  return m;
}

void parse_spec(const json &j, JobConfig &cfg)
{
  const std::string path = "spec";
  require_object(j, path);
  reject_unknown(j, path, {"epsilon", "cells", "levels", "N", "T0"});
  if (j.contains("epsilon"))
  {
    cfg.spec.epsilon = as_number(j["epsilon"], "spec.epsilon");
    if (!(cfg.spec.epsilon > 0.0))
      throw ConfigError("spec.epsilon", "must be positive");
  }
  if (j.contains("cells"))
  {
    const json &c = j["cells"];
    if (c.is_array())
    {
      if (c.size() != 2)
        throw ConfigError("spec.cells", "expected an integer or [cells_x, cells_y]");
      cfg.spec.base_cells_x = as_positive_int(c[0], "spec.cells[0]");
      cfg.spec.base_cells_y = as_positive_int(c[1], "spec.cells[1]");
    }
    else
    {
      cfg.spec.base_cells_x = cfg.spec.base_cells_y = as_positive_int(c, "spec.cells");
    }
  }
  if (j.contains("levels"))
  {
    const long long v = as_integer(j["levels"], "spec.levels");
    if (v < 0 || v > 30)
      throw ConfigError("spec.levels", "expected an integer in [0, 30]");
    cfg.spec.refinement_levels = static_cast<int>(v);
  }
  if (j.contains("N"))
  {
    const long long v = as_integer(j["N"], "spec.N");
    if (v < 0 || v > 64)
      throw ConfigError("spec.N", "expected an integer in [0, 64]");
    cfg.N = static_cast<int>(v);
  }
  if (j.contains("T0"))
  {
    cfg.T0 = as_number(j["T0"], "spec.T0");
    if (!(cfg.T0 > 0.0 && cfg.T0 < 1.0))
      throw ConfigError("spec.T0", "expected 0 < T0 < 1");
  }
  try
  {
    cfg.spec.validate();
  }
  catch (const Error &e)
  {
    throw ConfigError(path, e.what());
  }
}

void parse_extend(const json &j, ExtendOptions &o)
{
  require_object(j, "extend");
  reject_unknown(j, "extend", {"rect", "nx", "ny"});
  if (j.contains("rect"))
    o.rect = as_rect(j["rect"], "extend.rect");
  if (j.contains("nx"))
    o.nx = as_positive_int(j["nx"], "extend.nx");
  if (j.contains("ny"))
    o.ny = as_positive_int(j["ny"], "extend.ny");
}

void parse_cauchy(const json &j, CauchyOptions &o)
{
  require_object(j, "cauchy");
  reject_unknown(j, "cauchy", {"field", "rect", "xi", "nodes_per_edge", "area_cells"});
  if (j.contains("field"))
  {
    o.field = as_string(j["field"], "cauchy.field");
    if (o.field != "z2" && o.field != "one" && o.field != "extension")
      throw ConfigError("cauchy.field", "expected one of z2, one, extension");
  }
  if (j.contains("rect"))
    o.rect = as_rect(j["rect"], "cauchy.rect");
  if (j.contains("xi"))
    o.xi = as_complex(j["xi"], "cauchy.xi");
  if (j.contains("nodes_per_edge"))
    o.nodes_per_edge = as_positive_int(j["nodes_per_edge"], "cauchy.nodes_per_edge");
  if (j.contains("area_cells"))
    o.area_cells = as_positive_int(j["area_cells"], "cauchy.area_cells");
}

void parse_sweep(const json &j, SweepOptions &o)
{
  require_object(j, "convergence");
  reject_unknown(j, "convergence", {"problem", "parameter", "values", "xis", "grid_error"});
  if (j.contains("problem"))
  {
    o.problem = as_string(j["problem"], "convergence.problem");
    if (o.problem != "scalar" && o.problem != "selfadjoint" && o.problem != "unitary")
      throw ConfigError("convergence.problem", "expected one of scalar, selfadjoint, unitary");
  }
  if (j.contains("parameter"))
  {
    o.parameter = as_string(j["parameter"], "convergence.parameter");
    if (o.parameter != "epsilon" && o.parameter != "cells")
      throw ConfigError("convergence.parameter", "expected epsilon or cells");
  }
  if (j.contains("values"))
  {
    o.values = as_number_list(j["values"], "convergence.values");
    for (double v : o.values)
      if (!(v > 0.0))
        throw ConfigError("convergence.values", "values must be positive");
    const auto [lo, hi] = std::minmax_element(o.values.begin(), o.values.end());
    if (o.values.size() < 4 || !(*hi >= 10.0 * *lo))
      throw ConfigError("convergence.values", "need at least four values spanning a decade");
  }
  if (j.contains("xis"))
  {
    o.xis = as_number_list(j["xis"], "convergence.xis");
    if (o.xis.empty())
      throw ConfigError("convergence.xis", "must not be empty");
  }
  if (j.contains("grid_error"))
  {
    if (!j["grid_error"].is_boolean())
      throw ConfigError("convergence.grid_error", "expected a boolean");
    o.grid_error = j["grid_error"].get<bool>();
  }
}

} // namespace

SmoothCompactFunction FunctionSpec::real_function() const
{
  if (kind != Kind::Real)
    throw PreconditionError("function is given on the circle");
  return SmoothCompactFunction::parse(expr, support, max_order);
}

CircleFunction FunctionSpec::circle_function() const
{
  if (kind == Kind::Pullback)
    return CircleFunction::from_pullback(expr, support, max_order);
  if (kind == Kind::Angle)
    return CircleFunction::from_angle(expr, theta_support.lo, theta_support.hi, max_order);
  throw PreconditionError("function is given on the real line");
}

json FunctionSpec::to_json() const
{
  json j;
  switch (kind)
  {
  case Kind::Real:
    j["expr"] = expr;
    j["support"] = {support.lo, support.hi};
    break;
  case Kind::Pullback:
    j["pullback_expr"] = expr;
    j["support"] = {support.lo, support.hi};
    break;
  case Kind::Angle:
    j["angle_expr"] = expr;
    j["theta_support"] = {theta_support.lo, theta_support.hi};
    break;
  }
  j["max_order"] = max_order;
  return j;
}

json MatrixSource::to_json() const
{
  switch (kind)
  {
  case Kind::None:
    return nullptr;
  case Kind::File:
    return {{"file", path}, {"matrix", matrix_to_json(matrix)}};
  case Kind::Inline:
    return matrix_to_json(matrix);
  case Kind::SynthHermitian:
  case Kind::SynthUnitary:
  {
    json j;
    j[kind == Kind::SynthHermitian ? "lambdas" : "thetas"] = spectrum;
    j["seed"] = seed;
    j["identity_basis"] = identity_basis;
    return j;
  }
  }
  return nullptr;
}

json JobConfig::to_json() const
{
  json j;
  j["command"] = command;
  j["function"] = function ? function->to_json() : json(nullptr);
  j["matrix"] = matrix.to_json();
  j["spec"] = {{"epsilon", spec.epsilon},
               {"cells", {spec.base_cells_x, spec.base_cells_y}},
               {"levels", spec.refinement_levels},
               {"N", N},
               {"T0", T0}};
  j["seed"] = seed ? json(*seed) : json(nullptr);
  if (command == "extend")
  {
    j["extend"] = {{"rect", extend.rect ? rect_to_json(*extend.rect) : json(nullptr)},
                   {"nx", extend.nx},
                   {"ny", extend.ny}};
  }
  if (command == "cauchy-check")
  {
    j["cauchy"] = {{"field", cauchy.field},
                   {"rect", cauchy.rect ? rect_to_json(*cauchy.rect) : json(nullptr)},
                   {"xi", {cauchy.xi.real(), cauchy.xi.imag()}},
                   {"nodes_per_edge", cauchy.nodes_per_edge},
                   {"area_cells", cauchy.area_cells}};
  }
  if (command == "convergence")
  {
    j["convergence"] = {{"problem", sweep.problem},
                        {"parameter", sweep.parameter},
                        {"values", sweep.values},
                        {"xis", sweep.xis},
                        {"grid_error", sweep.grid_error}};
  }
  return j;
}

const std::vector<std::string> &known_commands()
{
  static const std::vector<std::string> commands{"extend",       "apply-sa",    "apply-unitary",
                                                 "cauchy-check", "convergence", "verify"};
  return commands;
}

JobConfig parse_job_config(const json &j, const std::string &base_dir)
{
  require_object(j, "");
  reject_unknown(j, "", {"command", "function", "matrix", "spec", "seed", "out", "format",
                         "threads", "extend", "cauchy", "convergence"});
  JobConfig cfg;
  if (j.contains("command"))
  {
    cfg.command = as_string(j["command"], "command");
    const auto &cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end())
      throw ConfigError("command", "unknown command '" + cfg.command + "'");
  }
  if (j.contains("spec"))
    parse_spec(j["spec"], cfg);
  if (j.contains("function"))
    cfg.function = parse_function(j["function"], "function");
  if (j.contains("matrix"))
    cfg.matrix = parse_matrix(j["matrix"], "matrix", base_dir);
  if (j.contains("seed"))
    cfg.seed = as_seed(j["seed"], "seed");
  if (j.contains("out"))
    cfg.output_path = as_string(j["out"], "out");
  if (j.contains("format"))
  {
    cfg.format = as_string(j["format"], "format");
    if (cfg.format != "json" && cfg.format != "csv")
      throw ConfigError("format", "expected json or csv");
  }
  if (j.contains("threads"))
  {
    const long long t = as_integer(j["threads"], "threads");
    if (t < 0 || t > 4096)
      throw ConfigError("threads", "expected an integer in [0, 4096]");
    cfg.threads = static_cast<int>(t);
  }
  if (j.contains("extend"))
    parse_extend(j["extend"], cfg.extend);
  if (j.contains("cauchy"))
    parse_cauchy(j["cauchy"], cfg.cauchy);
  if (j.contains("convergence"))
    parse_sweep(j["convergence"], cfg.sweep);
  return cfg;
}

ComplexMatrix matrix_from_json(const json &j)
{
  require_object(j, "matrix");
  if (!j.contains("n"))
    throw ConfigError("matrix.n", "missing");
  const int n = as_positive_int(j["n"], "matrix.n");
  if (!j.contains("entries") || !j["entries"].is_array())
    throw ConfigError("matrix.entries", "expected an array of [re, im] pairs");
  const json &e = j["entries"];
  if (e.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw ConfigError("matrix.entries", "expected n*n = " + std::to_string(n * n) + " entries");
  ComplexMatrix M(n, n);
  for (int r = 0; r < n; ++r)
  {
    for (int c = 0; c < n; ++c)
    {
      const std::size_t k = static_cast<std::size_t>(r) * n + c;
      const std::string field = "matrix.entries[" + std::to_string(k) + "]";
      const auto v = as_number_list(e[k], field);
      if (v.size() != 2)
        throw ConfigError(field, "expected [re, im]");
      M(r, c) = cplx(v[0], v[1]);
    }
  }
  return M;
}

json matrix_to_json(const ComplexMatrix &M)
{
  json entries = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      entries.push_back({M(r, c).real(), M(r, c).imag()});
  return {{"n", M.rows()}, {"entries", std::move(entries)}};
}

ComplexMatrix read_matrix_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("matrix", "cannot open " + path);
  json j;
  try
  {
    in >> j;
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError("matrix", std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return matrix_from_json(j);
}

} // namespace hsf::cli
