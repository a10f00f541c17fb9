// SPDX-License-Identifier: Apache-2.0

#include "hsf/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>

#include "hsf/convergence.hpp"
#include "hsf/integrator.hpp"

namespace hsf::cli
{

namespace
{

template <class F>
auto stage(const char *module, F &&fn) -> decltype(fn())
{
  try
  {
    return fn();
  }
  catch (const ConfigError &)
  {
    throw;
  }
  catch (const StageError &)
  {
    throw;
  }
  catch (const std::exception &e)
  {
    throw StageError(module, e.what());
  }
}

const FunctionSpec &require_function(const JobConfig &cfg)
{
  if (!cfg.function)
    throw ConfigError("function", "required by '" + cfg.command + "'");
  return *cfg.function;
}

SmoothCompactFunction require_real(const JobConfig &cfg)
{
  const FunctionSpec &f = require_function(cfg);
  if (f.is_circle())
    throw ConfigError("function", "'" + cfg.command + "' needs a real-line function (expr)");
  return f.real_function();
}

CircleFunction require_circle(const JobConfig &cfg)
{
  const FunctionSpec &f = require_function(cfg);
  if (!f.is_circle())
    throw ConfigError("function",
                      "'" + cfg.command + "' needs a circle function (pullback_expr or angle_expr)");
  return f.circle_function();
}

const ComplexMatrix &require_matrix(const JobConfig &cfg)
{
  if (cfg.matrix.kind == MatrixSource::Kind::None)
    throw ConfigError("matrix", "required by '" + cfg.command + "'");
  return cfg.matrix.matrix;
}

IntegrationOptions integration_options(const JobConfig &cfg)
{
  IntegrationOptions o;
  o.threads = cfg.threads;
  o.seed = cfg.seed.value_or(0);
  return o;
}

Report base_report(const JobConfig &cfg)
{
  Report r;
  r.command = cfg.command;
  r.seed = cfg.seed;
  r.inputs = cfg.to_json();
  return r;
}

json schedule_json(const ExtensionParams &p)
{
  return {{"N", p.N}, {"T", p.T}, {"C", p.C}, {"M", p.bounds.M},
          {"grid_resolution", p.bounds.grid_resolution}};
}

json integral_json(const IntegralResult &r)
{
  return {{"matrix", matrix_to_json(r.value)},
          {"n_cells", r.n_cells},
          {"n_active", r.n_active},
          {"sum_compensation", r.sum_compensation},
          {"bound_integral", r.bound_integral},
          {"epsilon_used", r.epsilon_used},
          {"truncation_N", r.truncation_N}};
}

bool is_diagonal(const ComplexMatrix &M)
{
  for (Eigen::Index c = 0; c < M.cols(); ++c)
    for (Eigen::Index r = 0; r < M.rows(); ++r)
      if (r != c && M(r, c) != cplx(0.0))
        return false;
  return true;
}

ComplexMatrix hermitian_oracle(const ComplexMatrix &A, const SmoothCompactFunction &f)
{
  return spectral_apply(hermitian_eig(A), [&](cplx l) { return cplx(f.value(l.real())); });
}

ComplexMatrix synthesis_oracle(const MatrixSource &m, const CircleFunction &f)
{
  const auto [U, decomp] = synth_unitary(m.spectrum, m.seed, m.identity_basis);
  (void)U;
  return spectral_apply(decomp, [&](cplx z) { return cplx(f.value(z)); });
}

Rect default_extension_rect(const AlmostAnalyticExtension &ext, double pad)
{
  const Interval s = ext.function().support();
  const double C = ext.params().C;
  const double dx = pad * s.length();
  return {s.lo - dx, s.hi + dx, -(1.0 + pad) * C, (1.0 + pad) * C};
}

} // namespace

double sup_norm(const SmoothCompactFunction &f, int samples)
{
  const Interval s = f.support();
  double m = 0.0;
  for (int i = 0; i <= samples; ++i)
    m = std::max(m, std::abs(f.value(s.lo + s.length() * i / samples)));
  return m;
}

ComplexMatrix unitary_oracle(const ComplexMatrix &U, const CircleFunction &f)
{
  const auto n = U.rows();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  LuFactorization lu(U - I);
  if (lu.singular())
    throw PoleError("1 is an eigenvalue of U; the Cayley image is undefined");
  ComplexMatrix A = cplx(0.0, 1.0) * lu.solve(U + I).eval();
  // (U + I) and (U - I)^{-1} commute, so A is Hermitian up to rounding.
  A = (0.5 * (A + A.adjoint())).eval();
  const SmoothCompactFunction &h = f.pullback();
  return spectral_apply(hermitian_eig(A), [&](cplx t) { return cplx(h.value(t.real())); });
}

Report run_extend(const JobConfig &cfg)
{
  Report r = base_report(cfg);
  const FunctionSpec &fs = require_function(cfg);
  Table t{{"x", "y", "re_f", "im_f", "re_dbar", "im_dbar"}, {}};

  std::function<cplx(cplx)> value, dbar;
  Rect rect{};
  double restriction_err = 0.0;
  if (fs.is_circle())
  {
    const CircleFunction cf = fs.circle_function();
    auto ce = std::make_shared<CircleExtension>(
        stage("cayley", [&] { return CircleExtension::build(cf, cfg.N, cfg.T0); }));
    value = [ce](cplx z) { return ce->value(z); };
    dbar = [ce](cplx z) { return ce->dbar(z); };
    rect = cfg.extend.rect.value_or(Rect{-1.5, 1.5, -1.5, 1.5});
    r.results["schedule"] = schedule_json(ce->base().params());
    const Region &g = ce->support_region();
    r.results["region"] = {{"C_omega", g.C_omega}, {"d_omega", g.d_omega},
                           {"r_min", g.r_min},     {"phi_min", g.phi_min},
                           {"phi_max", g.phi_max}};
    for (int i = 0; i <= 256; ++i)
    {
      const double th = 2.0 * std::numbers::pi * (i + 0.5) / 257.0;
      const cplx zeta = std::polar(1.0, th);
      const double fv = cf.value(zeta);
      restriction_err =
          std::max(restriction_err, std::abs(ce->value(zeta) - fv) / (1.0 + std::abs(fv)));
    }
  }
  else
  {
    auto ext = std::make_shared<AlmostAnalyticExtension>(stage(
        "almost_analytic", [&] { return AlmostAnalyticExtension::build(fs.real_function(), cfg.N, cfg.T0); }));
    value = [ext](cplx z) { return ext->value(z); };
    dbar = [ext](cplx z) { return ext->dbar(z); };
    rect = cfg.extend.rect.value_or(default_extension_rect(*ext, 0.1));
    r.results["schedule"] = schedule_json(ext->params());
    const Interval s = ext->function().support();
    for (int i = 0; i <= 256; ++i)
    {
      const double x = s.lo + s.length() * i / 256.0;
      const double fv = ext->function().value(x);
      restriction_err =
          std::max(restriction_err, std::abs(ext->value(x) - fv) / (1.0 + std::abs(fv)));
    }
  }

  stage("almost_analytic", [&] {
    const int nx = cfg.extend.nx, ny = cfg.extend.ny;
    for (int j = 0; j < ny; ++j)
    {
      const double y = ny == 1 ? 0.5 * (rect.y0 + rect.y1) : rect.y0 + (rect.y1 - rect.y0) * j / (ny - 1);
      for (int i = 0; i < nx; ++i)
      {
        const double x = nx == 1 ? 0.5 * (rect.x0 + rect.x1) : rect.x0 + (rect.x1 - rect.x0) * i / (nx - 1);
        const cplx z(x, y);
        cplx v, d;
        try
        {
          v = value(z);
          d = dbar(z);
        }
        catch (const PoleError &)
        {
          // The Cayley pole at 1 has no sample value.
          v = d = cplx(std::nan(""), std::nan(""));
        }
        t.rows.push_back({x, y, v.real(), v.imag(), d.real(), d.imag()});
      }
    }
    return 0;
  });

  r.results["rect"] = {rect.x0, rect.x1, rect.y0, rect.y1};
  r.results["n_points"] = t.rows.size();
  r.checks.push_back(check_at_most("restriction", restriction_err, 1e-14));
  r.table = std::move(t);
  return r;
}

Report run_apply_sa(const JobConfig &cfg)
{
  Report r = base_report(cfg);
  const SmoothCompactFunction f = require_real(cfg);
  const ComplexMatrix &A = require_matrix(cfg);
  const auto ext = stage("almost_analytic", [&] { return AlmostAnalyticExtension::build(f, cfg.N, cfg.T0); });
  const auto opts = integration_options(cfg);
  const IntegralResult res =
      stage("hs_integrator", [&] { return hs_apply_selfadjoint(ext, A, cfg.spec, opts); });
  const ComplexMatrix oracle = stage("matrix_core", [&] { return hermitian_oracle(A, f); });
  const double f_sup = sup_norm(f);
  const double err = stage("matrix_core", [&] { return operator_norm(res.value - oracle); });
  const double rel = err / std::max(1.0, f_sup);

  r.results["schedule"] = schedule_json(ext.params());
  r.results["integral"] = integral_json(res);
  r.results["oracle"] = matrix_to_json(oracle);
  r.results["f_sup"] = f_sup;
  r.results["error_op"] = err;
  r.checks.push_back(check_at_most("oracle_agreement", rel, 1e-3));
  r.checks.push_back(check_at_most("bound_integral_finite",
                                   std::isfinite(res.bound_integral) ? 0.0 : 1.0, 0.0));
  if (is_diagonal(A))
  {
    std::vector<double> diag;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      diag.push_back(A(i, i).real());
    const auto scalars = stage("hs_integrator", [&] { return scalar_hs_eval(ext, diag, cfg.spec, opts); });
    double dev = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j)
        dev = std::max(dev, std::abs(res.value(i, j) - (i == j ? scalars[i] : cplx(0.0))));
    r.results["diagonal_scalars"] = json::array();
    for (const cplx &s : scalars)
      r.results["diagonal_scalars"].push_back({s.real(), s.imag()});
    r.checks.push_back(check_at_most("diagonal_consistency", dev, 1e-12));
  }
  return r;
}

Report run_apply_unitary(const JobConfig &cfg)
{
  Report r = base_report(cfg);
  const CircleFunction cf = require_circle(cfg);
  const ComplexMatrix &U = require_matrix(cfg);
  const auto ce = stage("cayley", [&] { return CircleExtension::build(cf, cfg.N, cfg.T0); });
  const auto opts = integration_options(cfg);
  const IntegralResult res =
      stage("hs_integrator", [&] { return hs_apply_unitary(ce, U, cfg.spec, opts); });
  const ComplexMatrix oracle = stage("matrix_core", [&] {
    return cfg.matrix.kind == MatrixSource::Kind::SynthUnitary ? synthesis_oracle(cfg.matrix, cf)
                                                                : unitary_oracle(U, cf);
  });
  const double f_sup = sup_norm(cf.pullback());
  const double err = stage("matrix_core", [&] { return operator_norm(res.value - oracle); });

  r.results["schedule"] = schedule_json(ce.base().params());
  const Region &g = ce.support_region();
  r.results["region"] = {{"C_omega", g.C_omega}, {"d_omega", g.d_omega}, {"r_min", g.r_min},
                         {"phi_min", g.phi_min}, {"phi_max", g.phi_max}};
  r.results["integral"] = integral_json(res);
  r.results["oracle"] = matrix_to_json(oracle);
  r.results["f_sup"] = f_sup;
  r.results["error_op"] = err;
  r.checks.push_back(check_at_most("oracle_agreement", err / std::max(1.0, f_sup), 1e-3));
  r.checks.push_back(check_at_most("bound_integral_finite",
                                   std::isfinite(res.bound_integral) ? 0.0 : 1.0, 0.0));
  return r;
}

Report run_cauchy_check(const JobConfig &cfg)
{
  Report r = base_report(cfg);
  const CauchyOptions &o = cfg.cauchy;
  PlaneField u;
  Rect rect{-1.0, 1.0, -1.0, 1.0};
  std::shared_ptr<AlmostAnalyticExtension> ext;
  if (o.field == "z2")
  {
    u = {[](cplx z) { return z * z; }, [](cplx) { return cplx(0.0); }};
  }
  else if (o.field == "one")
  {
    u = {[](cplx) { return cplx(1.0); }, [](cplx) { return cplx(0.0); }};
  }
  else
  {
    ext = std::make_shared<AlmostAnalyticExtension>(stage(
        "almost_analytic", [&] { return AlmostAnalyticExtension::build(require_real(cfg), cfg.N, cfg.T0); }));
    u = {[ext](cplx z) { return ext->value(z); }, [ext](cplx z) { return ext->dbar(z); }};
    rect = default_extension_rect(*ext, 0.25);
    r.results["schedule"] = schedule_json(ext->params());
  }
  if (o.rect)
    rect = *o.rect;

  const auto res = stage("hs_integrator", [&] {
    return cauchy_pompeiu_check(u, rect, o.xi, o.nodes_per_edge, o.area_cells);
  });
  auto pair = [](cplx z) { return json::array({z.real(), z.imag()}); };
  r.results["rect"] = {rect.x0, rect.x1, rect.y0, rect.y1};
  r.results["boundary_term"] = pair(res.boundary_term);
  r.results["area_term"] = pair(res.area_term);
  r.results["reconstructed"] = pair(res.reconstructed);
  r.results["reference"] = pair(res.reference);
  r.results["abs_err"] = res.abs_err;

  if (o.field == "extension")
  {
    r.checks.push_back(check_at_most("boundary_term_vanishes", std::abs(res.boundary_term), 1e-8));
    r.checks.push_back(
        check_at_most("area_term_reproduces_u", std::abs(res.area_term - res.reference), 1e-4));
  }
  else
  {
    r.checks.push_back(check_at_most("area_term_vanishes", std::abs(res.area_term), 1e-6));
    r.checks.push_back(check_at_most("boundary_term_reproduces_u",
                                     std::abs(res.boundary_term - res.reference), 1e-6));
  }
  return r;
}

Report run_convergence(const JobConfig &cfg)
{
  Report r = base_report(cfg);
  const SweepOptions &s = cfg.sweep;
  ConvergenceProblem problem = [&]() -> ConvergenceProblem {
    if (s.problem == "scalar")
    {
      auto ext = stage("almost_analytic", [&] { return AlmostAnalyticExtension::build(require_real(cfg), cfg.N, cfg.T0); });
      return ScalarProblem{std::move(ext), s.xis};
    }
    if (s.problem == "selfadjoint")
    {
      const SmoothCompactFunction f = require_real(cfg);
      const ComplexMatrix &A = require_matrix(cfg);
      auto ext = stage("almost_analytic", [&] { return AlmostAnalyticExtension::build(f, cfg.N, cfg.T0); });
      auto ref = stage("matrix_core", [&] { return hermitian_oracle(A, f); });
      return SelfAdjointProblem{std::move(ext), A, std::move(ref)};
    }
    const CircleFunction cf = require_circle(cfg);
    const ComplexMatrix &U = require_matrix(cfg);
    auto ce = stage("cayley", [&] { return CircleExtension::build(cf, cfg.N, cfg.T0); });
    auto ref = stage("matrix_core", [&] {
      return cfg.matrix.kind == MatrixSource::Kind::SynthUnitary ? synthesis_oracle(cfg.matrix, cf)
                                                                  : unitary_oracle(U, cf);
    });
    return UnitaryProblem{std::move(ce), U, std::move(ref)};
  }();

  Sweep sweep;
  sweep.parameter = s.parameter == "epsilon" ? SweepParameter::Epsilon : SweepParameter::Cells;
  sweep.values = s.values;
  sweep.base = cfg.spec;
  sweep.estimate_grid_error = s.grid_error;
  const ConvergenceTable table =
      stage("hs_integrator", [&] { return convergence_study(problem, sweep, integration_options(cfg)); });

  Table t{{"param", "error", "runtime_ms"}, {}};
  if (s.grid_error)
    t.columns.push_back("grid_error");
  json rows = json::array();
  bool decreasing = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
  {
    const auto &row = table.rows[i];
    std::vector<double> line{row.param, row.error, row.runtime_ms};
    json jr = {{"param", row.param}, {"error", row.error}};
    if (s.grid_error)
    {
      line.push_back(row.grid_error);
      jr["grid_error"] = row.grid_error;
    }
    t.rows.push_back(std::move(line));
    rows.push_back(std::move(jr));
    // Rows are sorted by param ascending; errors must grow with epsilon.
    if (i > 0 && !(row.error > table.rows[i - 1].error))
      decreasing = false;
  }
  r.results["rows"] = std::move(rows);
  r.results["fitted_rate"] = table.fitted_rate;
  if (sweep.parameter == SweepParameter::Epsilon)
  {
    r.checks.push_back(check_at_most("errors_strictly_decreasing", decreasing ? 0.0 : 1.0, 0.0));
    r.checks.push_back(check_at_least("fitted_rate", table.fitted_rate, 0.8));
  }
  r.table = std::move(t);
  r.table_volatile_columns = {"runtime_ms"};
  return r;
}

Report run(const JobConfig &cfg, const RunOptions &opts)
{
  if (!cfg.seed)
    throw ConfigError("seed", "required by '" + cfg.command + "'");
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  if (cfg.command == "extend")
    r = run_extend(cfg);
  else if (cfg.command == "apply-sa")
    r = run_apply_sa(cfg);
  else if (cfg.command == "apply-unitary")
    r = run_apply_unitary(cfg);
  else if (cfg.command == "cauchy-check")
    r = run_cauchy_check(cfg);
  else if (cfg.command == "convergence")
    r = run_convergence(cfg);
  else if (cfg.command == "verify")
    r = run_verify(cfg);
  else
    throw ConfigError("command", "unknown command '" + cfg.command + "'");
  if (opts.timings)
  {
    r.timings["total"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    r.include_volatile = true;
  }
  return r;
}

} // namespace hsf::cli
