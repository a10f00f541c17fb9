// SPDX-License-Identifier: Apache-2.0

#include "hsf/convergence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "hsf/errors.hpp"

namespace hsf
{

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw PreconditionError("log-log fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double u = std::log(x[i]);
    const double v = std::log(y[i]);
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace
{

// Integral approximation for one spec, as a matrix (1 x K for scalar
// problems), plus the error against the reference.
struct Evaluation
{
  ComplexMatrix value;
  double error;
};

Evaluation evaluate(const ConvergenceProblem &problem, const QuadratureSpec &spec,
                    const IntegrationOptions &opts)
{
  return std::visit(
      [&](const auto &p) -> Evaluation {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ScalarProblem>)
        {
          const auto vals = scalar_hs_eval(p.ext, p.xis, spec, opts);
          ComplexMatrix v(1, static_cast<Eigen::Index>(vals.size()));
          double err = 0.0;
          for (std::size_t j = 0; j < vals.size(); ++j)
          {
            v(0, static_cast<Eigen::Index>(j)) = vals[j];
            err = std::max(err, std::abs(vals[j] - p.ext.function().value(p.xis[j])));
          }
          return {v, err};
        }
        else if constexpr (std::is_same_v<P, SelfAdjointProblem>)
        {
          IntegralResult r = hs_apply_selfadjoint(p.ext, p.A, spec, opts);
          const double err = operator_norm(r.value - p.reference);
          return {std::move(r.value), err};
        }
        else
        {
          IntegralResult r = hs_apply_unitary(p.ce, p.U, spec, opts);
          const double err = operator_norm(r.value - p.reference);
          return {std::move(r.value), err};
        }
      },
      problem);
}

} // namespace

ConvergenceTable convergence_study(const ConvergenceProblem &problem, const Sweep &sweep,
                                   const IntegrationOptions &opts)
{
  if (sweep.values.size() < 4)
    throw PreconditionError("a convergence sweep needs at least four points");
  std::vector<double> values = sweep.values;
  std::sort(values.begin(), values.end());
  if (!(values.back() >= 10.0 * values.front()))
    throw PreconditionError("a convergence sweep must span at least one decade");

  ConvergenceTable table;
  table.parameter = sweep.parameter;
  for (double v : values)
  {
    QuadratureSpec spec = sweep.base;
    if (sweep.parameter == SweepParameter::Epsilon)
      spec.epsilon = v;
    else
      spec.base_cells_x = spec.base_cells_y = static_cast<int>(std::lround(v));

    const auto t0 = std::chrono::steady_clock::now();
    Evaluation e = evaluate(problem, spec, opts);
    const auto t1 = std::chrono::steady_clock::now();

    ConvergenceRow row;
    row.param = v;
    row.error = e.error;
    row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    row.grid_error = std::numeric_limits<double>::quiet_NaN();
    if (sweep.estimate_grid_error)
    {
      QuadratureSpec fine = spec;
      fine.base_cells_x *= 2;
      fine.base_cells_y *= 2;
      const Evaluation f = evaluate(problem, fine, opts);
      row.grid_error = (f.value - e.value).cwiseAbs().maxCoeff();
    }
    table.rows.push_back(row);
  }

  std::vector<double> xs, ys;
  for (const auto &r : table.rows)
  {
    if (r.error > 0.0)
    {
      xs.push_back(r.param);
      ys.push_back(r.error);
    }
  }
  if (xs.size() >= 2)
  {
    const double slope = loglog_slope(xs, ys);
    table.fitted_rate = sweep.parameter == SweepParameter::Epsilon ? slope : -slope;
  }
  else
  {
    table.fitted_rate = std::numeric_limits<double>::infinity();
  }
  return table;
}

} // namespace hsf
