// SPDX-License-Identifier: Apache-2.0

#include "hsf/smooth_function.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hsf/errors.hpp"

namespace hsf
{

SmoothCompactFunction::SmoothCompactFunction(Expr expr, Interval support, int max_order,
                                             ArgumentMap argument_map, std::string description)
  : expr_(std::move(expr)), support_(support), max_order_(max_order),
    argument_map_(std::move(argument_map)), description_(std::move(description))
{
  if (expr_.empty())
    throw PreconditionError("empty expression");
  if (!(std::isfinite(support_.lo) && std::isfinite(support_.hi) && support_.hi > support_.lo))
    throw PreconditionError("support must be a finite interval of positive length");
  if (max_order_ < 0)
    throw PreconditionError("max_order must be nonnegative");
  if (description_.empty())
    description_ = expr_.to_string();

  const double len = support_.length();
  constexpr std::array<double, 4> margins{1e-3, 1e-2, 1e-1, 1.0};
  for (double m : margins)
  {
    for (double x : {support_.lo - m * len, support_.hi + m * len})
    {
      TaylorSeries arg = TaylorSeries::variable(x, max_order_);
      if (argument_map_)
        arg = argument_map_(arg);
      const TaylorSeries s = expr_.evaluate(arg);
      if (!s.is_zero())
        throw PreconditionError("expression '" + description_ +
                                "' does not vanish outside its declared support at x = " +
                                std::to_string(x));
    }
  }
}

SmoothCompactFunction SmoothCompactFunction::parse(const std::string &text, Interval support,
                                                   int max_order)
{
  return SmoothCompactFunction(parse_expression(text), support, max_order);
}

TaylorJet SmoothCompactFunction::jet(double x, int order) const
{
  if (order < 0)
    throw PreconditionError("jet order must be nonnegative");
  if (!support_.contains(x))
    return TaylorJet::zero(x, order);
  TaylorSeries arg = TaylorSeries::variable(x, order);
  if (argument_map_)
    arg = argument_map_(arg);
  return TaylorJet{x, order, expr_.evaluate(arg).derivatives()};
}

double SmoothCompactFunction::value(double x) const
{
  return jet(x, 0).derivs[0];
}

DerivativeBounds estimate_sup_derivatives(const SmoothCompactFunction &f, int order,
                                          int grid_resolution)
{
  if (order < 0 || order > f.max_order())
    throw PreconditionError("derivative order " + std::to_string(order) +
                            " exceeds the function's max_order " + std::to_string(f.max_order()));
  if (grid_resolution < 64)
    throw PreconditionError("grid_resolution must be at least 64 points per unit length");

  const double h = 1.0 / grid_resolution;
  const Interval s = f.support();
  const auto cells = static_cast<long>(std::ceil(s.length() * grid_resolution));
  std::vector<double> peak(static_cast<std::size_t>(order) + 1, 0.0);
  for (long i = -1; i <= cells + 1; ++i)
  {
    const double x = s.lo + static_cast<double>(i) * h;
    const TaylorJet j = f.jet(x, order);
    for (int k = 0; k <= order; ++k)
      peak[k] = std::max(peak[k], std::abs(j.derivs[k]));
  }

  DerivativeBounds b;
  b.grid_resolution = grid_resolution;
  b.M.resize(peak.size());
  double running = 0.0;
  for (std::size_t n = 0; n < peak.size(); ++n)
  {
    running = std::max(running, peak[n]);
    b.M[n] = kDerivativeSafetyFactor * running;
  }
  return b;
}

} // namespace hsf
