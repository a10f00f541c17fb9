// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hsf/expr.hpp"
#include "hsf/jet.hpp"

namespace hsf
{

struct Interval
{
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Series-level substitution applied before the expression: the function
/// evaluated is expr(map(t)). An empty map means the identity.
using ArgumentMap = std::function<TaylorSeries(const TaylorSeries &)>;

inline constexpr int kDefaultMaxOrder = 12;

/// A C-infinity function with compact support, given by an expression.
///
/// Outside the support the jet is reported as exactly zero. The constructor
/// samples points beyond both ends of the support and rejects expressions
/// that do not vanish there together with their derivatives.
class SmoothCompactFunction
{
public:
  SmoothCompactFunction(Expr expr, Interval support, int max_order = kDefaultMaxOrder,
                        ArgumentMap argument_map = {}, std::string description = {});

  /// Convenience: parse `text` and build.
  static SmoothCompactFunction parse(const std::string &text, Interval support,
                                     int max_order = kDefaultMaxOrder);

  const Expr &expr() const noexcept { return expr_; }
  const Interval &support() const noexcept { return support_; }
  int max_order() const noexcept { return max_order_; }

  /// Human-readable source form (the expression, or the angle form it came
  /// from).
  const std::string &description() const noexcept { return description_; }

  TaylorJet jet(double x, int order) const;
  double value(double x) const;

private:
  Expr expr_;
  Interval support_;
  int max_order_;
  ArgumentMap argument_map_;
  std::string description_;
};

/// M[n] = estimated sup over the real line of max_{k <= n} |f^{(k)}|.
struct DerivativeBounds
{
  std::vector<double> M;
  int grid_resolution = 0;
};

inline constexpr double kDerivativeSafetyFactor = 1.1;

/// Grid estimate on the support padded by one grid cell on each side,
/// scaled by kDerivativeSafetyFactor. Heuristic, not a rigorous bound.
DerivativeBounds estimate_sup_derivatives(const SmoothCompactFunction &f, int order,
                                          int grid_resolution = 1024);

} // namespace hsf
