// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hsf/integrator.hpp"

namespace hsf
{

struct ScalarProblem
{
  AlmostAnalyticExtension ext;
  std::vector<double> xis; // error is the max over these points
};

struct SelfAdjointProblem
{
  AlmostAnalyticExtension ext;
  ComplexMatrix A;
  ComplexMatrix reference; // spectral oracle f(A)
};

struct UnitaryProblem
{
  CircleExtension ce;
  ComplexMatrix U;
  ComplexMatrix reference;
};

using ConvergenceProblem = std::variant<ScalarProblem, SelfAdjointProblem, UnitaryProblem>;

enum class SweepParameter
{
  Epsilon,
  Cells, // base_cells_x = base_cells_y = value
};

struct Sweep
{
  SweepParameter parameter = SweepParameter::Epsilon;
  std::vector<double> values;
  QuadratureSpec base; // fields not swept
  bool estimate_grid_error = false;
};

struct ConvergenceRow
{
  double param = 0.0;
  double error = 0.0;
  double runtime_ms = 0.0;
  /// |I(spec) - I(spec with doubled base cells)|, NaN unless requested.
  double grid_error = 0.0;
};

struct ConvergenceTable
{
  SweepParameter parameter = SweepParameter::Epsilon;
  std::vector<ConvergenceRow> rows; // sorted by param ascending
  /// Order of convergence: slope of log error against log epsilon, or minus
  /// the slope against log cell count.
  double fitted_rate = 0.0;
};

ConvergenceTable convergence_study(const ConvergenceProblem &problem, const Sweep &sweep,
                                   const IntegrationOptions &opts = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace hsf
