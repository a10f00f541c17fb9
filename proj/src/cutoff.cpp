// SPDX-License-Identifier: Apache-2.0

#include "hsf/cutoff.hpp"

#include <cmath>

namespace hsf
{

namespace
{

// ramp(s) on 0 < s < 1, written as 1 / (1 + B(1-s)/B(s)) to stay finite.
double ramp(double s)
{
  const double e = std::exp(1.0 / s - 1.0 / (1.0 - s)); // B(1-s)/B(s)
  return 1.0 / (1.0 + e);
}

double ramp_derivative(double s)
{
  const double q = 1.0 / s - 1.0 / (1.0 - s);
  const double dq = -1.0 / (s * s) - 1.0 / ((1.0 - s) * (1.0 - s));
  // d/ds (1 + e^q)^{-1} = -q' e^q / (1 + e^q)^2, and e^q / (1 + e^q)^2 is
  // symmetric in q, so use m = e^{-|q|} <= 1 to avoid overflow.
  const double m = std::exp(-std::abs(q));
  return -dq * (m / ((1.0 + m) * (1.0 + m)));
}

} // namespace

double CutoffChi::value(double t) const noexcept
{
  const double a = std::abs(t);
  if (a <= 0.5)
    return 1.0;
  if (a >= 1.0)
    return 0.0;
  return 1.0 - ramp(2.0 * a - 1.0);
}

double CutoffChi::derivative(double t) const noexcept
{
  const double a = std::abs(t);
  if (a <= 0.5 || a >= 1.0)
    return 0.0;
  const double d = -2.0 * ramp_derivative(2.0 * a - 1.0);
  return t > 0.0 ? d : -d;
}

CutoffChi build_cutoff()
{
  return CutoffChi{};
}

} // namespace hsf
