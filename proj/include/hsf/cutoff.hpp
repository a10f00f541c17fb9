// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace hsf
{

/// Smooth even cutoff: 1 on [-1/2, 1/2], 0 outside (-1, 1), monotone in |t|
/// in between. The transition is the mollifier ramp
/// r(s) = B(s) / (B(s) + B(1 - s)), B(s) = exp(-1/s) for s > 0.
class CutoffChi
{
public:
  double value(double t) const noexcept;
  double derivative(double t) const noexcept;
};

CutoffChi build_cutoff();

} // namespace hsf
