// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hsf/cutoff.hpp"
#include "hsf/smooth_function.hpp"

namespace hsf
{

using cplx = std::complex<double>;

inline constexpr int kDefaultTruncation = 6;
inline constexpr double kDefaultT0 = 0.5;

/// Truncation order and cutoff scales of the extension series.
///
/// T is nonincreasing, 0 < T[0] < 1 and T[n] * M[2n] <= 2^-n holds exactly in
/// floating point for every n <= N.
struct ExtensionParams
{
  int N = kDefaultTruncation;
  std::vector<double> T;
  double C = 0.0; // == T[0], half-height of the support rectangle
  DerivativeBounds bounds;
};

/// T[0] = min(T0, 1/(1+M[0])), T[n] = min(T[n-1], 2^-n / max(M[2n], 1)).
ExtensionParams compute_schedule(const DerivativeBounds &bounds, int N, double T0 = kDefaultT0);

/// Truncated almost-analytic extension
///
///     F(x+iy) = sum_{n=0}^{N} (iy)^n / n! f^{(n)}(x) chi(y / T[n]).
///
/// F agrees with f on the real axis, vanishes off [a,b] x [-T[0], T[0]], and
/// its d-bar derivative vanishes like |y|^N near the axis.
class AlmostAnalyticExtension
{
public:
  AlmostAnalyticExtension(SmoothCompactFunction f, ExtensionParams params);

  /// Estimates M up to order 2N on a grid, then builds the schedule.
  static AlmostAnalyticExtension build(SmoothCompactFunction f, int N = kDefaultTruncation,
                                       double T0 = kDefaultT0, int grid_resolution = 1024);

  const SmoothCompactFunction &function() const noexcept { return f_; }
  const ExtensionParams &params() const noexcept { return params_; }
  const CutoffChi &chi() const noexcept { return chi_; }

  bool in_support_rectangle(cplx z) const noexcept;

  cplx value(cplx z) const;

  /// d-bar = (d/dx + i d/dy)/2 of the truncated series, differentiated term
  /// by term.
  cplx dbar(cplx z) const;

private:
  SmoothCompactFunction f_;
  ExtensionParams params_;
  CutoffChi chi_;
};

inline cplx eval_extension(const AlmostAnalyticExtension &ext, cplx z) { return ext.value(z); }
inline cplx eval_dbar(const AlmostAnalyticExtension &ext, cplx z) { return ext.dbar(z); }

struct DecayFit
{
  double slope = 0.0;     // +inf when every sample is zero
  double constant = 0.0;  // exp(intercept) of the log-log fit
  double max_ratio = 0.0; // max sup_x |dbar| / |y|^l over the sampled heights
  double y_lo = 0.0;
  double y_hi = 0.0;
};

/// Least-squares slope of log sup_x |dbar F(x+iy)| against log |y|.
///
/// Heights are log-uniform in [1e-6, T[N]/4]; when T[N]/4 does not leave a
/// full decade above 1e-6 the window is moved to [T[N]/4 * 1e-6, T[N]/4].
/// The sup over x is taken over a shared set of uniform samples in supp f.
DecayFit verify_decay(const AlmostAnalyticExtension &ext, int l, int n_samples, std::uint64_t seed);

} // namespace hsf
