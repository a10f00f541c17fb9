// SPDX-License-Identifier: Apache-2.0

#include "hsf/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsf/errors.hpp"
#include "hsf/rng.hpp"

namespace hsf
{

ExtensionParams compute_schedule(const DerivativeBounds &bounds, int N, double T0)
{
  if (N < 1)
    throw PreconditionError("truncation order N must be at least 1");
  if (!(T0 > 0.0 && T0 < 1.0))
    throw PreconditionError("T0 must lie in (0, 1)");
  if (bounds.M.size() < static_cast<std::size_t>(2 * N + 1))
    throw PreconditionError("derivative bounds must reach order 2N = " + std::to_string(2 * N));

  ExtensionParams p;
  p.N = N;
  p.bounds = bounds;
  p.T.resize(static_cast<std::size_t>(N) + 1);
  p.T[0] = std::min(T0, 1.0 / (1.0 + bounds.M[0]));
  double cap = 1.0;
  for (int n = 1; n <= N; ++n)
  {
    cap *= 0.5;
    const double m = bounds.M[2 * n];
    double t = std::min(p.T[n - 1], cap / std::max(m, 1.0));
    // The quotient may round up; step down until the product is within 2^-n.
    while (t * m > cap)
      t = std::nextafter(t, 0.0);
    p.T[n] = t;
  }
  p.C = p.T[0];
  return p;
}

AlmostAnalyticExtension::AlmostAnalyticExtension(SmoothCompactFunction f, ExtensionParams params)
  : f_(std::move(f)), params_(std::move(params)), chi_(build_cutoff())
{
  if (params_.N < 1 || params_.T.size() != static_cast<std::size_t>(params_.N) + 1)
    throw PreconditionError("schedule length must be N + 1");
  if (f_.max_order() < params_.N + 1)
    throw PreconditionError("max_order must be at least N + 1 for d-bar evaluation");
  if (!(params_.T[0] > 0.0 && params_.T[0] < 1.0))
    throw PreconditionError("T[0] must lie in (0, 1)");
}

AlmostAnalyticExtension AlmostAnalyticExtension::build(SmoothCompactFunction f, int N, double T0,
                                                       int grid_resolution)
{
  const int order = std::max(2 * N, N + 1);
  if (order > f.max_order())
    throw PreconditionError("max_order " + std::to_string(f.max_order()) +
                            " is too small for truncation N = " + std::to_string(N) + " (needs " +
                            std::to_string(order) + ")");
  DerivativeBounds b = estimate_sup_derivatives(f, order, grid_resolution);
  ExtensionParams p = compute_schedule(b, N, T0);
  return AlmostAnalyticExtension(std::move(f), std::move(p));
}

bool AlmostAnalyticExtension::in_support_rectangle(cplx z) const noexcept
{
  return f_.support().contains(z.real()) && std::abs(z.imag()) <= params_.C;
}

namespace
{

// Largest n with |y| < T[n], or -1 when every cutoff vanishes.
int last_active_term(const std::vector<double> &T, double ay)
{
  int last = -1;
  for (std::size_t n = 0; n < T.size(); ++n)
  {
    if (ay < T[n])
      last = static_cast<int>(n);
    else
      break;
  }
  return last;
}

} // namespace

cplx AlmostAnalyticExtension::value(cplx z) const
{
  if (!in_support_rectangle(z))
    return 0.0;
  const double x = z.real();
  const double y = z.imag();
  if (y == 0.0)
    return f_.value(x);

  const int last = last_active_term(params_.T, std::abs(y));
  if (last < 0)
    return 0.0;
  const TaylorJet j = f_.jet(x, last);
  cplx sum = 0.0;
  cplx term = 1.0; // (iy)^n / n!
  for (int n = 0; n <= last; ++n)
  {
    if (n > 0)
      term *= cplx(0.0, y) / static_cast<double>(n);
    sum += term * j.derivs[n] * chi_.value(y / params_.T[n]);
  }
  return sum;
}

cplx AlmostAnalyticExtension::dbar(cplx z) const
{
  if (!in_support_rectangle(z))
    return 0.0;
  const double x = z.real();
  const double y = z.imag();
  if (y == 0.0)
    return 0.0;

  const int last = last_active_term(params_.T, std::abs(y));
  if (last < 0)
    return 0.0;
  const int N = params_.N;
  const TaylorJet j = f_.jet(x, last + 1);
  const auto &T = params_.T;

  std::vector<double> chi(static_cast<std::size_t>(last) + 1);
  for (int n = 0; n <= last; ++n)
    chi[n] = chi_.value(y / T[n]);
  auto chi_at = [&](int n) { return n <= last ? chi[n] : 0.0; };

  // d/dx of term n plus the part of i d/dy hitting (iy)^n: the latter
  // cancels the x-derivative of term n-1 wherever both cutoffs are 1, so the
  // two are combined pairwise before summing.
  cplx smooth = 0.0;
  cplx power = 1.0; // (iy)^{n-1} / (n-1)!
  const int top = std::min(N, last + 1);
  for (int n = 1; n <= top; ++n)
  {
    if (n > 1)
      power *= cplx(0.0, y) / static_cast<double>(n - 1);
    const double dchi = chi_at(n - 1) - chi_at(n);
    if (dchi != 0.0)
      smooth += power * j.derivs[n] * dchi;
  }
  if (last == N)
  {
    cplx tail = 1.0;
    for (int k = 1; k <= N; ++k)
      tail *= cplx(0.0, y) / static_cast<double>(k);
    smooth += tail * j.derivs[N + 1] * chi[N];
  }

  // The part of i d/dy hitting the cutoffs.
  cplx edge = 0.0;
  cplx term = 1.0; // (iy)^n / n!
  for (int n = 0; n <= last; ++n)
  {
    if (n > 0)
      term *= cplx(0.0, y) / static_cast<double>(n);
    const double dchi = chi_.derivative(y / T[n]);
    if (dchi != 0.0)
      edge += term * j.derivs[n] * (dchi / T[n]);
  }

  return 0.5 * (smooth + cplx(0.0, 1.0) * edge);
}

DecayFit verify_decay(const AlmostAnalyticExtension &ext, int l, int n_samples, std::uint64_t seed)
{
  const int N = ext.params().N;
  if (l < 1 || l > N)
    throw PreconditionError("decay order l must satisfy 1 <= l <= N");
  if (n_samples < 100)
    throw PreconditionError("verify_decay needs at least 100 samples");

  DecayFit fit;
  fit.y_hi = ext.params().T[N] / 4.0;
  fit.y_lo = fit.y_hi >= 1e-5 ? 1e-6 : fit.y_hi * 1e-6;

  Rng rng(seed);
  Rng xs_rng = rng.split("decay.x");
  Rng ys_rng = rng.split("decay.y");
  constexpr int n_x = 32;
  const int n_y = std::max(4, n_samples / n_x);
  const Interval s = ext.function().support();
  std::vector<double> xs(n_x);
  for (double &x : xs)
    x = xs_rng.uniform(s.lo, s.hi);

  const double log_lo = std::log(fit.y_lo);
  const double log_hi = std::log(fit.y_hi);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int i = 0; i < n_y; ++i)
  {
    const double y = std::exp(ys_rng.uniform(log_lo, log_hi));
    double sup = 0.0;
    for (double x : xs)
      sup = std::max(sup, std::abs(ext.dbar(cplx(x, y))));
    if (sup == 0.0)
      continue;
    fit.max_ratio = std::max(fit.max_ratio, sup / std::pow(y, l));
    const double u = std::log(y);
    const double v = std::log(sup);
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
    ++count;
  }

  if (count < 2)
  {
    fit.slope = std::numeric_limits<double>::infinity();
    fit.constant = 0.0;
    return fit;
  }
  const double denom = count * sxx - sx * sx;
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.constant = std::exp((sy - fit.slope * sx) / count);
  return fit;
}

} // namespace hsf
