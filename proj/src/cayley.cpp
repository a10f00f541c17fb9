// SPDX-License-Identifier: Apache-2.0

#include "hsf/cayley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hsf/errors.hpp"
#include "hsf/rng.hpp"

namespace hsf
{

namespace
{
constexpr cplx I{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;
} // namespace

cplx psi(cplx z)
{
  const cplx d = z - I;
  if (d == 0.0)
    throw PoleError("Cayley transform evaluated at its pole z = i");
  return (z + I) / d;
}

cplx psi_inv(cplx xi)
{
  const cplx d = xi - 1.0;
  if (d == 0.0)
    throw PoleError("inverse Cayley transform evaluated at its pole xi = 1");
  return I * (xi + 1.0) / d;
}

cplx psi_inv_prime(cplx xi)
{
  const cplx d = xi - 1.0;
  if (d == 0.0)
    throw PoleError("derivative of the inverse Cayley transform evaluated at xi = 1");
  return -2.0 * I / (d * d);
}

CircleFunction::CircleFunction(SmoothCompactFunction pullback) : h_(std::move(pullback)) {}

CircleFunction CircleFunction::from_pullback(const std::string &expr, Interval support, int max_order)
{
  return CircleFunction(SmoothCompactFunction::parse(expr, support, max_order));
}

CircleFunction CircleFunction::from_angle(const std::string &expr, double theta1, double theta2,
                                          int max_order)
{
  if (!(0.0 < theta1 && theta1 < theta2 && theta2 < kTwoPi))
    throw PreconditionError("theta support must satisfy 0 < theta1 < theta2 < 2 pi");
  // t = cot(theta/2) is decreasing in theta.
  const Interval support{1.0 / std::tan(theta2 / 2.0), 1.0 / std::tan(theta1 / 2.0)};
  ArgumentMap to_angle = [](const TaylorSeries &t) {
    return TaylorSeries::constant(std::numbers::pi, t.order()) - atan(t) * 2.0;
  };
  return CircleFunction(SmoothCompactFunction(parse_expression(expr), support, max_order,
                                              std::move(to_angle),
                                              "angle:" + expr));
}

double CircleFunction::value(cplx zeta) const
{
  if (zeta == 1.0)
    return 0.0;
  return h_.value(psi_inv(zeta).real());
}

double CircleFunction::value_at_angle(double theta) const
{
  const double s = std::sin(theta / 2.0);
  if (s == 0.0)
    return 0.0;
  return h_.value(std::cos(theta / 2.0) / s);
}

Region Region::make(Interval x, double c, int samples_per_edge)
{
  if (!(x.hi > x.lo))
    throw PreconditionError("region needs a < b");
  if (!(c >= 0.0 && c < 1.0))
    throw PreconditionError("region half-height c must lie in [0, 1)");

  Region r;
  r.x = x;
  r.c = c;
  r.C_omega = std::numeric_limits<double>::infinity();
  r.d_omega = 0.0;
  r.r_min = std::numeric_limits<double>::infinity();
  r.phi_min = kTwoPi;
  r.phi_max = 0.0;

  auto visit = [&](cplx w) {
    const cplx xi = psi(w);
    r.C_omega = std::min(r.C_omega, std::abs(xi - 1.0));
    r.d_omega = std::max(r.d_omega, std::abs(xi));
    r.r_min = std::min(r.r_min, std::abs(xi));
    double phi = std::arg(xi);
    if (phi < 0.0)
      phi += kTwoPi;
    r.phi_min = std::min(r.phi_min, phi);
    r.phi_max = std::max(r.phi_max, phi);
  };

  const int n = std::max(samples_per_edge, 2);
  for (int i = 0; i < n; ++i)
  {
    const double s = static_cast<double>(i) / (n - 1);
    const double xs = x.lo + s * x.length();
    const double ys = -c + s * 2.0 * c;
    visit(cplx(xs, -c));
    visit(cplx(xs, c));
    visit(cplx(x.lo, ys));
    visit(cplx(x.hi, ys));
  }
  // |psi(x + iy)| peaks at x = 0 on each horizontal edge.
  if (x.contains(0.0))
  {
    visit(cplx(0.0, -c));
    visit(cplx(0.0, c));
  }
  return r;
}

CircleExtension::CircleExtension(AlmostAnalyticExtension base)
  : base_(std::move(base)),
    omega0_(Region::make(base_.function().support(), base_.params().C))
{
  if (!(base_.params().C < 1.0))
    throw PreconditionError("circle extension needs C < 1");
}

CircleExtension CircleExtension::build(const CircleFunction &f, int N, double T0, int grid_resolution)
{
  return CircleExtension(AlmostAnalyticExtension::build(f.pullback(), N, T0, grid_resolution));
}

cplx CircleExtension::value(cplx xi) const
{
  if (xi == 1.0)
    return 0.0;
  const cplx w = psi_inv(xi);
  if (!base_.in_support_rectangle(w))
    return 0.0;
  return base_.value(w);
}

cplx CircleExtension::dbar(cplx xi) const
{
  if (xi == 1.0)
    return 0.0;
  const cplx w = psi_inv(xi);
  if (!base_.in_support_rectangle(w))
    return 0.0;
  const cplx g = base_.dbar(w);
  if (g == 0.0)
    return 0.0;
  return g * std::conj(psi_inv_prime(xi));
}

ComparabilityReport verify_imag_comparability(const Region &region, int n_samples, std::uint64_t seed)
{
  if (n_samples < 1000)
    throw PreconditionError("verify_imag_comparability needs at least 1000 samples");

  ComparabilityReport rep;
  if (region.c == 0.0)
  {
    rep.empty = true;
    return rep;
  }
  rep.C1 = 1.0 / (1.0 + region.d_omega);
  rep.C2 = (region.d_omega + 1.0) / (region.C_omega * region.C_omega);
  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.ratio_max = 0.0;

  Rng rng = Rng(seed).split("comparability");
  for (int i = 0; i < n_samples; ++i)
  {
    const cplx w(rng.uniform(region.x.lo, region.x.hi), rng.uniform(-region.c, region.c));
    const cplx xi = psi(w);
    const double d = circle_distance(xi);
    if (d == 0.0)
      continue;
    const double ratio = std::abs(psi_inv(xi).imag()) / d;
    const double exact = (std::abs(xi) + 1.0) / std::norm(xi - 1.0);
    rep.max_identity_error = std::max(rep.max_identity_error, std::abs(ratio - exact) / exact);
    rep.ratio_min = std::min(rep.ratio_min, ratio);
    rep.ratio_max = std::max(rep.ratio_max, ratio);
    if (ratio < rep.C1 || ratio > rep.C2)
      rep.within_bounds = false;
    ++rep.samples;
  }
  return rep;
}

} // namespace hsf
