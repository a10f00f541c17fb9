// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "hsf/extension.hpp"

namespace hsf
{

/// psi(z) = (z + i)/(z - i). Maps the real line onto the unit circle minus 1
/// and the lower half-plane onto the unit disk. Throws PoleError at z = i.
cplx psi(cplx z);

/// psi^{-1}(xi) = i (xi + 1)/(xi - 1). Throws PoleError at xi = 1.
cplx psi_inv(cplx xi);

/// Complex derivative of psi^{-1}: -2i / (xi - 1)^2.
cplx psi_inv_prime(cplx xi);

/// Distance to the unit circle.
inline double circle_distance(cplx xi) { return std::abs(std::abs(xi) - 1.0); }

/// Smooth function on the unit circle, supported away from 1, stored as its
/// pullback h = f o psi on the real line. f(1) is taken to be 0.
class CircleFunction
{
public:
  explicit CircleFunction(SmoothCompactFunction pullback);

  /// h given directly as an expression in t, supported in [a, b].
  static CircleFunction from_pullback(const std::string &expr, Interval support,
                                      int max_order = kDefaultMaxOrder);

  /// f given as an expression in the angle theta, supported in
  /// [theta1, theta2] with 0 < theta1 < theta2 < 2 pi. The pullback is
  /// expr(pi - 2 atan(t)) on [cot(theta2/2), cot(theta1/2)].
  static CircleFunction from_angle(const std::string &expr, double theta1, double theta2,
                                   int max_order = kDefaultMaxOrder);

  const SmoothCompactFunction &pullback() const noexcept { return h_; }

  /// f at a point of the circle (the point is projected through psi^{-1}).
  double value(cplx zeta) const;
  double value_at_angle(double theta) const;

private:
  SmoothCompactFunction h_;
};

/// Rectangle [a,b] x [-c,c] in the psi^{-1} plane and its image under psi.
///
/// C_Omega = d(1, Omega) and d_Omega = sup |xi| are estimated on the boundary
/// (512 samples per edge); for a Moebius image both extremes sit there.
struct Region
{
  Interval x;
  double c = 0.0;
  double C_omega = 0.0;
  double d_omega = 0.0;
  double r_min = 0.0;   // min |xi| over the boundary samples
  double phi_min = 0.0; // argument range, in (0, 2 pi)
  double phi_max = 0.0;

  static Region make(Interval x, double c, int samples_per_edge = 512);

  bool contains_preimage(cplx w) const noexcept
  {
    return x.contains(w.real()) && std::abs(w.imag()) <= c;
  }
};

/// Circle extension F = (h^C) o psi^{-1}, supported in
/// Omega_0 = psi(supp h x [-C, C]).
class CircleExtension
{
public:
  explicit CircleExtension(AlmostAnalyticExtension base);

  static CircleExtension build(const CircleFunction &f, int N = kDefaultTruncation,
                               double T0 = kDefaultT0, int grid_resolution = 1024);

  const AlmostAnalyticExtension &base() const noexcept { return base_; }
  const Region &support_region() const noexcept { return omega0_; }

  cplx value(cplx xi) const;

  /// d-bar through the chain rule: (d-bar h^C)(psi^{-1}(xi)) * conj(psi^{-1}'(xi)).
  cplx dbar(cplx xi) const;

private:
  AlmostAnalyticExtension base_;
  Region omega0_;
};

inline cplx eval_circle_extension(const CircleExtension &ce, cplx xi) { return ce.value(xi); }
inline cplx eval_circle_dbar(const CircleExtension &ce, cplx xi) { return ce.dbar(xi); }

struct ComparabilityReport
{
  bool empty = false; // degenerate rectangle (c == 0): nothing sampled
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double max_identity_error = 0.0; // relative, against (|xi|+1)/|xi-1|^2
  bool within_bounds = true;
  int samples = 0;
};

/// Samples xi in Omega off the circle and checks
/// C1 <= |Im psi^{-1}(xi)| / d(xi, S^1) <= C2 with C1 = 1/(1 + d_Omega) and
/// C2 = (d_Omega + 1)/C_Omega^2.
ComparabilityReport verify_imag_comparability(const Region &region, int n_samples,
                                              std::uint64_t seed);

} // namespace hsf
