// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "hsf/errors.hpp"
#include "hsf/extension.hpp"
#include "hsf/test_functions.hpp"
#include "support.hpp"

namespace hsf
{

void PrintTo(const NamedFunction &f, std::ostream *os)
{
  *os << f.name;
}
namespace
{

using test::kI;

TEST(Cutoff, PlateauAndSupport)
{
  const CutoffChi chi = build_cutoff();
  EXPECT_EQ(chi.value(0.25), 1.0);
  EXPECT_EQ(chi.value(0.5), 1.0);
  EXPECT_EQ(chi.value(-0.5), 1.0);
  EXPECT_EQ(chi.value(1.0), 0.0);
  EXPECT_EQ(chi.value(2.0), 0.0);
  EXPECT_EQ(chi.value(-7.0), 0.0);
  // Midpoint of the ramp is exactly 1/2 by symmetry of B(s)/(B(s)+B(1-s)).
  EXPECT_EQ(chi.value(0.75), 0.5);
  EXPECT_EQ(chi.value(-0.75), 0.5);
}

TEST(CutoffProperty, EvenMonotoneBoundedSmooth)
{
  const CutoffChi chi = build_cutoff();
  Rng rng(21);
  for (int i = 0; i < 2000; ++i)
  {
    const double t = rng.uniform(-1.5, 1.5);
    const double v = chi.value(t);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v, chi.value(-t));
    EXPECT_EQ(chi.derivative(t), -chi.derivative(-t));
    const double a = std::abs(t);
    if (a <= 0.5 || a >= 1.0)
    {
      EXPECT_EQ(chi.derivative(t), 0.0);
    }
    // Nonincreasing in |t|.
    EXPECT_GE(v, chi.value(a + 1e-3));
    if (a > 0.5 + 1e-4 && a < 1.0 - 1e-4)
    {
      const double fd = test::central_diff([&](double u) { return chi.value(u); }, t, 1e-6);
      EXPECT_NEAR(chi.derivative(t), fd, 1e-6) << t;
    }
  }
}

TEST(Cutoff, DerivativeFiniteNearRampEnds)
{
  const CutoffChi chi = build_cutoff();
  for (double base : {0.5, 1.0})
    for (int k = 1; k <= 4000; ++k)
    {
      const double off = std::ldexp(1.0, -k / 100);
      const double t = base == 0.5 ? 0.5 + off * (1 + 1e-3 * (k % 100)) / 2.1 : 1.0 - off * (1 + 1e-3 * (k % 100)) / 2.1;
      const double d = chi.derivative(t);
      EXPECT_TRUE(std::isfinite(d)) << t;
      EXPECT_LE(d, 0.0) << t;
    }
  // s = 2t - 1 just above 1/701, where exp(1/s) alone overflows the product.
  EXPECT_TRUE(std::isfinite(chi.derivative(0.50071328050697306)));
}

TEST(Schedule, ZeroBounds)
{
  DerivativeBounds b{std::vector<double>(13, 0.0), 1024};
  const ExtensionParams p = compute_schedule(b, 6, 0.5);
  const double expected[] = {0.5, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  ASSERT_EQ(p.T.size(), 7u);
  for (int n = 0; n <= 6; ++n)
    EXPECT_EQ(p.T[n], expected[n]) << n;
  EXPECT_EQ(p.C, 0.5);
}

TEST(Schedule, SmallExample)
{
  DerivativeBounds b{{8.0, 8.0, 8.0}, 1024};
  const ExtensionParams p = compute_schedule(b, 1, 0.9);
  ASSERT_EQ(p.T.size(), 2u);
  EXPECT_DOUBLE_EQ(p.T[0], 1.0 / 9.0);
  EXPECT_EQ(p.T[1], 1.0 / 16.0);
}

TEST(ScheduleProperty, InvariantsHoldExactly)
{
  Rng rng(22);
  for (int trial = 0; trial < 500; ++trial)
  {
    const int N = 1 + static_cast<int>(rng.uniform() * 8.0);
    std::vector<double> M(2 * N + 1);
    double running = 0.0;
    for (double &m : M)
    {
      running = std::max(running, test::log_uniform(rng, 1e-3, 1e3) * (rng.uniform() < 0.1 ? 0.0 : 1.0));
      running *= test::log_uniform(rng, 1.0, 1e4);
      m = running;
    }
    const double T0 = rng.uniform(0.01, 0.99);
    const ExtensionParams p = compute_schedule({M, 1024}, N, T0);
    ASSERT_EQ(p.T.size(), static_cast<std::size_t>(N + 1));
    EXPECT_GT(p.T[0], 0.0);
    EXPECT_LT(p.T[0], 1.0);
    EXPECT_EQ(p.C, p.T[0]);
    for (int n = 0; n <= N; ++n)
    {
      EXPECT_GT(p.T[n], 0.0);
      if (n > 0)
      {
        EXPECT_LE(p.T[n], p.T[n - 1]);
      }
      // Exact in floating point: scaling by 2^n is exact.
      EXPECT_LE(std::ldexp(p.T[n] * M[2 * n], n), 1.0) << "trial " << trial << " n " << n;
    }
  }
}

TEST(Schedule, RejectsBadInputs)
{
  DerivativeBounds b{std::vector<double>(5, 1.0), 1024};
  EXPECT_THROW(compute_schedule(b, 3, 0.5), PreconditionError); // needs M up to order 6
  EXPECT_THROW(compute_schedule(b, 2, 1.0), PreconditionError);
  EXPECT_THROW(compute_schedule(b, 0, 0.5), PreconditionError);
}

TEST(Extension, BuildRequiresEnoughDerivatives)
{
  const auto f = SmoothCompactFunction::parse("bump(x)", {-1.0, 1.0}, 8);
  EXPECT_THROW(AlmostAnalyticExtension::build(f, 6), PreconditionError);
  EXPECT_NO_THROW(AlmostAnalyticExtension::build(f, 4));
}

class ExtensionCorpus : public ::testing::TestWithParam<NamedFunction>
{
};

TEST_P(ExtensionCorpus, RestrictsToFunctionOnRealLine)
{
  const NamedFunction nf = GetParam();
  const auto ext = AlmostAnalyticExtension::build(nf.make());
  Rng rng(23);
  for (int i = 0; i < 1000; ++i)
  {
    const double x = rng.uniform(nf.support.lo - 0.5, nf.support.hi + 0.5);
    const double f = ext.function().value(x);
    const cplx v = ext.value(x);
    EXPECT_EQ(v.imag(), 0.0);
    EXPECT_LE(std::abs(v.real() - f), 1e-14 * (1.0 + std::abs(f))) << x;
    EXPECT_EQ(ext.dbar(x), cplx(0.0)) << x;
  }
}

TEST_P(ExtensionCorpus, VanishesOutsideSupportRectangle)
{
  const NamedFunction nf = GetParam();
  const auto ext = AlmostAnalyticExtension::build(nf.make());
  const double C = ext.params().C;
  Rng rng(24);
  for (int i = 0; i < 1000; ++i)
  {
    const double x = rng.uniform(nf.support.lo - 1.0, nf.support.hi + 1.0);
    const double y = rng.uniform(-2.0, 2.0);
    const cplx z(x, y);
    if (ext.in_support_rectangle(z))
      continue;
    EXPECT_EQ(ext.value(z), cplx(0.0)) << z;
    EXPECT_EQ(ext.dbar(z), cplx(0.0)) << z;
  }
  EXPECT_EQ(ext.value({0.5 * (nf.support.lo + nf.support.hi), C * 1.0000001}), cplx(0.0));
}

// Independent oracle: the series and its derivatives term by term.
struct DirectSeries
{
  const AlmostAnalyticExtension &ext;

  cplx value(cplx z) const
  {
    const auto &p = ext.params();
    const auto d = ext.function().jet(z.real(), p.N).derivs;
    cplx sum = 0.0, pw = 1.0;
    double fact = 1.0;
    for (int n = 0; n <= p.N; ++n)
    {
      if (n > 0)
      {
        pw *= kI * z.imag();
        fact *= n;
      }
      sum += pw / fact * d[n] * ext.chi().value(z.imag() / p.T[n]);
    }
    return sum;
  }

  // Returns {dbar, |dF/dx| + |dF/dy|}.
  std::pair<cplx, double> dbar(cplx z) const
  {
    const auto &p = ext.params();
    const double y = z.imag();
    const auto d = ext.function().jet(z.real(), p.N + 1).derivs;
    cplx dx = 0.0, dy = 0.0;
    for (int n = 0; n <= p.N; ++n)
    {
      double fact = 1.0;
      for (int k = 2; k <= n; ++k)
        fact *= k;
      const cplx pw = std::pow(kI * y, n);
      const double chi = ext.chi().value(y / p.T[n]);
      const double dchi = ext.chi().derivative(y / p.T[n]) / p.T[n];
      dx += pw / fact * d[n + 1] * chi;
      if (n > 0)
        dy += kI * static_cast<double>(n) * std::pow(kI * y, n - 1) / fact * d[n] * chi;
      dy += pw / fact * d[n] * dchi;
    }
    return {0.5 * (dx + kI * dy), std::abs(dx) + std::abs(dy)};
  }
};

TEST_P(ExtensionCorpus, MatchesDirectSeries)
{
  const NamedFunction nf = GetParam();
  const auto ext = AlmostAnalyticExtension::build(nf.make());
  const DirectSeries direct{ext};
  const auto &T = ext.params().T;
  Rng rng(25);
  for (int i = 0; i < 2000; ++i)
  {
    const double x = rng.uniform(nf.support.lo, nf.support.hi);
    const double y = (rng.uniform() < 0.5 ? -1.0 : 1.0) * test::log_uniform(rng, T.back() / 8, T[0]);
    const cplx z(x, y);
    const cplx v = direct.value(z);
    EXPECT_LE(std::abs(ext.value(z) - v), 1e-15 * (1.0 + std::abs(v))) << z;
    // The naive derivative sum cancels; compare on the scale of its terms.
    const auto [d, scale] = direct.dbar(z);
    EXPECT_LE(std::abs(ext.dbar(z) - d), 1e-13 * std::max(scale, 1e-300)) << z;
  }
}

TEST_P(ExtensionCorpus, DbarMatchesFiniteDifferences)
{
  // Stencil h = 1e-5 over |Im z| in [T_N/8, T_0/2]. The error is taken against
  // the size of the partial derivatives being combined, and stencils overlapping
  // a cutoff transition band narrower than 1e-2 are skipped (h cannot resolve
  // them).
  const NamedFunction nf = GetParam();
  const auto ext = AlmostAnalyticExtension::build(nf.make());
  const auto &T = ext.params().T;
  const double h = 1e-5;
  auto F = [&](cplx z) { return ext.value(z); };
  Rng rng(26);
  int accepted = 0;
  while (accepted < 500)
  {
    const double y = test::log_uniform(rng, T.back() / 8.0, T[0] / 2.0);
    bool resolved = true;
    for (double t : T)
      if (t / 2.0 < 1e-2 && y - h < t && y + h > t / 2.0)
        resolved = false;
    if (!resolved)
      continue;
    ++accepted;
    const double L = nf.support.length();
    const cplx z(rng.uniform(nf.support.lo + 0.05 * L, nf.support.hi - 0.05 * L),
                 rng.uniform() < 0.5 ? -y : y);
    const cplx dx = (F(z + h) - F(z - h)) / (2.0 * h);
    const cplx dy = (F(z + kI * h) - F(z - kI * h)) / (2.0 * h);
    const cplx d = ext.dbar(z);
    const double scale = std::max({std::abs(d), std::abs(dx), std::abs(dy)});
    EXPECT_LE(std::abs(0.5 * (dx + kI * dy) - d), 1e-5 * scale) << z;
  }
}

TEST_P(ExtensionCorpus, DbarRelativeToItselfWhereLarge)
{
  // The plain relative form at heights where d-bar dominates the FD error.
  const NamedFunction nf = GetParam();
  const auto ext = AlmostAnalyticExtension::build(nf.make());
  const auto &T = ext.params().T;
  auto F = [&](cplx z) { return ext.value(z); };
  Rng rng(27);
  for (int i = 0; i < 300; ++i)
  {
    const double L = nf.support.length();
    const double x = rng.uniform(nf.support.lo + 0.05 * L, nf.support.hi - 0.05 * L);
    const double y = rng.uniform(std::max(T[1], T[0] / 8.0), 0.45 * T[0]);
    const cplx z(x, y);
    const cplx d = ext.dbar(z);
    if (std::abs(d) < 1e-3)
      continue;
    EXPECT_LE(std::abs(test::fd_dbar(F, z, 1e-5) - d), 1e-5 * std::abs(d)) << z;
  }
}

TEST_P(ExtensionCorpus, DecayIsAtLeastPolynomial)
{
  const NamedFunction nf = GetParam();
  const auto ext = AlmostAnalyticExtension::build(nf.make());
  for (int l = 1; l <= 3; ++l)
  {
    const DecayFit fit = verify_decay(ext, l, 2048, 42);
    EXPECT_GE(fit.slope, l - 0.2) << nf.name;
    EXPECT_GT(fit.y_hi, fit.y_lo);
    EXPECT_LE(fit.y_hi, ext.params().T.back() / 4.0 * (1 + 1e-15));
  }
}

INSTANTIATE_TEST_SUITE_P(Builtins, ExtensionCorpus, ::testing::ValuesIn(builtin_test_functions()),
                         [](const auto &info) { return info.param.name; });

TEST(Decay, SlopeDoesNotDependOnL)
{
  const auto ext = AlmostAnalyticExtension::build(builtin_test_functions()[0].make());
  const DecayFit a = verify_decay(ext, 1, 1024, 9);
  const DecayFit b = verify_decay(ext, 3, 1024, 9);
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_EQ(a.constant, b.constant);
}

TEST(Decay, BumpWithNFourAndLTwo)
{
  const auto ext = AlmostAnalyticExtension::build(builtin_test_functions()[0].make(), 4);
  EXPECT_GE(verify_decay(ext, 2, 2048, 3).slope, 1.8);
}

TEST(Decay, ZeroFunctionGivesSentinel)
{
  const auto ext = AlmostAnalyticExtension::build(SmoothCompactFunction::parse("0*bump(x)", {-1.0, 1.0}));
  const DecayFit fit = verify_decay(ext, 2, 1024, 1);
  EXPECT_EQ(fit.slope, std::numeric_limits<double>::infinity());
  EXPECT_EQ(ext.value({0.1, 0.01}), cplx(0.0));
  EXPECT_EQ(ext.dbar({0.1, 0.01}), cplx(0.0));
}

TEST(Decay, NearAxisClosedForm)
{
  // Below T_N/2 every cutoff equals 1 and the series telescopes to
  // dbar F = (iy)^N / (2 N!) f^(N+1)(x).
  const auto ext = AlmostAnalyticExtension::build(builtin_test_functions()[0].make());
  const int N = ext.params().N;
  double fact = 1.0;
  for (int k = 2; k <= N; ++k)
    fact *= k;
  double sup = 0.0;
  for (int i = 0; i <= 20000; ++i)
    sup = std::max(sup, std::abs(ext.function().jet(-1.0 + i * 1e-4, N + 1).derivs[N + 1]));
  const double bound_constant = sup / (2.0 * fact);

  Rng rng(28);
  const double y_top = ext.params().T[N] / 2.0;
  for (int i = 0; i < 500; ++i)
  {
    const double y = test::log_uniform(rng, y_top * 1e-8, y_top);
    const double x = rng.uniform(-1.0, 1.0);
    const cplx expected =
        std::pow(kI * y, N) / (2.0 * fact) * ext.function().jet(x, N + 1).derivs[N + 1];
    const cplx d = ext.dbar({x, y});
    EXPECT_LE(std::abs(d - expected), 1e-12 * std::abs(expected) + 1e-300) << x << " " << y;
    EXPECT_LE(std::abs(d), 1.001 * bound_constant * std::pow(y, N));
  }

  const DecayFit fit = verify_decay(ext, N, 2048, 5);
  EXPECT_LE(fit.max_ratio, 1.001 * bound_constant);
  EXPECT_GE(fit.max_ratio, 0.1 * bound_constant);
}

} // namespace
} // namespace hsf
