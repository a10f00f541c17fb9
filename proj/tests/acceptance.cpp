// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "hsf/convergence.hpp"
#include "hsf/integrator.hpp"
#include "hsf/rng.hpp"
#include "hsf/test_functions.hpp"

namespace
{

using namespace hsf;

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

struct Outcome
{
  bool pass = false;
  std::string detail;
};

struct Criterion
{
  int id;
  std::string name;
  double time_limit_s; // <= 0: no limit
  std::function<Outcome()> run;
};

std::string fmt(const char *f, double a, double b)
{
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double log_uniform(Rng &rng, double lo, double hi)
{
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

std::vector<double> uniform_list(Rng &rng, int n, double lo, double hi)
{
  std::vector<double> v(n);
  for (double &x : v)
    x = rng.uniform(lo, hi);
  return v;
}

double sup_abs(const SmoothCompactFunction &f)
{
  double s = 0.0;
  const Interval I = f.support();
  for (int i = 0; i <= 8192; ++i)
    s = std::max(s, std::abs(f.value(I.lo + I.length() * i / 8192.0)));
  return s;
}

Outcome restriction()
{
  double worst = 0.0;
  Rng rng(101);
  for (const NamedFunction &nf : builtin_test_functions())
  {
    const auto ext = AlmostAnalyticExtension::build(nf.make());
    for (int i = 0; i < 1000; ++i)
    {
      const double x = rng.uniform(nf.support.lo, nf.support.hi);
      const double f = nf.make().value(x);
      worst = std::max(worst, std::abs(ext.value(x) - f) / (1.0 + std::abs(f)));
    }
  }
  return {worst <= 1e-14, fmt("max |F(x)-f(x)|/(1+|f|) = %.3g (<= %.0e)", worst, 1e-14)};
}

Outcome decay()
{
  double worst_margin = INFINITY;
  std::string detail;
  for (const NamedFunction &nf : builtin_test_functions())
  {
    const auto ext = AlmostAnalyticExtension::build(nf.make(), 6);
    for (int l = 1; l <= 3; ++l)
    {
      const DecayFit fit = verify_decay(ext, l, 2048, 200 + l);
      worst_margin = std::min(worst_margin, fit.slope - (l - 0.2));
    }
  }
  return {worst_margin >= 0.0, fmt("min (slope - (l - 0.2)) over corpus, l = 1..3: %.3g (>= %g)", worst_margin, 0.0)};
}

Outcome schedule()
{
  double worst = 0.0;
  int count = 0;
  auto margin = [&](const ExtensionParams &p) {
    for (int n = 0; n <= p.N; ++n)
      worst = std::max(worst, std::ldexp(p.T[n] * p.bounds.M[2 * n], n));
    ++count;
  };
  for (const NamedFunction &nf : builtin_test_functions())
    for (int N = 1; N <= 6; ++N)
      for (double T0 : {0.9, 0.5, 0.1})
        margin(AlmostAnalyticExtension::build(nf.make(), N, T0).params());
  Rng rng(102);
  for (int trial = 0; trial < 1000; ++trial)
  {
    const int N = 1 + static_cast<int>(rng.uniform() * 8);
    std::vector<double> M(2 * N + 1);
    double m = 0.0;
    for (double &v : M)
      v = m = std::max(m, log_uniform(rng, 1e-3, 1e6));
    margin(compute_schedule({M, 0}, N, rng.uniform(0.01, 0.99)));
  }
  return {worst <= 1.0, fmt("max T_n M_2n 2^n = %.17g over %g schedules (<= 1)", worst, count)};
}

Outcome cauchy_pompeiu()
{
  const cplx xi(0.3, 0.2);
  const PlaneField z2{[](cplx z) { return z * z; }, [](cplx) { return cplx(0.0); }};
  const auto a = cauchy_pompeiu_check(z2, {-1.0, 1.0, -1.0, 1.0}, xi, 512, 512);
  const double z2_area = std::abs(a.area_term);
  const double z2_boundary = std::abs(a.boundary_term - xi * xi);

  const auto ext = AlmostAnalyticExtension::build(builtin_test_functions()[0].make());
  const double C = ext.params().C;
  const PlaneField u{[&](cplx z) { return ext.value(z); }, [&](cplx z) { return ext.dbar(z); }};
  double ext_boundary = 0.0, ext_area = 0.0;
  for (double x : {-0.6, 0.0, 0.3})
  {
    const auto c = cauchy_pompeiu_check(u, {-1.25, 1.25, -1.25 * C, 1.25 * C}, x, 512, 512);
    ext_boundary = std::max(ext_boundary, std::abs(c.boundary_term));
    ext_area = std::max(ext_area, std::abs(c.area_term - ext.value(x)));
  }
  const bool pass = z2_area <= 1e-6 && z2_boundary <= 1e-6 && ext_boundary <= 1e-8 && ext_area <= 1e-4;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "z^2: area %.3g, boundary err %.3g (<= 1e-6); extension: boundary %.3g (<= 1e-8), area err %.3g (<= 1e-4)",
                z2_area, z2_boundary, ext_boundary, ext_area);
  return {pass, buf};
}

Outcome strip_rate()
{
  const auto ext = AlmostAnalyticExtension::build(builtin_test_functions()[0].make());
  Sweep s;
  s.values = {1e-1, 3e-2, 1e-2, 3e-3};
  const ConvergenceTable t = convergence_study(ScalarProblem{ext, {0.0}}, s);
  bool decreasing = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    decreasing = decreasing && t.rows[i - 1].error < t.rows[i].error;
  return {decreasing && t.fitted_rate >= 0.8,
          fmt("strictly decreasing = %g, fitted rate %.3f (>= 0.8)", decreasing ? 1.0 : 0.0, t.fitted_rate)};
}

Outcome selfadjoint()
{
  const SmoothCompactFunction f = builtin_test_functions()[0].make();
  const auto ext = AlmostAnalyticExtension::build(f);
  const double scale = std::max(1.0, sup_abs(f));
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
  {
    Rng rng(1000 + seed);
    const auto lambdas = uniform_list(rng, 8, -0.9, 0.9);
    const auto [A, d] = synth_hermitian(lambdas, rng.next_u64());
    const ComplexMatrix ref = spectral_apply(d, [&](cplx l) { return cplx(f.value(l.real())); });
    const IntegralResult r = hs_apply_selfadjoint(ext, A, QuadratureSpec{});
    worst = std::max(worst, operator_norm(r.value - ref) / scale);
  }
  return {worst <= 1e-3, fmt("max ||HS - oracle|| / max(1, ||f||) over 5 seeds = %.3g (<= %.0e)", worst, 1e-3)};
}

Outcome unitary()
{
  const CircleFunction f = CircleFunction::from_pullback("bump(x)", {-1.0, 1.0});
  const CircleExtension ce = CircleExtension::build(f);
  const double scale = std::max(1.0, sup_abs(f.pullback()));
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
  {
    Rng rng(2000 + seed);
    const auto thetas = uniform_list(rng, 8, kPi / 2 + 0.05, 3 * kPi / 2 - 0.05);
    const auto [U, d] = synth_unitary(thetas, rng.next_u64());
    // Synthesis oracle: f(e^{i theta}) = h(cot(theta / 2)).
    ComplexMatrix ref = ComplexMatrix::Zero(8, 8);
    for (int j = 0; j < 8; ++j)
      ref += f.pullback().value(1.0 / std::tan(thetas[j] / 2)) * d.V.col(j) * d.V.col(j).adjoint();
    const IntegralResult r = hs_apply_unitary(ce, U, QuadratureSpec{});
    worst = std::max(worst, operator_norm(r.value - ref) / scale);
  }
  return {worst <= 1e-3, fmt("max ||HS - oracle|| / max(1, ||f||) over 5 seeds = %.3g (<= %.0e)", worst, 1e-3)};
}

Outcome resolvent_norm()
{
  Rng rng(103);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k)
  {
    const int n = 1 + static_cast<int>(rng.uniform() * 10);
    const SpectralDecomposition d =
        k % 2 == 0 ? synth_hermitian(uniform_list(rng, n, -2.0, 2.0), rng.next_u64()).second
                   : synth_unitary(uniform_list(rng, n, 0.0, 2 * kPi), rng.next_u64()).second;
    cplx z;
    double dist = 0.0;
    do
    {
      z = cplx(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
      dist = INFINITY;
      for (const cplx &l : d.eigenvalues)
        dist = std::min(dist, std::abs(z - l));
    } while (dist < 0.1);
    const ComplexMatrix R = resolvent(d.reconstruct(), z);
    worst = std::max(worst, std::abs(operator_norm(R) * dist - 1.0));
  }
  return {worst <= 1e-8, fmt("max | ||(z-N)^-1|| d(z, sigma) - 1 | over 100 pairs = %.3g (<= %.0e)", worst, 1e-8)};
}

Outcome neumann()
{
  Rng rng(104);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k)
  {
    const int n = 1 + static_cast<int>(rng.uniform() * 10);
    const auto [U, d] = synth_unitary(uniform_list(rng, n, 0.0, 2 * kPi), rng.next_u64());
    const double r = k % 2 == 0 ? rng.uniform(0.0, 0.9) : rng.uniform(1.1, 4.0);
    const cplx z = std::polar(r, rng.uniform(0.0, 2 * kPi));
    worst = std::max(worst, (resolvent_neumann(U, z) - resolvent(U, z)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8, fmt("max entry |Neumann - LU| over 50 pairs = %.3g (<= %.0e)", worst, 1e-8)};
}

Outcome chain_rule()
{
  // Preimage heights where the leading term carries d-bar at order one.
  const CircleExtension ce = CircleExtension::build(CircleFunction::from_pullback("bump(x)", {-1.0, 1.0}));
  const auto &T = ce.base().params().T;
  const Interval s = ce.base().function().support();
  Rng rng(105);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i)
  {
    const double x = rng.uniform(s.lo + 0.05 * s.length(), s.hi - 0.05 * s.length());
    const double y = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(std::max(T[1], T[0] / 8), 0.9 * T[0]);
    const cplx xi = psi({x, y});
    const double h = 1e-5;
    const cplx dx = (ce.value(xi + h) - ce.value(xi - h)) / (2 * h);
    const cplx dy = (ce.value(xi + kI * h) - ce.value(xi - kI * h)) / (2 * h);
    const cplx d = ce.dbar(xi);
    worst = std::max(worst, std::abs(0.5 * (dx + kI * dy) - d) / std::abs(d));
  }
  return {worst <= 1e-5, fmt("max relative |FD dbar - dbar| at 200 points = %.3g (<= %.0e)", worst, 1e-5)};
}

Outcome comparability()
{
  bool within = true;
  double identity = 0.0;
  int samples = 0;
  const std::array<Region, 3> regions{Region::make({-1.0, 1.0}, 0.5), Region::make({-3.0, 0.2}, 0.9),
                                      Region::make({2.0, 5.0}, 0.05)};
  std::uint64_t seed = 106;
  for (const Region &r : regions)
  {
    const ComparabilityReport rep = verify_imag_comparability(r, 10000, seed++);
    within = within && rep.within_bounds && rep.ratio_min >= rep.C1 && rep.ratio_max <= rep.C2;
    identity = std::max(identity, rep.max_identity_error);
    samples += rep.samples;
  }
  return {within && identity <= 1e-10,
          fmt("all ratios in [C1, C2]: %g; max identity error %.3g (<= 1e-10)", within ? 1.0 : 0.0, identity) +
              " over " + std::to_string(samples) + " samples"};
}

Outcome continuity()
{
  const SmoothCompactFunction f = builtin_test_functions()[0].make();
  const SmoothCompactFunction pert = SmoothCompactFunction::parse("sin(5*x)*bump(x)", f.support());
  const double pert_sup = sup_abs(pert);
  Rng rng(107);
  const auto [A, d] = synth_hermitian(uniform_list(rng, 8, -0.9, 0.9), rng.next_u64());
  const ComplexMatrix fA = spectral_apply(d, [&](cplx l) { return cplx(f.value(l.real())); });
  double worst = -INFINITY;
  for (int n : {1, 10, 100})
  {
    const ComplexMatrix fnA =
        spectral_apply(d, [&](cplx l) { return cplx(f.value(l.real()) + pert.value(l.real()) / n); });
    worst = std::max(worst, operator_norm(fnA - fA) - pert_sup / n);
  }
  return {worst <= 1e-8, fmt("max (||f_n(A) - f(A)|| - sup|f_n - f|) over n = 1, 10, 100: %.3g (<= %.0e)", worst, 1e-8)};
}

std::string capture(const std::string &cmd, int &status)
{
  std::string out;
  FILE *p = ::popen(cmd.c_str(), "r");
  if (!p)
  {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0)
    out.append(buf.data(), n);
  status = ::pclose(p);
  return out;
}

Outcome determinism()
{
  int s1 = 0, s8 = 0;
  const std::string bin = HSF_BINARY;
  const std::string a = capture(bin + " verify --seed 42 --threads 1", s1);
  const std::string b = capture(bin + " verify --seed 42 --threads 8", s8);
  const bool same = !a.empty() && a == b;
  return {same && s1 == 0 && s8 == 0,
          fmt("reports byte-identical: %g (%g bytes); exit statuses ", same ? 1.0 : 0.0, static_cast<double>(a.size())) +
              std::to_string(s1) + "/" + std::to_string(s8)};
}

} // namespace

int main()
{
  const std::vector<Criterion> criteria{
      {1, "extension_restriction", 5, restriction},
      {2, "decay_exponents", 30, decay},
      {3, "schedule_inequality", 0, schedule},
      {4, "cauchy_pompeiu", 0, cauchy_pompeiu},
      {5, "strip_exclusion_rate", 120, strip_rate},
      {6, "selfadjoint_formula", 300, selfadjoint},
      {7, "unitary_formula", 300, unitary},
      {8, "resolvent_norm_identity", 0, resolvent_norm},
      {9, "neumann_vs_lu", 0, neumann},
      {10, "chain_rule", 0, chain_rule},
      {11, "comparability_constants", 0, comparability},
      {12, "calculus_continuity", 0, continuity},
      {13, "determinism", 0, determinism},
  };

  int failed = 0;
  for (const Criterion &c : criteria)
  {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
      o = c.run();
    }
    catch (const std::exception &e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = fmt("%.2fs", secs, 0.0);
    if (c.time_limit_s > 0)
    {
      timing += fmt(" (limit %.0fs)", c.time_limit_s, 0.0);
      pass = pass && secs < c.time_limit_s;
    }
    failed += pass ? 0 : 1;
    std::printf("%s %2d %-24s %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
