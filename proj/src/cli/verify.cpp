// SPDX-License-Identifier: Apache-2.0
//
// Property suite behind `hsf verify`. Every check records the measured value
// next to its threshold; the suite passes only if all of them do.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsf/cli/commands.hpp"
#include "hsf/integrator.hpp"
#include "hsf/rng.hpp"
#include "hsf/test_functions.hpp"

namespace hsf::cli
{

namespace
{

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

double log_uniform(Rng &rng, double lo, double hi)
{
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

void cutoff_checks(Report &r)
{
  const CutoffChi chi = build_cutoff();
  double plateau = 0.0, outside = 0.0, even = 0.0, increase = 0.0, fd = 0.0;
  double prev = 1.0;
  for (int i = 0; i <= 4000; ++i)
  {
    const double t = 1.5 * i / 4000.0;
    const double v = chi.value(t);
    if (t <= 0.5)
      plateau = std::max(plateau, std::abs(v - 1.0));
    if (t >= 1.0)
      outside = std::max(outside, std::abs(v));
    even = std::max(even, std::abs(v - chi.value(-t)));
    increase = std::max(increase, v - prev);
    prev = v;
    const double h = 1e-6;
    if (t > 0.5 + h && t < 1.0 - h)
      fd = std::max(fd, std::abs(chi.derivative(t) - (chi.value(t + h) - chi.value(t - h)) / (2 * h)));
  }
  r.checks.push_back(check_at_most("cutoff.plateau", plateau, 0.0));
  r.checks.push_back(check_at_most("cutoff.vanishes_outside", outside, 0.0));
  r.checks.push_back(check_at_most("cutoff.even", even, 0.0));
  r.checks.push_back(check_at_most("cutoff.monotone_increase", increase, 0.0));
  r.checks.push_back(check_at_most("cutoff.derivative_fd", fd, 1e-6));
}

// Worst T[n] M[2n] 2^n over the schedule; <= 1 exactly when the schedule holds.
double schedule_margin(const ExtensionParams &p)
{
  double worst = 0.0;
  for (int n = 0; n <= p.N; ++n)
    worst = std::max(worst, std::ldexp(p.T[n] * p.bounds.M[2 * n], n));
  return worst;
}

// Finite-difference d-bar with step h.
cplx fd_dbar(const std::function<cplx(cplx)> &F, cplx z, double h)
{
  const cplx dx = (F(z + h) - F(z - h)) / (2.0 * h);
  const cplx dy = (F(z + kI * h) - F(z - kI * h)) / (2.0 * h);
  return 0.5 * (dx + kI * dy);
}

constexpr double kMinResolvedBand = 1e-2;

bool stencil_resolved(const ExtensionParams &p, double y, double h)
{
  for (double t : p.T)
    if (t / 2.0 < kMinResolvedBand && y - h < t && y + h > t / 2.0)
      return false;
  return true;
}

// Inner 90% of the support; near the ends the function is below rounding.
double inner_x(Rng &rng, Interval s)
{
  return rng.uniform(s.lo + 0.05 * s.length(), s.hi - 0.05 * s.length());
}

void extension_checks(Report &r, const JobConfig &cfg, Rng &rng)
{
  json schedules = json::object();
  for (const NamedFunction &nf : builtin_test_functions())
  {
    const auto ext = AlmostAnalyticExtension::build(nf.make(), cfg.N, cfg.T0);
    const auto &p = ext.params();
    schedules[nf.name] = p.T;
    r.checks.push_back(check_at_most("schedule." + nf.name, schedule_margin(p), 1.0));
    double rise = 0.0;
    for (int n = 1; n <= p.N; ++n)
      rise = std::max(rise, p.T[n] - p.T[n - 1]);
    r.checks.push_back(check_at_most("schedule_nonincreasing." + nf.name, rise, 0.0));

    Rng pts = rng.split("restriction." + nf.name);
    const Interval s = nf.support;
    double restr = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
      const double x = pts.uniform(s.lo, s.hi);
      const double f = ext.function().value(x);
      restr = std::max(restr, std::abs(ext.value(x) - f) / (1.0 + std::abs(f)));
    }
    r.checks.push_back(check_at_most("restriction." + nf.name, restr, 1e-14));

    double outside = 0.0;
    for (int i = 0; i < 200; ++i)
    {
      const double side = pts.uniform();
      const double x = side < 0.5 ? s.lo - pts.uniform(1e-9, 1.0) : s.hi + pts.uniform(1e-9, 1.0);
      const double y = pts.uniform(-2.0, 2.0);
      outside = std::max(outside, std::abs(ext.value({x, y})) + std::abs(ext.dbar({x, y})));
      const double yy = (pts.uniform() < 0.5 ? -1.0 : 1.0) * (p.C + pts.uniform(1e-12, 1.0));
      const double xx = pts.uniform(s.lo, s.hi);
      outside = std::max(outside, std::abs(ext.value({xx, yy})) + std::abs(ext.dbar({xx, yy})));
    }
    r.checks.push_back(check_at_most("support." + nf.name, outside, 0.0));

    // FD error is measured against the size of the partial derivatives it
    // combines. Stencils overlapping a cutoff transition band narrower than
    // kMinResolvedBand are skipped: the step cannot resolve them.
    auto F = [&ext](cplx z) { return ext.value(z); };
    constexpr double h = 1e-5;
    double fd = 0.0;
    for (int accepted = 0; accepted < 200;)
    {
      const double y = log_uniform(pts, p.T[p.N] / 8.0, p.T[0] / 2.0);
      if (!stencil_resolved(p, y, h))
        continue;
      ++accepted;
      const cplx z(inner_x(pts, s), pts.uniform() < 0.5 ? -y : y);
      const cplx dx = (F(z + h) - F(z - h)) / (2.0 * h);
      const cplx dy = (F(z + kI * h) - F(z - kI * h)) / (2.0 * h);
      const cplx d = ext.dbar(z);
      const double scale = std::max({std::abs(d), std::abs(dx), std::abs(dy)});
      fd = std::max(fd, std::abs(0.5 * (dx + kI * dy) - d) / scale);
    }
    r.checks.push_back(check_at_most("dbar_fd." + nf.name, fd, 1e-5));
  }
  r.results["schedules"] = std::move(schedules);

  const auto bump = AlmostAnalyticExtension::build(builtin_test_functions()[0].make(), cfg.N, cfg.T0);
  json fits = json::object();
  for (int l = 1; l <= 3; ++l)
  {
    const DecayFit fit = verify_decay(bump, l, 2048, rng.split("decay").seed());
    fits["l" + std::to_string(l)] = {{"slope", fit.slope}, {"y_lo", fit.y_lo}, {"y_hi", fit.y_hi},
                                     {"constant", fit.constant}, {"max_ratio", fit.max_ratio}};
    r.checks.push_back(check_at_least("decay.l" + std::to_string(l), fit.slope, l - 0.2));
  }
  r.results["decay"] = std::move(fits);
}

void cayley_checks(Report &r, const CircleExtension &ce, Rng &rng)
{
  Rng pts = rng.split("cayley");
  double roundtrip = 0.0, on_circle = 0.0, disk = 0.0;
  for (int i = 0; i < 1000; ++i)
  {
    const cplx z(pts.uniform(-10.0, 10.0), pts.uniform(-10.0, 10.0));
    if (std::abs(z - kI) > 1e-3)
      roundtrip = std::max(roundtrip, std::abs(psi_inv(psi(z)) - z) / (1.0 + std::abs(z)));
    const double x = pts.uniform(-100.0, 100.0);
    on_circle = std::max(on_circle, std::abs(std::abs(psi(x)) - 1.0));
    disk = std::max(disk, std::abs(psi({x, -pts.uniform(1e-3, 100.0)})));
  }
  r.checks.push_back(check_at_most("cayley.roundtrip", roundtrip, 1e-12));
  r.checks.push_back(check_at_most("cayley.real_line_to_circle", on_circle, 1e-14));
  r.checks.push_back(check_at_most("cayley.lower_half_plane_to_disk", disk, 1.0));

  const ComparabilityReport cmp =
      verify_imag_comparability(ce.support_region(), 1000, pts.split("comparability").seed());
  const double outside_bounds = std::max(cmp.C1 - cmp.ratio_min, cmp.ratio_max - cmp.C2);
  r.results["comparability"] = {{"ratio_min", cmp.ratio_min}, {"ratio_max", cmp.ratio_max},
                                {"C1", cmp.C1},               {"C2", cmp.C2},
                                {"samples", cmp.samples}};
  r.checks.push_back(check_at_most("comparability.within_bounds", outside_bounds, 0.0));
  r.checks.push_back(check_at_most("comparability.identity", cmp.max_identity_error, 1e-10));

  // Chain rule against FD of the composition. Preimage heights lie where
  // only the first series term is active and d-bar is of order one, short
  // of the flat tail of the cutoff.
  const auto &p = ce.base().params();
  const Interval s = ce.base().function().support();
  const double y_lo = std::max(p.N >= 1 ? p.T[1] : 0.0, p.T[0] / 8.0);
  auto F = [&ce](cplx xi) { return ce.value(xi); };
  double chain = 0.0;
  for (int i = 0; i < 200; ++i)
  {
    double y = pts.uniform(y_lo, 0.9 * p.T[0]);
    if (pts.uniform() < 0.5)
      y = -y;
    const cplx xi = psi({inner_x(pts, s), y});
    const cplx d = ce.dbar(xi);
    chain = std::max(chain, std::abs(fd_dbar(F, xi, 1e-5) - d) / std::abs(d));
  }
  r.checks.push_back(check_at_most("cayley.chain_rule", chain, 1e-5));
}

cplx random_point_away(Rng &rng, const std::vector<cplx> &spectrum, double min_dist, double box)
{
  for (;;)
  {
    const cplx z(rng.uniform(-box, box), rng.uniform(-box, box));
    double d = INFINITY;
    for (const cplx &l : spectrum)
      d = std::min(d, std::abs(z - l));
    if (d >= min_dist)
      return z;
  }
}

void matrix_checks(Report &r, Rng &rng)
{
  Rng g = rng.split("matrix");
  double norm_err = 0.0;
  for (int k = 0; k < 20; ++k)
  {
    std::vector<double> spec(6);
    SpectralDecomposition d;
    if (k % 2 == 0)
    {
      for (double &l : spec)
        l = g.uniform(-2.0, 2.0);
      d = synth_hermitian(spec, g.next_u64()).second;
    }
    else
    {
      for (double &t : spec)
        t = g.uniform(0.0, 2.0 * kPi);
      d = synth_unitary(spec, g.next_u64()).second;
    }
    const cplx z = random_point_away(g, d.eigenvalues, 0.1, 3.0);
    norm_err = std::max(norm_err, check_resolvent_norm_identity(d, z).rel_err);
  }
  r.checks.push_back(check_at_most("resolvent_norm_identity", norm_err, 1e-8));

  double neumann = 0.0;
  for (int k = 0; k < 10; ++k)
  {
    std::vector<double> thetas(6);
    for (double &t : thetas)
      t = g.uniform(0.0, 2.0 * kPi);
    const ComplexMatrix U = synth_unitary(thetas, g.next_u64()).first;
    const double rad = k % 2 == 0 ? g.uniform(0.2, 0.9) : g.uniform(1.1, 3.0);
    const cplx z = std::polar(rad, g.uniform(0.0, 2.0 * kPi));
    const ComplexMatrix lu = resolvent(U, z);
    neumann = std::max(neumann, max_abs(resolvent_neumann(U, z) - lu) / max_abs(lu));
  }
  r.checks.push_back(check_at_most("neumann_vs_lu", neumann, 1e-8));
}

void cauchy_checks(Report &r, const JobConfig &cfg)
{
  const PlaneField z2{[](cplx z) { return z * z; }, [](cplx) { return cplx(0.0); }};
  const auto a = cauchy_pompeiu_check(z2, {-1.0, 1.0, -1.0, 1.0}, {0.3, 0.2}, 512, 512);
  r.checks.push_back(check_at_most("cauchy_pompeiu.z2_area", std::abs(a.area_term), 1e-6));
  r.checks.push_back(
      check_at_most("cauchy_pompeiu.z2_boundary", std::abs(a.boundary_term - a.reference), 1e-6));

  const PlaneField one{[](cplx) { return cplx(1.0); }, [](cplx) { return cplx(0.0); }};
  const auto b = cauchy_pompeiu_check(one, {-1.0, 1.0, -1.0, 1.0}, {0.3, 0.2}, 512, 512);
  r.checks.push_back(check_at_most("cauchy_pompeiu.one_boundary", std::abs(b.boundary_term - 1.0), 1e-6));

  const auto ext = AlmostAnalyticExtension::build(builtin_test_functions()[0].make(), cfg.N, cfg.T0);
  const PlaneField u{[&](cplx z) { return ext.value(z); }, [&](cplx z) { return ext.dbar(z); }};
  const double C = ext.params().C;
  const auto c = cauchy_pompeiu_check(u, {-1.25, 1.25, -1.25 * C, 1.25 * C}, {0.3, 0.0}, 512, 512);
  r.checks.push_back(check_at_most("cauchy_pompeiu.extension_boundary", std::abs(c.boundary_term), 1e-8));
  r.checks.push_back(
      check_at_most("cauchy_pompeiu.extension_area", std::abs(c.area_term - c.reference), 1e-4));
}

void oracle_checks(Report &r, const JobConfig &cfg, const CircleExtension &ce, Rng &rng)
{
  IntegrationOptions opts;
  opts.threads = cfg.threads;
  opts.seed = rng.seed();
  Rng g = rng.split("oracle");

  const SmoothCompactFunction f = builtin_test_functions()[0].make();
  const auto ext = AlmostAnalyticExtension::build(f, cfg.N, cfg.T0);
  const double f_sup = sup_norm(f);
  std::vector<double> lambdas(8);
  for (double &l : lambdas)
    l = g.uniform(-0.9, 0.9);
  const auto [A, dA] = synth_hermitian(lambdas, g.next_u64());
  const IntegralResult sa = hs_apply_selfadjoint(ext, A, cfg.spec, opts);
  const ComplexMatrix sa_ref = spectral_apply(dA, [&](cplx l) { return cplx(f.value(l.real())); });
  const double sa_err = operator_norm(sa.value - sa_ref) / std::max(1.0, f_sup);
  r.checks.push_back(check_at_most("oracle.selfadjoint", sa_err, 1e-3));
  r.checks.push_back(check_at_most("finiteness.selfadjoint",
                                   std::isfinite(sa.bound_integral) ? 0.0 : 1.0, 0.0));

  const SmoothCompactFunction &h = ce.base().function();
  std::vector<double> thetas(8);
  for (double &t : thetas)
    t = g.uniform(kPi / 2.0 + 0.05, 3.0 * kPi / 2.0 - 0.05);
  const auto [U, dU] = synth_unitary(thetas, g.next_u64());
  const IntegralResult un = hs_apply_unitary(ce, U, cfg.spec, opts);
  const ComplexMatrix un_ref =
      spectral_apply(dU, [&](cplx z) { return cplx(h.value(psi_inv(z).real())); });
  const double un_err = operator_norm(un.value - un_ref) / std::max(1.0, sup_norm(h));
  r.checks.push_back(check_at_most("oracle.unitary", un_err, 1e-3));
  r.checks.push_back(check_at_most("finiteness.unitary",
                                   std::isfinite(un.bound_integral) ? 0.0 : 1.0, 0.0));

  // Diagonal input: the matrix path must equal the scalar path.
  std::vector<double> diag{-0.7, -0.2, 0.0, 0.45, 0.8};
  ComplexMatrix D = ComplexMatrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i)
    D(i, i) = diag[i];
  const IntegralResult dr = hs_apply_selfadjoint(ext, D, cfg.spec, opts);
  const auto scalars = scalar_hs_eval(ext, diag, cfg.spec, opts);
  double dev = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      dev = std::max(dev, std::abs(dr.value(i, j) - (i == j ? scalars[i] : cplx(0.0))));
  r.checks.push_back(check_at_most("diagonal_consistency", dev, 1e-12));

  r.results["oracle"] = {{"selfadjoint_error", sa_err},
                         {"unitary_error", un_err},
                         {"selfadjoint_bound_integral", sa.bound_integral},
                         {"unitary_bound_integral", un.bound_integral},
                         {"selfadjoint_cells", sa.n_cells},
                         {"unitary_cells", un.n_cells}};

  // Continuity of the calculus: ||f_n(A) - f(A)|| <= sup |f_n - f|.
  const SmoothCompactFunction pert = SmoothCompactFunction::parse("sin(5*x)*bump(x)", f.support());
  const double pert_sup = sup_norm(pert);
  for (int n : {1, 10, 100})
  {
    const ComplexMatrix fnA = spectral_apply(
        dA, [&](cplx l) { return cplx(f.value(l.real()) + pert.value(l.real()) / n); });
    const double lhs = operator_norm(fnA - sa_ref);
    r.checks.push_back(
        check_at_most("continuity.n" + std::to_string(n), lhs - pert_sup / n, 1e-8));
  }
}

} // namespace

Report run_verify(const JobConfig &cfg)
{
  Report r;
  r.command = cfg.command;
  r.seed = cfg.seed;
  r.inputs = cfg.to_json();
  Rng rng(cfg.seed.value_or(0));

  cutoff_checks(r);
  extension_checks(r, cfg, rng);
  const CircleExtension ce =
      CircleExtension::build(CircleFunction::from_pullback("bump(x)", {-1.0, 1.0}), cfg.N, cfg.T0);
  cayley_checks(r, ce, rng);
  matrix_checks(r, rng);
  cauchy_checks(r, cfg);
  oracle_checks(r, cfg, ce, rng);
  return r;
}

} // namespace hsf::cli
