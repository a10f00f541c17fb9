// SPDX-License-Identifier: Apache-2.0

#include "hsf/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include <omp.h>

#include "hsf/errors.hpp"

namespace hsf
{

namespace
{

constexpr double kInvPi = 1.0 / std::numbers::pi;

// Neumaier-compensated running sum of one real component.
struct Compensated
{
  double sum = 0.0;
  double comp = 0.0;

  void add(double x)
  {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double total() const { return sum + comp; }
};

AreaSum serial_sum(std::span<const QuadNode> nodes, std::size_t K, const NodeKernel &kernel)
{
  AreaSum out;
  out.values.assign(K, 0.0);
  std::vector<cplx> scratch(K);
  for (const QuadNode &node : nodes)
  {
    std::fill(scratch.begin(), scratch.end(), cplx(0.0));
    const double b = kernel(node, scratch);
    if (b < 0.0)
      continue;
    for (std::size_t k = 0; k < K; ++k)
      out.values[k] += scratch[k];
    out.bound += b;
    ++out.active;
  }
  return out;
}

} // namespace

AreaSum area_sum(std::span<const QuadNode> nodes, std::size_t K, const NodeKernel &kernel,
                 const IntegrationOptions &opts)
{
  if (opts.serial_reference)
    return serial_sum(nodes, K, kernel);

  const std::size_t n_chunks = (nodes.size() + kReductionChunk - 1) / kReductionChunk;
  std::vector<cplx> partial(n_chunks * K, 0.0);
  std::vector<double> bound(n_chunks, 0.0);
  std::vector<double> comp(n_chunks, 0.0);
  std::vector<long> active(n_chunks, 0);
  std::vector<std::exception_ptr> failure(n_chunks);

  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c)
  {
    try
    {
      std::vector<Compensated> re(K), im(K);
      Compensated b;
      std::vector<cplx> scratch(K);
      const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
      const std::size_t end = std::min(begin + kReductionChunk, nodes.size());
      for (std::size_t i = begin; i < end; ++i)
      {
        std::fill(scratch.begin(), scratch.end(), cplx(0.0));
        const double nb = kernel(nodes[i], scratch);
        if (nb < 0.0)
          continue;
        for (std::size_t k = 0; k < K; ++k)
        {
          re[k].add(scratch[k].real());
          im[k].add(scratch[k].imag());
        }
        b.add(nb);
        ++active[c];
      }
      double cmax = 0.0;
      for (std::size_t k = 0; k < K; ++k)
      {
        partial[c * K + k] = cplx(re[k].total(), im[k].total());
        cmax = std::max(cmax, std::hypot(re[k].comp, im[k].comp));
      }
      bound[c] = b.total();
      comp[c] = cmax;
    }
    catch (...)
    {
      failure[c] = std::current_exception();
    }
  }

  for (const auto &f : failure)
    if (f)
      std::rethrow_exception(f);

  // Fixed-shape pairwise tree over the chunk totals.
  std::size_t count = n_chunks;
  while (count > 1)
  {
    const std::size_t half = (count + 1) / 2;
    for (std::size_t i = 0; i < count / 2; ++i)
    {
      for (std::size_t k = 0; k < K; ++k)
        partial[i * K + k] = partial[2 * i * K + k] + partial[(2 * i + 1) * K + k];
      bound[i] = bound[2 * i] + bound[2 * i + 1];
    }
    if (count % 2 == 1)
    {
      for (std::size_t k = 0; k < K; ++k)
        partial[(half - 1) * K + k] = partial[(count - 1) * K + k];
      bound[half - 1] = bound[count - 1];
    }
    count = half;
  }

  AreaSum out;
  out.values.assign(K, 0.0);
  if (n_chunks > 0)
  {
    std::copy_n(partial.begin(), K, out.values.begin());
    out.bound = bound[0];
  }
  out.compensation = comp.empty() ? 0.0 : *std::max_element(comp.begin(), comp.end());
  for (long a : active)
    out.active += a;
  return out;
}

std::vector<cplx> scalar_hs_eval(const AlmostAnalyticExtension &ext, std::span<const double> xis,
                                 const QuadratureSpec &spec, const IntegrationOptions &opts)
{
  const auto nodes = strip_mesh(ext.function().support(), ext.params().C, spec, ext.params().T);
  const std::size_t K = xis.size();
  NodeKernel kernel = [&](const QuadNode &node, std::span<cplx> out) -> double {
    const cplx d = ext.dbar(node.z);
    if (d == 0.0)
      return -1.0;
    const cplx c = -kInvPi * node.area * d;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < K; ++j)
    {
      const cplx diff = node.z - xis[j];
      out[j] += c / diff;
      nearest = std::min(nearest, std::abs(diff));
    }
    return std::abs(d) * node.area / nearest;
  };
  return area_sum(nodes, K, kernel, opts).values;
}

cplx scalar_hs_eval(const AlmostAnalyticExtension &ext, double xi, const QuadratureSpec &spec,
                    const IntegrationOptions &opts)
{
  const double xis[1] = {xi};
  return scalar_hs_eval(ext, std::span<const double>(xis), spec, opts)[0];
}

namespace
{

template <class DbarFn>
IntegralResult matrix_area_integral(std::span<const QuadNode> nodes, const ComplexMatrix &M,
                                    DbarFn &&dbar, const IntegrationOptions &opts)
{
  const auto n = M.rows();
  const std::size_t K = static_cast<std::size_t>(n * n);
  NodeKernel kernel = [&](const QuadNode &node, std::span<cplx> out) -> double {
    const cplx d = dbar(node.z);
    if (d == 0.0)
      return -1.0;
    const ComplexMatrix R = resolvent(M, node.z);
    const cplx c = -kInvPi * node.area * d;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i + n * j)] += c * R(i, j);
    return std::abs(d) * R.norm() * node.area;
  };
  AreaSum s = area_sum(nodes, K, kernel, opts);

  IntegralResult r;
  r.value.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      r.value(i, j) = s.values[static_cast<std::size_t>(i + n * j)];
  r.n_cells = static_cast<long>(nodes.size());
  r.n_active = s.active;
  r.sum_compensation = s.compensation;
  r.bound_integral = s.bound;
  r.seed = opts.seed;
  return r;
}

} // namespace

IntegralResult hs_apply_selfadjoint(const AlmostAnalyticExtension &ext, const ComplexMatrix &A,
                                    const QuadratureSpec &spec, const IntegrationOptions &opts)
{
  if (!is_hermitian(A, ToleranceConfig{}.hermiticity_tol))
    throw PreconditionError("hs_apply_selfadjoint needs a Hermitian matrix");
  const auto nodes = strip_mesh(ext.function().support(), ext.params().C, spec, ext.params().T);
  IntegralResult r =
      matrix_area_integral(nodes, A, [&](cplx z) { return ext.dbar(z); }, opts);
  r.epsilon_used = spec.epsilon;
  r.truncation_N = ext.params().N;
  return r;
}

IntegralResult hs_apply_unitary(const CircleExtension &ce, const ComplexMatrix &U,
                                const QuadratureSpec &spec, const IntegrationOptions &opts)
{
  if (!is_unitary(U, ToleranceConfig{}.unitarity_tol))
    throw PreconditionError("hs_apply_unitary needs a unitary matrix");
  const auto nodes = annulus_mesh(ce.support_region(), spec);
  IntegralResult r = matrix_area_integral(nodes, U, [&](cplx z) { return ce.dbar(z); }, opts);
  r.epsilon_used = spec.epsilon;
  r.truncation_N = ce.base().params().N;
  return r;
}

CauchyPompeiuResult cauchy_pompeiu_check(const PlaneField &u, const Rect &rect, cplx xi,
                                         int nodes_per_edge, int area_cells)
{
  if (nodes_per_edge < 1 || area_cells < 1)
    throw PreconditionError("cauchy_pompeiu_check needs positive node counts");
  const double w = rect.x1 - rect.x0;
  const double h = rect.y1 - rect.y0;
  if (!(w > 0.0 && h > 0.0))
    throw PreconditionError("degenerate rectangle");
  const double hx = w / area_cells;
  const double hy = h / area_cells;
  const double margin = 2.0 * std::max(hx, hy);
  const double dist = std::min({xi.real() - rect.x0, rect.x1 - xi.real(), xi.imag() - rect.y0,
                                rect.y1 - xi.imag()});
  if (!(dist >= margin))
    throw PreconditionError("xi is closer than two cell widths to the rectangle boundary");

  // Counterclockwise: bottom, right, top, left.
  const cplx corners[5] = {{rect.x0, rect.y0}, {rect.x1, rect.y0}, {rect.x1, rect.y1},
                           {rect.x0, rect.y1}, {rect.x0, rect.y0}};
  cplx contour = 0.0;
  for (int e = 0; e < 4; ++e)
  {
    const cplx a = corners[e];
    const cplx dz = (corners[e + 1] - a) / static_cast<double>(nodes_per_edge);
    cplx edge = 0.0;
    for (int k = 0; k < nodes_per_edge; ++k)
    {
      const cplx z = a + (k + 0.5) * dz;
      edge += u.value(z) / (z - xi);
    }
    contour += edge * dz;
  }

  std::vector<QuadNode> nodes;
  nodes.reserve(static_cast<std::size_t>(area_cells) * area_cells);
  for (int j = 0; j < area_cells; ++j)
    for (int i = 0; i < area_cells; ++i)
      nodes.push_back({cplx(rect.x0 + (i + 0.5) * hx, rect.y0 + (j + 0.5) * hy), hx * hy});

  NodeKernel kernel = [&](const QuadNode &node, std::span<cplx> out) -> double {
    if (node.z == xi)
      return -1.0;
    const cplx d = u.dbar(node.z);
    if (d == 0.0)
      return -1.0;
    out[0] += d / (node.z - xi) * node.area;
    return 0.0;
  };
  const cplx area = area_sum(nodes, 1, kernel, IntegrationOptions{}).values[0];

  CauchyPompeiuResult r;
  const cplx two_i_pi(0.0, 2.0 * std::numbers::pi);
  r.boundary_term = contour / two_i_pi;
  // dz ^ d(zbar) = -2i dx dy
  r.area_term = cplx(0.0, -2.0) * area / two_i_pi;
  r.reconstructed = r.boundary_term + r.area_term;
  r.reference = u.value(xi);
  r.abs_err = std::abs(r.reconstructed - r.reference);
  return r;
}

} // namespace hsf
