// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hsf/cayley.hpp"
#include "hsf/matrix.hpp"
#include "hsf/quadrature.hpp"

namespace hsf
{

/// How the area sums are executed.
///
/// The parallel kernel splits the node list into fixed-size chunks, sums each
/// chunk with Neumaier compensation and combines chunk totals in a fixed
/// binary tree, so the result does not depend on the thread count.
/// `serial_reference` switches to the plain left-to-right loop kept for
/// testing the kernel.
struct IntegrationOptions
{
  int threads = 0; // 0: OpenMP default
  bool serial_reference = false;
  std::uint64_t seed = 0; // provenance only
};

inline constexpr std::size_t kReductionChunk = 256;

struct IntegralResult
{
  ComplexMatrix value;          // 1x1 for scalar targets
  long n_cells = 0;             // mesh nodes
  long n_active = 0;            // nodes with nonzero d-bar
  double sum_compensation = 0.0;
  double bound_integral = 0.0;  // sum |dbar| ||(z - A)^{-1}||_F area
  double epsilon_used = 0.0;
  int truncation_N = 0;
  std::uint64_t seed = 0;
};

/// Sum over nodes of K complex contributions. `contribution(node, out)`
/// adds its terms into out[0..K) (pre-zeroed) and returns the node's share of
/// the bound integral, or a negative value when the node is inactive.
using NodeKernel = std::function<double(const QuadNode &, std::span<cplx>)>;

struct AreaSum
{
  std::vector<cplx> values;
  double compensation = 0.0;
  double bound = 0.0;
  long active = 0;
};

AreaSum area_sum(std::span<const QuadNode> nodes, std::size_t K, const NodeKernel &kernel,
                 const IntegrationOptions &opts);

/// (2 i pi)^{-1} int dbar F(z) / (z - xi) dz ^ d(zbar) over the strip-excluded
/// support rectangle, for every xi at once.
std::vector<cplx> scalar_hs_eval(const AlmostAnalyticExtension &ext, std::span<const double> xis,
                                 const QuadratureSpec &spec, const IntegrationOptions &opts = {});

cplx scalar_hs_eval(const AlmostAnalyticExtension &ext, double xi, const QuadratureSpec &spec,
                    const IntegrationOptions &opts = {});

/// f(A) for Hermitian A from the area integral of dbar F(z) (z - A)^{-1}.
IntegralResult hs_apply_selfadjoint(const AlmostAnalyticExtension &ext, const ComplexMatrix &A,
                                    const QuadratureSpec &spec, const IntegrationOptions &opts = {});

/// f(U) for unitary U from the area integral of the circle extension's d-bar
/// against (z - U)^{-1}, on polar cells outside the band around the circle.
IntegralResult hs_apply_unitary(const CircleExtension &ce, const ComplexMatrix &U,
                                const QuadratureSpec &spec, const IntegrationOptions &opts = {});

/// Test field for the Cauchy-Pompeiu identity: u and its d-bar derivative.
struct PlaneField
{
  std::function<cplx(cplx)> value;
  std::function<cplx(cplx)> dbar;
};

struct Rect
{
  double x0, x1, y0, y1;
};

struct CauchyPompeiuResult
{
  cplx boundary_term;
  cplx area_term;
  cplx reconstructed;
  cplx reference;
  double abs_err = 0.0;
};

/// u(xi) = (2 i pi)^{-1} [ boundary integral of u/(z - xi) dz
///                         + area integral of dbar u/(z - xi) dz ^ d(zbar) ],
/// both by composite midpoint rules (counterclockwise boundary; area_cells
/// squares per side). A node coinciding with xi contributes nothing.
CauchyPompeiuResult cauchy_pompeiu_check(const PlaneField &u, const Rect &rect, cplx xi,
                                         int nodes_per_edge = 512, int area_cells = 512);

} // namespace hsf
