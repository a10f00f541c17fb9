// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "hsf/cayley.hpp"

namespace hsf
{

/// Midpoint rule on dyadically graded cells.
///
/// The band next to the exclusion boundary is split `refinement_levels`
/// times; a row at level k has height H / 2^k and its cells along the
/// boundary direction are also 2^k times narrower.
struct QuadratureSpec
{
  int base_cells_x = 256;
  int base_cells_y = 256;
  int refinement_levels = 6;
  double epsilon = 1e-3; // exclusion half-width around the spectrum locus

  void validate() const;
};

/// One quadrature node: position in the plane and its Lebesgue area.
struct QuadNode
{
  cplx z;
  double area;
};

struct GradedRow
{
  double center;
  double height;
  int level;
};

/// Rows covering the segment between `boundary` and `far` (either order),
/// graded toward `boundary`.
std::vector<GradedRow> graded_rows(double boundary, double far, int base_rows, int levels);

inline constexpr int kRowsPerBand = 32;

/// Midpoint nodes on [x.lo, x.hi] x ({epsilon <= |y| <= height}).
///
/// For every T in `band_edges`, rows overlapping the cutoff transition
/// [T/2, T] are split so that at least kRowsPerBand rows cover it.
std::vector<QuadNode> strip_mesh(Interval x, double height, const QuadratureSpec &spec,
                                 std::span<const double> band_edges = {});

/// Polar midpoint nodes on the annular sector bounding `omega0`, minus the
/// band | |z| - 1 | < epsilon. Area element r dr dphi.
std::vector<QuadNode> annulus_mesh(const Region &omega0, const QuadratureSpec &spec);

} // namespace hsf
