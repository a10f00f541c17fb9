// SPDX-License-Identifier: Apache-2.0

#include "hsf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsf/errors.hpp"

namespace hsf
{

void QuadratureSpec::validate() const
{
  if (!(epsilon > 0.0))
    throw PreconditionError("quadrature epsilon must be positive");
  if (base_cells_x < 8 || base_cells_y < 8)
    throw PreconditionError("quadrature needs at least 8 base cells per direction");
  if (refinement_levels < 0 || refinement_levels > 12)
    throw PreconditionError("refinement_levels must lie in [0, 12]");
}

std::vector<GradedRow> graded_rows(double boundary, double far, int base_rows, int levels)
{
  const double H = (far - boundary) / base_rows;
  std::vector<GradedRow> rows;
  rows.reserve(static_cast<std::size_t>(base_rows + levels));
  for (int j = 1; j < base_rows; ++j)
    rows.push_back({boundary + (j + 0.5) * H, std::abs(H), 0});

  // Split the cell touching the boundary, keeping the far half each time.
  double inner = boundary + H;
  for (int k = 1; k <= levels; ++k)
  {
    const double mid = boundary + H / std::ldexp(1.0, k);
    rows.push_back({0.5 * (mid + inner), std::abs(inner - mid), k});
    inner = mid;
  }
  rows.push_back({0.5 * (boundary + inner), std::abs(inner - boundary), levels});
  return rows;
}

std::vector<QuadNode> strip_mesh(Interval x, double height, const QuadratureSpec &spec,
                                 std::span<const double> band_edges)
{
  spec.validate();
  if (!(spec.epsilon < height))
    throw PreconditionError("exclusion half-width must be below the support height C");

  std::vector<GradedRow> rows;
  for (const GradedRow &row : graded_rows(spec.epsilon, height, spec.base_cells_y, spec.refinement_levels))
  {
    const double lo = row.center - 0.5 * row.height;
    const double hi = row.center + 0.5 * row.height;
    double target = row.height;
    for (double T : band_edges)
      if (lo < T && hi > 0.5 * T)
        target = std::min(target, 0.5 * T / kRowsPerBand);
    const int pieces = static_cast<int>(std::ceil(row.height / target - 1e-9));
    const double h = row.height / pieces;
    for (int p = 0; p < pieces; ++p)
      rows.push_back({lo + (p + 0.5) * h, h, row.level});
  }
  std::vector<QuadNode> nodes;
  for (double sign : {1.0, -1.0})
  {
    for (const GradedRow &row : rows)
    {
      const long m = static_cast<long>(spec.base_cells_x) << row.level;
      const double dx = x.length() / static_cast<double>(m);
      for (long i = 0; i < m; ++i)
      {
        const double xc = x.lo + (static_cast<double>(i) + 0.5) * dx;
        nodes.push_back({cplx(xc, sign * row.center), dx * row.height});
      }
    }
  }
  return nodes;
}

std::vector<QuadNode> annulus_mesh(const Region &omega0, const QuadratureSpec &spec)
{
  spec.validate();
  const double eps = spec.epsilon;
  const double r_lo = omega0.r_min * 0.99;
  const double r_hi = omega0.d_omega * 1.01;
  if (!(r_lo < 1.0 - eps && r_hi > 1.0 + eps))
    throw PreconditionError("exclusion band is wider than the support region");

  const double pad = 0.01 * (omega0.phi_max - omega0.phi_min);
  const double phi_lo = std::max(omega0.phi_min - pad, 0.0);
  const double phi_hi = std::min(omega0.phi_max + pad, 2.0 * std::numbers::pi);

  std::vector<QuadNode> nodes;
  auto emit = [&](const std::vector<GradedRow> &rows) {
    for (const GradedRow &row : rows)
    {
      const long m = static_cast<long>(spec.base_cells_x) << row.level;
      const double dphi = (phi_hi - phi_lo) / static_cast<double>(m);
      for (long i = 0; i < m; ++i)
      {
        const double phi = phi_lo + (static_cast<double>(i) + 0.5) * dphi;
        nodes.push_back({std::polar(row.center, phi), row.center * row.height * dphi});
      }
    }
  };
  emit(graded_rows(1.0 + eps, r_hi, spec.base_cells_y, spec.refinement_levels));
  emit(graded_rows(1.0 - eps, r_lo, spec.base_cells_y, spec.refinement_levels));
  return nodes;
}

} // namespace hsf
