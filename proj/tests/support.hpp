// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit tests: finite-difference oracles and small
// hand-rolled generators for property tests.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "hsf/expr.hpp"
#include "hsf/matrix.hpp"
#include "hsf/rng.hpp"

namespace hsf::test
{

using cplx = std::complex<double>;
inline const cplx kI{0.0, 1.0};

inline double central_diff(const std::function<double(double)> &f, double x, double h)
{
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Centered two-dimensional d-bar: ((F(z+h) - F(z-h)) + i (F(z+ih) - F(z-ih))) / 4h.
inline cplx fd_dbar(const std::function<cplx(cplx)> &F, cplx z, double h)
{
  const cplx dx = (F(z + h) - F(z - h)) / (2.0 * h);
  const cplx dy = (F(z + kI * h) - F(z - kI * h)) / (2.0 * h);
  return 0.5 * (dx + kI * dy);
}

inline double log_uniform(Rng &rng, double lo, double hi)
{
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

/// Random expression trees over every node kind. Numbers are drawn from a
/// small set that prints exactly.
class ExprGenerator
{
public:
  explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

  Expr generate(int depth)
  {
    if (depth <= 0 || rng_.uniform() < 0.2)
      return leaf();
    const int pick = static_cast<int>(rng_.uniform() * 10.0);
    switch (pick)
    {
    case 0:
      return Expr::binary(Expr::Kind::Add, generate(depth - 1), generate(depth - 1));
    case 1:
      return Expr::binary(Expr::Kind::Sub, generate(depth - 1), generate(depth - 1));
    case 2:
      return Expr::binary(Expr::Kind::Mul, generate(depth - 1), generate(depth - 1));
    case 3:
      return Expr::binary(Expr::Kind::Div, generate(depth - 1), generate(depth - 1));
    case 4:
      return Expr::power(generate(depth - 1), static_cast<int>(rng_.uniform() * 7.0) - 3);
    case 5:
      return Expr::unary(Expr::Kind::Neg, generate(depth - 1));
    case 6:
      return Expr::unary(Expr::Kind::Sin, generate(depth - 1));
    case 7:
      return Expr::unary(Expr::Kind::Cos, generate(depth - 1));
    case 8:
      return Expr::unary(Expr::Kind::Exp, generate(depth - 1));
    default:
      return Expr::unary(Expr::Kind::Bump, generate(depth - 1));
    }
  }

private:
  Expr leaf()
  {
    static const double numbers[] = {0.5, 1.0, 2.0, 3.0, 0.25, 1.5, 10.0, 0.125};
    if (rng_.uniform() < 0.5)
      return Expr::variable();
    return Expr::number(numbers[static_cast<int>(rng_.uniform() * 8.0)]);
  }

  Rng rng_;
};

/// Largest entry modulus of A - B.
inline double max_diff(const ComplexMatrix &A, const ComplexMatrix &B)
{
  return (A - B).cwiseAbs().maxCoeff();
}

} // namespace hsf::test
