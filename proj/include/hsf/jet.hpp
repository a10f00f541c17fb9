// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hsf
{

/// Truncated Taylor series in normalized form: coeff(k) = g^{(k)}(x0) / k!.
///
/// All arithmetic keeps the truncation order of the operands (they must
/// agree). Nonlinear functions use the usual first-order recurrences, so the
/// cost of every operation is O(order^2).
class TaylorSeries
{
public:
  TaylorSeries() = default;

  /// Constant series of the given order.
  static TaylorSeries constant(double value, int order);

  /// The identity map t -> t expanded at x0.
  static TaylorSeries variable(double x0, int order);

  int order() const noexcept { return static_cast<int>(c_.size()) - 1; }
  double operator[](std::size_t k) const { return c_[k]; }
  double &operator[](std::size_t k) { return c_[k]; }
  std::span<const double> coefficients() const noexcept { return c_; }

  /// Derivative values g^{(k)}(x0), k = 0..order.
  std::vector<double> derivatives() const;

  TaylorSeries &operator+=(const TaylorSeries &rhs);
  TaylorSeries &operator-=(const TaylorSeries &rhs);
  TaylorSeries &operator*=(double s);

  friend TaylorSeries operator+(TaylorSeries a, const TaylorSeries &b) { return a += b; }
  friend TaylorSeries operator-(TaylorSeries a, const TaylorSeries &b) { return a -= b; }
  friend TaylorSeries operator*(TaylorSeries a, double s) { return a *= s; }
  friend TaylorSeries operator-(TaylorSeries a) { return a *= -1.0; }
  friend TaylorSeries operator*(const TaylorSeries &a, const TaylorSeries &b);

  /// Throws EvalError when the constant term of the denominator is zero.
  friend TaylorSeries operator/(const TaylorSeries &a, const TaylorSeries &b);

  bool is_zero() const noexcept;

private:
  std::vector<double> c_;
};

TaylorSeries exp(const TaylorSeries &a);
TaylorSeries sin(const TaylorSeries &a);
TaylorSeries cos(const TaylorSeries &a);
void sin_cos(const TaylorSeries &a, TaylorSeries &s, TaylorSeries &c);
TaylorSeries atan(const TaylorSeries &a);

/// Integer power, negative exponents through division.
TaylorSeries pow(const TaylorSeries &a, int exponent);

/// Standard bump exp(1/(u^2-1)) on |u| < 1, zero elsewhere. Inputs with
/// |u(x0)| >= 1 - 1e-8 give the zero series.
TaylorSeries bump(const TaylorSeries &u);

inline constexpr double kBumpFlatMargin = 1e-8;

/// Derivative jet of a scalar function at a point: derivs[k] = g^{(k)}(x).
struct TaylorJet
{
  double x = 0.0;
  int order = 0;
  std::vector<double> derivs;

  static TaylorJet zero(double x, int order)
  {
    return TaylorJet{x, order, std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0)};
  }
};

} // namespace hsf
