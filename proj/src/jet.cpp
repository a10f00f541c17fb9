// SPDX-License-Identifier: Apache-2.0

#include "hsf/jet.hpp"

#include <cassert>
#include <cmath>

#include "hsf/errors.hpp"

namespace hsf
{

TaylorSeries TaylorSeries::constant(double value, int order)
{
  assert(order >= 0);
  TaylorSeries s;
  s.c_.assign(static_cast<std::size_t>(order) + 1, 0.0);
  s.c_[0] = value;
  return s;
}

TaylorSeries TaylorSeries::variable(double x0, int order)
{
  TaylorSeries s = constant(x0, order);
  if (order >= 1)
    s.c_[1] = 1.0;
  return s;
}

std::vector<double> TaylorSeries::derivatives() const
{
  std::vector<double> d(c_.size());
  double factorial = 1.0;
  for (std::size_t k = 0; k < c_.size(); ++k)
  {
    if (k > 0)
      factorial *= static_cast<double>(k);
    d[k] = c_[k] * factorial;
  }
  return d;
}

TaylorSeries &TaylorSeries::operator+=(const TaylorSeries &rhs)
{
  assert(rhs.c_.size() == c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k)
    c_[k] += rhs.c_[k];
  return *this;
}

TaylorSeries &TaylorSeries::operator-=(const TaylorSeries &rhs)
{
  assert(rhs.c_.size() == c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k)
    c_[k] -= rhs.c_[k];
  return *this;
}

TaylorSeries &TaylorSeries::operator*=(double s)
{
  for (double &c : c_)
    c *= s;
  return *this;
}

bool TaylorSeries::is_zero() const noexcept
{
  for (double c : c_)
    if (c != 0.0)
      return false;
  return true;
}

TaylorSeries operator*(const TaylorSeries &a, const TaylorSeries &b)
{
  assert(a.order() == b.order());
  const int n = a.order();
  TaylorSeries r = TaylorSeries::constant(0.0, n);
  for (int k = 0; k <= n; ++k)
  {
    double acc = 0.0;
    for (int i = 0; i <= k; ++i)
      acc += a[i] * b[k - i];
    r[k] = acc;
  }
  return r;
}

TaylorSeries operator/(const TaylorSeries &a, const TaylorSeries &b)
{
  assert(a.order() == b.order());
  if (b[0] == 0.0)
    throw EvalError("division by zero");
  const int n = a.order();
  TaylorSeries q = TaylorSeries::constant(0.0, n);
  for (int k = 0; k <= n; ++k)
  {
    double acc = a[k];
    for (int i = 1; i <= k; ++i)
      acc -= b[i] * q[k - i];
    q[k] = acc / b[0];
  }
  return q;
}

TaylorSeries exp(const TaylorSeries &a)
{
  const int n = a.order();
  TaylorSeries e = TaylorSeries::constant(std::exp(a[0]), n);
  // k e_k = sum_{j=1}^k j a_j e_{k-j}
  for (int k = 1; k <= n; ++k)
  {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j)
      acc += j * a[j] * e[k - j];
    e[k] = acc / k;
  }
  return e;
}

void sin_cos(const TaylorSeries &a, TaylorSeries &s, TaylorSeries &c)
{
  const int n = a.order();
  s = TaylorSeries::constant(std::sin(a[0]), n);
  c = TaylorSeries::constant(std::cos(a[0]), n);
  for (int k = 1; k <= n; ++k)
  {
    double as = 0.0, ac = 0.0;
    for (int j = 1; j <= k; ++j)
    {
      as += j * a[j] * c[k - j];
      ac += j * a[j] * s[k - j];
    }
    s[k] = as / k;
    c[k] = -ac / k;
  }
}

TaylorSeries sin(const TaylorSeries &a)
{
  TaylorSeries s, c;
  sin_cos(a, s, c);
  return s;
}

TaylorSeries cos(const TaylorSeries &a)
{
  TaylorSeries s, c;
  sin_cos(a, s, c);
  return c;
}

TaylorSeries atan(const TaylorSeries &a)
{
  const int n = a.order();
  TaylorSeries r = TaylorSeries::constant(std::atan(a[0]), n);
  if (n == 0)
    return r;
  // atan(a)' = a' / (1 + a^2), computed one order short and integrated.
  TaylorSeries da = TaylorSeries::constant(0.0, n);
  for (int k = 0; k < n; ++k)
    da[k] = (k + 1) * a[k + 1];
  TaylorSeries q = da / (a * a + TaylorSeries::constant(1.0, n));
  for (int k = 1; k <= n; ++k)
    r[k] = q[k - 1] / k;
  return r;
}

TaylorSeries pow(const TaylorSeries &a, int exponent)
{
  const int n = a.order();
  if (exponent < 0)
    return TaylorSeries::constant(1.0, n) / pow(a, -exponent);
  TaylorSeries result = TaylorSeries::constant(1.0, n);
  TaylorSeries base = a;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0)
  {
    if (e & 1u)
      result = result * base;
    e >>= 1;
    if (e != 0)
      base = base * base;
  }
  return result;
}

TaylorSeries bump(const TaylorSeries &u)
{
  const int n = u.order();
  if (!(std::abs(u[0]) < 1.0 - kBumpFlatMargin))
    return TaylorSeries::constant(0.0, n);
  const TaylorSeries one = TaylorSeries::constant(1.0, n);
  return exp(one / (u * u - one));
}

} // namespace hsf
