// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace hsf
{

/// Seeded generator with named, independent child streams.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; the floating-point transforms are done here rather than with the
/// <random> distributions, whose algorithms are implementation-defined. Every
/// draw is therefore reproducible across standard libraries.
class Rng
{
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Child stream keyed by name; the same (seed, name) always yields the same
  /// stream, and the parent's state is left untouched.
  Rng split(std::string_view name) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller).
  double normal();

  /// Complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace hsf
