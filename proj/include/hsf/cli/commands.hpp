// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "hsf/cli/config.hpp"
#include "hsf/cli/report.hpp"
#include "hsf/errors.hpp"

namespace hsf::cli
{

/// A computation failure tagged with the module it came from.
class StageError : public Error
{
public:
  StageError(const std::string &module, const std::string &message)
    : Error(module + ": " + message), module_(module)
  {
  }

  const std::string &module() const noexcept { return module_; }

private:
  std::string module_;
};

struct RunOptions
{
  bool timings = false; // add wall-clock times (makes reports run-dependent)
};

/// Executes cfg.command. Missing inputs raise ConfigError; computation
/// failures raise StageError.
Report run(const JobConfig &cfg, const RunOptions &opts = {});

Report run_extend(const JobConfig &cfg);
Report run_apply_sa(const JobConfig &cfg);
Report run_apply_unitary(const JobConfig &cfg);
Report run_cauchy_check(const JobConfig &cfg);
Report run_convergence(const JobConfig &cfg);

/// The full property suite on built-in problems.
Report run_verify(const JobConfig &cfg);

/// max |f| over a uniform grid on the support.
double sup_norm(const SmoothCompactFunction &f, int samples = 4096);

/// f(U) from an eigendecomposition of the Hermitian Cayley image
/// i (U + I)(U - I)^{-1}. Requires 1 not to be an eigenvalue of U.
ComplexMatrix unitary_oracle(const ComplexMatrix &U, const CircleFunction &f);

} // namespace hsf::cli
