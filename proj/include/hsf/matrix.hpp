// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hsf
{

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// M = V diag(eigenvalues) V^*, V with orthonormal columns.
struct SpectralDecomposition
{
  std::vector<cplx> eigenvalues;
  ComplexMatrix V;

  ComplexMatrix reconstruct() const;
};

struct ToleranceConfig
{
  double hermiticity_tol = 1e-10; // relative to max(1, max|M_ij|)
  double unitarity_tol = 1e-10;
  double eig_tol = 1e-14;         // off-diagonal Frobenius mass relative to ||H||_F
  double power_iter_tol = 1e-10;
  int max_iterations = 20000;
};

inline constexpr double kPivotThreshold = 1e-14;

double max_abs(const ComplexMatrix &M);
bool is_hermitian(const ComplexMatrix &M, double tol);
bool is_unitary(const ComplexMatrix &M, double tol);

/// (zI - M)^{-1} by LU with partial pivoting. A pivot below
/// kPivotThreshold * max|zI - M| raises SingularMatrixError.
ComplexMatrix resolvent(const ComplexMatrix &M, cplx z);

/// In-place LU with partial pivoting; returns false on a pivot below the
/// threshold. Exposed for reuse by the resolvent kernels.
class LuFactorization
{
public:
  explicit LuFactorization(ComplexMatrix A);

  bool singular() const noexcept { return singular_; }
  ComplexMatrix inverse() const;
  ComplexMatrix solve(const ComplexMatrix &B) const;

private:
  ComplexMatrix lu_;
  std::vector<int> perm_;
  bool singular_ = false;
};

/// Largest singular value by power iteration on M^* M with three seeded
/// restarts; the iteration stops once ||B v - mu v|| <= tol * mu.
double operator_norm(const ComplexMatrix &M, const ToleranceConfig &tol = {},
                     std::uint64_t seed = 0x5eed);

/// Cyclic Jacobi on a Hermitian matrix; eigenvalues ascending.
SpectralDecomposition hermitian_eig(const ComplexMatrix &H, const ToleranceConfig &tol = {});

/// Orthonormal columns by modified Gram-Schmidt with one reorthogonalization
/// pass (the Q factor of a QR decomposition).
ComplexMatrix orthonormalize(const ComplexMatrix &G);

/// Haar-like random orthonormal basis from a seeded complex Gaussian matrix.
ComplexMatrix random_basis(int n, std::uint64_t seed);

/// U = V diag(e^{i theta_j}) V^*. With identity_basis the basis is I.
std::pair<ComplexMatrix, SpectralDecomposition>
synth_unitary(std::span<const double> thetas, std::uint64_t seed, bool identity_basis = false);

/// H = V diag(lambda_j) V^*.
std::pair<ComplexMatrix, SpectralDecomposition>
synth_hermitian(std::span<const double> lambdas, std::uint64_t seed, bool identity_basis = false);

using ScalarFunction = std::function<cplx(cplx)>;

/// V diag(phi(lambda_j)) V^*.
ComplexMatrix spectral_apply(const SpectralDecomposition &decomp, const ScalarFunction &phi);

/// Resolvent of a unitary matrix from the geometric series:
///   |z| > 1:  z^{-1} sum_k (z^{-1} U)^k
///   |z| < 1: -U^*   sum_k (z U^*)^k
/// Summation stops when the geometric tail bound drops below tol.
/// Requires | |z| - 1 | >= 0.05.
ComplexMatrix resolvent_neumann(const ComplexMatrix &U, cplx z, double tol = 1e-13,
                                int max_terms = 100000, const ToleranceConfig &tols = {});

struct ResolventNormCheck
{
  double lhs = 0.0; // ||(z - M)^{-1}||
  double rhs = 0.0; // 1 / d(z, spectrum)
  double rel_err = 0.0;
};

ResolventNormCheck check_resolvent_norm_identity(const SpectralDecomposition &decomp, cplx z,
                                                 const ToleranceConfig &tol = {});

} // namespace hsf
