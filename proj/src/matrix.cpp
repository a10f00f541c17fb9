// SPDX-License-Identifier: Apache-2.0

#include "hsf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hsf/errors.hpp"
#include "hsf/rng.hpp"

namespace hsf
{

ComplexMatrix SpectralDecomposition::reconstruct() const
{
  Eigen::VectorXcd d(static_cast<Eigen::Index>(eigenvalues.size()));
  for (std::size_t j = 0; j < eigenvalues.size(); ++j)
    d(static_cast<Eigen::Index>(j)) = eigenvalues[j];
  return V * d.asDiagonal() * V.adjoint();
}

double max_abs(const ComplexMatrix &M)
{
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix &M, double tol)
{
  if (M.rows() != M.cols())
    return false;
  return max_abs(M - M.adjoint()) <= tol * std::max(1.0, max_abs(M));
}

bool is_unitary(const ComplexMatrix &M, double tol)
{
  if (M.rows() != M.cols())
    return false;
  const auto n = M.rows();
  return max_abs(M.adjoint() * M - ComplexMatrix::Identity(n, n)) <= tol;
}

LuFactorization::LuFactorization(ComplexMatrix A) : lu_(std::move(A))
{
  const auto n = lu_.rows();
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), 0);
  const double threshold = kPivotThreshold * max_abs(lu_);

  for (Eigen::Index k = 0; k < n; ++k)
  {
    Eigen::Index p = k;
    double best = std::abs(lu_(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i)
    {
      const double a = std::abs(lu_(i, k));
      if (a > best)
      {
        best = a;
        p = i;
      }
    }
    if (!(best > threshold))
    {
      singular_ = true;
      return;
    }
    if (p != k)
    {
      lu_.row(k).swap(lu_.row(p));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(p)]);
    }
    const cplx pivot = lu_(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i)
    {
      const cplx l = lu_(i, k) / pivot;
      lu_(i, k) = l;
      if (l != 0.0)
        for (Eigen::Index j = k + 1; j < n; ++j)
          lu_(i, j) -= l * lu_(k, j);
    }
  }
}

ComplexMatrix LuFactorization::solve(const ComplexMatrix &B) const
{
  if (singular_)
    throw SingularMatrixError("matrix is numerically singular");
  const auto n = lu_.rows();
  ComplexMatrix X(n, B.cols());
  for (Eigen::Index c = 0; c < B.cols(); ++c)
  {
    // forward: L y = P b
    for (Eigen::Index i = 0; i < n; ++i)
    {
      cplx acc = B(perm_[static_cast<std::size_t>(i)], c);
      for (Eigen::Index j = 0; j < i; ++j)
        acc -= lu_(i, j) * X(j, c);
      X(i, c) = acc;
    }
    // backward: U x = y
    for (Eigen::Index i = n - 1; i >= 0; --i)
    {
      cplx acc = X(i, c);
      for (Eigen::Index j = i + 1; j < n; ++j)
        acc -= lu_(i, j) * X(j, c);
      X(i, c) = acc / lu_(i, i);
    }
  }
  return X;
}

ComplexMatrix LuFactorization::inverse() const
{
  const auto n = lu_.rows();
  return solve(ComplexMatrix::Identity(n, n));
}

ComplexMatrix resolvent(const ComplexMatrix &M, cplx z)
{
  if (M.rows() != M.cols() || M.rows() == 0)
    throw PreconditionError("resolvent needs a nonempty square matrix");
  ComplexMatrix A = -M;
  A.diagonal().array() += z;
  LuFactorization lu(std::move(A));
  if (lu.singular())
    throw SingularMatrixError("z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                              ") is numerically an eigenvalue");
  return lu.inverse();
}

double operator_norm(const ComplexMatrix &M, const ToleranceConfig &tol, std::uint64_t seed)
{
  const auto n = M.cols();
  if (n == 0 || max_abs(M) == 0.0)
    return 0.0;

  constexpr int kRestarts = 3;
  Rng rng(seed);
  double best = 0.0;
  bool converged_any = false;
  for (int r = 0; r < kRestarts; ++r)
  {
    Rng stream = rng.split("power-restart-" + std::to_string(r));
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = stream.complex_normal();
    v.normalize();

    for (int it = 0; it < tol.max_iterations; ++it)
    {
      const Eigen::VectorXcd w = M.adjoint() * (M * v);
      const double mu = v.dot(w).real();
      const double wn = w.norm();
      if (wn == 0.0)
        break; // start vector in the null space; try the next restart
      best = std::max(best, std::sqrt(std::max(mu, 0.0)));
      if ((w - mu * v).norm() <= tol.power_iter_tol * mu)
      {
        converged_any = true;
        break;
      }
      v = w / wn;
    }
  }
  if (!converged_any)
    throw ConvergenceError("power iteration did not converge", best);
  return best;
}

SpectralDecomposition hermitian_eig(const ComplexMatrix &H, const ToleranceConfig &tol)
{
  if (H.rows() != H.cols() || H.rows() == 0)
    throw PreconditionError("hermitian_eig needs a nonempty square matrix");
  if (!is_hermitian(H, tol.hermiticity_tol))
    throw PreconditionError("matrix is not Hermitian within tolerance");

  const auto n = H.rows();
  ComplexMatrix A = 0.5 * (H + H.adjoint());
  ComplexMatrix V = ComplexMatrix::Identity(n, n);
  const double scale = std::max(A.norm(), std::numeric_limits<double>::min());

  auto off_mass = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j)
          s += std::norm(A(i, j));
    return std::sqrt(s);
  };

  bool converged = off_mass() <= tol.eig_tol * scale;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep)
  {
    for (Eigen::Index p = 0; p < n - 1; ++p)
    {
      for (Eigen::Index q = p + 1; q < n; ++q)
      {
        const cplx apq = A(p, q);
        const double r = std::abs(apq);
        if (r == 0.0)
          continue;
        const cplx phase = apq / r; // e^{i phi}
        const double app = A(p, p).real();
        const double aqq = A(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // J = diag(1, e^{-i phi}) composed with the real rotation in (p, q).
        const cplx jpp = c;
        const cplx jpq = s;
        const cplx jqp = -s * std::conj(phase);
        const cplx jqq = c * std::conj(phase);

        for (Eigen::Index k = 0; k < n; ++k)
        {
          const cplx akp = A(k, p);
          const cplx akq = A(k, q);
          A(k, p) = akp * jpp + akq * jqp;
          A(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k)
        {
          const cplx apk = A(p, k);
          const cplx aqk = A(q, k);
          A(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          A(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        A(p, p) = A(p, p).real();
        A(q, q) = A(q, q).real();

        for (Eigen::Index k = 0; k < n; ++k)
        {
          const cplx vkp = V(k, p);
          const cplx vkq = V(k, q);
          V(k, p) = vkp * jpp + vkq * jqp;
          V(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
    converged = off_mass() <= tol.eig_tol * scale;
  }
  if (!converged)
    throw ConvergenceError("Jacobi eigensolver did not converge", off_mass());

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return A(a, a).real() < A(b, b).real(); });

  SpectralDecomposition d;
  d.V.resize(n, n);
  d.eigenvalues.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
  {
    d.eigenvalues[static_cast<std::size_t>(j)] = A(order[j], order[j]).real();
    d.V.col(j) = V.col(order[j]);
  }
  return d;
}

ComplexMatrix orthonormalize(const ComplexMatrix &G)
{
  ComplexMatrix Q = G;
  const auto n = Q.cols();
  for (Eigen::Index j = 0; j < n; ++j)
  {
    const double original = Q.col(j).norm();
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < j; ++k)
        Q.col(j) -= Q.col(k).dot(Q.col(j)) * Q.col(k);
    const double nrm = Q.col(j).norm();
    if (!(nrm > 1e-12 * original))
      throw SingularMatrixError("orthonormalize: rank-deficient input");
    Q.col(j) /= nrm;
  }
  return Q;
}

ComplexMatrix random_basis(int n, std::uint64_t seed)
{
  Rng rng = Rng(seed).split("basis");
  ComplexMatrix G(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      G(i, j) = rng.complex_normal();
  return orthonormalize(G);
}

namespace
{

std::pair<ComplexMatrix, SpectralDecomposition> synthesize(std::vector<cplx> eigenvalues,
                                                           std::uint64_t seed, bool identity_basis)
{
  const int n = static_cast<int>(eigenvalues.size());
  if (n == 0)
    throw PreconditionError("synthesis needs at least one eigenvalue");
  SpectralDecomposition d;
  d.eigenvalues = std::move(eigenvalues);
  d.V = identity_basis ? ComplexMatrix::Identity(n, n) : random_basis(n, seed);
  ComplexMatrix M = d.reconstruct();
  return {std::move(M), std::move(d)};
}

} // namespace

std::pair<ComplexMatrix, SpectralDecomposition> synth_unitary(std::span<const double> thetas,
                                                              std::uint64_t seed, bool identity_basis)
{
  std::vector<cplx> ev;
  ev.reserve(thetas.size());
  for (double t : thetas)
    ev.push_back(std::polar(1.0, t));
  return synthesize(std::move(ev), seed, identity_basis);
}

std::pair<ComplexMatrix, SpectralDecomposition> synth_hermitian(std::span<const double> lambdas,
                                                                std::uint64_t seed, bool identity_basis)
{
  std::vector<cplx> ev(lambdas.begin(), lambdas.end());
  auto out = synthesize(std::move(ev), seed, identity_basis);
  // Exact Hermitian symmetry; the product above leaves O(eps) asymmetry.
  out.first = 0.5 * (out.first + out.first.adjoint()).eval();
  return out;
}

ComplexMatrix spectral_apply(const SpectralDecomposition &decomp, const ScalarFunction &phi)
{
  const auto n = static_cast<Eigen::Index>(decomp.eigenvalues.size());
  Eigen::VectorXcd d(n);
  for (Eigen::Index j = 0; j < n; ++j)
  {
    const cplx lambda = decomp.eigenvalues[static_cast<std::size_t>(j)];
    try
    {
      d(j) = phi(lambda);
    }
    catch (const Error &e)
    {
      throw EvalError(std::string(e.what()) + " (at eigenvalue " + std::to_string(lambda.real()) +
                      " + " + std::to_string(lambda.imag()) + "i)");
    }
  }
  return decomp.V * d.asDiagonal() * decomp.V.adjoint();
}

ComplexMatrix resolvent_neumann(const ComplexMatrix &U, cplx z, double tol, int max_terms,
                                const ToleranceConfig &tols)
{
  if (!is_unitary(U, tols.unitarity_tol))
    throw PreconditionError("resolvent_neumann needs a unitary matrix");
  const double r = std::abs(z);
  if (std::abs(r - 1.0) < 0.05)
    throw PreconditionError("resolvent_neumann needs | |z| - 1 | >= 0.05");

  const auto n = U.rows();
  const bool outside = r > 1.0;
  // Ratio of the series and its per-term norm bound.
  const ComplexMatrix step = outside ? ComplexMatrix(U / z) : ComplexMatrix(z * U.adjoint());
  const double q = outside ? 1.0 / r : r;

  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  ComplexMatrix sum = term;
  double bound = 1.0; // ||step^k|| = q^k for unitary U
  int k = 0;
  while (bound * q / (1.0 - q) > tol)
  {
    if (++k > max_terms)
      throw ConvergenceError("Neumann series did not reach tolerance", bound);
    term = term * step;
    sum += term;
    bound *= q;
  }
  if (outside)
    return sum / z;
  return -U.adjoint() * sum;
}

ResolventNormCheck check_resolvent_norm_identity(const SpectralDecomposition &decomp, cplx z,
                                                 const ToleranceConfig &tol)
{
  double d = std::numeric_limits<double>::infinity();
  for (cplx lambda : decomp.eigenvalues)
    d = std::min(d, std::abs(z - lambda));
  if (!(d > 1e-8))
    throw PreconditionError("z lies in the spectrum");
  ResolventNormCheck c;
  c.lhs = operator_norm(resolvent(decomp.reconstruct(), z), tol);
  c.rhs = 1.0 / d;
  c.rel_err = std::abs(c.lhs - c.rhs) / c.rhs;
  return c;
}

} // namespace hsf
