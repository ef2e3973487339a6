#pragma once

#include <random>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "cvls/core.hpp"
#include "cvls/spectrum.hpp"

namespace cvls::linalg {

/// Solves A^H X + X A = -Q by Kronecker vectorization. Works for real and
/// complex operands. Throws SingularError when some pair of eigenvalues of A
/// satisfies l_i + conj(l_j) = 0 to working precision.
template <typename Derived, typename DerivedQ>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> solveContinuousLyapunov(
    const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<DerivedQ>& q) {
  using S = typename Derived::Scalar;
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) {
    throw DimensionError("Lyapunov equation: operands must be square and conformable");
  }
  const M I = M::Identity(n, n);
  const M op = Eigen::kroneckerProduct(I, M(a.adjoint())) + Eigen::kroneckerProduct(M(a.transpose()), I);
  Eigen::PartialPivLU<M> lu(op);
  if (!(lu.rcond() >= tol::kSingularRcond)) {
    throw SingularError("Lyapunov operator is singular: no unique solution");
  }
  const M qm = q;
  const Eigen::Matrix<S, Eigen::Dynamic, 1> x = lu.solve(-qm.reshaped());
  return x.reshaped(n, n);
}

/// Solves A^H X A - X = -Q (the Stein equation); singular when l_i conj(l_j) = 1.
template <typename Derived, typename DerivedQ>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> solveDiscreteLyapunov(
    const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<DerivedQ>& q) {
  using S = typename Derived::Scalar;
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) {
    throw DimensionError("Stein equation: operands must be square and conformable");
  }
  const M op = Eigen::kroneckerProduct(M(a.transpose()), M(a.adjoint())) - M::Identity(n * n, n * n);
  Eigen::PartialPivLU<M> lu(op);
  if (!(lu.rcond() >= tol::kSingularRcond)) {
    throw SingularError("Stein operator is singular: no unique solution");
  }
  const M qm = q;
  const Eigen::Matrix<S, Eigen::Dynamic, 1> x = lu.solve(-qm.reshaped());
  return x.reshaped(n, n);
}

/// Ratio of extreme singular values; 0 for an empty or rank-deficient matrix.
template <typename Derived>
double rcondSvd(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(m);
  const auto& s = svd.singularValues();
  if (s(0) == 0) return 0.0;
  return s(s.size() - 1) / s(0);
}

/// Smallest singular value.
template <typename Derived>
double minSingularValue(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// Real-state eigenvalue placement by the parametric (nullspace) form of the
/// Sylvester equation A X - X L = -B G: every column pair (x, g) of X and G is
/// drawn at random from ker [A - lI, B]; K = G X^{-1}. Repeated targets that
/// exceed the input multiplicity are chained into Jordan blocks. Retries up to
/// `max_tries` times when X is ill-conditioned.
///
/// `targets` must be closed under conjugation with a.rows() entries.
RMatrix placeReal(const RMatrix& a, const RMatrix& b, const Spectrum& targets, std::mt19937_64& rng,
                  int max_tries = 20);

/// Complex-coefficient variant: any n complex targets for A + B K with complex K.
CMatrix placeComplex(const CMatrix& a, const CMatrix& b, const Spectrum& targets, std::mt19937_64& rng,
                     int max_tries = 20);

struct RiccatiResult {
  RMatrix p;
  RMatrix k;          ///< optimal gain, u = k x
  double residual{};  ///< relative residual of the Riccati equation
  int iterations{};
};

/// A^T P + P A - P B R^{-1} B^T P + Q = 0 by Newton-Kleinman from the
/// stabilizing gain `k0` (closed loop A + B k0).
RiccatiResult solveCare(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r,
                        const RMatrix& k0, int max_iters = 100, double rel_tol = 1e-10);

/// A^T P A - P - A^T P B (R + B^T P B)^{-1} B^T P A + Q = 0 by the Riccati
/// difference iteration from P = Q, finished with Hewer (Newton) steps once
/// the iterate's gain is stabilizing.
RiccatiResult solveDare(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r,
                        int max_iters = 100, double rel_tol = 1e-10);

double careResidual(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r,
                    const RMatrix& p);
double dareResidual(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r,
                    const RMatrix& p);

/// Eigenvalues of a general real or complex square matrix.
Spectrum eigenvaluesOf(const RMatrix& m);
Spectrum eigenvaluesOf(const CMatrix& m);

}  // namespace cvls::linalg
