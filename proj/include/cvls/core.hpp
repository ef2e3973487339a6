#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace cvls {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CMatrixX = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVectorX = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RVectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrix = CMatrixX<double>;
using CVector = CVectorX<double>;
using RMatrix = RMatrixX<double>;
using RVector = RVectorX<double>;
using cdouble = std::complex<double>;

// Errors. Every failure raised by the library derives from cvls::Error so the
// CLI can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A bimatrix, resolvent or linear operator is singular to working precision.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (bad spectrum, non-finite entries, indefinite weights).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The design problem has no solution (uncontrollable, unstabilizable, ...).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to converge or a post-condition check failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace tol {
/// Reciprocal condition below which a bimatrix counts as singular.
inline constexpr double kSingularRcond = 1e-12;
/// Relative residual allowed in the Hermite symmetry conditions.
inline constexpr double kHermite = 1e-10;
/// Smallest eigenvalue of a positive definite real representation, relative to its 2-norm.
inline constexpr double kPositiveDefinite = 1e-10;
/// Relative distance at which two eigenvalues are considered conjugate partners.
inline constexpr double kConjugatePairing = 1e-8;
/// PBH rank threshold relative to the norm of [A | B].
inline constexpr double kPbhRank = 1e-8;
/// Distance from the stability boundary required for asymptotic stability.
inline constexpr double kStabilityMargin = 1e-10;
}  // namespace tol

}  // namespace cvls
