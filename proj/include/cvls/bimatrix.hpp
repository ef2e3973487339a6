#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "cvls/core.hpp"
#include "cvls/spectrum.hpp"

namespace cvls {

/// The ordered pair {A1, A2} acting on x as A1 x + conj(A2) conj(x).
///
/// The action is linear over the reals only. Products follow
/// {A1,A2}{B1,B2} = {A1 B1 + conj(A2) B2, conj(A1) B2 + A2 B1}, which makes the
/// real representation and the complex lifting algebra homomorphisms.
template <typename Scalar>
class Bimatrix {
 public:
  using Matrix = CMatrixX<Scalar>;

  Bimatrix() = default;

  Bimatrix(Matrix first, Matrix second) : first_(std::move(first)), second_(std::move(second)) {
    if (first_.rows() != second_.rows() || first_.cols() != second_.cols()) {
      throw DimensionError("bimatrix components differ in shape: " + shape(first_) + " vs " +
                           shape(second_));
    }
    if (!first_.allFinite() || !second_.allFinite()) {
      throw InputError("bimatrix has non-finite entries");
    }
  }

  static Bimatrix identity(Eigen::Index n) {
    return Bimatrix(Matrix::Identity(n, n), Matrix::Zero(n, n));
  }
  static Bimatrix zero(Eigen::Index rows, Eigen::Index cols) {
    return Bimatrix(Matrix::Zero(rows, cols), Matrix::Zero(rows, cols));
  }
  /// {A, 0}
  static Bimatrix normal(Matrix a) {
    Matrix z = Matrix::Zero(a.rows(), a.cols());
    return Bimatrix(std::move(a), std::move(z));
  }
  /// {0, A}
  static Bimatrix antilinear(Matrix a) {
    Matrix z = Matrix::Zero(a.rows(), a.cols());
    return Bimatrix(std::move(z), std::move(a));
  }

  const Matrix& first() const { return first_; }
  const Matrix& second() const { return second_; }
  Eigen::Index rows() const { return first_.rows(); }
  Eigen::Index cols() const { return first_.cols(); }
  bool isSquare() const { return rows() == cols(); }

  bool isZero(Scalar tolerance = Scalar(0)) const {
    if (first_.size() == 0) return true;
    return first_.cwiseAbs().maxCoeff() <= tolerance && second_.cwiseAbs().maxCoeff() <= tolerance;
  }

  /// ||A1||_F + ||A2||_F. Used only as a scale for relative tolerances.
  Scalar normBound() const { return first_.norm() + second_.norm(); }

  static std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
  }

 private:
  Matrix first_;
  Matrix second_;
};

using BimatrixD = Bimatrix<double>;

namespace detail {
template <typename Scalar>
void requireSameShape(const Bimatrix<Scalar>& a, const Bimatrix<Scalar>& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}
template <typename Scalar>
void requireSquare(const Bimatrix<Scalar>& a, const char* what) {
  if (!a.isSquare()) throw DimensionError(std::string(what) + ": bimatrix is not square");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Arithmetic

/// A1 x + conj(A2) conj(x)
template <typename Scalar, typename Derived>
CVectorX<Scalar> act(const Bimatrix<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != a.cols()) {
    throw DimensionError("bimatrix action: vector length " + std::to_string(x.size()) +
                         " does not match " + std::to_string(a.cols()) + " columns");
  }
  const CVectorX<Scalar> v = x.template cast<Complex<Scalar>>();
  return a.first() * v + (a.second().conjugate() * v.conjugate());
}

template <typename Scalar>
Bimatrix<Scalar> operator+(const Bimatrix<Scalar>& a, const Bimatrix<Scalar>& b) {
  detail::requireSameShape(a, b, "bimatrix sum");
  return Bimatrix<Scalar>(a.first() + b.first(), a.second() + b.second());
}

template <typename Scalar>
Bimatrix<Scalar> operator-(const Bimatrix<Scalar>& a, const Bimatrix<Scalar>& b) {
  detail::requireSameShape(a, b, "bimatrix difference");
  return Bimatrix<Scalar>(a.first() - b.first(), a.second() - b.second());
}

template <typename Scalar>
Bimatrix<Scalar> operator-(const Bimatrix<Scalar>& a) {
  return Bimatrix<Scalar>(-a.first(), -a.second());
}

/// Real scaling. Complex scalars do not commute with the conjugate part and
/// are deliberately not supported.
template <typename Scalar>
Bimatrix<Scalar> operator*(Scalar s, const Bimatrix<Scalar>& a) {
  return Bimatrix<Scalar>(s * a.first(), s * a.second());
}

template <typename Scalar>
Bimatrix<Scalar> operator*(const Bimatrix<Scalar>& a, const Bimatrix<Scalar>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("bimatrix product: inner dimensions " + std::to_string(a.cols()) +
                         " and " + std::to_string(b.rows()) + " differ");
  }
  return Bimatrix<Scalar>(a.first() * b.first() + a.second().conjugate() * b.second(),
                          a.first().conjugate() * b.second() + a.second() * b.first());
}

/// {A1^H, A2^T}
template <typename Scalar>
Bimatrix<Scalar> adjoint(const Bimatrix<Scalar>& a) {
  return Bimatrix<Scalar>(a.first().adjoint(), a.second().transpose());
}

// ---------------------------------------------------------------------------
// Representations

/// [[Re(A1+A2), -Im(A1+A2)], [Im(A1-A2), Re(A1-A2)]]
template <typename Scalar>
RMatrixX<Scalar> realRepresentation(const Bimatrix<Scalar>& a) {
  const Eigen::Index n = a.rows(), m = a.cols();
  const CMatrixX<Scalar> s = a.first() + a.second();
  const CMatrixX<Scalar> d = a.first() - a.second();
  RMatrixX<Scalar> r(2 * n, 2 * m);
  r << s.real(), -s.imag(), d.imag(), d.real();
  return r;
}

/// [[A1, conj(A2)], [A2, conj(A1)]]
template <typename Scalar>
CMatrixX<Scalar> complexLifting(const Bimatrix<Scalar>& a) {
  const Eigen::Index n = a.rows(), m = a.cols();
  CMatrixX<Scalar> l(2 * n, 2 * m);
  l << a.first(), a.second().conjugate(), a.second(), a.first().conjugate();
  return l;
}

/// Unitary (1/sqrt 2)[[I, jI], [I, -jI]] mapping Re/Im coordinates onto
/// (x, conj x)/sqrt 2 coordinates.
template <typename Scalar = double>
CMatrixX<Scalar> hMatrix(Eigen::Index n) {
  if (n < 1) throw DimensionError("hMatrix: order must be positive");
  using C = Complex<Scalar>;
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  const CMatrixX<Scalar> I = CMatrixX<Scalar>::Identity(n, n);
  CMatrixX<Scalar> h(2 * n, 2 * n);
  h << C(s) * I, C(0, s) * I, C(s) * I, C(0, -s) * I;
  return h;
}

/// Block anti-identity [[0, I], [I, 0]].
template <typename Scalar = double>
RMatrixX<Scalar> eMatrix(Eigen::Index n) {
  RMatrixX<Scalar> e = RMatrixX<Scalar>::Zero(2 * n, 2 * n);
  e.topRightCorner(n, n).setIdentity();
  e.bottomLeftCorner(n, n).setIdentity();
  return e;
}

/// The unique bimatrix whose real representation is `a`.
template <typename Derived>
Bimatrix<typename Derived::Scalar> fromRealRepresentation(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() % 2 != 0 || a.cols() % 2 != 0) {
    throw DimensionError("real representation must have even dimensions, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  const Eigen::Index n = a.rows() / 2, m = a.cols() / 2;
  const RMatrixX<Scalar> a11 = a.topLeftCorner(n, m), a12 = a.topRightCorner(n, m);
  const RMatrixX<Scalar> a21 = a.bottomLeftCorner(n, m), a22 = a.bottomRightCorner(n, m);
  const Scalar h = Scalar(0.5);
  CMatrixX<Scalar> first(n, m), second(n, m);
  first.real() = h * (a11 + a22);
  first.imag() = h * (a21 - a12);
  second.real() = h * (a11 - a22);
  second.imag() = -h * (a21 + a12);
  return Bimatrix<Scalar>(std::move(first), std::move(second));
}

/// [Re x; Im x]
template <typename Derived>
RVectorX<typename Derived::RealScalar> arrow(const Eigen::MatrixBase<Derived>& x) {
  RVectorX<typename Derived::RealScalar> r(2 * x.size());
  r << x.real(), x.imag();
  return r;
}

/// Inverse of arrow.
template <typename Derived>
CVectorX<typename Derived::Scalar> fromArrow(const Eigen::MatrixBase<Derived>& r) {
  using Scalar = typename Derived::Scalar;
  if (r.size() % 2 != 0) throw DimensionError("fromArrow: odd length");
  const Eigen::Index n = r.size() / 2;
  CVectorX<Scalar> x(n);
  x.real() = r.head(n);
  x.imag() = r.tail(n);
  return x;
}

/// (1/sqrt 2)[x; conj x]
template <typename Derived>
CVectorX<typename Derived::RealScalar> breve(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::RealScalar;
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  CVectorX<Scalar> v(2 * x.size());
  v << x.template cast<Complex<Scalar>>(), x.template cast<Complex<Scalar>>().conjugate();
  return s * v;
}

// ---------------------------------------------------------------------------
// Inverse, power, exponent

/// Inverse through the complex lifting: [A3; A4] = lift(A)^{-1} [I; 0].
template <typename Scalar>
Bimatrix<Scalar> inverse(const Bimatrix<Scalar>& a) {
  detail::requireSquare(a, "bimatrix inverse");
  const Eigen::Index n = a.rows();
  const Eigen::PartialPivLU<CMatrixX<Scalar>> lu(complexLifting(a));
  if (!(lu.rcond() >= Scalar(tol::kSingularRcond))) {
    throw SingularError("bimatrix is singular (reciprocal condition " + std::to_string(lu.rcond()) +
                        ")");
  }
  CMatrixX<Scalar> rhs = CMatrixX<Scalar>::Zero(2 * n, n);
  rhs.topRows(n).setIdentity();
  const CMatrixX<Scalar> x = lu.solve(rhs);
  return Bimatrix<Scalar>(x.topRows(n), x.bottomRows(n));
}

enum class SchurPivot { First, Second };

/// Closed-form inverse by a Schur complement on A1 (pivot First) or A2
/// (pivot Second). Returns nullopt when the pivot block or the complement is
/// not invertible.
template <typename Scalar>
std::optional<Bimatrix<Scalar>> inverseSchur(const Bimatrix<Scalar>& a, SchurPivot pivot) {
  detail::requireSquare(a, "bimatrix inverse");
  using M = CMatrixX<Scalar>;
  auto invertible = [](const M& m) {
    Eigen::PartialPivLU<M> lu(m);
    return std::pair{lu, lu.rcond() >= Scalar(tol::kSingularRcond)};
  };
  const M& a1 = a.first();
  const M& a2 = a.second();
  if (pivot == SchurPivot::First) {
    auto [lu1c, ok1] = invertible(a1.conjugate());
    if (!ok1) return std::nullopt;
    const M s1 = a1 - a2.conjugate() * lu1c.solve(a2);
    auto [lus, oks] = invertible(s1);
    if (!oks) return std::nullopt;
    const M s1inv = lus.inverse();
    return Bimatrix<Scalar>(s1inv, -lu1c.solve(a2) * s1inv);
  }
  auto [lu2, ok2] = invertible(a2);
  if (!ok2) return std::nullopt;
  const M s2 = a2.conjugate() - a1 * lu2.solve(a1.conjugate());
  auto [lus, oks] = invertible(s2);
  if (!oks) return std::nullopt;
  const M s2inv = lus.inverse();
  return Bimatrix<Scalar>(-lu2.solve(a1.conjugate()) * s2inv, s2inv);
}

/// t-fold product; power(a, 0) is the identity bimatrix.
template <typename Scalar>
Bimatrix<Scalar> power(const Bimatrix<Scalar>& a, unsigned t) {
  detail::requireSquare(a, "bimatrix power");
  Bimatrix<Scalar> result = Bimatrix<Scalar>::identity(a.rows());
  Bimatrix<Scalar> base = a;
  // Square-and-multiply; powers of one bimatrix commute.
  while (t > 0) {
    if (t & 1u) result = result * base;
    t >>= 1u;
    if (t > 0) base = base * base;
  }
  return result;
}

/// exp(t {A1, A2}) evaluated on the real representation.
template <typename Scalar>
Bimatrix<Scalar> exponent(const Bimatrix<Scalar>& a, Scalar t) {
  detail::requireSquare(a, "bimatrix exponent");
  const RMatrixX<Scalar> m = t * realRepresentation(a);
  const RMatrixX<Scalar> e = m.exp();
  return fromRealRepresentation(e);
}

// ---------------------------------------------------------------------------
// Spectrum

/// The 2n eigenvalues of the real representation.
template <typename Scalar>
SpectrumSet<Scalar> eigenvalues(const Bimatrix<Scalar>& a) {
  detail::requireSquare(a, "bimatrix eigenvalues");
  if (a.rows() == 0) return SpectrumSet<Scalar>();
  Eigen::EigenSolver<RMatrixX<Scalar>> es(realRepresentation(a), false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return SpectrumSet<Scalar>::fromEigen(es.eigenvalues());
}

// ---------------------------------------------------------------------------
// Hermite bimatrices

/// {P1, P2} with P1 Hermitian and P2 complex symmetric, i.e. {P1,P2}^H = {P1,P2}.
/// The stored parts are the exact symmetrizations of the validated input.
template <typename Scalar>
class HermBimatrix {
 public:
  using Matrix = CMatrixX<Scalar>;

  HermBimatrix() = default;

  explicit HermBimatrix(const Bimatrix<Scalar>& p, Scalar tolerance = Scalar(tol::kHermite)) {
    detail::requireSquare(p, "Hermite bimatrix");
    const Scalar scale = p.normBound();
    const Scalar r1 = (p.first() - p.first().adjoint()).norm();
    const Scalar r2 = (p.second() - p.second().transpose()).norm();
    if (r1 > tolerance * scale || r2 > tolerance * scale) {
      throw InputError("bimatrix is not Hermite (residuals " + std::to_string(r1) + ", " +
                       std::to_string(r2) + ")");
    }
    p_ = Bimatrix<Scalar>(Scalar(0.5) * (p.first() + p.first().adjoint()),
                          Scalar(0.5) * (p.second() + p.second().transpose()));
  }

  HermBimatrix(Matrix p1, Matrix p2, Scalar tolerance = Scalar(tol::kHermite))
      : HermBimatrix(Bimatrix<Scalar>(std::move(p1), std::move(p2)), tolerance) {}

  /// Bimatrix whose real representation is the symmetric part of `pr`.
  template <typename Derived>
  static HermBimatrix fromRealSymmetric(const Eigen::MatrixBase<Derived>& pr) {
    const RMatrixX<Scalar> sym = Scalar(0.5) * (pr + pr.transpose());
    return HermBimatrix(fromRealRepresentation(sym));
  }

  static HermBimatrix identity(Eigen::Index n) { return HermBimatrix(Bimatrix<Scalar>::identity(n)); }

  const Bimatrix<Scalar>& bimatrix() const { return p_; }
  operator const Bimatrix<Scalar>&() const { return p_; }  // NOLINT(google-explicit-constructor)
  const Matrix& p1() const { return p_.first(); }
  const Matrix& p2() const { return p_.second(); }
  Eigen::Index order() const { return p_.rows(); }

 private:
  Bimatrix<Scalar> p_;
};

using HermBimatrixD = HermBimatrix<double>;

/// Smallest eigenvalue of the (symmetric) real representation.
template <typename Scalar>
Scalar minEigenvalue(const HermBimatrix<Scalar>& p) {
  if (p.order() == 0) return Scalar(0);
  RMatrixX<Scalar> r = realRepresentation(p.bimatrix());
  r = Scalar(0.5) * (r + r.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMatrixX<Scalar>> es(r, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Positive definiteness of the real representation.
template <typename Scalar>
bool isPositiveDefinite(const HermBimatrix<Scalar>& p) {
  if (p.order() == 0) return true;
  RMatrixX<Scalar> r = realRepresentation(p.bimatrix());
  r = Scalar(0.5) * (r + r.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMatrixX<Scalar>> es(r, Eigen::EigenvaluesOnly);
  const Scalar lo = es.eigenvalues().minCoeff();
  const Scalar hi = es.eigenvalues().cwiseAbs().maxCoeff();
  return lo > Scalar(tol::kPositiveDefinite) * hi;
}

/// Checks the Hermite condition first; a non-Hermite pair is never positive definite.
template <typename Scalar>
bool isPositiveDefinite(const Bimatrix<Scalar>& p) {
  try {
    return isPositiveDefinite(HermBimatrix<Scalar>(p));
  } catch (const InputError&) {
    return false;
  } catch (const DimensionError&) {
    return false;
  }
}

/// Re(x^H (P1 x + conj(P2) conj(x))).
template <typename Scalar, typename Derived>
Scalar quadraticForm(const Bimatrix<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  const CVectorX<Scalar> v = x.template cast<Complex<Scalar>>();
  return v.dot(act(p, v)).real();
}

template <typename Scalar, typename Derived>
Scalar quadraticForm(const HermBimatrix<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  return quadraticForm(p.bimatrix(), x);
}

}  // namespace cvls
