#pragma once

#include <string>

#include "cvls/bimatrix.hpp"

namespace cvls {

enum class TimeDomain { Continuous, Discrete };

std::string toString(TimeDomain d);
TimeDomain timeDomainFromString(const std::string& s);

/// x+ = {A1,A2} x + {B1,B2} u,  y = {C1,C2} x + {D1,D2} u.
///
/// x+ is the derivative for continuous-time systems and the one-step shift
/// for discrete-time systems.
class CxSystem {
 public:
  CxSystem(BimatrixD a, BimatrixD b, BimatrixD c, BimatrixD d, TimeDomain domain);
  /// D defaults to the zero bimatrix.
  CxSystem(BimatrixD a, BimatrixD b, BimatrixD c, TimeDomain domain);

  const BimatrixD& a() const { return a_; }
  const BimatrixD& b() const { return b_; }
  const BimatrixD& c() const { return c_; }
  const BimatrixD& d() const { return d_; }
  TimeDomain domain() const { return domain_; }
  bool isContinuous() const { return domain_ == TimeDomain::Continuous; }

  Eigen::Index states() const { return a_.rows(); }
  Eigen::Index inputs() const { return b_.cols(); }
  Eigen::Index outputs() const { return c_.rows(); }

  /// All second components vanish.
  bool isNormal() const;
  /// All first components vanish.
  bool isAntilinear() const;

 private:
  BimatrixD a_, b_, c_, d_;
  TimeDomain domain_;
};

/// The 2n-dimensional real-representation system acting on [Re x; Im x].
struct RealSystem {
  RMatrix a, b, c, d;
  TimeDomain domain{TimeDomain::Continuous};
};

/// The 2n-dimensional complex-lifting system acting on (x, conj x)/sqrt 2.
struct LiftedSystem {
  CMatrix a, b, c, d;
  TimeDomain domain{TimeDomain::Continuous};
};

/// Rewrites a real system with even dimensions on x = xi1 + j xi2 (and
/// likewise u, y). Throws DimensionError on odd or inconsistent shapes.
CxSystem fromRealSystem(const RealSystem& real);

/// Largest relative residual |M - rep(split(M))| / |M| over the four
/// coefficient matrices. Zero up to rounding for every even-dimensioned input.
double conversionResidual(const RealSystem& real);

RealSystem toRealRepresentation(const CxSystem& sys);
LiftedSystem toComplexLifting(const CxSystem& sys);

/// x+ = A1 x + B1 u, y = C1 x + D1 u. An empty d means zero.
CxSystem makeNormal(const CMatrix& a1, const CMatrix& b1, const CMatrix& c1, const CMatrix& d1,
                    TimeDomain domain);
CxSystem makeNormal(const CMatrix& a1, const CMatrix& b1, const CMatrix& c1, TimeDomain domain);

/// x+ = conj(A2) conj(x) + conj(B2) conj(u), y = conj(C2) conj(x) + conj(D2) conj(u).
CxSystem makeAntilinear(const CMatrix& a2, const CMatrix& b2, const CMatrix& c2, const CMatrix& d2,
                        TimeDomain domain);
CxSystem makeAntilinear(const CMatrix& a2, const CMatrix& b2, const CMatrix& c2, TimeDomain domain);

/// {G1(s), G2(s)} = {C}{sI - A1, -A2}^{-1}{B} + {D} at a real frequency s.
/// Throws SingularError when s is an eigenvalue of the system.
BimatrixD transferFunction(const CxSystem& sys, double s);

/// Eigenvalue set of the system (the spectrum of {A1, A2}).
Spectrum spectrum(const CxSystem& sys);

}  // namespace cvls
