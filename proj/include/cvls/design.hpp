#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "cvls/analysis.hpp"

namespace cvls {

inline constexpr std::uint64_t kDefaultSeed = 20160901;

/// {K1, K2} of the full state feedback u = K1 x + conj(K2) conj(x), m x n.
using GainBimatrix = BimatrixD;

// ---------------------------------------------------------------------------
// Eigenvalue assignment

/// Real gain for (A_R, B_R) placing `gamma` (2n values, conjugate-closed),
/// returned as a bimatrix. Throws InfeasibleError when the system is not
/// controllable, InputError on a bad target set and NumericalError when
/// placement keeps failing.
GainBimatrix assignEigenvalues(const CxSystem& sys, const Spectrum& gamma, std::mt19937_64& rng);
GainBimatrix assignEigenvalues(const CxSystem& sys, const Spectrum& gamma);

/// Normal feedback u = K1 x for a normal system: places the n values of
/// `gamma` for A1 + B1 K1 and returns {K1, 0}. The closed-loop spectrum is
/// gamma together with its conjugates.
GainBimatrix assignEigenvaluesNormal(const CxSystem& sys, const Spectrum& gamma, std::mt19937_64& rng);
GainBimatrix assignEigenvaluesNormal(const CxSystem& sys, const Spectrum& gamma);

/// x+ = ({A} + {B}{K}) x; B, C and D are kept for simulation.
CxSystem closedLoop(const CxSystem& sys, const GainBimatrix& k);

/// Reflects unstable values into the stable region: across the imaginary axis
/// (at least 0.1 max(1, rho) deep) or radially into the disc of radius 1/2.
Spectrum mirroredSpectrum(const Spectrum& s, TimeDomain domain);

/// Any stabilizing gain: zero when already stable, otherwise LQR with unit
/// weights, falling back to placement of the mirrored spectrum.
GainBimatrix stabilize(const CxSystem& sys, std::mt19937_64& rng);
GainBimatrix stabilize(const CxSystem& sys);

// ---------------------------------------------------------------------------
// Linear quadratic regulation

/// Positive definite Hermite weights for J = sum/int Re(x^H{Q}x + u^H{R}u).
struct WeightPair {
  HermBimatrixD q;
  HermBimatrixD r;

  /// Throws InputError unless both are positive definite.
  WeightPair(HermBimatrixD q, HermBimatrixD r);
  static WeightPair identity(Eigen::Index n, Eigen::Index m);
};

struct LqrSolution {
  HermBimatrixD p;
  GainBimatrix gain;
  double residual{};           ///< Riccati residual of the solved form
  double residual_bimatrix{};  ///< bimatrix ARE, bimatrix arithmetic
  double residual_lifted{};    ///< the same equation on the complex liftings
  int iterations{};
  /// Antilinear solvers only: relative gap to the independent general solution.
  std::optional<double> cross_check_gap;

  /// Re(x0^H {P} x0)
  double jmin(const CVector& x0) const { return quadraticForm(p, x0); }
};

/// Solves the bimatrix ARE through the real representation. Throws
/// InfeasibleError when not stabilizable and NumericalError when the
/// iteration fails or the result does not check out.
LqrSolution lqr(const CxSystem& sys, const WeightPair& w, std::mt19937_64& rng);
LqrSolution lqr(const CxSystem& sys, const WeightPair& w);

/// Relative residuals of the bimatrix ARE for a candidate P.
double riccatiResidual(const CxSystem& sys, const WeightPair& w, const BimatrixD& p);
double riccatiResidualLifted(const CxSystem& sys, const WeightPair& w, const BimatrixD& p);

struct CostResult {
  double cost{};
  bool diverging{};  ///< closed loop not asymptotically stable; cost is a partial sum
};

/// Cost of u = {K}x from x0 up to `horizon`. Discrete systems sum the stage
/// costs k = 0..horizon-1; continuous systems use the composite trapezoid rule
/// on exact closed-loop samples.
CostResult lqrCost(const CxSystem& sys, const GainBimatrix& k, const WeightPair& w, const CVector& x0,
                   double horizon);

/// Discrete antilinear system x+ = conj(A2) conj(x) + conj(B2) conj(u) with
/// Q = {Q1, 0} and R = {R1, 0}: fixed point of the anti-ARE from P = Q1.
/// Returns P = {P1, 0} and the normal gain {K1, 0}. Non-convergence raises
/// NumericalError; it does not prove that no solution exists.
LqrSolution antilinearLqrDiscrete(const CMatrix& a2, const CMatrix& b2, const CMatrix& q1, const CMatrix& r1,
                                  int max_iters = 10000);

/// Continuous antilinear system with R = {R1, 0}. Solved by the general
/// solver, then checked against the coupled equations in (P1, P2) and the
/// closed-form gains K1 = -R1^-1 B2^H P2, K2 = -conj(R1)^-1 B2^T P1.
LqrSolution antilinearLqrContinuous(const CMatrix& a2, const CMatrix& b2, const HermBimatrixD& q,
                                    const CMatrix& r1);

/// Relative residual of the two coupled continuous antilinear equations.
double antilinearCoupledResidual(const CMatrix& a2, const CMatrix& b2, const HermBimatrixD& q,
                                 const CMatrix& r1, const BimatrixD& p);

// ---------------------------------------------------------------------------
// Observers

/// {L} (n x p) with spectrum({A} + {L}{C}) = gamma, by placement on the dual
/// real pair (A_R^T, C_R^T). gamma must be conjugate-closed, have 2n values
/// and lie in the stable region.
BimatrixD designObserver(const CxSystem& sys, const Spectrum& gamma, std::mt19937_64& rng);
BimatrixD designObserver(const CxSystem& sys, const Spectrum& gamma);

/// Plant plus observer z+ = {A}z + {B}u + {L}({C}z + {D}u - y) under
/// u = {K}z + v, with state [x; z], input v and output y.
CxSystem observerBasedSystem(const CxSystem& sys, const GainBimatrix& k, const BimatrixD& l);

/// Plant and observer driven by the same input, state [x; z]; the observer
/// reads the plant output. Output is the estimation error x - z.
CxSystem observerErrorSystem(const CxSystem& sys, const BimatrixD& l);

}  // namespace cvls
