#pragma once

#include <vector>

#include "cvls/system.hpp"

namespace cvls {

// ---------------------------------------------------------------------------
// State response

/// {Phi1(t), Phi2(t)}: exp(t{A}) for continuous systems, {A}^t for discrete.
struct TransitionPair {
  CMatrix phi1;
  CMatrix phi2;
  double t{};

  BimatrixD bimatrix() const { return BimatrixD(phi1, phi2); }
};

/// Discrete systems require an integral t; negative t needs a nonsingular {A}.
TransitionPair transitionPair(const CxSystem& sys, double t);

/// Sampled trajectory. inputs[k] is held constant on [times[k], times[k+1]).
struct SimTrace {
  std::vector<double> times;
  std::vector<CVector> states;
  std::vector<CVector> inputs;
  std::vector<CVector> outputs;

  std::size_t size() const { return times.size(); }
};

/// Exact one-step map of a continuous system under a held input:
/// x(t+h) = phi x(t) + gamma u(t).
struct ZohStep {
  BimatrixD phi;
  BimatrixD gamma;
};
ZohStep zohStep(const CxSystem& sys, double h);

/// Response on `times` (starting at 0). Discrete systems use the recursion
/// directly and need consecutive integer times; continuous systems use the
/// exact zero-order-hold step between grid points. `inputs` holds one vector
/// per grid point; an empty vector means u = 0.
SimTrace stateResponse(const CxSystem& sys, const CVector& x0, const std::vector<CVector>& inputs,
                       const std::vector<double>& times);

/// 0, dt, 2 dt, ... up to horizon (inclusive within rounding). Discrete
/// systems ignore dt and return 0..floor(horizon).
std::vector<double> timeGrid(TimeDomain domain, double horizon, double dt = 1.0);

// ---------------------------------------------------------------------------
// Structural properties

/// Outcome of a PBH rank test. `margin` is the smallest normalized singular
/// value seen over the tested spectrum points (+inf when none were tested).
struct RankTest {
  bool passed{};
  double margin{};
  explicit operator bool() const { return passed; }
};

RankTest isControllable(const CxSystem& sys);
RankTest isObservable(const CxSystem& sys);
/// PBH test restricted to the closed unstable region (Re s >= 0, or |s| >= 1).
RankTest isStabilizable(const CxSystem& sys);
RankTest isDetectable(const CxSystem& sys);

/// PBH controllability of a plain matrix pair at the eigenvalues of `a`,
/// optionally restricted to the unstable region of `domain`.
RankTest pbhControllable(const CMatrix& a, const CMatrix& b, bool unstable_only, TimeDomain domain);

bool isStableSpectrum(const Spectrum& s, TimeDomain domain);
bool isAsymptoticallyStable(const CxSystem& sys);

/// Reduced antilinear tests on the n-dimensional pair built from conj(A2) A2.
bool antilinearControllableReduced(const CMatrix& a2, const CMatrix& b2);
bool antilinearObservableReduced(const CMatrix& a2, const CMatrix& c2);
/// Discrete-time stabilizability of the antilinear system from A2 conj(A2).
bool antilinearDiscreteStabilizableReduced(const CMatrix& a2, const CMatrix& b2);
/// rho(conj(A2) A2).
double antilinearSpectralRadius(const CMatrix& a2);

struct StructureReport {
  bool controllable{}, observable{}, stabilizable{}, detectable{}, stable{};
  Spectrum spectrum;
  double controllability_margin{}, observability_margin{};
  double stabilizability_margin{}, detectability_margin{};
};
StructureReport analyze(const CxSystem& sys);

// ---------------------------------------------------------------------------
// Lyapunov bimatrix equation

/// Solves {A}^H{P} + {P}{A} = -{C}^H{C} (continuous) or
/// {A}^H{P}{A} - {P} = -{C}^H{C} (discrete) for the Hermite bimatrix {P}.
/// Throws SingularError when the equation has no unique solution.
HermBimatrixD solveLyapunov(const CxSystem& sys, const BimatrixD& c);

/// Relative residual of the bimatrix Lyapunov equation, evaluated in bimatrix arithmetic.
double lyapunovResidual(const CxSystem& sys, const BimatrixD& c, const BimatrixD& p);
/// Relative residual of the same equation on the complex liftings.
double lyapunovResidualLifted(const CxSystem& sys, const BimatrixD& c, const BimatrixD& p);

/// [C2; conj(C2) A2]
CMatrix antilinearReducedOutput(const CMatrix& a2, const CMatrix& c2);

struct ReducedLyapunov {
  CMatrix p;
  bool positive_definite{};
  double residual{};
};

/// (conj(A2) A2)^H P (conj(A2) A2) - P = -C_N^H C_N for a discrete antilinear system.
ReducedLyapunov antilinearLyapunovReduced(const CMatrix& a2, const CMatrix& c_n);

}  // namespace cvls
