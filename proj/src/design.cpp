#include "cvls/design.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "cvls/linalg.hpp"

namespace cvls {

namespace {

constexpr double kAssignTol = 1e-6;
constexpr double kRiccatiAccept = 1e-8;

BimatrixD blocks(const BimatrixD& a11, const BimatrixD& a12, const BimatrixD& a21, const BimatrixD& a22) {
  auto stack = [](const CMatrix& m11, const CMatrix& m12, const CMatrix& m21, const CMatrix& m22) {
    CMatrix out(m11.rows() + m21.rows(), m11.cols() + m12.cols());
    out << m11, m12, m21, m22;
    return out;
  };
  return BimatrixD(stack(a11.first(), a12.first(), a21.first(), a22.first()),
                   stack(a11.second(), a12.second(), a21.second(), a22.second()));
}

BimatrixD vstack(const BimatrixD& top, const BimatrixD& bottom) {
  CMatrix f(top.rows() + bottom.rows(), top.cols()), s(top.rows() + bottom.rows(), top.cols());
  f << top.first(), bottom.first();
  s << top.second(), bottom.second();
  return BimatrixD(f, s);
}

BimatrixD hstack(const BimatrixD& left, const BimatrixD& right) {
  CMatrix f(left.rows(), left.cols() + right.cols()), s(left.rows(), left.cols() + right.cols());
  f << left.first(), right.first();
  s << left.second(), right.second();
  return BimatrixD(f, s);
}

double relative(double res, double scale) { return scale > 0 ? res / scale : res; }

std::mt19937_64 defaultRng() { return std::mt19937_64(kDefaultSeed); }

/// Stabilizing seed for Newton-Kleinman from the stable invariant subspace
/// of the Hamiltonian matrix.
RMatrix hamiltonianSeed(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r) {
  const Eigen::Index n = a.rows();
  RMatrix h(2 * n, 2 * n);
  h << a, -b * r.ldlt().solve(b.transpose()), -q, -a.transpose();
  Eigen::EigenSolver<RMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian eigensolver did not converge");
  CMatrix u(2 * n, n);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < 2 * n && col < n; ++i) {
    if (es.eigenvalues()(i).real() < 0) u.col(col++) = es.eigenvectors().col(i);
  }
  if (col != n) throw NumericalError("Hamiltonian has eigenvalues on the imaginary axis");
  const CMatrix u1 = u.topRows(n), u2 = u.bottomRows(n);
  const RMatrix p = (u2 * u1.inverse()).real();
  return -r.ldlt().solve(b.transpose() * (0.5 * (p + p.transpose())));
}

RMatrix careSeed(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r, std::mt19937_64& rng) {
  const Spectrum s = linalg::eigenvaluesOf(a);
  if (isStableSpectrum(s, TimeDomain::Continuous)) return RMatrix::Zero(b.cols(), a.rows());
  auto stabilizing = [&](const RMatrix& k) {
    return k.allFinite() && isStableSpectrum(linalg::eigenvaluesOf(RMatrix(a + b * k)), TimeDomain::Continuous);
  };
  try {
    RMatrix k = linalg::placeReal(a, b, mirroredSpectrum(s, TimeDomain::Continuous), rng);
    if (stabilizing(k)) return k;
  } catch (const Error&) {
  }
  RMatrix k = hamiltonianSeed(a, b, q, r);
  if (!stabilizing(k)) throw NumericalError("could not find a stabilizing initial gain");
  return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// Eigenvalue assignment

GainBimatrix assignEigenvalues(const CxSystem& sys, const Spectrum& gamma, std::mt19937_64& rng) {
  const Eigen::Index n = sys.states();
  if (static_cast<Eigen::Index>(gamma.size()) != 2 * n) {
    throw InputError("eigenvalue assignment: expected " + std::to_string(2 * n) + " target values, got " +
                     std::to_string(gamma.size()));
  }
  if (!gamma.isConjugateClosed()) throw InputError("eigenvalue assignment: target set is not conjugate-closed");
  if (!isControllable(sys)) throw InfeasibleError("eigenvalue assignment: system is not controllable");
  const RMatrix kr = linalg::placeReal(realRepresentation(sys.a()), realRepresentation(sys.b()), gamma, rng);
  GainBimatrix k = fromRealRepresentation(kr);
  const double miss = matchingDistance(spectrum(closedLoop(sys, k)), gamma);
  if (!(miss <= kAssignTol)) {
    throw NumericalError("eigenvalue assignment: achieved spectrum misses the target by " + std::to_string(miss));
  }
  return k;
}

GainBimatrix assignEigenvalues(const CxSystem& sys, const Spectrum& gamma) {
  auto rng = defaultRng();
  return assignEigenvalues(sys, gamma, rng);
}

GainBimatrix assignEigenvaluesNormal(const CxSystem& sys, const Spectrum& gamma, std::mt19937_64& rng) {
  if (!sys.isNormal()) throw InputError("normal eigenvalue assignment needs a normal system");
  const Eigen::Index n = sys.states();
  if (static_cast<Eigen::Index>(gamma.size()) != n) {
    throw InputError("normal eigenvalue assignment: expected " + std::to_string(n) + " target values");
  }
  const CMatrix& a1 = sys.a().first();
  const CMatrix& b1 = sys.b().first();
  if (!pbhControllable(a1, b1, false, sys.domain())) {
    throw InfeasibleError("normal eigenvalue assignment: (A1, B1) is not controllable");
  }
  const CMatrix k1 = linalg::placeComplex(a1, b1, gamma, rng);
  const double miss = matchingDistance(linalg::eigenvaluesOf(CMatrix(a1 + b1 * k1)), gamma);
  if (!(miss <= kAssignTol)) {
    throw NumericalError("normal eigenvalue assignment: achieved spectrum misses the target by " +
                         std::to_string(miss));
  }
  return GainBimatrix::normal(k1);
}

GainBimatrix assignEigenvaluesNormal(const CxSystem& sys, const Spectrum& gamma) {
  auto rng = defaultRng();
  return assignEigenvaluesNormal(sys, gamma, rng);
}

CxSystem closedLoop(const CxSystem& sys, const GainBimatrix& k) {
  if (k.rows() != sys.inputs() || k.cols() != sys.states()) {
    throw DimensionError("closed loop: gain must be " + std::to_string(sys.inputs()) + "x" +
                         std::to_string(sys.states()));
  }
  return CxSystem(sys.a() + sys.b() * k, sys.b(), sys.c(), sys.d(), sys.domain());
}

Spectrum mirroredSpectrum(const Spectrum& s, TimeDomain domain) {
  std::vector<cdouble> out;
  out.reserve(s.size());
  const double depth = 0.1 * std::max(1.0, s.radius());
  for (const cdouble v : s) {
    if (domain == TimeDomain::Continuous) {
      if (v.real() < -tol::kStabilityMargin) {
        out.push_back(v);
      } else {
        out.emplace_back(-std::max(std::abs(v.real()), depth), v.imag());
      }
    } else {
      const double r = std::abs(v);
      out.push_back(r < 1.0 - tol::kStabilityMargin ? v : v / r * std::min(1.0 / r, 0.5));
    }
  }
  return Spectrum(std::move(out));
}

GainBimatrix stabilize(const CxSystem& sys, std::mt19937_64& rng) {
  const GainBimatrix zero = GainBimatrix::zero(sys.inputs(), sys.states());
  if (isAsymptoticallyStable(sys)) return zero;
  if (!isStabilizable(sys)) throw InfeasibleError("stabilize: system is not stabilizable");
  try {
    return lqr(sys, WeightPair::identity(sys.states(), sys.inputs()), rng).gain;
  } catch (const NumericalError&) {
  } catch (const SingularError&) {
  }
  const GainBimatrix k = fromRealRepresentation(linalg::placeReal(
      realRepresentation(sys.a()), realRepresentation(sys.b()), mirroredSpectrum(spectrum(sys), sys.domain()), rng));
  if (!isAsymptoticallyStable(closedLoop(sys, k))) throw NumericalError("stabilize: no stabilizing gain found");
  return k;
}

GainBimatrix stabilize(const CxSystem& sys) {
  auto rng = defaultRng();
  return stabilize(sys, rng);
}

// ---------------------------------------------------------------------------
// Linear quadratic regulation

WeightPair::WeightPair(HermBimatrixD q_in, HermBimatrixD r_in) : q(std::move(q_in)), r(std::move(r_in)) {
  if (!isPositiveDefinite(q)) throw InputError("state weight Q is not positive definite");
  if (!isPositiveDefinite(r)) throw InputError("input weight R is not positive definite");
}

WeightPair WeightPair::identity(Eigen::Index n, Eigen::Index m) {
  return WeightPair(HermBimatrixD::identity(n), HermBimatrixD::identity(m));
}

double riccatiResidual(const CxSystem& sys, const WeightPair& w, const BimatrixD& p) {
  const BimatrixD& a = sys.a();
  const BimatrixD& b = sys.b();
  const BimatrixD& q = w.q;
  const BimatrixD& r = w.r;
  if (sys.isContinuous()) {
    const BimatrixD t1 = adjoint(a) * p;
    const BimatrixD t2 = p * a;
    const BimatrixD t3 = p * b * inverse(r) * adjoint(b) * p;
    return relative((t1 + t2 - t3 + q).normBound(), t1.normBound() + t2.normBound() + t3.normBound() + q.normBound());
  }
  const BimatrixD t1 = adjoint(a) * p * a;
  const BimatrixD s = r + adjoint(b) * p * b;
  const BimatrixD bpa = adjoint(b) * p * a;
  const BimatrixD t3 = adjoint(bpa) * inverse(s) * bpa;
  return relative((t1 - p - t3 + q).normBound(),
                  t1.normBound() + p.normBound() + t3.normBound() + q.normBound());
}

double riccatiResidualLifted(const CxSystem& sys, const WeightPair& w, const BimatrixD& p) {
  const CMatrix a = complexLifting(sys.a());
  const CMatrix b = complexLifting(sys.b());
  const CMatrix q = complexLifting(w.q.bimatrix());
  const CMatrix r = complexLifting(w.r.bimatrix());
  const CMatrix pc = complexLifting(p);
  if (sys.isContinuous()) {
    const CMatrix t1 = a.adjoint() * pc;
    const CMatrix t2 = pc * a;
    const CMatrix t3 = pc * b * r.partialPivLu().solve(b.adjoint() * pc);
    return relative((t1 + t2 - t3 + q).norm(), t1.norm() + t2.norm() + t3.norm() + q.norm());
  }
  const CMatrix t1 = a.adjoint() * pc * a;
  const CMatrix s = r + b.adjoint() * pc * b;
  const CMatrix bpa = b.adjoint() * pc * a;
  const CMatrix t3 = bpa.adjoint() * s.partialPivLu().solve(bpa);
  return relative((t1 - pc - t3 + q).norm(), t1.norm() + pc.norm() + t3.norm() + q.norm());
}

LqrSolution lqr(const CxSystem& sys, const WeightPair& w, std::mt19937_64& rng) {
  if (w.q.order() != sys.states() || w.r.order() != sys.inputs()) {
    throw DimensionError("LQR: weights must be " + std::to_string(sys.states()) + "x" +
                         std::to_string(sys.states()) + " and " + std::to_string(sys.inputs()) + "x" +
                         std::to_string(sys.inputs()));
  }
  if (!isStabilizable(sys)) throw InfeasibleError("LQR: system is not stabilizable");
  const RMatrix a = realRepresentation(sys.a());
  const RMatrix b = realRepresentation(sys.b());
  const RMatrix q = realRepresentation(w.q.bimatrix());
  const RMatrix r = realRepresentation(w.r.bimatrix());

  linalg::RiccatiResult res = sys.isContinuous() ? linalg::solveCare(a, b, q, r, careSeed(a, b, q, r, rng))
                                                 : linalg::solveDare(a, b, q, r);
  if (!res.p.allFinite() || !(res.residual <= kRiccatiAccept)) {
    throw NumericalError("LQR: Riccati iteration did not converge (residual " + std::to_string(res.residual) + ")");
  }
  LqrSolution out;
  out.p = HermBimatrixD::fromRealSymmetric(res.p);
  out.gain = fromRealRepresentation(res.k);
  out.residual = res.residual;
  out.iterations = res.iterations;
  out.residual_bimatrix = riccatiResidual(sys, w, out.p);
  out.residual_lifted = riccatiResidualLifted(sys, w, out.p);
  if (!isPositiveDefinite(out.p)) throw NumericalError("LQR: Riccati solution is not positive definite");
  if (!isAsymptoticallyStable(closedLoop(sys, out.gain))) {
    throw NumericalError("LQR: optimal closed loop is not asymptotically stable");
  }
  return out;
}

LqrSolution lqr(const CxSystem& sys, const WeightPair& w) {
  auto rng = defaultRng();
  return lqr(sys, w, rng);
}

CostResult lqrCost(const CxSystem& sys, const GainBimatrix& k, const WeightPair& w, const CVector& x0,
                   double horizon) {
  if (x0.size() != sys.states()) throw DimensionError("LQR cost: initial state has wrong length");
  if (!(horizon >= 0)) throw InputError("LQR cost: horizon must be non-negative");
  const CxSystem cl = closedLoop(sys, k);
  CostResult out;
  out.diverging = !isAsymptoticallyStable(cl);
  auto stage = [&](const CVector& x) { return quadraticForm(w.q, x) + quadraticForm(w.r, act(k, x)); };

  if (!sys.isContinuous()) {
    const auto steps = static_cast<long long>(std::floor(horizon + 1e-9));
    CVector x = x0;
    for (long long i = 0; i < steps; ++i) {
      out.cost += stage(x);
      x = act(cl.a(), x);
    }
    return out;
  }
  if (horizon == 0) return out;
  constexpr double kSamplesPerFastTime = 50.0;
  constexpr double kMaxSteps = 2e6;
  const double rate = std::max(spectrum(cl).radius(), 1.0 / horizon);
  const double steps = std::min(std::ceil(horizon * rate * kSamplesPerFastTime), kMaxSteps);
  const auto count = static_cast<long long>(steps);
  const double h = horizon / steps;
  const BimatrixD phi = exponent(cl.a(), h);
  CVector x = x0;
  double prev = stage(x);
  for (long long i = 0; i < count; ++i) {
    x = act(phi, x);
    const double next = stage(x);
    out.cost += 0.5 * h * (prev + next);
    prev = next;
  }
  return out;
}

LqrSolution antilinearLqrDiscrete(const CMatrix& a2, const CMatrix& b2, const CMatrix& q1, const CMatrix& r1,
                                  int max_iters) {
  constexpr double kStep = 1e-12;
  const Eigen::Index n = a2.rows(), m = b2.cols();
  if (a2.cols() != n || b2.rows() != n || q1.rows() != n || q1.cols() != n || r1.rows() != m || r1.cols() != m) {
    throw DimensionError("antilinear LQR: inconsistent A2, B2, Q1, R1 shapes");
  }
  const WeightPair w(HermBimatrixD(q1, CMatrix::Zero(n, n)), HermBimatrixD(r1, CMatrix::Zero(m, m)));
  if (!antilinearDiscreteStabilizableReduced(a2, b2)) {
    throw InfeasibleError("antilinear LQR: system is not stabilizable");
  }
  const CMatrix& q = w.q.p1();
  const CMatrix& r = w.r.p1();
  auto gainOf = [&](const CMatrix& p) -> CMatrix {
    const CMatrix pc = p.conjugate();
    return -(r + b2.adjoint() * pc * b2).partialPivLu().solve(b2.adjoint() * pc * a2);
  };
  CMatrix p = q;
  int it = 0;
  bool converged = false;
  for (it = 1; it <= max_iters; ++it) {
    const CMatrix pc = p.conjugate();
    const CMatrix bpa = b2.adjoint() * pc * a2;
    CMatrix next = q + a2.adjoint() * pc * a2 -
                   bpa.adjoint() * (r + b2.adjoint() * pc * b2).partialPivLu().solve(bpa);
    next = 0.5 * (next + next.adjoint()).eval();
    if (!next.allFinite()) break;
    const double step = (next - p).norm();
    const double scale = p.norm();
    p = std::move(next);
    if (step <= kStep * scale) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("anti-ARE fixed point did not converge in " + std::to_string(max_iters) +
                         " iterations (no solution found; existence is not ruled out)");
  }
  const CMatrix k1 = gainOf(p);
  LqrSolution out;
  out.p = HermBimatrixD(p, CMatrix::Zero(n, n));
  out.gain = GainBimatrix::normal(k1);
  out.iterations = it;
  {
    const CMatrix pc = p.conjugate();
    const CMatrix bpa = b2.adjoint() * pc * a2;
    const CMatrix t1 = a2.adjoint() * pc * a2;
    const CMatrix t3 = bpa.adjoint() * (r + b2.adjoint() * pc * b2).partialPivLu().solve(bpa);
    out.residual = relative((t1 - t3 - p + q).norm(), t1.norm() + t3.norm() + p.norm() + q.norm());
  }
  const CxSystem sys = makeAntilinear(a2, b2, CMatrix::Zero(0, n), TimeDomain::Discrete);
  out.residual_bimatrix = riccatiResidual(sys, w, out.p);
  out.residual_lifted = riccatiResidualLifted(sys, w, out.p);
  if (!isPositiveDefinite(out.p)) throw NumericalError("anti-ARE solution is not positive definite");
  if (!isAsymptoticallyStable(closedLoop(sys, out.gain))) {
    throw NumericalError("anti-ARE gain does not stabilize the closed loop");
  }
  try {
    const LqrSolution general = lqr(sys, w);
    out.cross_check_gap = (general.p.p1() - p).norm() / std::max(p.norm(), 1e-300);
  } catch (const Error&) {
    out.cross_check_gap.reset();
  }
  return out;
}

double antilinearCoupledResidual(const CMatrix& a2, const CMatrix& b2, const HermBimatrixD& q,
                                 const CMatrix& r1, const BimatrixD& p) {
  const CMatrix& p1 = p.first();
  const CMatrix& p2 = p.second();
  const CMatrix ri = r1.inverse();
  const CMatrix ric = ri.conjugate();
  const CMatrix b2c = b2.conjugate();
  const CMatrix e1[] = {a2.adjoint() * p2, p2.conjugate() * a2, -p2.conjugate() * b2 * ri * b2.adjoint() * p2,
                        -p1 * b2c * ric * b2.transpose() * p1, q.p1()};
  const CMatrix e2[] = {a2.transpose() * p1, p1.conjugate() * a2, -p1.conjugate() * b2 * ri * b2.adjoint() * p2,
                        -p2 * b2c * ric * b2.transpose() * p1, q.p2()};
  // One scale for both equations: the second one vanishes identically in
  // some cases and would otherwise be measured against its own rounding.
  double scale = 0.0, worst = 0.0;
  for (const auto* terms : {e1, e2}) {
    CMatrix sum = CMatrix::Zero(p1.rows(), p1.cols());
    for (int i = 0; i < 5; ++i) {
      sum += terms[i];
      scale += terms[i].norm();
    }
    worst = std::max(worst, sum.norm());
  }
  return relative(worst, scale);
}

LqrSolution antilinearLqrContinuous(const CMatrix& a2, const CMatrix& b2, const HermBimatrixD& q,
                                    const CMatrix& r1) {
  constexpr double kAgree = 1e-8;
  const Eigen::Index n = a2.rows(), m = b2.cols();
  if (a2.cols() != n || b2.rows() != n || q.order() != n || r1.rows() != m || r1.cols() != m) {
    throw DimensionError("antilinear LQR: inconsistent A2, B2, Q, R1 shapes");
  }
  const CxSystem sys = makeAntilinear(a2, b2, CMatrix::Zero(0, n), TimeDomain::Continuous);
  if (!isControllable(sys)) throw InfeasibleError("antilinear LQR: system is not controllable");
  const WeightPair w(q, HermBimatrixD(r1, CMatrix::Zero(m, m)));
  LqrSolution out = lqr(sys, w);
  const CMatrix& p1 = out.p.p1();
  const CMatrix& p2 = out.p.p2();
  const CMatrix r = w.r.p1();
  const CMatrix k1 = -r.partialPivLu().solve(b2.adjoint() * p2);
  const CMatrix k2 = -r.conjugate().partialPivLu().solve(b2.transpose() * p1);
  out.residual = antilinearCoupledResidual(a2, b2, q, r, out.p);
  const double gain_scale = std::max(out.gain.normBound(), 1e-300);
  out.cross_check_gap = ((k1 - out.gain.first()).norm() + (k2 - out.gain.second()).norm()) / gain_scale;
  if (!(out.residual <= kAgree)) {
    throw NumericalError("antilinear LQR: coupled equations residual " + std::to_string(out.residual));
  }
  if (!(*out.cross_check_gap <= kAgree)) {
    throw NumericalError("antilinear LQR: closed-form gains disagree with the general solution");
  }
  out.gain = GainBimatrix(k1, k2);
  return out;
}

// ---------------------------------------------------------------------------
// Observers

BimatrixD designObserver(const CxSystem& sys, const Spectrum& gamma, std::mt19937_64& rng) {
  const Eigen::Index n = sys.states();
  if (static_cast<Eigen::Index>(gamma.size()) != 2 * n) {
    throw InputError("observer: expected " + std::to_string(2 * n) + " target values, got " +
                     std::to_string(gamma.size()));
  }
  if (!gamma.isConjugateClosed()) throw InputError("observer: target set is not conjugate-closed");
  if (!isStableSpectrum(gamma, sys.domain())) throw InputError("observer: target set is not in the stable region");
  if (!isObservable(sys)) throw InfeasibleError("observer: system is not observable");
  const RMatrix ar = realRepresentation(sys.a());
  const RMatrix cr = realRepresentation(sys.c());
  const RMatrix kd = linalg::placeReal(RMatrix(ar.transpose()), RMatrix(cr.transpose()), gamma, rng);
  const BimatrixD l = fromRealRepresentation(RMatrix(kd.transpose()));
  const Spectrum achieved = eigenvalues(sys.a() + l * sys.c());
  const double miss = matchingDistance(achieved, gamma);
  if (!(miss <= kAssignTol)) {
    throw NumericalError("observer: achieved spectrum misses the target by " + std::to_string(miss));
  }
  return l;
}

BimatrixD designObserver(const CxSystem& sys, const Spectrum& gamma) {
  auto rng = defaultRng();
  return designObserver(sys, gamma, rng);
}

CxSystem observerBasedSystem(const CxSystem& sys, const GainBimatrix& k, const BimatrixD& l) {
  const Eigen::Index n = sys.states();
  if (k.rows() != sys.inputs() || k.cols() != n) throw DimensionError("observer-based loop: gain K has wrong shape");
  if (l.rows() != n || l.cols() != sys.outputs()) {
    throw DimensionError("observer-based loop: gain L has wrong shape");
  }
  const BimatrixD bk = sys.b() * k;
  const BimatrixD lc = l * sys.c();
  const BimatrixD a = blocks(sys.a(), bk, -lc, sys.a() + bk + lc);
  const BimatrixD b = vstack(sys.b(), sys.b());
  const BimatrixD c = hstack(sys.c(), sys.d() * k);
  return CxSystem(a, b, c, sys.d(), sys.domain());
}

CxSystem observerErrorSystem(const CxSystem& sys, const BimatrixD& l) {
  const Eigen::Index n = sys.states();
  if (l.rows() != n || l.cols() != sys.outputs()) throw DimensionError("observer: gain L has wrong shape");
  const BimatrixD lc = l * sys.c();
  const BimatrixD a = blocks(sys.a(), BimatrixD::zero(n, n), -lc, sys.a() + lc);
  const BimatrixD b = vstack(sys.b(), sys.b());
  const BimatrixD c = hstack(BimatrixD::identity(n), -BimatrixD::identity(n));
  return CxSystem(a, b, c, BimatrixD::zero(n, sys.inputs()), sys.domain());
}

}  // namespace cvls
