#include "cvls/analysis.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "cvls/linalg.hpp"

namespace cvls {

// ---------------------------------------------------------------------------
// State response

TransitionPair transitionPair(const CxSystem& sys, double t) {
  if (!std::isfinite(t)) throw InputError("transition pair: time must be finite");
  BimatrixD phi;
  if (sys.isContinuous()) {
    phi = exponent(sys.a(), t);
  } else {
    if (t != std::round(t)) throw InputError("transition pair: discrete time must be an integer");
    const auto steps = static_cast<unsigned>(std::llround(std::abs(t)));
    phi = t >= 0 ? power(sys.a(), steps) : power(inverse(sys.a()), steps);
  }
  return TransitionPair{phi.first(), phi.second(), t};
}

ZohStep zohStep(const CxSystem& sys, double h) {
  const RMatrix ar = realRepresentation(sys.a());
  const RMatrix br = realRepresentation(sys.b());
  const Eigen::Index n2 = ar.rows(), m2 = br.cols();
  // exp(h [A B; 0 0]) = [Ad Bd; 0 I]
  RMatrix aug = RMatrix::Zero(n2 + m2, n2 + m2);
  aug.topLeftCorner(n2, n2) = ar;
  aug.topRightCorner(n2, m2) = br;
  const RMatrix e = (h * aug).exp();
  return ZohStep{fromRealRepresentation(RMatrix(e.topLeftCorner(n2, n2))),
                 fromRealRepresentation(RMatrix(e.topRightCorner(n2, m2)))};
}

std::vector<double> timeGrid(TimeDomain domain, double horizon, double dt) {
  if (!(horizon >= 0)) throw InputError("time grid: horizon must be non-negative");
  std::vector<double> t;
  if (domain == TimeDomain::Discrete) {
    const auto steps = static_cast<long long>(std::floor(horizon + 1e-9));
    for (long long k = 0; k <= steps; ++k) t.push_back(static_cast<double>(k));
    return t;
  }
  if (!(dt > 0)) throw InputError("time grid: step must be positive");
  const auto steps = static_cast<long long>(std::floor(horizon / dt + 1e-9));
  for (long long k = 0; k <= steps; ++k) t.push_back(static_cast<double>(k) * dt);
  return t;
}

SimTrace stateResponse(const CxSystem& sys, const CVector& x0, const std::vector<CVector>& inputs,
                       const std::vector<double>& times) {
  const Eigen::Index n = sys.states(), m = sys.inputs();
  if (times.empty()) throw InputError("state response: empty time grid");
  if (std::abs(times.front()) > 1e-12) throw InputError("state response: time grid must start at 0");
  if (x0.size() != n) throw DimensionError("state response: initial state has wrong length");
  if (!inputs.empty() && inputs.size() != times.size()) {
    throw DimensionError("state response: need one input sample per grid point");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw InputError("state response: times must be strictly increasing");
    if (!sys.isContinuous() && times[k] - times[k - 1] != 1.0) {
      throw InputError("state response: discrete grids must be consecutive integers");
    }
  }
  const CVector zero_u = CVector::Zero(m);
  auto inputAt = [&](std::size_t k) -> const CVector& {
    if (inputs.empty()) return zero_u;
    if (inputs[k].size() != m) throw DimensionError("state response: input sample has wrong length");
    return inputs[k];
  };

  SimTrace trace;
  trace.times = times;
  trace.states.reserve(times.size());
  trace.inputs.reserve(times.size());
  trace.outputs.reserve(times.size());

  CVector x = x0;
  double cached_h = -1.0;
  ZohStep step;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const CVector& u = inputAt(k);
    trace.states.push_back(x);
    trace.inputs.push_back(u);
    trace.outputs.push_back(act(sys.c(), x) + act(sys.d(), u));
    if (k + 1 == times.size()) break;
    if (!sys.isContinuous()) {
      x = act(sys.a(), x) + act(sys.b(), u);
      continue;
    }
    const double h = times[k + 1] - times[k];
    if (std::abs(h - cached_h) > 1e-14 * h) {
      step = zohStep(sys, h);
      cached_h = h;
    }
    x = act(step.phi, x) + act(step.gamma, u);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Structural properties

namespace {

bool inUnstableRegion(cdouble s, TimeDomain domain) {
  return domain == TimeDomain::Continuous ? s.real() >= -tol::kStabilityMargin
                                          : std::abs(s) >= 1.0 - tol::kStabilityMargin;
}

double spectralNorm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

RankTest pbhControllable(const CMatrix& a, const CMatrix& b, bool unstable_only, TimeDomain domain) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) throw DimensionError("PBH test: A must be square and B conformable");
  if (n == 0) return RankTest{true, std::numeric_limits<double>::infinity()};
  CMatrix ab(n, n + b.cols());
  ab << a, b;
  const double scale = spectralNorm(ab);
  RankTest out{true, std::numeric_limits<double>::infinity()};
  const Spectrum eig = linalg::eigenvaluesOf(a);
  for (const cdouble s : eig) {
    if (unstable_only && !inUnstableRegion(s, domain)) continue;
    CMatrix pencil(n, n + b.cols());
    pencil << s * CMatrix::Identity(n, n) - a, b;
    const double sigma = linalg::minSingularValue(pencil);
    const double margin = scale > 0 ? sigma / scale : 0.0;
    out.margin = std::min(out.margin, margin);
    if (!(margin > tol::kPbhRank)) out.passed = false;
  }
  return out;
}

RankTest isControllable(const CxSystem& sys) {
  return pbhControllable(complexLifting(sys.a()), complexLifting(sys.b()), false, sys.domain());
}

RankTest isObservable(const CxSystem& sys) {
  return pbhControllable(complexLifting(sys.a()).adjoint(), complexLifting(sys.c()).adjoint(), false,
                         sys.domain());
}

RankTest isStabilizable(const CxSystem& sys) {
  return pbhControllable(complexLifting(sys.a()), complexLifting(sys.b()), true, sys.domain());
}

RankTest isDetectable(const CxSystem& sys) {
  // Region membership is invariant under conjugation, so the dual pair works.
  return pbhControllable(complexLifting(sys.a()).adjoint(), complexLifting(sys.c()).adjoint(), true,
                         sys.domain());
}

bool isStableSpectrum(const Spectrum& s, TimeDomain domain) {
  if (s.empty()) return true;
  return domain == TimeDomain::Continuous ? s.abscissa() < -tol::kStabilityMargin
                                          : s.radius() < 1.0 - tol::kStabilityMargin;
}

bool isAsymptoticallyStable(const CxSystem& sys) { return isStableSpectrum(spectrum(sys), sys.domain()); }

bool antilinearControllableReduced(const CMatrix& a2, const CMatrix& b2) {
  const CMatrix m = a2.conjugate() * a2;
  CMatrix inputs(a2.rows(), 2 * b2.cols());
  inputs << b2.conjugate(), a2.conjugate() * b2;
  return pbhControllable(m, inputs, false, TimeDomain::Continuous).passed;
}

bool antilinearObservableReduced(const CMatrix& a2, const CMatrix& c2) {
  const CMatrix m = a2.conjugate() * a2;
  const CMatrix cn = antilinearReducedOutput(a2, c2);
  return pbhControllable(m.adjoint(), cn.adjoint(), false, TimeDomain::Continuous).passed;
}

bool antilinearDiscreteStabilizableReduced(const CMatrix& a2, const CMatrix& b2) {
  const CMatrix m = a2 * a2.conjugate();
  CMatrix inputs(a2.rows(), 2 * b2.cols());
  inputs << b2, a2 * b2.conjugate();
  return pbhControllable(m, inputs, true, TimeDomain::Discrete).passed;
}

double antilinearSpectralRadius(const CMatrix& a2) {
  return linalg::eigenvaluesOf(CMatrix(a2.conjugate() * a2)).radius();
}

StructureReport analyze(const CxSystem& sys) {
  StructureReport r;
  const RankTest c = isControllable(sys), o = isObservable(sys);
  const RankTest s = isStabilizable(sys), d = isDetectable(sys);
  r.controllable = c.passed;
  r.observable = o.passed;
  r.stabilizable = s.passed;
  r.detectable = d.passed;
  r.controllability_margin = c.margin;
  r.observability_margin = o.margin;
  r.stabilizability_margin = s.margin;
  r.detectability_margin = d.margin;
  r.spectrum = spectrum(sys);
  r.stable = isStableSpectrum(r.spectrum, sys.domain());
  return r;
}

// ---------------------------------------------------------------------------
// Lyapunov bimatrix equation

HermBimatrixD solveLyapunov(const CxSystem& sys, const BimatrixD& c) {
  if (c.cols() != sys.states()) throw DimensionError("Lyapunov: C bimatrix must have n columns");
  const RMatrix ar = realRepresentation(sys.a());
  const RMatrix cr = realRepresentation(c);
  const RMatrix q = cr.transpose() * cr;
  const RMatrix pr = sys.isContinuous() ? linalg::solveContinuousLyapunov(ar, q)
                                        : linalg::solveDiscreteLyapunov(ar, q);
  return HermBimatrixD::fromRealSymmetric(pr);
}

double lyapunovResidual(const CxSystem& sys, const BimatrixD& c, const BimatrixD& p) {
  const BimatrixD& a = sys.a();
  const BimatrixD cc = adjoint(c) * c;
  BimatrixD t1 = adjoint(a) * p;
  BimatrixD t2 = p * a;
  if (!sys.isContinuous()) {
    t1 = t1 * a;
    t2 = p;
    const BimatrixD res = t1 - t2 + cc;
    const double scale = t1.normBound() + t2.normBound() + cc.normBound();
    return scale > 0 ? res.normBound() / scale : res.normBound();
  }
  const BimatrixD res = t1 + t2 + cc;
  const double scale = t1.normBound() + t2.normBound() + cc.normBound();
  return scale > 0 ? res.normBound() / scale : res.normBound();
}

double lyapunovResidualLifted(const CxSystem& sys, const BimatrixD& c, const BimatrixD& p) {
  const CMatrix a = complexLifting(sys.a());
  const CMatrix cl = complexLifting(c);
  const CMatrix pc = complexLifting(p);
  const CMatrix cc = cl.adjoint() * cl;
  CMatrix t1, t2;
  if (sys.isContinuous()) {
    t1 = a.adjoint() * pc;
    t2 = pc * a;
  } else {
    t1 = a.adjoint() * pc * a;
    t2 = -pc;
  }
  const double scale = t1.norm() + t2.norm() + cc.norm();
  const double res = (t1 + t2 + cc).norm();
  return scale > 0 ? res / scale : res;
}

CMatrix antilinearReducedOutput(const CMatrix& a2, const CMatrix& c2) {
  CMatrix cn(2 * c2.rows(), c2.cols());
  cn << c2, c2.conjugate() * a2;
  return cn;
}

ReducedLyapunov antilinearLyapunovReduced(const CMatrix& a2, const CMatrix& c_n) {
  if (a2.rows() != a2.cols() || c_n.cols() != a2.rows()) {
    throw DimensionError("reduced Lyapunov: A2 must be square and C_N conformable");
  }
  const CMatrix m = a2.conjugate() * a2;
  const CMatrix q = c_n.adjoint() * c_n;
  ReducedLyapunov out;
  try {
    out.p = linalg::solveDiscreteLyapunov(m, q);
  } catch (const SingularError&) {
    out.positive_definite = false;
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  out.p = 0.5 * (out.p + out.p.adjoint()).eval();
  const CMatrix t1 = m.adjoint() * out.p * m;
  const double scale = t1.norm() + out.p.norm() + q.norm();
  out.residual = (t1 - out.p + q).norm() / (scale > 0 ? scale : 1.0);
  if (out.p.rows() == 0) {
    out.positive_definite = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(out.p, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  out.positive_definite = es.eigenvalues().minCoeff() > tol::kPositiveDefinite * hi;
  return out;
}

}  // namespace cvls
