#include <gtest/gtest.h>

#include "cvls/design.hpp"
#include "cvls/linalg.hpp"
#include "oracles.hpp"

using namespace cvls;
using oracle::randomComplex;

namespace {

const cdouble j(0, 1);

CMatrix scalar(cdouble v) { return CMatrix::Constant(1, 1, v); }

BimatrixD randomBm(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  return BimatrixD(randomComplex(r, c, rng), randomComplex(r, c, rng));
}

CxSystem randomSystem(Eigen::Index n, Eigen::Index m, Eigen::Index p, TimeDomain d, std::mt19937_64& rng) {
  return CxSystem(randomBm(n, n, rng), randomBm(n, m, rng), randomBm(p, n, rng), d);
}

/// 2n conjugate-closed values; stable ones in the domain when `stable`.
Spectrum randomTargets(Eigen::Index n, TimeDomain d, bool stable, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0), s(-1.0, 1.0);
  std::vector<cdouble> v;
  while (static_cast<Eigen::Index>(v.size()) < 2 * n) {
    const bool pair = static_cast<Eigen::Index>(v.size()) + 2 <= 2 * n && s(rng) > 0;
    cdouble z;
    if (d == TimeDomain::Continuous) {
      z = cdouble(stable ? -2.0 * u(rng) : 2.0 * s(rng), pair ? 2.0 * s(rng) : 0.0);
    } else {
      z = std::polar(stable ? 0.9 * u(rng) : 1.5 * u(rng), pair ? 3.0 * s(rng) : (s(rng) > 0 ? 0.0 : M_PI));
      if (!pair) z = cdouble(z.real(), 0.0);
    }
    v.push_back(z);
    if (pair) v.push_back(std::conj(z));
  }
  return Spectrum(v);
}

double relativeGap(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

double slowestTimeConstant(const CxSystem& closed) {
  const Spectrum s = spectrum(closed);
  return closed.isContinuous() ? 1.0 / -s.abscissa() : 1.0 / -std::log(s.radius());
}

}  // namespace

TEST(Assignment, IntroExampleNormalFeedback) {
  const double a0 = 1.3, a1 = -0.7, g0 = 2.0, g1 = 3.0;
  CMatrix A1(2, 2), B1(2, 1);
  A1 << 0, 1, -a0, -a1;
  B1 << 0, 1;
  const CxSystem sys = makeNormal(A1, B1, CMatrix::Identity(2, 2), TimeDomain::Continuous);
  const GainBimatrix k = assignEigenvaluesNormal(sys, Spectrum({-1.0, -2.0}));
  EXPECT_NEAR(std::abs(k.first()(0, 0) - (a0 - g0)), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(k.first()(0, 1) - (a1 - g1)), 0.0, 1e-10);
  EXPECT_TRUE(k.second().isZero(0));
}

TEST(Assignment, IntroExampleFullStateFeedback) {
  const double a0 = 1.3, a1 = -0.7, g0 = 2.0, g1 = 3.0;
  CMatrix A1(2, 2), B1(2, 1);
  A1 << 0, 1, -a0, -a1;
  B1 << 0, 1;
  const CxSystem sys = makeNormal(A1, B1, CMatrix::Identity(2, 2), TimeDomain::Continuous);
  const std::vector<double> target{1, 2 * g1, g1 * g1 + 2 * g0, 2 * g0 * g1, g0 * g0};
  auto poly = [](const CxSystem& s) { return oracle::charPoly(realRepresentation(s.a())); };

  const std::vector<double> achieved = poly(closedLoop(sys, assignEigenvalues(sys, Spectrum({-1.0, -1.0, -2.0, -2.0}))));
  for (std::size_t i = 0; i < target.size(); ++i) EXPECT_NEAR(achieved[i], target[i], 1e-8);

  // The two explicit pairs; the closed loop has the structure
  // {[[0,1],[k11-a0, k12-a1]], [[0,0],[k21, k22]]}.
  const double f1 = a0 - g0 - 0.5 * g1 * g1, f2 = g0 + 0.5 * g1 * g1;
  CMatrix k1a(1, 2), k2a(1, 2), k1b(1, 2), k2b(1, 2);
  k1a << f1 - j * 0.5 * g0 * g0 - j * 0.5, a1 - g1 - j * g0 * g1;
  k2a << f2 + j * 0.5 * g0 * g0 - j * 0.5, g1 + j * g0 * g1;
  k1b << f1 + j * 0.5 * g0 * g0 + j * 0.5, a1 - g1 + j * g0 * g1;
  k2b << -f2 + j * 0.5 * g0 * g0 - j * 0.5, -g1 + j * g0 * g1;
  for (const auto& [k1, k2] : {std::pair{k1a, k2a}, std::pair{k1b, k2b}}) {
    const CxSystem closed = closedLoop(sys, BimatrixD(k1, k2));
    CMatrix first(2, 2), second = CMatrix::Zero(2, 2);
    first << 0, 1, k1(0, 0) - a0, k1(0, 1) - a1;
    second.row(1) = k2;
    EXPECT_LT((closed.a().first() - first).norm() + (closed.a().second() - second).norm(), 1e-14);
    const std::vector<double> p = poly(closed);
    for (std::size_t i = 0; i < target.size(); ++i) EXPECT_NEAR(p[i], target[i], 1e-8);
  }
}

TEST(Assignment, RandomControllableSystems) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 1 + trial % 5, m = 1 + trial % 2;
    const TimeDomain d = trial % 3 ? TimeDomain::Continuous : TimeDomain::Discrete;
    const CxSystem sys = randomSystem(n, m, 1, d, rng);
    ASSERT_TRUE(isControllable(sys).passed);
    const Spectrum gamma = randomTargets(n, d, trial % 2, rng);
    const GainBimatrix k = assignEigenvalues(sys, gamma, rng);
    EXPECT_EQ(k.rows(), m);
    EXPECT_EQ(k.cols(), n);
    EXPECT_LE(matchingDistance(gamma, spectrum(closedLoop(sys, k))), 1e-6) << "trial " << trial;
  }
}

TEST(Assignment, CurrentSpectrumIsReachable) {
  std::mt19937_64 rng(41);
  const CxSystem sys = randomSystem(3, 1, 1, TimeDomain::Continuous, rng);
  const Spectrum current = spectrum(sys);
  EXPECT_LE(matchingDistance(current, spectrum(closedLoop(sys, assignEigenvalues(sys, current)))), 1e-6);
}

TEST(Assignment, Errors) {
  std::mt19937_64 rng(42);
  const CxSystem sys = randomSystem(2, 1, 1, TimeDomain::Continuous, rng);
  const CxSystem blind(sys.a(), BimatrixD::zero(2, 1), sys.c(), sys.domain());
  EXPECT_THROW(assignEigenvalues(blind, Spectrum({-1.0, -2.0, -3.0, -4.0})), InfeasibleError);
  EXPECT_THROW(assignEigenvalues(sys, Spectrum({-1.0, -2.0, -3.0})), InputError);
  EXPECT_THROW(assignEigenvalues(sys, Spectrum({cdouble(-1, 1), cdouble(-1, 1), -3.0, -4.0})), InputError);
  EXPECT_THROW(assignEigenvaluesNormal(sys, Spectrum({-1.0, -2.0})), InputError);
}

TEST(ClosedLoop, ZeroGainKeepsSystem) {
  std::mt19937_64 rng(43);
  const CxSystem sys = randomSystem(3, 2, 1, TimeDomain::Discrete, rng);
  const CxSystem closed = closedLoop(sys, BimatrixD::zero(2, 3));
  EXPECT_LT((closed.a().first() - sys.a().first()).norm() + (closed.a().second() - sys.a().second()).norm(), 1e-15);
  EXPECT_THROW(closedLoop(sys, BimatrixD::zero(3, 3)), DimensionError);
}

TEST(Stabilize, ConjugateInputNeedsConjugateGain) {
  const CxSystem sys = makeAntilinear(scalar(0), scalar(1), scalar(1), TimeDomain::Continuous);
  const GainBimatrix k = stabilize(sys);
  EXPECT_GT(k.second().norm(), 0.1);
  EXPECT_TRUE(isAsymptoticallyStable(closedLoop(sys, k)));
}

TEST(Stabilize, AlreadyStableGivesZeroGain) {
  const CxSystem sys = makeNormal(scalar(-1), scalar(0), scalar(1), TimeDomain::Continuous);
  EXPECT_TRUE(stabilize(sys).isZero(0));
}

TEST(Stabilize, RandomSystemsAndFailure) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const TimeDomain d = trial % 2 ? TimeDomain::Discrete : TimeDomain::Continuous;
    const CxSystem sys = randomSystem(3, 1, 1, d, rng);
    EXPECT_TRUE(isAsymptoticallyStable(closedLoop(sys, stabilize(sys, rng)))) << "trial " << trial;
  }
  const CxSystem unstable = makeNormal(scalar(1), scalar(0), scalar(1), TimeDomain::Continuous);
  EXPECT_THROW(stabilize(unstable), InfeasibleError);
}

TEST(Stabilize, NormalFeedbackCannotStabilizeContinuousAntilinear) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    const CxSystem sys = makeAntilinear(randomComplex(3, 3, rng), randomComplex(3, 2, rng), CMatrix::Identity(3, 3),
                                        TimeDomain::Continuous);
    const CxSystem closed = closedLoop(sys, BimatrixD::normal(randomComplex(2, 3, rng, 5.0)));
    EXPECT_FALSE(isAsymptoticallyStable(closed));
    // The closed loop is again antilinear, so its spectrum is symmetric about
    // the imaginary axis.
    const Spectrum s = spectrum(closed);
    std::vector<cdouble> mirrored;
    for (const cdouble& v : s) mirrored.push_back(-v);
    EXPECT_LE(matchingDistance(s, Spectrum(mirrored)), 1e-8);
    EXPECT_TRUE(isAsymptoticallyStable(closedLoop(sys, stabilize(sys, rng))));
  }
}

TEST(Lqr, ScalarIntegrator) {
  const CxSystem sys = makeNormal(scalar(0), scalar(1), scalar(1), TimeDomain::Continuous);
  const LqrSolution s = lqr(sys, WeightPair::identity(1, 1));
  EXPECT_NEAR(std::abs(s.p.p1()(0, 0) - 1.0), 0.0, 1e-8);
  EXPECT_LT(s.p.p2().norm(), 1e-8);
  EXPECT_NEAR(std::abs(s.gain.first()(0, 0) + 1.0), 0.0, 1e-8);
  EXPECT_LT(s.gain.second().norm(), 1e-8);
}

TEST(Lqr, ConjugateInputIntegrator) {
  const CxSystem sys = makeAntilinear(scalar(0), scalar(1), scalar(1), TimeDomain::Continuous);
  const LqrSolution s = lqr(sys, WeightPair::identity(1, 1));
  EXPECT_NEAR(std::abs(s.p.p1()(0, 0) - 1.0), 0.0, 1e-8);
  EXPECT_LT(s.p.p2().norm(), 1e-8);
  EXPECT_LT(s.gain.first().norm(), 1e-8);
  EXPECT_NEAR(std::abs(s.gain.second()(0, 0) + 1.0), 0.0, 1e-8);
  const CxSystem closed = closedLoop(sys, s.gain);
  EXPECT_NEAR(std::abs(closed.a().first()(0, 0) + 1.0), 0.0, 1e-8);
  const CVector x0 = CVector::Constant(1, cdouble(0.6, -0.8));
  EXPECT_NEAR(s.jmin(x0), x0.squaredNorm(), 1e-8);
}

TEST(Lqr, ResidualsInBothForms) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 20; ++trial) {
    const TimeDomain d = trial % 2 ? TimeDomain::Discrete : TimeDomain::Continuous;
    const Eigen::Index n = 1 + trial % 3;
    const CxSystem sys = randomSystem(n, 1 + trial % 2, 1, d, rng);
    const CMatrix g = randomComplex(n, n, rng);
    const HermBimatrixD q(BimatrixD(g.adjoint() * g + CMatrix::Identity(n, n), CMatrix::Zero(n, n)));
    const WeightPair w(q, HermBimatrixD::identity(sys.inputs()));
    const LqrSolution s = lqr(sys, w, rng);
    EXPECT_LE(s.residual_bimatrix, 1e-8) << "trial " << trial;
    EXPECT_LE(s.residual_lifted, 1e-8) << "trial " << trial;
    EXPECT_LE(riccatiResidual(sys, w, s.p), 1e-8);
    EXPECT_LE(riccatiResidualLifted(sys, w, s.p), 1e-8);
    EXPECT_TRUE(isPositiveDefinite(s.p));
    EXPECT_TRUE(isAsymptoticallyStable(closedLoop(sys, s.gain)));
  }
}

TEST(Lqr, NormalSystemsGiveNormalSolutions) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const TimeDomain d = trial % 2 ? TimeDomain::Discrete : TimeDomain::Continuous;
    const CxSystem sys = makeNormal(randomComplex(3, 3, rng), randomComplex(3, 2, rng), CMatrix::Identity(3, 3), d);
    const LqrSolution s = lqr(sys, WeightPair::identity(3, 2), rng);
    EXPECT_LE(s.p.p2().norm(), 1e-8 * s.p.p1().norm());
    EXPECT_LE(s.gain.second().norm(), 1e-8 * s.gain.first().norm());
  }
}

TEST(Lqr, Errors) {
  const CxSystem unstable = makeNormal(scalar(1), scalar(0), scalar(1), TimeDomain::Continuous);
  EXPECT_THROW(lqr(unstable, WeightPair::identity(1, 1)), InfeasibleError);
  EXPECT_THROW(WeightPair(HermBimatrixD(BimatrixD::normal(scalar(-1))), HermBimatrixD::identity(1)), InputError);
  EXPECT_THROW(WeightPair(HermBimatrixD::identity(1), HermBimatrixD(BimatrixD(scalar(1), scalar(1)))), InputError);
}

TEST(LqrCost, ZeroInitialState) {
  const CxSystem sys = makeAntilinear(scalar(0), scalar(1), scalar(1), TimeDomain::Continuous);
  const LqrSolution s = lqr(sys, WeightPair::identity(1, 1));
  const CostResult c = lqrCost(sys, s.gain, WeightPair::identity(1, 1), CVector::Zero(1), 40.0);
  EXPECT_EQ(c.cost, 0.0);
  EXPECT_FALSE(c.diverging);
}

TEST(LqrCost, ConjugateInputIntegratorCostIsOne) {
  const CxSystem sys = makeAntilinear(scalar(0), scalar(1), scalar(1), TimeDomain::Continuous);
  const LqrSolution s = lqr(sys, WeightPair::identity(1, 1));
  const CostResult c = lqrCost(sys, s.gain, WeightPair::identity(1, 1), CVector::Constant(1, 1.0), 40.0);
  EXPECT_NEAR(c.cost, 1.0, 1e-3);
}

TEST(LqrCost, DivergingLoopIsFlagged) {
  const CxSystem sys = makeNormal(scalar(0.5), scalar(1), scalar(1), TimeDomain::Continuous);
  const CostResult c = lqrCost(sys, BimatrixD::zero(1, 1), WeightPair::identity(1, 1), CVector::Constant(1, 1.0), 5.0);
  EXPECT_TRUE(c.diverging);
  EXPECT_GT(c.cost, 0.0);
}

TEST(LqrCost, MatchesOptimalValue) {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 8; ++trial) {
    const TimeDomain d = trial % 2 ? TimeDomain::Discrete : TimeDomain::Continuous;
    const CxSystem sys = randomSystem(2, 1, 1, d, rng);
    const WeightPair w = WeightPair::identity(2, 1);
    const LqrSolution s = lqr(sys, w, rng);
    const CVector x0 = oracle::randomVector(2, rng);
    const double horizon = 40.0 * slowestTimeConstant(closedLoop(sys, s.gain));
    const CostResult c = lqrCost(sys, s.gain, w, x0, d == TimeDomain::Discrete ? std::ceil(horizon) : horizon);
    EXPECT_NEAR(c.cost, s.jmin(x0), 1e-3 * s.jmin(x0)) << "trial " << trial;
  }
}

TEST(LqrCost, PerturbedGainsCostMore) {
  std::mt19937_64 rng(49);
  for (int trial = 0; trial < 12; ++trial) {
    const TimeDomain d = trial % 2 ? TimeDomain::Discrete : TimeDomain::Continuous;
    const CxSystem sys = randomSystem(2, 1, 1, d, rng);
    const WeightPair w = WeightPair::identity(2, 1);
    const LqrSolution s = lqr(sys, w, rng);
    const GainBimatrix kp = s.gain + 0.05 * randomBm(1, 2, rng);
    if (!isAsymptoticallyStable(closedLoop(sys, kp))) continue;
    const CVector x0 = oracle::randomVector(2, rng);
    const double horizon = 40.0 * std::max(slowestTimeConstant(closedLoop(sys, s.gain)),
                                           slowestTimeConstant(closedLoop(sys, kp)));
    const double h = d == TimeDomain::Discrete ? std::ceil(horizon) : horizon;
    EXPECT_GE(lqrCost(sys, kp, w, x0, h).cost, lqrCost(sys, s.gain, w, x0, h).cost - 1e-6) << "trial " << trial;
  }
}

TEST(AntilinearLqrDiscrete, GoldenRatio) {
  const LqrSolution s = antilinearLqrDiscrete(scalar(1), scalar(1), scalar(1), scalar(1));
  const double phi = (1 + std::sqrt(5.0)) / 2;
  EXPECT_NEAR(std::abs(s.p.p1()(0, 0) - phi), 0.0, 1e-8);
  EXPECT_LT(s.p.p2().norm(), 1e-15);
  EXPECT_NEAR(std::abs(s.gain.first()(0, 0) + 1.0 / phi), 0.0, 1e-8);
  EXPECT_TRUE(s.gain.second().isZero(0));
  const CxSystem closed = closedLoop(makeAntilinear(scalar(1), scalar(1), scalar(1), TimeDomain::Discrete), s.gain);
  EXPECT_NEAR(std::abs(closed.a().second()(0, 0)), 1 - 1 / phi, 1e-8);
  EXPECT_NEAR(spectrum(closed).radius(), std::sqrt((1 - 1 / phi) * (1 - 1 / phi)), 1e-8);
  ASSERT_TRUE(s.cross_check_gap.has_value());
  EXPECT_LE(*s.cross_check_gap, 1e-8);
}

TEST(AntilinearLqrDiscrete, NoInputReducesToStein) {
  const CMatrix a2 = scalar(cdouble(0.3, 0.4));
  const LqrSolution s = antilinearLqrDiscrete(a2, scalar(0), scalar(1), scalar(1));
  // P = 1 + |a|^2 P
  EXPECT_NEAR(std::abs(s.p.p1()(0, 0) - 1.0 / (1.0 - 0.25)), 0.0, 1e-10);
  EXPECT_LT(s.gain.first().norm(), 1e-15);
}

TEST(AntilinearLqrDiscrete, AgreesWithGeneralSolver) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a2 = randomComplex(3, 3, rng), b2 = randomComplex(3, 2, rng);
    const CMatrix g = randomComplex(3, 3, rng);
    const CMatrix q1 = g.adjoint() * g + CMatrix::Identity(3, 3);
    const CMatrix r1 = CMatrix::Identity(2, 2);
    const LqrSolution s = antilinearLqrDiscrete(a2, b2, q1, r1);
    const CxSystem sys = makeAntilinear(a2, b2, CMatrix::Identity(3, 3), TimeDomain::Discrete);
    const LqrSolution general = lqr(sys, WeightPair(HermBimatrixD(BimatrixD::normal(q1)),
                                                    HermBimatrixD(BimatrixD::normal(r1))));
    EXPECT_LE(relativeGap(s.p.p1(), general.p.p1()), 1e-8) << "trial " << trial;
    EXPECT_LE(s.residual, 1e-10);
    EXPECT_TRUE(isAsymptoticallyStable(closedLoop(sys, s.gain)));
  }
}

TEST(AntilinearLqrDiscrete, Unstabilizable) {
  CMatrix a2 = CMatrix::Zero(2, 2), b2(2, 1);
  a2(0, 0) = 2.0;
  a2(1, 1) = 0.5;
  b2 << 0, 1;
  EXPECT_THROW(antilinearLqrDiscrete(a2, b2, CMatrix::Identity(2, 2), scalar(1)), InfeasibleError);
}

TEST(AntilinearLqrContinuous, ConjugateInputIntegrator) {
  const LqrSolution s = antilinearLqrContinuous(scalar(0), scalar(1), HermBimatrixD::identity(1), scalar(1));
  EXPECT_LT(s.gain.first().norm(), 1e-8);
  EXPECT_NEAR(std::abs(s.gain.second()(0, 0) + 1.0), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(s.p.p1()(0, 0) - 1.0), 0.0, 1e-8);
}

TEST(AntilinearLqrContinuous, CoupledEquationsAndGainFormulas) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a2 = randomComplex(3, 3, rng), b2 = randomComplex(3, 1 + trial % 2, rng);
    const Eigen::Index m = b2.cols();
    const CMatrix g = randomComplex(m, m, rng);
    const CMatrix r1 = g.adjoint() * g + CMatrix::Identity(m, m);
    const LqrSolution s = antilinearLqrContinuous(a2, b2, HermBimatrixD::identity(3), r1);
    EXPECT_LE(antilinearCoupledResidual(a2, b2, HermBimatrixD::identity(3), r1, s.p), 1e-8);
    ASSERT_TRUE(s.cross_check_gap.has_value());
    EXPECT_LE(*s.cross_check_gap, 1e-8);
    // Gains straight from the formulas.
    const CMatrix k1 = -r1.inverse() * b2.adjoint() * s.p.p2();
    const CMatrix k2 = -r1.conjugate().inverse() * b2.transpose() * s.p.p1();
    EXPECT_LE((s.gain.first() - k1).norm(), 1e-8 * (1 + k1.norm()));
    EXPECT_LE((s.gain.second() - k2).norm(), 1e-8 * (1 + k2.norm()));
    const CxSystem sys = makeAntilinear(a2, b2, CMatrix::Identity(3, 3), TimeDomain::Continuous);
    EXPECT_TRUE(isAsymptoticallyStable(closedLoop(sys, s.gain)));
  }
}

TEST(AntilinearLqrContinuous, Uncontrollable) {
  EXPECT_THROW(antilinearLqrContinuous(scalar(1), scalar(0), HermBimatrixD::identity(1), scalar(1)),
               InfeasibleError);
}

TEST(Observer, IdentityOutputPlacesAnywhere) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const TimeDomain d = trial % 2 ? TimeDomain::Discrete : TimeDomain::Continuous;
    const CxSystem plant = randomSystem(3, 1, 3, d, rng);
    const CxSystem sys(plant.a(), plant.b(), BimatrixD::identity(3), d);
    const Spectrum gamma = randomTargets(3, d, true, rng);
    const BimatrixD l = designObserver(sys, gamma, rng);
    EXPECT_EQ(l.rows(), 3);
    EXPECT_EQ(l.cols(), 3);
    EXPECT_LE(matchingDistance(gamma, eigenvalues(sys.a() + l * sys.c())), 1e-6) << "trial " << trial;
  }
}

TEST(Observer, NormalSystemAdmitsClassicalGain) {
  std::mt19937_64 rng(53);
  const CMatrix a1 = randomComplex(3, 3, rng), c1 = randomComplex(1, 3, rng);
  const CxSystem sys = makeNormal(a1, CMatrix::Zero(3, 1), c1, TimeDomain::Continuous);
  const Spectrum targets({cdouble(-1, 0.5), -2.0, cdouble(-0.5, -1)});
  const CMatrix l1 = linalg::placeComplex(a1.adjoint(), c1.adjoint(), targets, rng).adjoint();
  const BimatrixD l = BimatrixD::normal(l1);
  const Spectrum achieved = eigenvalues(sys.a() + l * sys.c());
  std::vector<cdouble> doubled;
  for (const cdouble& v : targets) {
    doubled.push_back(v);
    doubled.push_back(std::conj(v));
  }
  EXPECT_LE(matchingDistance(Spectrum(doubled), achieved), 1e-6);
  EXPECT_LE(matchingDistance(Spectrum(doubled), eigenvalues(sys.a() + designObserver(sys, Spectrum(doubled)) * sys.c())),
            1e-6);
}

TEST(Observer, SimulatedErrorDecays) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 8; ++trial) {
    const TimeDomain d = trial % 2 ? TimeDomain::Discrete : TimeDomain::Continuous;
    const CxSystem sys = randomSystem(2, 1, 1, d, rng);
    const Spectrum gamma = randomTargets(2, d, true, rng);
    const BimatrixD l = designObserver(sys, gamma, rng);
    // Unstable plants are run under u = {K}z + v so that x and z stay
    // representable while their difference decays.
    const CxSystem loop = observerBasedSystem(sys, stabilize(sys, rng), l);
    const double rate = d == TimeDomain::Continuous ? -gamma.abscissa() : -std::log(gamma.radius());
    const std::vector<double> grid = timeGrid(d, std::ceil(25.0 / rate), 0.05);
    std::vector<CVector> v;
    for (std::size_t k = 0; k < grid.size(); ++k) v.push_back(CVector::Constant(1, std::sin(0.1 * k)));
    CVector x0(4);
    x0 << oracle::randomVector(2, rng), oracle::randomVector(2, rng);
    const SimTrace tr = stateResponse(loop, x0, v, grid);
    auto err = [&](std::size_t k) { return (tr.states[k].head(2) - tr.states[k].tail(2)).norm(); };
    EXPECT_LE(err(tr.size() - 1), 1e-6 * err(0)) << "trial " << trial;
  }
}

TEST(Observer, SeparationPrinciple) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 8; ++trial) {
    const TimeDomain d = trial % 2 ? TimeDomain::Discrete : TimeDomain::Continuous;
    const CxSystem sys = randomSystem(2, 1, 1, d, rng);
    const Spectrum gk = randomTargets(2, d, true, rng), gl = randomTargets(2, d, true, rng);
    const GainBimatrix k = assignEigenvalues(sys, gk, rng);
    const BimatrixD l = designObserver(sys, gl, rng);
    std::vector<cdouble> both(gk.begin(), gk.end());
    both.insert(both.end(), gl.begin(), gl.end());
    EXPECT_LE(matchingDistance(Spectrum(both), spectrum(observerBasedSystem(sys, k, l))), 1e-6) << "trial " << trial;
  }
}

TEST(Observer, Errors) {
  std::mt19937_64 rng(56);
  const CxSystem sys = randomSystem(2, 1, 1, TimeDomain::Continuous, rng);
  EXPECT_THROW(designObserver(sys, Spectrum({1.0, -1.0, -2.0, -3.0})), InputError);
  EXPECT_THROW(designObserver(sys, Spectrum({-1.0, -2.0})), InputError);
  const CxSystem blind(sys.a(), sys.b(), BimatrixD::zero(1, 2), sys.domain());
  EXPECT_THROW(designObserver(blind, Spectrum({-1.0, -1.5, -2.0, -3.0})), InfeasibleError);
}

TEST(Observer, ErrorSystemOutputOnStablePlant) {
  std::mt19937_64 rng(57);
  CxSystem sys = randomSystem(2, 1, 1, TimeDomain::Continuous, rng);
  sys = CxSystem(sys.a() - (spectrum(sys).abscissa() + 0.5) * BimatrixD::identity(2), sys.b(), sys.c(), sys.domain());
  const Spectrum gamma({-1.0, -1.5, cdouble(-2, 1), cdouble(-2, -1)});
  const CxSystem err = observerErrorSystem(sys, designObserver(sys, gamma, rng));
  CVector x0(4);
  x0 << oracle::randomVector(2, rng), oracle::randomVector(2, rng);
  const std::vector<double> grid = timeGrid(TimeDomain::Continuous, 20.0, 0.1);
  const SimTrace tr = stateResponse(err, x0, std::vector<CVector>(grid.size(), CVector::Ones(1)), grid);
  EXPECT_LT((tr.outputs[0] - (x0.head(2) - x0.tail(2))).norm(), 1e-14);
  EXPECT_LE(tr.outputs.back().norm(), 1e-6 * tr.outputs.front().norm());
}
