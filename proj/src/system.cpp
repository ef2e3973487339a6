#include "cvls/system.hpp"

#include <algorithm>

namespace cvls {

std::string toString(TimeDomain d) { return d == TimeDomain::Continuous ? "continuous" : "discrete"; }

TimeDomain timeDomainFromString(const std::string& s) {
  if (s == "continuous") return TimeDomain::Continuous;
  if (s == "discrete") return TimeDomain::Discrete;
  throw InputError("unknown time domain '" + s + "' (expected continuous or discrete)");
}

namespace {
void requireShape(const BimatrixD& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string("system block ") + name + " is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
}
}  // namespace

CxSystem::CxSystem(BimatrixD a, BimatrixD b, BimatrixD c, BimatrixD d, TimeDomain domain)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), domain_(domain) {
  if (!a_.isSquare()) throw DimensionError("system block A is not square");
  const Eigen::Index n = a_.rows();
  requireShape(b_, n, b_.cols(), "B");
  requireShape(c_, c_.rows(), n, "C");
  requireShape(d_, c_.rows(), b_.cols(), "D");
}

CxSystem::CxSystem(BimatrixD a, BimatrixD b, BimatrixD c, TimeDomain domain)
    : CxSystem(a, b, c, BimatrixD::zero(c.rows(), b.cols()), domain) {}

bool CxSystem::isNormal() const {
  return a_.second().isZero(0) && b_.second().isZero(0) && c_.second().isZero(0) && d_.second().isZero(0);
}

bool CxSystem::isAntilinear() const {
  return a_.first().isZero(0) && b_.first().isZero(0) && c_.first().isZero(0) && d_.first().isZero(0);
}

CxSystem fromRealSystem(const RealSystem& real) {
  auto even = [](const RMatrix& m, const char* name) {
    if (m.rows() % 2 != 0 || m.cols() % 2 != 0) {
      throw DimensionError(std::string("real system block ") + name + " has odd dimensions " +
                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
  };
  even(real.a, "A");
  even(real.b, "B");
  even(real.c, "C");
  even(real.d, "D");
  BimatrixD a = fromRealRepresentation(real.a);
  BimatrixD b = fromRealRepresentation(real.b);
  BimatrixD c = fromRealRepresentation(real.c);
  BimatrixD d = real.d.size() == 0 ? BimatrixD::zero(c.rows(), b.cols()) : fromRealRepresentation(real.d);
  return CxSystem(std::move(a), std::move(b), std::move(c), std::move(d), real.domain);
}

double conversionResidual(const RealSystem& real) {
  double worst = 0.0;
  for (const RMatrix* m : {&real.a, &real.b, &real.c, &real.d}) {
    if (m->size() == 0) continue;
    const double scale = std::max(m->norm(), 1e-300);
    worst = std::max(worst, (*m - realRepresentation(fromRealRepresentation(*m))).norm() / scale);
  }
  return worst;
}

RealSystem toRealRepresentation(const CxSystem& sys) {
  return RealSystem{realRepresentation(sys.a()), realRepresentation(sys.b()), realRepresentation(sys.c()),
                    realRepresentation(sys.d()), sys.domain()};
}

LiftedSystem toComplexLifting(const CxSystem& sys) {
  return LiftedSystem{complexLifting(sys.a()), complexLifting(sys.b()), complexLifting(sys.c()),
                      complexLifting(sys.d()), sys.domain()};
}

CxSystem makeNormal(const CMatrix& a1, const CMatrix& b1, const CMatrix& c1, const CMatrix& d1,
                    TimeDomain domain) {
  const CMatrix d = d1.size() == 0 ? CMatrix::Zero(c1.rows(), b1.cols()) : d1;
  return CxSystem(BimatrixD::normal(a1), BimatrixD::normal(b1), BimatrixD::normal(c1), BimatrixD::normal(d),
                  domain);
}

CxSystem makeNormal(const CMatrix& a1, const CMatrix& b1, const CMatrix& c1, TimeDomain domain) {
  return makeNormal(a1, b1, c1, CMatrix(), domain);
}

CxSystem makeAntilinear(const CMatrix& a2, const CMatrix& b2, const CMatrix& c2, const CMatrix& d2,
                        TimeDomain domain) {
  const CMatrix d = d2.size() == 0 ? CMatrix::Zero(c2.rows(), b2.cols()) : d2;
  return CxSystem(BimatrixD::antilinear(a2), BimatrixD::antilinear(b2), BimatrixD::antilinear(c2),
                  BimatrixD::antilinear(d), domain);
}

CxSystem makeAntilinear(const CMatrix& a2, const CMatrix& b2, const CMatrix& c2, TimeDomain domain) {
  return makeAntilinear(a2, b2, c2, CMatrix(), domain);
}

BimatrixD transferFunction(const CxSystem& sys, double s) {
  if (!std::isfinite(s)) throw InputError("transfer function: frequency must be finite");
  const Eigen::Index n = sys.states();
  const BimatrixD resolvent(s * CMatrix::Identity(n, n) - sys.a().first(), -sys.a().second());
  return sys.c() * inverse(resolvent) * sys.b() + sys.d();
}

Spectrum spectrum(const CxSystem& sys) { return eigenvalues(sys.a()); }

}  // namespace cvls
