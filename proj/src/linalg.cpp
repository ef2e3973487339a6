#include "cvls/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace cvls::linalg {

namespace {

constexpr double kNullspaceTol = 1e-10;
constexpr double kPlacementRcond = 1e-10;
constexpr double kSameTarget = 1e-10;

/// Orthonormal basis of ker [A - lI, B], and the SVD needed for particular
/// solutions of [A - lI, B] z = rhs.
struct PencilKernel {
  cdouble lambda;
  CMatrix basis;
  Eigen::JacobiSVD<CMatrix> svd;
};

PencilKernel kernelOf(const CMatrix& a, const CMatrix& b, cdouble lambda) {
  const Eigen::Index n = a.rows(), m = b.cols();
  CMatrix pencil(n, n + m);
  pencil << a - lambda * CMatrix::Identity(n, n), b;
  Eigen::JacobiSVD<CMatrix> svd(pencil, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = kNullspaceTol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > cut ? 1 : 0;
  svd.setThreshold(kNullspaceTol);
  CMatrix basis = svd.matrixV().rightCols(n + m - rank);
  // Real targets of a real pencil admit a real kernel; rotate the basis so
  // its columns are real when the pencil is real.
  if (a.imag().isZero(0) && b.imag().isZero(0) && lambda.imag() == 0.0) {
    RMatrix stacked(basis.rows(), 2 * basis.cols());
    stacked << basis.real(), basis.imag();
    Eigen::JacobiSVD<RMatrix> rs(stacked, Eigen::ComputeThinU);
    basis = rs.matrixU().leftCols(n + m - rank).cast<cdouble>();
  }
  return PencilKernel{lambda, std::move(basis), std::move(svd)};
}

struct Column {
  CVector x;
  CVector g;
};

/// Draws X and G column by column. In real mode non-real targets occupy two
/// real columns (real and imaginary parts) and their conjugates are skipped.
template <bool RealMode>
bool drawPlacement(const CMatrix& a, const CMatrix& b, const std::vector<cdouble>& order,
                   std::vector<PencilKernel>& kernels, std::mt19937_64& rng, CMatrix& x_out,
                   CMatrix& g_out) {
  const Eigen::Index n = a.rows(), m = b.cols();
  std::normal_distribution<double> gauss(0.0, 1.0);
  x_out.setZero(n, n);
  g_out.setZero(m, n);
  std::vector<std::vector<CVector>> chain_x(kernels.size());
  Eigen::Index col = 0;
  for (const cdouble lambda : order) {
    std::size_t idx = 0;
    while (std::abs(kernels[idx].lambda - lambda) > kSameTarget * (1.0 + std::abs(lambda))) ++idx;
    const PencilKernel& ker = kernels[idx];
    const Eigen::Index dim = ker.basis.cols();
    if (dim == 0) return false;
    const bool real_target = RealMode && lambda.imag() == 0.0;
    CVector coeff(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      coeff(i) = real_target ? cdouble(gauss(rng), 0.0) : cdouble(gauss(rng), gauss(rng));
    }
    CVector z = ker.basis * coeff;
    auto& previous = chain_x[idx];
    const std::size_t k = previous.size();
    if (k >= static_cast<std::size_t>(dim)) {
      // More copies than independent eigenvectors: extend a Jordan chain.
      const CVector rhs = previous[k - static_cast<std::size_t>(dim)];
      CVector particular = ker.svd.solve(rhs);
      if (real_target) particular = particular.real().cast<cdouble>();
      z += particular;
    }
    const CVector xv = z.head(n);
    previous.push_back(xv);
    if (RealMode && !real_target) {
      if (col + 2 > n) return false;
      x_out.col(col) = xv.real().cast<cdouble>();
      x_out.col(col + 1) = xv.imag().cast<cdouble>();
      g_out.col(col) = z.tail(m).real().cast<cdouble>();
      g_out.col(col + 1) = z.tail(m).imag().cast<cdouble>();
      col += 2;
    } else {
      if (col + 1 > n) return false;
      x_out.col(col) = real_target ? CVector(xv.real().cast<cdouble>()) : xv;
      g_out.col(col) = real_target ? CVector(z.tail(m).real().cast<cdouble>()) : CVector(z.tail(m));
      col += 1;
    }
  }
  return col == n;
}

template <bool RealMode>
CMatrix placeImpl(const CMatrix& a, const CMatrix& b, const Spectrum& targets, std::mt19937_64& rng,
                  int max_tries) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) throw DimensionError("placement: A must be square and B conformable");
  if (static_cast<Eigen::Index>(targets.size()) != n) {
    throw InputError("placement: expected " + std::to_string(n) + " target eigenvalues, got " +
                     std::to_string(targets.size()));
  }
  if (n == 0) return CMatrix::Zero(b.cols(), 0);

  // Column order: in real mode keep one representative (Im >= 0) per conjugate pair.
  std::vector<cdouble> order;
  if constexpr (RealMode) {
    if (!targets.isConjugateClosed()) throw InputError("placement: target spectrum is not closed under conjugation");
    std::vector<bool> used(targets.size(), false);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      const cdouble v = targets[i];
      const double scale = std::max(1.0, std::abs(v));
      if (std::abs(v.imag()) <= tol::kConjugatePairing * scale) {
        order.emplace_back(v.real(), 0.0);
        continue;
      }
      std::size_t best = targets.size();
      double best_d = INFINITY;
      for (std::size_t k = 0; k < targets.size(); ++k) {
        if (used[k]) continue;
        const double d = std::abs(targets[k] - std::conj(v));
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      used[best] = true;
      order.emplace_back(v.real(), std::abs(v.imag()));
    }
  } else {
    order.assign(targets.begin(), targets.end());
  }

  std::vector<PencilKernel> kernels;
  for (const cdouble lambda : order) {
    bool seen = false;
    for (const auto& k : kernels) {
      if (std::abs(k.lambda - lambda) <= kSameTarget * (1.0 + std::abs(lambda))) seen = true;
    }
    if (!seen) kernels.push_back(kernelOf(a, b, lambda));
  }

  CMatrix x, g;
  double best_rcond = 0.0;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    if (!drawPlacement<RealMode>(a, b, order, kernels, rng, x, g)) continue;
    const double rc = rcondSvd(x);
    best_rcond = std::max(best_rcond, rc);
    if (rc >= kPlacementRcond) {
      // K X = G
      return x.transpose().partialPivLu().solve(g.transpose()).transpose();
    }
  }
  throw NumericalError("eigenvalue placement failed: eigenvector matrix ill-conditioned (best rcond " +
                       std::to_string(best_rcond) + ")");
}

}  // namespace

RMatrix placeReal(const RMatrix& a, const RMatrix& b, const Spectrum& targets, std::mt19937_64& rng,
                  int max_tries) {
  const CMatrix k = placeImpl<true>(a.cast<cdouble>(), b.cast<cdouble>(), targets, rng, max_tries);
  return k.real();
}

CMatrix placeComplex(const CMatrix& a, const CMatrix& b, const Spectrum& targets, std::mt19937_64& rng,
                     int max_tries) {
  return placeImpl<false>(a, b, targets, rng, max_tries);
}

Spectrum eigenvaluesOf(const RMatrix& m) {
  if (m.rows() == 0) return Spectrum();
  Eigen::EigenSolver<RMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return Spectrum::fromEigen(es.eigenvalues());
}

Spectrum eigenvaluesOf(const CMatrix& m) {
  if (m.rows() == 0) return Spectrum();
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return Spectrum::fromEigen(es.eigenvalues());
}

// ---------------------------------------------------------------------------
// Riccati equations

double careResidual(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r,
                    const RMatrix& p) {
  const RMatrix t1 = a.transpose() * p;
  const RMatrix t2 = p * a;
  const RMatrix t3 = p * b * r.ldlt().solve(b.transpose() * p);
  const double scale = t1.norm() + t2.norm() + t3.norm() + q.norm();
  const double res = (t1 + t2 - t3 + q).norm();
  return scale > 0 ? res / scale : res;
}

double dareResidual(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r,
                    const RMatrix& p) {
  const RMatrix t1 = a.transpose() * p * a;
  const RMatrix s = r + b.transpose() * p * b;
  const RMatrix pa = b.transpose() * p * a;
  const RMatrix t3 = pa.transpose() * s.partialPivLu().solve(pa);
  const double scale = t1.norm() + p.norm() + t3.norm() + q.norm();
  const double res = (t1 - p - t3 + q).norm();
  return scale > 0 ? res / scale : res;
}

namespace {
RMatrix symmetrized(const RMatrix& m) { return 0.5 * (m + m.transpose()); }

bool schurStable(const RMatrix& m) {
  return eigenvaluesOf(m).radius() < 1.0 - tol::kStabilityMargin;
}
}  // namespace

RiccatiResult solveCare(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r,
                        const RMatrix& k0, int max_iters, double rel_tol) {
  const Eigen::LDLT<RMatrix> rfac(r);
  RiccatiResult out;
  out.k = k0;
  if (eigenvaluesOf(RMatrix(a + b * k0)).abscissa() >= -tol::kStabilityMargin) {
    throw NumericalError("Newton-Kleinman: initial gain is not stabilizing");
  }
  for (int it = 1; it <= max_iters; ++it) {
    const RMatrix ac = a + b * out.k;
    const RMatrix rhs = q + out.k.transpose() * r * out.k;
    out.p = symmetrized(solveContinuousLyapunov(ac, rhs));
    out.k = -rfac.solve(b.transpose() * out.p);
    out.iterations = it;
    out.residual = careResidual(a, b, q, r, out.p);
    if (out.residual <= rel_tol) break;
  }
  return out;
}

RiccatiResult solveDare(const RMatrix& a, const RMatrix& b, const RMatrix& q, const RMatrix& r,
                        int max_iters, double rel_tol) {
  constexpr int kFixedPointCap = 100000;
  constexpr int kHewerIters = 100;
  RiccatiResult out;
  out.p = q;
  auto gainOf = [&](const RMatrix& p) -> RMatrix {
    const RMatrix s = r + b.transpose() * p * b;
    return -s.partialPivLu().solve(b.transpose() * p * a);
  };
  auto hewer = [&]() {
    for (int i = 0; i < kHewerIters && out.residual > rel_tol; ++i) {
      const RMatrix ac = a + b * out.k;
      const RMatrix rhs = q + out.k.transpose() * r * out.k;
      out.p = symmetrized(solveDiscreteLyapunov(ac, rhs));
      out.k = gainOf(out.p);
      out.residual = dareResidual(a, b, q, r, out.p);
      ++out.iterations;
    }
  };
  for (int it = 1; it <= kFixedPointCap; ++it) {
    const RMatrix pa = b.transpose() * out.p * a;
    const RMatrix s = r + b.transpose() * out.p * b;
    out.p = symmetrized(q + a.transpose() * out.p * a - pa.transpose() * s.partialPivLu().solve(pa));
    out.iterations = it;
    out.residual = dareResidual(a, b, q, r, out.p);
    if (!out.p.allFinite()) throw NumericalError("Riccati difference iteration diverged");
    if (out.residual <= rel_tol) break;
    if (it % max_iters == 0) {
      out.k = gainOf(out.p);
      if (schurStable(a + b * out.k)) {
        hewer();
        if (out.residual <= rel_tol) break;
      }
    }
  }
  out.k = gainOf(out.p);
  return out;
}

}  // namespace cvls::linalg
