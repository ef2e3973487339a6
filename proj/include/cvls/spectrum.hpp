#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "cvls/core.hpp"

namespace cvls {

/// Multiset of complex eigenvalues. Eigenvalue sets of bimatrices are always
/// symmetric about the real axis; design targets are validated against that.
template <typename Scalar>
class SpectrumSet {
 public:
  using value_type = Complex<Scalar>;

  SpectrumSet() = default;
  explicit SpectrumSet(std::vector<value_type> values) : values_(std::move(values)) {
    for (const auto& v : values_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw InputError("spectrum contains a non-finite value");
      }
    }
  }

  template <typename Derived>
  static SpectrumSet fromEigen(const Eigen::MatrixBase<Derived>& v) {
    std::vector<value_type> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = value_type(v(i));
    return SpectrumSet(std::move(out));
  }

  const std::vector<value_type>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const value_type& operator[](std::size_t i) const { return values_[i]; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  /// Largest real part (continuous-time stability abscissa).
  Scalar abscissa() const {
    Scalar r = -std::numeric_limits<Scalar>::infinity();
    for (const auto& v : values_) r = std::max(r, v.real());
    return r;
  }

  /// Largest modulus (spectral radius).
  Scalar radius() const {
    Scalar r = 0;
    for (const auto& v : values_) r = std::max(r, std::abs(v));
    return r;
  }

  /// True when every value can be paired with a conjugate partner of equal
  /// multiplicity. Real values pair with themselves.
  bool isConjugateClosed(Scalar pairing_tol = Scalar(tol::kConjugatePairing)) const {
    std::vector<bool> used(values_.size(), false);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (used[i]) continue;
      const value_type& v = values_[i];
      const Scalar scale = std::max(Scalar(1), std::abs(v));
      if (std::abs(v.imag()) <= pairing_tol * scale) {
        used[i] = true;
        continue;
      }
      std::size_t best = values_.size();
      Scalar best_d = std::numeric_limits<Scalar>::infinity();
      for (std::size_t k = 0; k < values_.size(); ++k) {
        if (used[k] || k == i) continue;
        const Scalar d = std::abs(values_[k] - std::conj(v));
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best == values_.size() || best_d > pairing_tol * scale) return false;
      used[i] = used[best] = true;
    }
    return true;
  }

  /// Adds the missing partner of every unpaired non-real value. Throws
  /// InputError when the result still is not conjugate-closed.
  SpectrumSet conjugateCompleted(Scalar pairing_tol = Scalar(tol::kConjugatePairing)) const {
    std::vector<value_type> out;
    std::vector<bool> used(values_.size(), false);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      const value_type v = values_[i];
      const Scalar scale = std::max(Scalar(1), std::abs(v));
      if (std::abs(v.imag()) <= pairing_tol * scale) {
        out.emplace_back(v.real(), Scalar(0));
        continue;
      }
      std::size_t partner = values_.size();
      for (std::size_t k = i + 1; k < values_.size(); ++k) {
        if (!used[k] && std::abs(values_[k] - std::conj(v)) <= pairing_tol * scale) {
          partner = k;
          break;
        }
      }
      if (partner != values_.size()) used[partner] = true;
      out.push_back(v);
      out.push_back(std::conj(v));
    }
    SpectrumSet result(std::move(out));
    if (!result.isConjugateClosed(pairing_tol)) {
      throw InputError("spectrum cannot be made closed under conjugation");
    }
    return result;
  }

 private:
  std::vector<value_type> values_;
};

/// Greedy nearest-neighbour matching distance between two multisets, each
/// pair scored as |a - b| / (1 + |a|). Returns +inf on size mismatch.
template <typename Scalar>
Scalar matchingDistance(const SpectrumSet<Scalar>& a, const SpectrumSet<Scalar>& b) {
  if (a.size() != b.size()) return std::numeric_limits<Scalar>::infinity();
  std::vector<bool> used(b.size(), false);
  Scalar worst = 0;
  for (const auto& va : a) {
    std::size_t best = b.size();
    Scalar best_d = std::numeric_limits<Scalar>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (used[k]) continue;
      const Scalar d = std::abs(va - b[k]) / (Scalar(1) + std::abs(va));
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

template <typename Scalar>
bool sameSpectrum(const SpectrumSet<Scalar>& a, const SpectrumSet<Scalar>& b, Scalar tolerance) {
  return matchingDistance(a, b) <= tolerance;
}

template <typename Scalar>
SpectrumSet<Scalar> unite(const SpectrumSet<Scalar>& a, const SpectrumSet<Scalar>& b) {
  std::vector<Complex<Scalar>> v(a.values());
  v.insert(v.end(), b.begin(), b.end());
  return SpectrumSet<Scalar>(std::move(v));
}

using Spectrum = SpectrumSet<double>;

}  // namespace cvls
