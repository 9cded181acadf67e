#pragma once

// Laurent symbols on Z. Convention: a_l = <n|A|n+l>, so A = sum_l a_l S^{-l}
// with S|x> = |x+1>, and a(z) = sum_l a_l z^l.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lindblad/types.hpp"

namespace lindblad {

inline constexpr double kCircleTol = 1e-12;

template <typename Real>
class BandedSymbol {
 public:
  using Scalar = Cplx<Real>;

  BandedSymbol() : r_(0), c_(1, Scalar(0)) {}
  explicit BandedSymbol(int range) : r_(range), c_(2 * range + 1, Scalar(0)) {}

  static BandedSymbol constant(Scalar a0) {
    BandedSymbol s;
    s.c_[0] = a0;
    return s;
  }
  static BandedSymbol tridiagonal(Scalar alpha, Scalar beta, Scalar gamma) {
    BandedSymbol s(1);
    s.c_[0] = alpha;
    s.c_[1] = beta;
    s.c_[2] = gamma;
    return s;
  }

  int range() const { return r_; }

  Scalar operator[](int l) const {
    if (l < -r_ || l > r_) return Scalar(0);
    return c_[l + r_];
  }

  // grows the range when l falls outside it
  void set(int l, Scalar v) {
    if (std::abs(l) > r_) grow(std::abs(l));
    c_[l + r_] = v;
  }
  void add(int l, Scalar v) {
    if (std::abs(l) > r_) grow(std::abs(l));
    c_[l + r_] += v;
  }

  // smallest r' with all |a_l| <= tol for |l| > r'
  int effective_range(Real tol = 0) const {
    for (int l = r_; l > 0; --l)
      if (std::abs(c_[l + r_]) > tol || std::abs(c_[-l + r_]) > tol) return l;
    return 0;
  }

  bool is_self_adjoint(Real tol = 1e-14) const {
    for (int l = 0; l <= r_; ++l)
      if (std::abs((*this)[-l] - std::conj((*this)[l])) > tol) return false;
    return true;
  }

  Real l1_norm() const {
    Real s = 0;
    for (const auto& v : c_) s += std::abs(v);
    return s;
  }

 private:
  void grow(int r) {
    std::vector<Scalar> c(2 * r + 1, Scalar(0));
    for (int l = -r_; l <= r_; ++l) c[l + r] = c_[l + r_];
    r_ = r;
    c_ = std::move(c);
  }

  int r_;
  std::vector<Scalar> c_;
};

template <typename Real>
Cplx<Real> ipow(Cplx<Real> z, long p) {
  if (p < 0) return Real(1) / ipow(z, -p);
  Cplx<Real> r(1), b = z;
  while (p) {
    if (p & 1) r *= b;
    b *= b;
    p >>= 1;
  }
  return r;
}

// a(e^{i theta}) without the unit-circle check
template <typename Real>
Cplx<Real> symbol_at_angle(const BandedSymbol<Real>& s, Real theta) {
  Cplx<Real> acc(0);
  for (int l = -s.range(); l <= s.range(); ++l)
    acc += s[l] * std::polar(Real(1), theta * Real(l));
  return acc;
}

template <typename Real>
Cplx<Real> symbol_eval(const BandedSymbol<Real>& s, Cplx<Real> z) {
  if (std::abs(std::abs(z) - Real(1)) > Real(kCircleTol))
    throw Error(ErrorCode::OffUnitCircle, "symbol_eval needs |z| = 1");
  Cplx<Real> acc(0);
  const Cplx<Real> zi = std::conj(z);  // 1/z on the circle
  for (int l = -s.range(); l <= s.range(); ++l)
    acc += s[l] * (l >= 0 ? ipow(z, l) : ipow(zi, -l));
  return acc;
}

template <typename Real>
std::vector<Cplx<Real>> symbol_curve(const BandedSymbol<Real>& s, int nTheta) {
  if (nTheta < 3) throw Error(ErrorCode::InvalidInput, "symbol_curve needs nTheta >= 3");
  std::vector<Cplx<Real>> out(nTheta);
  for (int k = 0; k < nTheta; ++k)
    out[k] = symbol_at_angle(s, Real(2) * std::numbers::pi_v<Real> * Real(k) / Real(nTheta));
  return out;
}

// principal root with Re >= 0, and Im >= 0 on the imaginary axis
template <typename Real>
Cplx<Real> branch_sqrt(Cplx<Real> z) {
  Cplx<Real> r = std::sqrt(z);
  if (r.real() < 0 || (r.real() == 0 && r.imag() < 0)) r = -r;
  if (r.real() == 0) r = Cplx<Real>(Real(0), r.imag());  // drop a -0.0
  return r;
}

template <typename Real>
struct RootPair {
  Cplx<Real> lambdaPlus, lambdaMinus;
  Cplx<Real> lambda1, lambda2;  // |lambda2| <= |lambda1|
  int signFactor = 1;
};

// roots of alpha + beta x + gamma x^2, no split check
template <typename Real>
RootPair<Real> quadratic_roots(Cplx<Real> alpha, Cplx<Real> beta, Cplx<Real> gamma) {
  if (std::abs(gamma) <= Real(kCircleTol))
    throw Error(ErrorCode::DegenerateGamma, "|gamma| <= 1e-12");
  RootPair<Real> rp;
  const Cplx<Real> h = beta / (Real(2) * gamma);
  const Cplx<Real> d = branch_sqrt(h * h - alpha / gamma);
  rp.lambdaPlus = -h + d;
  rp.lambdaMinus = -h - d;
  // cancellation: recover the small root from the product
  if (std::abs(rp.lambdaPlus) > std::abs(rp.lambdaMinus) && rp.lambdaPlus != Cplx<Real>(0))
    rp.lambdaMinus = alpha / (gamma * rp.lambdaPlus);
  else if (rp.lambdaMinus != Cplx<Real>(0))
    rp.lambdaPlus = alpha / (gamma * rp.lambdaMinus);
  if (std::abs(rp.lambdaPlus) >= std::abs(rp.lambdaMinus)) {
    rp.lambda1 = rp.lambdaPlus;
    rp.lambda2 = rp.lambdaMinus;
  } else {
    rp.lambda1 = rp.lambdaMinus;
    rp.lambda2 = rp.lambdaPlus;
  }
  const Real ap = std::abs(rp.lambdaPlus), am = std::abs(rp.lambdaMinus);
  rp.signFactor = (am < 1 && 1 < ap) ? -1 : 1;
  return rp;
}

template <typename Real>
RootPair<Real> ordered_roots(Cplx<Real> alpha, Cplx<Real> beta, Cplx<Real> gamma) {
  RootPair<Real> rp = quadratic_roots(alpha, beta, gamma);
  const Real m1 = std::abs(rp.lambda1), m2 = std::abs(rp.lambda2);
  if (std::min(std::abs(m1 - 1), std::abs(m2 - 1)) < Real(kCircleTol))
    throw Error(ErrorCode::OnSymbolCurve, "a root lies on the unit circle");
  if (!(m2 < 1 && 1 < m1)) throw Error(ErrorCode::NoSplit, "both roots on one side of the unit circle");
  return rp;
}

// <j|T^{-1}|k> for the tridiagonal Laurent operator with a_{-1}=alpha, a_0=beta, a_1=gamma
template <typename Real>
Cplx<Real> tridiag_inverse_element(Cplx<Real> alpha, Cplx<Real> beta, Cplx<Real> gamma, long j, long k) {
  const Real tol(kCircleTol);
  if (std::abs(gamma) <= tol) {
    // T = beta + alpha S, symbol alpha/z + beta
    if (std::abs(alpha) <= tol) {
      if (std::abs(beta) <= tol) throw Error(ErrorCode::OnSymbolCurve, "zero symbol");
      return j == k ? Cplx<Real>(1) / beta : Cplx<Real>(0);
    }
    const Real ratio = std::abs(alpha) / std::abs(beta);
    if (std::abs(ratio - 1) < tol) throw Error(ErrorCode::OnSymbolCurve, "|alpha| = |beta| with gamma = 0");
    if (ratio > 1) throw Error(ErrorCode::NoSplit, "gamma = 0 and |alpha| > |beta|");
    return k <= j ? ipow(-alpha / beta, j - k) / beta : Cplx<Real>(0);
  }
  const RootPair<Real> rp = ordered_roots(alpha, beta, gamma);
  // gamma (lambda2 - lambda1) squares to beta^2 - 4 alpha gamma
  const Cplx<Real> denom = gamma * (rp.lambda2 - rp.lambda1);
  if (k >= j) return ipow(rp.lambda1, -(k - j)) / denom;
  return ipow(rp.lambda2, j - k) / denom;
}

// Inverse of a general banded Laurent operator through partial fractions of
// z^{-lo} / P(z). Handles any root configuration off the unit circle.
template <typename Real>
class LaurentInverse {
 public:
  using Scalar = Cplx<Real>;

  explicit LaurentInverse(const BandedSymbol<Real>& s) : sym_(s) {
    const Real scale = std::max(s.l1_norm(), Real(1e-300));
    const Real cut = Real(1e-14) * scale;
    lo_ = s.range() + 1;
    int hi = -s.range() - 1;
    for (int l = -s.range(); l <= s.range(); ++l)
      if (std::abs(s[l]) > cut) {
        lo_ = std::min(lo_, l);
        hi = std::max(hi, l);
      }
    if (hi < lo_) throw Error(ErrorCode::OnSymbolCurve, "zero symbol");
    const int d = hi - lo_;
    p_.resize(d + 1);
    for (int m = 0; m <= d; ++m) p_[m] = s[lo_ + m];
    find_roots();
    for (const auto& r : roots_)
      if (std::abs(std::abs(r) - 1) < Real(kCircleTol))
        throw Error(ErrorCode::OnSymbolCurve, "symbol vanishes on the unit circle");
    Real sep = std::numeric_limits<Real>::infinity();
    for (size_t i = 0; i < roots_.size(); ++i)
      for (size_t k = i + 1; k < roots_.size(); ++k) sep = std::min(sep, std::abs(roots_[i] - roots_[k]));
    quadrature_ = sep < Real(1e-7);
    if (!quadrature_) {
      residues_.resize(roots_.size());
      for (size_t i = 0; i < roots_.size(); ++i) {
        Scalar dp = p_.back();
        for (size_t k = 0; k < roots_.size(); ++k)
          if (k != i) dp *= roots_[i] - roots_[k];
        residues_[i] = Scalar(1) / dp;
      }
    }
  }

  const std::vector<Scalar>& roots() const { return roots_; }

  // <n|T^{-1}|n+m>
  Scalar coefficient(long m) const {
    if (roots_.empty()) return m == -lo_ ? Scalar(1) / p_[0] : Scalar(0);
    if (quadrature_) return by_quadrature(m);
    const long j = m + lo_;
    Scalar acc(0);
    for (size_t i = 0; i < roots_.size(); ++i) {
      const Scalar r = roots_[i];
      if (std::abs(r) > 1) {
        if (j >= 0) acc -= residues_[i] * ipow(r, -j - 1);
      } else if (j <= -1) {
        acc += residues_[i] * ipow(r, -j - 1);
      }
    }
    return acc;
  }

  Scalar element(long j, long k) const { return coefficient(k - j); }

 private:
  void find_roots() {
    const int d = static_cast<int>(p_.size()) - 1;
    if (d == 0) return;
    if (d == 1) {
      roots_ = {-p_[0] / p_[1]};
      return;
    }
    if (d == 2) {
      const Scalar h = p_[1] / (Real(2) * p_[2]);
      const Scalar big = std::abs(-h + branch_sqrt(h * h - p_[0] / p_[2])) >= std::abs(h)
                             ? -h + branch_sqrt(h * h - p_[0] / p_[2])
                             : -h - branch_sqrt(h * h - p_[0] / p_[2]);
      roots_ = {big, p_[0] / (p_[2] * big)};
      return;
    }
    DenseMatrix<Real> comp = DenseMatrix<Real>::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -p_[i] / p_[d];
    Eigen::ComplexEigenSolver<DenseMatrix<Real>> es(comp, false);
    roots_.assign(es.eigenvalues().data(), es.eigenvalues().data() + d);
  }

  Scalar by_quadrature(long m) const {
    const int N = 1 << 16;
    Scalar acc(0);
    for (int k = 0; k < N; ++k) {
      const Real th = Real(2) * std::numbers::pi_v<Real> * Real(k) / Real(N);
      acc += std::polar(Real(1), -th * Real(m)) / symbol_at_angle(sym_, th);
    }
    return acc / Real(N);
  }

  BandedSymbol<Real> sym_;
  int lo_ = 0;
  std::vector<Scalar> p_;
  std::vector<Scalar> roots_;
  std::vector<Scalar> residues_;
  bool quadrature_ = false;
};

}  // namespace lindblad
