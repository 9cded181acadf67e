#pragma once

// Reference computations used only by the tests. Deliberately naive.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace oracle {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

// Fourier coefficient (1/2pi) int e^{-i m th} / a(e^{i th}) dth, trapezoid
template <typename F>
cd inverse_symbol_coefficient(F a, long m, int N = 1 << 14) {
  cd acc = 0;
  for (int k = 0; k < N; ++k) {
    const double th = 2 * pi * k / N;
    acc += std::polar(1.0, -th * double(m)) / a(th);
  }
  return acc / double(N);
}

// column k of the inverse of the N x N finite section of a tridiagonal
// Laurent operator (sub = alpha, diag = beta, super = gamma)
inline Eigen::VectorXcd truncated_tridiag_column(cd alpha, cd beta, cd gamma, int N, int k) {
  Eigen::SparseMatrix<cd> T(N, N);
  std::vector<Eigen::Triplet<cd>> trip;
  for (int i = 0; i < N; ++i) {
    trip.emplace_back(i, i, beta);
    if (i > 0) trip.emplace_back(i, i - 1, alpha);
    if (i + 1 < N) trip.emplace_back(i, i + 1, gamma);
  }
  T.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<cd>> lu;
  lu.compute(T);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(N);
  e(k) = 1;
  return lu.solve(e);
}

inline std::vector<cd> eigen_dense_eigs(const Eigen::MatrixXcd& M) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

// greedy multiset matching, returns the largest matched distance
// (infinity on size mismatch)
inline double multiset_distance(std::vector<cd> a, std::vector<cd> b) {
  if (a.size() != b.size()) return INFINITY;
  auto key = [](cd x, cd y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); };
  std::sort(a.begin(), a.end(), key);
  std::vector<bool> used(b.size(), false);
  double worst = 0;
  for (const auto& x : a) {
    double best = INFINITY;
    size_t bi = 0;
    for (size_t j = 0; j < b.size(); ++j)
      if (!used[j] && std::abs(x - b[j]) < best) {
        best = std::abs(x - b[j]);
        bi = j;
      }
    used[bi] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

inline double brute_hausdorff(const std::vector<cd>& a, const std::vector<cd>& b) {
  auto one = [](const std::vector<cd>& x, const std::vector<cd>& y) {
    double s = 0;
    for (const auto& p : x) {
      double m = INFINITY;
      for (const auto& q : y) m = std::min(m, std::abs(p - q));
      s = std::max(s, m);
    }
    return s;
  };
  return std::max(one(a, b), one(b, a));
}

}  // namespace oracle
