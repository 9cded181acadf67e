#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "lindblad/types.hpp"

namespace lindblad {

struct EigenResult {
  Points values;
  std::vector<double> residuals;  // ||Av - lv|| / ||A||_F, empty when not requested
  std::vector<bool> flagged;      // residual above 1e-8
};

// all eigenvalues; residuals need right eigenvectors and roughly double the cost
EigenResult dense_eigenvalues(const MatrixXcd& M, bool withResiduals = true);

double min_singular_value(const MatrixXcd& M);

struct Box {
  double reMin, reMax, imMin, imMax;
  bool contains(cd z) const {
    return z.real() >= reMin && z.real() <= reMax && z.imag() >= imMin && z.imag() <= imMax;
  }
};

struct PseudospectrumField {
  Box box;
  int nRe = 0, nIm = 0;
  Eigen::MatrixXd values;  // values(i, j) at point(i, j)
  bool boxContainsSpectrum = true;
  cd point(int i, int j) const {
    const double x = nRe > 1 ? box.reMin + (box.reMax - box.reMin) * i / (nRe - 1) : box.reMin;
    const double y = nIm > 1 ? box.imMin + (box.imMax - box.imMin) * j / (nIm - 1) : box.imMin;
    return {x, y};
  }
};

PseudospectrumField pseudospectrum_grid(const MatrixXcd& M, const Box& box, int nRe, int nIm);

// sup_{a in A} inf_{b in B} |a - b|
double directed_distance(const Points& A, const Points& B);
double hausdorff_distance(const Points& A, const Points& B);

struct NewtonResult {
  Points roots;
  int nonConverged = 0;
};

// g may throw lindblad::Error where it is undefined; such seeds count as non-converged
NewtonResult newton_roots(const std::function<cd(cd)>& g, const Points& seeds, double tol, int maxIter = 60);

// connected components of the graph linking points closer than threshold
int component_count(const Points& pts, double threshold);

// LINDBLAD_THREADS caps the pool; defaults to hardware concurrency
int thread_count();

// f(i) for i in [0, n); each index is handled by exactly one worker
template <typename F>
void parallel_for(size_t n, F&& f) {
  const size_t T = std::min<size_t>(static_cast<size_t>(thread_count()), n);
  if (T <= 1) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(T);
  for (size_t t = 0; t < T; ++t)
    pool.emplace_back([&, t] {
      try {
        for (size_t i = t; i < n; i += T) f(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace lindblad
