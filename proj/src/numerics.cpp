#include "lindblad/numerics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include <lapacke.h>

namespace lindblad {

namespace {
lapack_complex_double* lp(cd* p) { return reinterpret_cast<lapack_complex_double*>(p); }
}  // namespace

EigenResult dense_eigenvalues(const MatrixXcd& M, bool withResiduals) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw Error(ErrorCode::InvalidInput, "dense_eigenvalues needs a square matrix");
  EigenResult out;
  if (n == 0) return out;
  if (!M.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite matrix entries");

  MatrixXcd A = M;
  VectorXcd w(n);
  MatrixXcd vr;
  if (withResiduals) vr.resize(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', withResiduals ? 'V' : 'N', n, lp(A.data()), n, lp(w.data()), nullptr, 1,
                    withResiduals ? lp(vr.data()) : nullptr, n);
  if (info > 0) throw Error(ErrorCode::NoConvergence, "QR iteration failed at index " + std::to_string(info));
  if (info < 0) throw Error(ErrorCode::InvalidInput, "zgeev argument " + std::to_string(-info));

  out.values.assign(w.data(), w.data() + n);
  if (withResiduals) {
    const double norm = std::max(M.norm(), std::numeric_limits<double>::min());
    out.residuals.resize(n);
    out.flagged.resize(n);
    for (int i = 0; i < n; ++i) {
      const VectorXcd v = vr.col(i);
      out.residuals[i] = (M * v - w(i) * v).norm() / (v.norm() * norm);
      out.flagged[i] = out.residuals[i] > 1e-8;
    }
  }
  return out;
}

// zgesvd rather than Eigen's BDCSVD: the latter returns wrong values for
// block-diagonal complex input above its 16x16 Jacobi cutoff (Eigen 3.4)
double min_singular_value(const MatrixXcd& M) {
  if (M.size() == 0) return 0;
  if (!M.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite matrix entries");
  MatrixXcd A = M;
  const lapack_int m = static_cast<lapack_int>(A.rows()), n = static_cast<lapack_int>(A.cols());
  Eigen::VectorXd s(std::min(m, n));
  Eigen::VectorXd superb(std::max<lapack_int>(1, std::min(m, n) - 1));
  const lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, lp(A.data()), m, s.data(), nullptr, 1,
                                         nullptr, 1, superb.data());
  if (info > 0) throw Error(ErrorCode::NoConvergence, "SVD did not converge");
  if (info < 0) throw Error(ErrorCode::InvalidInput, "zgesvd argument " + std::to_string(-info));
  return s.minCoeff();
}

PseudospectrumField pseudospectrum_grid(const MatrixXcd& M, const Box& box, int nRe, int nIm) {
  if (nRe < 1 || nIm < 1) throw Error(ErrorCode::InvalidInput, "empty pseudospectrum grid");
  PseudospectrumField f;
  f.box = box;
  f.nRe = nRe;
  f.nIm = nIm;
  f.values.resize(nRe, nIm);
  const auto ev = dense_eigenvalues(M, false);
  for (const auto& l : ev.values)
    if (!box.contains(l)) f.boxContainsSpectrum = false;
  const MatrixXcd I = MatrixXcd::Identity(M.rows(), M.cols());
  parallel_for(static_cast<size_t>(nRe) * nIm, [&](size_t idx) {
    const int i = static_cast<int>(idx / nIm), j = static_cast<int>(idx % nIm);
    f.values(i, j) = min_singular_value(M - f.point(i, j) * I);
  });
  return f;
}

namespace {

// uniform bucket grid over a point set for exact nearest-neighbour queries
class BucketGrid {
 public:
  explicit BucketGrid(const Points& pts) : pts_(pts) {
    x0_ = y0_ = std::numeric_limits<double>::infinity();
    double x1 = -x0_, y1 = -y0_;
    for (const auto& p : pts) {
      x0_ = std::min(x0_, p.real());
      x1 = std::max(x1, p.real());
      y0_ = std::min(y0_, p.imag());
      y1 = std::max(y1, p.imag());
    }
    const double W = x1 - x0_, H = y1 - y0_;
    h_ = std::max({W, H, 1e-300}) / 2;
    auto cells = [&](double h) { return std::ceil(W / h + 1e-9) * std::ceil(H / h + 1e-9); };
    while (cells(h_ / 1.5) < 2.0 * double(pts.size()) && h_ > 1e-12) h_ /= 1.5;
    nx_ = std::max(1, static_cast<int>(std::ceil(W / h_ + 1e-9)));
    ny_ = std::max(1, static_cast<int>(std::ceil(H / h_ + 1e-9)));
    start_.assign(static_cast<size_t>(nx_) * ny_ + 1, 0);
    std::vector<int> cellOf(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      cellOf[i] = cell_index(ix(pts[i].real()), iy(pts[i].imag()));
      ++start_[cellOf[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    order_.resize(pts.size());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (size_t i = 0; i < pts.size(); ++i) order_[fill[cellOf[i]]++] = static_cast<int>(i);
  }

  double nearest(cd a) const {
    const int ci = ix(a.real()), cj = iy(a.imag());
    double best = std::numeric_limits<double>::infinity();
    const int rmax = std::max(nx_, ny_);
    for (int r = 0; r <= rmax; ++r) {
      for (int i = ci - r; i <= ci + r; ++i) {
        if (i < 0 || i >= nx_) continue;
        const bool edge = (i == ci - r || i == ci + r);
        for (int j = cj - r; j <= cj + r; j += (edge || r == 0) ? 1 : 2 * r) {
          if (j < 0 || j >= ny_) continue;
          const int c = cell_index(i, j);
          for (int k = start_[c]; k < start_[c + 1]; ++k) best = std::min(best, std::abs(a - pts_[order_[k]]));
        }
      }
      if (best <= r * h_) break;
    }
    return best;
  }

 private:
  int ix(double x) const { return std::clamp(static_cast<int>(std::floor((x - x0_) / h_)), 0, nx_ - 1); }
  int iy(double y) const { return std::clamp(static_cast<int>(std::floor((y - y0_) / h_)), 0, ny_ - 1); }
  int cell_index(int i, int j) const { return i * ny_ + j; }

  const Points& pts_;
  double x0_, y0_, h_;
  int nx_ = 1, ny_ = 1;
  std::vector<int> start_, order_;
};

}  // namespace

double directed_distance(const Points& A, const Points& B) {
  if (A.empty() || B.empty()) throw Error(ErrorCode::EmptySet, "distance to an empty set");
  if (static_cast<double>(A.size()) * static_cast<double>(B.size()) <= 1e6) {
    double s = 0;
    for (const auto& a : A) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& b : B) m = std::min(m, std::abs(a - b));
      s = std::max(s, m);
    }
    return s;
  }
  BucketGrid grid(B);
  std::vector<double> part(A.size());
  parallel_for(A.size(), [&](size_t i) { part[i] = grid.nearest(A[i]); });
  return *std::max_element(part.begin(), part.end());
}

double hausdorff_distance(const Points& A, const Points& B) {
  return std::max(directed_distance(A, B), directed_distance(B, A));
}

NewtonResult newton_roots(const std::function<cd(cd)>& g, const Points& seeds, double tol, int maxIter) {
  NewtonResult out;
  for (const cd s : seeds) {
    cd z = s;
    bool ok = false;
    try {
      for (int it = 0; it < maxIter; ++it) {
        const cd gz = g(z);
        if (!std::isfinite(gz.real()) || !std::isfinite(gz.imag())) break;
        if (std::abs(gz) < tol) {
          ok = true;
          break;
        }
        const double h = 1e-6 * (1 + std::abs(z));
        const cd d = (g(z + h) - g(z - h)) / (2 * h);
        if (d == cd(0)) break;
        z -= gz / d;
      }
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      ++out.nonConverged;
      continue;
    }
    bool dup = false;
    for (const auto& r : out.roots)
      if (std::abs(r - z) < 1e-8) dup = true;
    if (!dup) out.roots.push_back(z);
  }
  return out;
}

int component_count(const Points& pts, double threshold) {
  if (pts.empty()) return 0;
  // snap to a fine lattice first; merged points sit within threshold/64
  const double eps = threshold / 64;
  std::unordered_map<long long, int> seen;
  Points reps;
  for (const auto& p : pts) {
    const long long kx = static_cast<long long>(std::floor(p.real() / eps));
    const long long ky = static_cast<long long>(std::floor(p.imag() / eps));
    const long long key = kx * 4000037LL + ky;
    if (seen.emplace(key, static_cast<int>(reps.size())).second) reps.push_back(p);
  }
  const size_t n = reps.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::unordered_map<long long, std::vector<int>> cells;
  auto key = [](long long i, long long j) { return i * 4000037LL + j; };
  for (size_t i = 0; i < n; ++i)
    cells[key(static_cast<long long>(std::floor(reps[i].real() / threshold)),
              static_cast<long long>(std::floor(reps[i].imag() / threshold)))]
        .push_back(static_cast<int>(i));
  for (size_t i = 0; i < n; ++i) {
    const long long ci = static_cast<long long>(std::floor(reps[i].real() / threshold));
    const long long cj = static_cast<long long>(std::floor(reps[i].imag() / threshold));
    for (long long di = -1; di <= 1; ++di)
      for (long long dj = -1; dj <= 1; ++dj) {
        auto it = cells.find(key(ci + di, cj + dj));
        if (it == cells.end()) continue;
        for (int k : it->second)
          if (std::abs(reps[i] - reps[k]) <= threshold) parent[find(static_cast<int>(i))] = find(k);
      }
  }
  int count = 0;
  for (size_t i = 0; i < n; ++i)
    if (find(static_cast<int>(i)) == static_cast<int>(i)) ++count;
  return count;
}

int thread_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("LINDBLAD_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return std::min(cap, hw);
  }
  return hw;
}

}  // namespace lindblad
