#include "lindblad/finite.hpp"

#include <cmath>
#include <numbers>

namespace lindblad {

namespace {

constexpr double kPi = std::numbers::pi;

long wrap(long x, long n) { return ((x % n) + n) % n; }

cd root_of_unity(long p, int n) { return std::polar(1.0, 2 * kPi * double(wrap(p, n)) / n); }

void check_size(const LindbladModel& m, int n) {
  if (n < 2 * m.range() + 1) throw Error(ErrorCode::SizeTooSmall, "n below 2 * range + 1");
  if (n <= 4 * m.lindblad_range()) throw Error(ErrorCode::SizeTooSmall, "n must exceed 4 * Lindblad range");
}

cd dft_inverse(const CirculantOperator& c, long j, long k) {
  const auto ev = circulant_eigs(c);
  for (const cd e : ev)
    if (std::abs(e) < 1e-12) throw Error(ErrorCode::Singular, "circulant has an eigenvalue below 1e-12");
  cd acc = 0;
  for (int p = 0; p < c.n; ++p) acc += root_of_unity(long(p) * wrap(j - k, c.n), c.n) / ev[p];
  return acc / double(c.n);
}

cd prime_inverse(const CirculantOperator& c, long j, long k) {
  const int n = c.n;
  if (n < 3 || !is_prime(n)) throw Error(ErrorCode::PrimePathUnavailable, "n is not an odd prime");
  for (int m = 2; m < n - 1; ++m)
    if (c.firstColumn[m] != cd(0)) throw Error(ErrorCode::PrimePathUnavailable, "circulant is not tridiagonal");
  const cd alpha = c.firstColumn[1], beta = c.firstColumn[0], gamma = c.firstColumn[n - 1];
  RootPair<double> rp;
  try {
    rp = ordered_roots(alpha, beta, gamma);
  } catch (const Error& e) {
    throw Error(ErrorCode::PrimePathUnavailable, std::string("no root split: ") + e.what());
  }
  const long d = wrap(k - j, n);
  const cd D = gamma * (rp.lambda2 - rp.lambda1);
  // sum over p of the Laurent inverse coefficients b_{d + p n}
  return (ipow(rp.lambda1, -d) / (1.0 - ipow(rp.lambda1, -n)) + ipow(rp.lambda2, n - d) / (1.0 - ipow(rp.lambda2, n))) / D;
}

}  // namespace

CirculantOperator CirculantOperator::from_symbol(const BandedSymbol<double>& t, int n) {
  if (n < 1) throw Error(ErrorCode::SizeTooSmall, "empty circulant");
  CirculantOperator c;
  c.n = n;
  c.firstColumn.assign(n, cd(0));
  // C_{jk} = t_{k-j} wrapped, so a_m collects t_l with l = -m mod n
  for (int l = -t.range(); l <= t.range(); ++l) c.firstColumn[wrap(-l, n)] += t[l];
  return c;
}

MatrixXcd CirculantOperator::dense() const {
  MatrixXcd A(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) A(j, k) = firstColumn[wrap(j - k, n)];
  return A;
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<cd> circulant_eigs(const CirculantOperator& c) {
  std::vector<cd> ev(c.n);
  for (int p = 0; p < c.n; ++p) {
    cd s = 0;
    for (int m = 0; m < c.n; ++m)
      if (c.firstColumn[m] != cd(0)) s += c.firstColumn[m] * root_of_unity(-long(p) * m, c.n);
    ev[p] = s;
  }
  return ev;
}

cd circulant_inverse_element(const CirculantOperator& c, long j, long k, InversePath path) {
  switch (path) {
    case InversePath::DFT: return dft_inverse(c, j, k);
    case InversePath::Prime: return prime_inverse(c, j, k);
    case InversePath::Auto:
      if (is_prime(c.n)) try {
          return prime_inverse(c, j, k);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::PrimePathUnavailable) throw;
        }
      return dft_inverse(c, j, k);
  }
  return dft_inverse(c, j, k);
}

FiniteFiber finite_fiber(const LindbladModel& m, int n, double q, PhaseConvention conv) {
  check_size(m, n);
  const FiberOperator f = fiber(m, q, conv);
  FiniteFiber ff;
  ff.q = q;
  ff.circ = CirculantOperator::from_symbol(f.tSymbol, n);
  ff.jump = MatrixXcd::Zero(n, n);
  const int R = f.jumpRadius;
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b) ff.jump(wrap(a, n), wrap(b, n)) += f.jumpBlock(a + R, b + R);
  ff.rankOne = f.rankOne;
  ff.gammaL = VectorXcd::Zero(n);
  ff.gammaR = VectorXcd::Zero(n);
  for (const auto& [a, v] : f.gammaL) ff.gammaL(wrap(a, n)) += v;
  for (const auto& [a, v] : f.gammaR) ff.gammaR(wrap(a, n)) += v;
  return ff;
}

cd finite_secular_value(const FiniteFiber& f, cd z) {
  if (!f.rankOne) throw Error(ErrorCode::RankTooHigh, "fiber jump term has rank above one");
  CirculantOperator s = f.circ;
  s.firstColumn[0] -= z;
  cd g = 1;
  for (int a = 0; a < s.n; ++a) {
    if (f.gammaR(a) == cd(0)) continue;
    for (int b = 0; b < s.n; ++b)
      if (f.gammaL(b) != cd(0)) g += std::conj(f.gammaR(a)) * circulant_inverse_element(s, a, b) * f.gammaL(b);
  }
  return g;
}

std::vector<cd> finite_fiber_eigs(const LindbladModel& m, int n, int k) {
  return dense_eigenvalues(finite_fiber(m, n, 2 * kPi * double(k) / n).dense(), false).values;
}

SpectrumCloud finite_spectrum(const LindbladModel& m, int n, Boundary bc, const std::vector<double>& V, long cap) {
  if (n < 1) throw Error(ErrorCode::SizeTooSmall, "n must be positive");
  if (static_cast<long>(n) * n > cap) throw Error(ErrorCode::SizeTooLarge, "n^2 above the size cap");
  SpectrumCloud c;
  if (bc == Boundary::Periodic && V.empty()) {
    std::vector<std::vector<cd>> per(n);
    parallel_for(n, [&](size_t k) { per[k] = finite_fiber_eigs(m, n, static_cast<int>(k)); });
    for (int k = 0; k < n; ++k)
      for (const cd z : per[k]) c.points.push_back({z, PointTag::EIG, 2 * kPi * k / n, NAN});
    return c;
  }
  const auto ev = dense_eigenvalues(vectorized_lindbladian(m, n, bc, V), false);
  for (const cd z : ev.values) c.points.push_back({z, PointTag::EIG, NAN, NAN});
  return c;
}

EquivalenceReport equivalence_report(const LindbladModel& m, int n, PhaseConvention conv) {
  check_size(m, n);
  const MatrixXcd J = transform_Jn(n);
  const MatrixXcd B = J * vectorized_lindbladian(m, n, Boundary::Periodic) * J.adjoint();
  EquivalenceReport r;
  for (int l = 0; l < n; ++l) {
    const MatrixXcd F = finite_fiber(m, n, 2 * kPi * l / n, conv).dense();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n * n; ++b) {
        const int lb = b / n;
        if (lb == l)
          r.blockDiff = std::max(r.blockDiff, std::abs(B(l * n + a, b) - F(a, b % n)));
        else
          r.offBlock = std::max(r.offBlock, std::abs(B(l * n + a, b)));
      }
  }
  return r;
}

double equivalence_check(const LindbladModel& m, int n) { return equivalence_report(m, n).residual(); }

ConvergenceStudy convergence_study(const LindbladModel& m, const std::vector<int>& sizes, const Points& reference,
                                   Boundary bc) {
  for (size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw Error(ErrorCode::InvalidInput, "sizes must increase");
  ConvergenceStudy s;
  for (const int n : sizes) {
    const double d = hausdorff_distance(finite_spectrum(m, n, bc).values(), reference);
    if (!s.rows.empty() && d > s.rows.back().distance) s.decreasing = false;
    s.rows.push_back({n, d});
  }
  return s;
}

GapScaling gap_scaling(double G, const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw Error(ErrorCode::InvalidInput, "need at least two sizes");
  const LindbladModel m = dephasing(G);
  GapScaling g;
  g.sizes = sizes;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const int n : sizes) {
    double best = -INFINITY;
    for (const cd z : jump_roots(m, 2 * kPi / n))
      if (std::abs(z) > 0) best = std::max(best, z.real());
    if (!std::isfinite(best)) throw Error(ErrorCode::NoConvergence, "no jump root at q = 2 pi / n");
    g.gaps.push_back(std::abs(best));
    const double x = std::log(double(n)), y = std::log(std::abs(best));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = double(sizes.size());
  g.fitExponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  g.fitConstant = std::exp((sy - g.fitExponent * sx) / k);
  g.scaledConstant = g.gaps.back() * double(sizes.back()) * sizes.back();
  g.heuristicConstant = 16 * kPi * kPi / G;
  g.ratio = g.scaledConstant / g.heuristicConstant;
  return g;
}

}  // namespace lindblad
