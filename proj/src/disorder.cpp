#include "lindblad/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

namespace lindblad {

namespace {

// 53-bit uniform in [0, 1); same bits on every standard library
double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// G |c|^2 for channels L_k = c |k><k|, otherwise UnsupportedModel
double dephasing_rate(const LindbladModel& m) {
  if (m.channels.size() != 1) throw Error(ErrorCode::UnsupportedModel, "numerical range bound needs one channel");
  const Channel& ch = m.channels.front();
  if (ch.phi.size() != 1 || ch.psi.size() != 1 || ch.phi.begin()->first != ch.psi.begin()->first)
    throw Error(ErrorCode::UnsupportedModel, "numerical range bound needs a single-site dephasing channel");
  return m.G * std::norm(ch.phi.begin()->second * std::conj(ch.psi.begin()->second));
}

}  // namespace

DisorderRealization DisorderRealization::draw(int n, double lambda, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::SizeTooSmall, "empty realization");
  if (!(lambda >= 0)) throw Error(ErrorCode::InvalidInput, "lambda must be non-negative");
  DisorderRealization r{n, lambda, seed, {}};
  std::mt19937_64 rng(seed);
  r.values.resize(n);
  for (double& v : r.values) v = lambda * (2 * unit_uniform(rng) - 1);
  return r;
}

LindbladModel exactly_solvable_model(double G) {
  LindbladModel m = dephasing(G);
  m.hamHopping = BandedSymbol<double>();
  m.builtin.reset();
  return m;
}

std::vector<cd> exact_solvable_spectrum(const DisorderRealization& V, double G) {
  std::vector<cd> out(V.values.size(), cd(0));
  for (size_t i = 0; i < V.values.size(); ++i)
    for (size_t j = 0; j < V.values.size(); ++j)
      if (i != j) out.emplace_back(-G, V.values[i] - V.values[j]);
  return out;
}

double range_bound_f(double a, double lambda) {
  if (!(a >= 0 && a <= 1)) throw Error(ErrorCode::InvalidInput, "a must lie in [0, 1]");
  if (!(lambda >= 0)) throw Error(ErrorCode::InvalidInput, "lambda must be non-negative");
  return 4 * (1 - a + 2 * std::sqrt(a) * std::sqrt(1 - a)) + (1 - a) * lambda;
}

RangeSample range_value(const LindbladModel& m, const std::vector<double>& V, const MatrixXcd& rho) {
  const double g = dephasing_rate(m);
  const int n = int(rho.rows());
  if (rho.cols() != n) throw Error(ErrorCode::InvalidInput, "rho must be square");
  if (!V.empty() && int(V.size()) != n) throw Error(ErrorCode::InvalidInput, "potential length must equal n");
  const auto& h = m.hamHopping;
  auto wrap = [n](int x) { return ((x % n) + n) % n; };

  // K rho - rho K with K_{i,i+l} = h_l on the ring
  MatrixXcd comm = MatrixXcd::Zero(n, n);
  for (int l = -h.range(); l <= h.range(); ++l) {
    if (h[l] == cd(0)) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) comm(i, j) += h[l] * (rho(wrap(i + l), j) - rho(i, wrap(j - l)));
  }
  if (!V.empty())
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) comm(i, j) += (V[i] - V[j]) * rho(i, j);

  const MatrixXcd D = rho.diagonal().asDiagonal();
  const MatrixXcd L = cd(0, -1) * comm + g * (D - rho);
  return {(rho.conjugate().cwiseProduct(L)).sum(), rho.diagonal().squaredNorm()};
}

std::vector<RangeSample> numerical_range_sample(const LindbladModel& m, int n, const std::vector<double>& V,
                                                int nSamples, std::uint64_t seed) {
  dephasing_rate(m);
  if (n < 2) throw Error(ErrorCode::SizeTooSmall, "need at least two sites");
  if (nSamples < 0) throw Error(ErrorCode::InvalidInput, "negative sample count");
  std::vector<RangeSample> out(nSamples);
  parallel_for(size_t(nSamples), [&](size_t s) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(s), std::uint32_t(s >> 32)};
    std::mt19937_64 rng(seq);
    auto gauss = [&] {
      // Box-Muller on the portable uniform
      const double u = 1 - unit_uniform(rng), v = unit_uniform(rng);
      return std::polar(std::sqrt(-std::log(u)), 2 * std::numbers::pi * v);
    };
    const double a = unit_uniform(rng);
    MatrixXcd diag = MatrixXcd::Zero(n, n), off = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) (i == j ? diag : off)(i, j) = gauss();
    const MatrixXcd rho = std::sqrt(a) * diag / diag.norm() + std::sqrt(1 - a) * off / off.norm();
    out[s] = range_value(m, V, rho);
  });
  return out;
}

std::vector<double> numerical_range_support(const MatrixXcd& M, int nAngles) {
  if (nAngles < 3) throw Error(ErrorCode::InvalidInput, "need at least three angles");
  std::vector<double> h(nAngles);
  for (int k = 0; k < nAngles; ++k) {
    const cd w = std::polar(1.0, -2 * std::numbers::pi * k / nAngles);
    const MatrixXcd R = w * M;
    const MatrixXcd Hm = (R + R.adjoint()) / 2.0;
    h[k] = Eigen::SelfAdjointEigenSolver<MatrixXcd>(Hm, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  }
  return h;
}

bool KunzReport::all_contained() const {
  return std::all_of(rows.begin(), rows.end(), [](const KunzRow& r) { return r.contained; });
}

KunzReport kunz_containment(const LindbladModel& m, int n, double lambda, const std::vector<std::uint64_t>& seeds,
                            int nAngles) {
  const MatrixXcd L0 = vectorized_lindbladian(m, n, Boundary::Periodic);
  const std::vector<double> h = numerical_range_support(L0, nAngles);
  const Points clean = dense_eigenvalues(L0, false).values;

  KunzReport rep;
  rep.n = n;
  rep.lambda = lambda;
  rep.nAngles = nAngles;
  rep.rows.resize(seeds.size());
  parallel_for(seeds.size(), [&](size_t s) {
    const auto V = DisorderRealization::draw(n, lambda, seeds[s]);
    const Points ev = dense_eigenvalues(vectorized_lindbladian(m, n, Boundary::Periodic, V.values), false).values;
    double excess = -INFINITY;
    for (int k = 0; k < nAngles; ++k) {
      const double phi = 2 * std::numbers::pi * k / nAngles;
      const cd w = std::polar(1.0, -phi);
      const double bound = h[k] + 2 * lambda * std::abs(std::sin(phi));
      for (const cd z : ev) excess = std::max(excess, (w * z).real() - bound);
    }
    rep.rows[s] = {seeds[s], excess, excess <= 1e-6, directed_distance(clean, ev)};
  });
  return rep;
}

}  // namespace lindblad
