#include "lindblad/model.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

namespace lindblad {

namespace {

constexpr cd I(0, 1);

int span(const SiteVector& v) {
  if (v.empty()) return 0;
  return v.rbegin()->first - v.begin()->first;
}

double norm2(const SiteVector& v) {
  double s = 0;
  for (const auto& [k, a] : v) s += std::norm(a);
  return s;
}

void add(SiteVector& v, int k, cd a) {
  if (a == cd(0)) return;
  v[k] += a;
}

// sqrt(G) sum_{r1,r2} c_{r1} conj(c_{r2}) e^{iq r1} |r2 - r1>
SiteVector gamma_vector(const SiteVector& c, double G, double q) {
  SiteVector out;
  for (const auto& [r1, a1] : c)
    for (const auto& [r2, a2] : c) add(out, r2 - r1, std::sqrt(G) * a1 * std::conj(a2) * std::polar(1.0, q * r1));
  return out;
}

}  // namespace

std::string builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Dephasing: return "dephasing";
    case Builtin::IncoherentHopping: return "incoherent_hopping";
    case Builtin::Exclusion: return "exclusion";
    case Builtin::NonNormal: return "non_normal";
  }
  return "";
}

Builtin parse_builtin(const std::string& name) {
  for (Builtin b : {Builtin::Dephasing, Builtin::IncoherentHopping, Builtin::Exclusion, Builtin::NonNormal})
    if (builtin_name(b) == name) return b;
  throw Error(ErrorCode::InvalidInput, "unknown builtin '" + name + "'");
}

void LindbladModel::validate() const {
  if (!(G > 0) || !std::isfinite(G)) throw Error(ErrorCode::InvalidInput, "G must be positive");
  if (!hamHopping.is_self_adjoint(1e-12)) throw Error(ErrorCode::InvalidInput, "hopping must satisfy h_{-l} = conj(h_l)");
  if (channels.empty()) throw Error(ErrorCode::InvalidInput, "no Lindblad channel");
  for (const auto& c : channels)
    if (norm2(c.phi) == 0 && norm2(c.psi) == 0) throw Error(ErrorCode::InvalidInput, "phi and psi both zero");
  if (range() > 8) throw Error(ErrorCode::InvalidInput, "model range above 8");
}

int LindbladModel::hamiltonian_range() const { return hamHopping.effective_range(0.0); }

int LindbladModel::lindblad_range() const {
  int r = 0;
  for (const auto& c : channels) {
    SiteVector both = c.phi;
    for (const auto& [k, a] : c.psi) both[k] += a;
    r = std::max(r, span(both));
  }
  return r;
}

BandedSymbol<double> nearest_neighbour_hopping() { return BandedSymbol<double>::tridiagonal(-1.0, 0.0, -1.0); }

LindbladModel dephasing(double G) {
  LindbladModel m;
  m.hamHopping = nearest_neighbour_hopping();
  m.channels = {{{{0, 1.0}}, {{0, 1.0}}}};
  m.G = G;
  m.builtin = BuiltinTag{Builtin::Dephasing, 0, 0};
  return m;
}

LindbladModel incoherent_hopping(double G, int l) {
  LindbladModel m;
  m.hamHopping = nearest_neighbour_hopping();
  m.channels = {{{{0, 1.0}}, {{l, 1.0}}}};
  m.G = G;
  m.builtin = BuiltinTag{Builtin::IncoherentHopping, l, 0};
  return m;
}

LindbladModel exclusion(double G) {
  LindbladModel m;
  m.hamHopping = nearest_neighbour_hopping();
  m.channels = {{{{0, 1.0}}, {{1, 1.0}}}, {{{1, 1.0}}, {{0, 1.0}}}};
  m.G = G;
  m.builtin = BuiltinTag{Builtin::Exclusion, 1, 0};
  return m;
}

LindbladModel non_normal(double G, double delta, int l) {
  LindbladModel m;
  m.hamHopping = nearest_neighbour_hopping();
  const cd e = std::polar(1.0, delta);
  m.channels = {{{{0, 1.0}, {l, e}}, {{0, 1.0}, {l, -e}}}};
  m.G = G;
  m.builtin = BuiltinTag{Builtin::NonNormal, l, delta};
  return m;
}

LindbladModel make_builtin(const BuiltinTag& tag, double G) {
  switch (tag.kind) {
    case Builtin::Dephasing: return dephasing(G);
    case Builtin::IncoherentHopping: return incoherent_hopping(G, tag.l);
    case Builtin::Exclusion: return exclusion(G);
    case Builtin::NonNormal: return non_normal(G, tag.delta, tag.l);
  }
  throw Error(ErrorCode::UnsupportedModel, "unknown builtin");
}

BandedSymbol<double> jump_autocorrelation(const LindbladModel& m) {
  BandedSymbol<double> q(std::max(m.lindblad_range(), 0));
  for (const auto& c : m.channels) {
    const double p2 = norm2(c.phi);
    // <x|psi><psi|x+l> summed over translates
    for (const auto& [a, pa] : c.psi)
      for (const auto& [b, pb] : c.psi) q.add(b - a, p2 * pa * std::conj(pb));
  }
  return q;
}

BandedSymbol<double> effective_hopping(const LindbladModel& m) {
  const BandedSymbol<double> q = jump_autocorrelation(m);
  BandedSymbol<double> h = m.hamHopping;
  for (int l = -q.range(); l <= q.range(); ++l) h.add(l, -I * (m.G / 2) * q[l]);
  return h;
}

FiberOperator fiber(const LindbladModel& m, double q, PhaseConvention conv) {
  FiberOperator f;
  f.q = q;
  const BandedSymbol<double> h = effective_hopping(m);
  const int r = h.range();
  const double s = conv == PhaseConvention::Calibrated ? 1.0 : -1.0;
  f.tSymbol = BandedSymbol<double>(r);
  for (int l = -r; l <= r; ++l) f.tSymbol.set(l, -I * h[-l] * std::polar(1.0, s * q * l) + I * std::conj(h[l]));

  const int R = m.lindblad_range();
  f.jumpRadius = R;
  const int w = 2 * R + 1;
  f.jumpBlock = MatrixXcd::Zero(w, w);
  std::vector<std::pair<SiteVector, SiteVector>> parts;
  for (const auto& c : m.channels) {
    SiteVector gl = gamma_vector(c.phi, m.G, q), gr = gamma_vector(c.psi, m.G, q);
    for (const auto& [a, va] : gl)
      for (const auto& [b, vb] : gr) f.jumpBlock(a + R, b + R) += va * std::conj(vb);
    parts.emplace_back(std::move(gl), std::move(gr));
  }
  if (parts.size() == 1) {
    f.gammaL = parts[0].first;
    f.gammaR = parts[0].second;
    return f;
  }
  // summed channels: factor F = sigma u v* when it stays rank one
  Eigen::JacobiSVD<MatrixXcd> svd(f.jumpBlock, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0) return f;
  if (w > 1 && sv(1) > 1e-12 * std::max(1.0, sv(0))) {
    f.rankOne = false;
    return f;
  }
  VectorXcd u = svd.matrixU().col(0), v = svd.matrixV().col(0);
  // fix the phase so the largest entry of v is real positive
  Eigen::Index imax;
  v.cwiseAbs().maxCoeff(&imax);
  const cd ph = std::abs(v(imax)) > 0 ? v(imax) / std::abs(v(imax)) : cd(1);
  v /= ph;
  u /= ph;
  const double tiny = 1e-15 * sv(0);
  for (int a = 0; a < w; ++a) {
    if (std::abs(u(a)) * sv(0) > tiny) f.gammaL[a - R] = sv(0) * u(a);
    if (std::abs(v(a)) > 1e-15) f.gammaR[a - R] = v(a);
  }
  return f;
}

MatrixXcd vectorized_lindbladian(const LindbladModel& m, int n, Boundary bc, const std::vector<double>& V) {
  if (n < 2 * m.range() + 1 || n < 1) throw Error(ErrorCode::SizeTooSmall, "n below 2 * range + 1");
  if (!V.empty() && static_cast<int>(V.size()) != n) throw Error(ErrorCode::InvalidInput, "potential length differs from n");
  const bool per = bc == Boundary::Periodic;
  auto site = [&](long x, int& out) {
    if (per) {
      out = static_cast<int>(((x % n) + n) % n);
      return true;
    }
    if (x < 0 || x >= n) return false;
    out = static_cast<int>(x);
    return true;
  };

  MatrixXcd H = MatrixXcd::Zero(n, n);
  const int hr = m.hamHopping.range();
  for (int x = 0; x < n; ++x)
    for (int l = -hr; l <= hr; ++l) {
      int y;
      if (m.hamHopping[l] != cd(0) && site(x + l, y)) H(x, y) += m.hamHopping[l];
    }
  for (size_t x = 0; x < V.size(); ++x) H(x, x) += V[x];

  const int N = n * n;
  MatrixXcd M = MatrixXcd::Zero(N, N);
  MatrixXcd Q = MatrixXcd::Zero(n, n);
  struct Entry {
    int i, j;
    cd v;
  };
  for (const auto& c : m.channels)
    for (int k = 0; k < n; ++k) {
      std::map<std::pair<int, int>, cd> acc;
      for (const auto& [a, pa] : c.phi)
        for (const auto& [b, pb] : c.psi) {
          int i, j;
          if (site(k + a, i) && site(k + b, j)) acc[{i, j}] += pa * std::conj(pb);
        }
      std::vector<Entry> L;
      for (const auto& [ij, v] : acc)
        if (v != cd(0)) L.push_back({ij.first, ij.second, v});
      for (const auto& e1 : L)
        for (const auto& e2 : L) M(e1.i * n + e2.i, e1.j * n + e2.j) += m.G * e1.v * std::conj(e2.v);
      // L*L
      for (const auto& e1 : L)
        for (const auto& e2 : L)
          if (e1.i == e2.i) Q(e1.j, e2.j) += std::conj(e1.v) * e2.v;
    }

  const MatrixXcd K = -I * H - (m.G / 2) * Q;  // -i H_eff
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (K(i, j) == cd(0)) continue;
      for (int s = 0; s < n; ++s) {
        M(i * n + s, j * n + s) += K(i, j);          // K (x) 1
        M(s * n + i, s * n + j) += std::conj(K(i, j));  // 1 (x) conj(K)
      }
    }
  return M;
}

MatrixXcd transform_Jn(int n) {
  if (n < 2) throw Error(ErrorCode::SizeTooSmall, "transform_Jn needs n >= 2");
  const int N = n * n;
  MatrixXcd J = MatrixXcd::Zero(N, N);
  const double s = 1 / std::sqrt(double(n));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) {
      const cd w = std::polar(s, 2 * std::numbers::pi * double((static_cast<long>(l) * j) % n) / n);
      for (int k = 0; k < n; ++k) J(l * n + ((k - j) % n + n) % n, j * n + k) = w;
    }
  return J;
}

}  // namespace lindblad
