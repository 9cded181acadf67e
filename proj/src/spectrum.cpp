#include "lindblad/spectrum.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include <Eigen/LU>

namespace lindblad {

namespace {

constexpr double kPi = std::numbers::pi;

BandedSymbol<double> shifted(const BandedSymbol<double>& t, cd z) {
  BandedSymbol<double> s = t;
  s.add(0, -z);
  return s;
}

bool single_site(const FiberOperator& f) {
  return f.rankOne && f.tSymbol.range() <= 1 && f.gammaL.size() == 1 && f.gammaR.size() == 1 &&
         f.gammaL.begin()->first == 0 && f.gammaR.begin()->first == 0;
}

double fnorm(const SiteVector& v) {
  double s = 0;
  for (const auto& [k, a] : v) s += std::norm(a);
  return std::sqrt(s);
}

// bounding box of W(T(q)) + W(F(q)); T(q) is normal, so W(T) is the hull of its curve
Box numerical_range_box(const FiberOperator& f) {
  Box b{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const cd z : symbol_curve(f.tSymbol, 64)) {
    b.reMin = std::min(b.reMin, z.real());
    b.reMax = std::max(b.reMax, z.real());
    b.imMin = std::min(b.imMin, z.imag());
    b.imMax = std::max(b.imMax, z.imag());
  }
  const double r = f.jumpBlock.size() ? f.jumpBlock.norm() : fnorm(f.gammaL) * fnorm(f.gammaR);
  b.reMin -= r;
  b.reMax += r;
  b.imMin -= r;
  b.imMax += r;
  return b;
}

Points coarse_seeds(const FiberOperator& f) {
  const Box b = numerical_range_box(f);
  Points s;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 5; ++j)
      s.emplace_back(b.reMin + (b.reMax - b.reMin) * (i + 0.5) / 8, b.imMin + (b.imMax - b.imMin) * (j + 0.5) / 5);
  return s;
}

cd secular(const FiberOperator& f, cd z) { return f.rankOne ? secular_value(f, z) : secular_determinant(f, z); }

Points roots_of_fiber(const FiberOperator& f, const Points& extraSeeds) {
  Points out;
  if (f.rankOne && (f.gammaL.empty() || f.gammaR.empty())) return out;
  if (single_site(f)) {
    const cd alpha = f.tSymbol[-1], beta = f.tSymbol[0], gamma = f.tSymbol[1];
    const cd c = std::conj(f.gammaR.begin()->second) * f.gammaL.begin()->second;
    const cd w = std::sqrt(c * c + 4.0 * alpha * gamma);
    for (const cd z : {beta + w, beta - w}) {
      try {
        if (std::abs(secular_value(f, z)) < 1e-9 &&
            std::none_of(out.begin(), out.end(), [&](cd r) { return std::abs(r - z) < 1e-8; }))
          out.push_back(z);
      } catch (const Error&) {
      }
    }
    return out;
  }
  Points seeds = extraSeeds;
  const Points coarse = coarse_seeds(f);
  seeds.insert(seeds.end(), coarse.begin(), coarse.end());
  return newton_roots([&](cd z) { return secular(f, z); }, seeds, 1e-11).roots;
}

double set_step(const Points& a, const Points& b) {
  if (a.empty() && b.empty()) return 0;
  if (a.size() != b.size()) return INFINITY;
  return hausdorff_distance(a, b);
}

struct Sample {
  double q;
  Points roots;
};

void refine(const LindbladModel& m, const Sample& a, const Sample& b, int depth, const JumpOptions& opt,
            std::vector<Sample>& extra) {
  if (depth >= opt.maxDepth || static_cast<int>(extra.size()) >= opt.maxExtraPerInterval) return;
  if (b.q - a.q < 1e-13) return;
  if (set_step(a.roots, b.roots) <= opt.maxStep) return;
  Points seeds = a.roots;
  seeds.insert(seeds.end(), b.roots.begin(), b.roots.end());
  Sample mid{0.5 * (a.q + b.q), {}};
  mid.roots = jump_roots(m, mid.q, seeds);
  extra.push_back(mid);
  refine(m, a, mid, depth + 1, opt, extra);
  refine(m, mid, b, depth + 1, opt, extra);
}

double seg_dist(cd z, cd a, cd b) {
  const cd d = b - a;
  const double n2 = std::norm(d);
  if (n2 == 0) return std::abs(z - a);
  const double t = std::clamp(((z - a) * std::conj(d)).real() / n2, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

void sample_segment(cd a, cd b, double spacing, Points& out) {
  const int k = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / spacing)));
  for (int i = 0; i <= k; ++i) out.push_back(a + (b - a) * (double(i) / k));
}

}  // namespace

std::string tag_name(PointTag t) {
  switch (t) {
    case PointTag::NHE: return "NHE";
    case PointTag::JUMP: return "JUMP";
    case PointTag::EIG: return "EIG";
  }
  return "";
}

PointTag parse_tag(const std::string& s) {
  if (s == "NHE") return PointTag::NHE;
  if (s == "JUMP") return PointTag::JUMP;
  if (s == "EIG") return PointTag::EIG;
  throw Error(ErrorCode::InvalidInput, "unknown tag '" + s + "'");
}

Points SpectrumCloud::values() const {
  Points v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(p.z);
  return v;
}

void SpectrumCloud::append(const SpectrumCloud& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  failures += other.failures;
}

void SpectrumCloud::sort() {
  std::stable_sort(points.begin(), points.end(), [](const CloudPoint& a, const CloudPoint& b) {
    const double qa = std::isnan(a.q) ? -INFINITY : a.q, qb = std::isnan(b.q) ? -INFINITY : b.q;
    if (qa != qb) return qa < qb;
    const double ta = std::isnan(a.theta) ? -INFINITY : a.theta, tb = std::isnan(b.theta) ? -INFINITY : b.theta;
    return ta < tb;
  });
}

SpectrumCloud nhe_spectrum(const LindbladModel& m, int nQ, int nTheta) {
  if (nQ < 4 || nTheta < 4) throw Error(ErrorCode::InvalidInput, "nQ and nTheta must be at least 4");
  SpectrumCloud c;
  c.points.resize(static_cast<size_t>(nQ) * nTheta);
  parallel_for(nQ, [&](size_t k) {
    const double q = 2 * kPi * double(k) / nQ;
    const FiberOperator f = fiber(m, q);
    for (int j = 0; j < nTheta; ++j) {
      const double th = 2 * kPi * double(j) / nTheta;
      c.points[k * nTheta + j] = {symbol_at_angle(f.tSymbol, th), PointTag::NHE, q, th};
    }
  });
  return c;
}

cd secular_value(const FiberOperator& f, cd z) {
  if (!f.rankOne) throw Error(ErrorCode::RankTooHigh, "fiber jump term has rank above one");
  if (f.gammaL.empty() || f.gammaR.empty()) return 1;
  const LaurentInverse<double> inv(shifted(f.tSymbol, z));
  cd g = 1;
  for (const auto& [a, ra] : f.gammaR)
    for (const auto& [b, lb] : f.gammaL) g += std::conj(ra) * inv.element(a, b) * lb;
  return g;
}

cd secular_determinant(const FiberOperator& f, cd z) {
  const int R = f.jumpRadius, w = 2 * R + 1;
  if (f.jumpBlock.size() == 0 || f.jumpBlock.norm() == 0) return 1;
  const LaurentInverse<double> inv(shifted(f.tSymbol, z));
  MatrixXcd Rw(w, w);
  for (int a = 0; a < w; ++a)
    for (int b = 0; b < w; ++b) Rw(a, b) = inv.element(a - R, b - R);
  // det(1 + R F) on the window, F = jumpBlock
  return (MatrixXcd::Identity(w, w) + Rw * f.jumpBlock).determinant();
}

Points jump_roots(const LindbladModel& m, double q, const Points& extraSeeds) {
  return roots_of_fiber(fiber(m, q), extraSeeds);
}

SpectrumCloud jump_curve(const LindbladModel& m, int nQ, const JumpOptions& opt) {
  if (nQ < 8) throw Error(ErrorCode::InvalidInput, "nQ must be at least 8");
  std::vector<Sample> grid(nQ + 1);
  std::vector<int> failed(nQ + 1, 0);
  auto solve = [&](size_t k, const Points& seeds) {
    const double q = 2 * kPi * double(k) / nQ;
    try {
      grid[k] = {q, jump_roots(m, q, seeds)};
      failed[k] = 0;
    } catch (const Error&) {
      grid[k] = {q, {}};
      failed[k] = 1;
    }
  };
  parallel_for(nQ, [&](size_t k) { solve(k, {}); });
  // continuation pass: neighbours' roots as extra seeds
  if (!single_site(fiber(m, 0.3))) {
    const std::vector<Sample> first = grid;
    parallel_for(nQ, [&](size_t k) {
      Points seeds = first[(k + nQ - 1) % nQ].roots;
      const Points& nb = first[(k + 1) % nQ].roots;
      seeds.insert(seeds.end(), nb.begin(), nb.end());
      Points before = first[k].roots;
      solve(k, seeds);
      for (const cd r : before)
        if (std::none_of(grid[k].roots.begin(), grid[k].roots.end(), [&](cd x) { return std::abs(x - r) < 1e-8; }))
          grid[k].roots.push_back(r);
    });
  }
  grid[nQ] = {2 * kPi, grid[0].roots};

  std::vector<std::vector<Sample>> extra(nQ);
  if (opt.refine)
    parallel_for(nQ, [&](size_t k) {
      try {
        refine(m, grid[k], grid[k + 1], 0, opt, extra[k]);
      } catch (const Error&) {
      }
    });

  SpectrumCloud c;
  for (int k = 0; k < nQ; ++k) {
    c.failures += failed[k];
    for (const cd z : grid[k].roots) c.points.push_back({z, PointTag::JUMP, grid[k].q, NAN});
    for (const auto& s : extra[k])
      for (const cd z : s.roots) c.points.push_back({z, PointTag::JUMP, s.q, NAN});
  }
  c.sort();
  return c;
}

SpectrumCloud full_spectrum(const LindbladModel& m, int nQ, int nTheta, const JumpOptions& opt) {
  SpectrumCloud c = nhe_spectrum(m, nQ, nTheta);
  c.append(jump_curve(m, nQ, opt));
  return c;
}

bool Component::contains(cd z, double tol) const {
  switch (kind) {
    case Kind::Segment: return seg_dist(z, vertices[0], vertices[1]) <= tol;
    case Kind::Rectangle: {
      const double x0 = std::min(vertices[0].real(), vertices[1].real()), x1 = std::max(vertices[0].real(), vertices[1].real());
      const double y0 = std::min(vertices[0].imag(), vertices[1].imag()), y1 = std::max(vertices[0].imag(), vertices[1].imag());
      return z.real() >= x0 - tol && z.real() <= x1 + tol && z.imag() >= y0 - tol && z.imag() <= y1 + tol;
    }
    case Kind::Polygon: {
      const size_t n = vertices.size();
      bool inside = true;
      for (size_t i = 0; i < n; ++i) {
        const cd a = vertices[i], b = vertices[(i + 1) % n];
        const double cross = ((b - a) * std::conj(z - a)).imag();  // negative when z is left of a->b
        if (-cross < -1e-15 * std::abs(b - a)) inside = false;
      }
      if (inside) return true;
      for (size_t i = 0; i < n; ++i)
        if (seg_dist(z, vertices[i], vertices[(i + 1) % n]) <= tol) return true;
      return false;
    }
    case Kind::Curve: {
      for (size_t i = 0; i + 1 < curve.size(); ++i)
        if (seg_dist(z, curve[i], curve[i + 1]) <= curveTol + tol) return true;
      return curve.size() == 1 && std::abs(z - curve[0]) <= curveTol + tol;
    }
  }
  return false;
}

Points Component::sample(double spacing) const {
  Points out;
  switch (kind) {
    case Kind::Segment: sample_segment(vertices[0], vertices[1], spacing, out); break;
    case Kind::Rectangle:
    case Kind::Polygon: {
      Points poly = vertices;
      if (kind == Kind::Rectangle)
        poly = {vertices[0], cd(vertices[1].real(), vertices[0].imag()), vertices[1], cd(vertices[0].real(), vertices[1].imag())};
      double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
      for (const cd v : poly) {
        x0 = std::min(x0, v.real());
        x1 = std::max(x1, v.real());
        y0 = std::min(y0, v.imag());
        y1 = std::max(y1, v.imag());
      }
      for (size_t i = 0; i < poly.size(); ++i) sample_segment(poly[i], poly[(i + 1) % poly.size()], spacing, out);
      Component shape;
      shape.kind = Kind::Polygon;
      shape.vertices = poly;
      if (kind == Kind::Rectangle) shape.vertices = {poly[0], poly[1], poly[2], poly[3]};
      for (double x = x0; x <= x1; x += spacing)
        for (double y = y0; y <= y1; y += spacing)
          if (kind == Kind::Rectangle || shape.contains(cd(x, y), 0)) out.emplace_back(x, y);
      break;
    }
    case Kind::Curve:
      for (size_t i = 0; i + 1 < curve.size(); ++i) {
        Points seg;
        sample_segment(curve[i], curve[i + 1], spacing, seg);
        out.insert(out.end(), seg.begin(), seg.end() - 1);
      }
      if (!curve.empty()) out.push_back(curve.back());
      break;
  }
  return out;
}

bool ClosedFormSpectrum::contains(cd z, double tol) const {
  return std::any_of(components.begin(), components.end(), [&](const Component& c) { return c.contains(z, tol); });
}

Points ClosedFormSpectrum::sample(double spacing) const {
  Points out;
  for (const auto& c : components) {
    const Points s = c.sample(spacing);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

ClosedFormSpectrum closed_form_spectrum(const BuiltinTag& tag, double G) {
  if (!(G > 0)) throw Error(ErrorCode::InvalidInput, "G must be positive");
  auto segment = [](cd a, cd b) {
    Component c;
    c.kind = Component::Kind::Segment;
    c.vertices = {a, b};
    return c;
  };
  ClosedFormSpectrum s;
  switch (tag.kind) {
    case Builtin::Dephasing: {
      s.components.push_back(segment(cd(-G, -4), cd(-G, 4)));
      const double lo = G <= 4 ? -G : -G + std::sqrt(G * G - 16);
      s.components.push_back(segment(lo, 0.0));
      return s;
    }
    case Builtin::Exclusion:
      s.components.push_back(segment(-2 * G, 0.0));
      s.components.push_back(segment(cd(-2 * G, -4), cd(-2 * G, 4)));
      return s;
    case Builtin::IncoherentHopping: {
      s.components.push_back(segment(cd(-G, -4), cd(-G, 4)));
      // z = -G +- sqrt(G^2 e^{-2iql} + 8(cos q - 1)), sign fixed per q by the secular residual
      const LindbladModel m = incoherent_hopping(G, tag.l);
      const int nQ = 1 << 13;
      std::vector<Points> per(nQ + 1);
      parallel_for(nQ + 1, [&](size_t k) {
        const double q = 2 * kPi * double(k) / nQ;
        const FiberOperator f = fiber(m, q);
        const cd w = std::sqrt(G * G * std::polar(1.0, -2.0 * q * tag.l) + 8.0 * (std::cos(q) - 1));
        for (const cd z : {-G + w, -G - w}) try {
            if (std::abs(secular_value(f, z)) < 1e-9) per[k].push_back(z);
          } catch (const Error&) {
          }
      });
      Points pts;
      for (const auto& p : per)
        if (p.size() == 1) pts.push_back(p[0]);
      // split where the curve leaves through sigma(T(q)) and re-enters elsewhere
      std::vector<double> steps;
      for (size_t i = 0; i + 1 < pts.size(); ++i) steps.push_back(std::abs(pts[i + 1] - pts[i]));
      std::vector<double> sorted = steps;
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
      const double cut = 20 * std::max(sorted[sorted.size() / 2], 1e-6);
      Component c;
      c.kind = Component::Kind::Curve;
      for (size_t i = 0; i < pts.size(); ++i) {
        c.curve.push_back(pts[i]);
        if (i + 1 == pts.size() || steps[i] > cut) {
          for (size_t k = 0; k + 1 < c.curve.size(); ++k)
            c.curveTol = std::max(c.curveTol, std::abs(c.curve[k + 1] - c.curve[k]));
          s.components.push_back(c);
          c.curve.clear();
          c.curveTol = 0;
        }
      }
      return s;
    }
    case Builtin::NonNormal: {
      const double d = std::remainder(tag.delta, 2 * kPi);
      if (tag.l != 1 || (std::abs(d) > 1e-12 && std::abs(std::abs(d) - kPi) > 1e-12))
        throw Error(ErrorCode::UnsupportedModel, "closed form only for l = 1 and delta in {0, pi}");
      // -4G + G(x+y) + i(x-y) over x, y in [-2, 2]
      Component c;
      c.kind = Component::Kind::Polygon;
      c.vertices = {cd(-8 * G, 0), cd(-4 * G, -4), cd(0, 0), cd(-4 * G, 4)};
      s.components.push_back(c);
      return s;
    }
  }
  throw Error(ErrorCode::UnsupportedModel, "no closed form");
}

VectorXcd jump_eigenvector(const FiberOperator& f, cd z, int kMax) {
  const LaurentInverse<double> inv(shifted(f.tSymbol, z));
  VectorXcd v = VectorXcd::Zero(2 * kMax + 1);
  for (int k = -kMax; k <= kMax; ++k)
    for (const auto& [b, lb] : f.gammaL) v(k + kMax) += inv.element(k, b) * lb;
  return v;
}

GapReport gap_report(const SpectrumCloud& cloud, double exclusionRadius) {
  if (cloud.points.empty()) throw Error(ErrorCode::EmptySet, "empty cloud");
  GapReport r;
  r.supRe = -INFINITY;
  bool any = false;
  for (const auto& p : cloud.points) {
    if (std::abs(p.z) <= exclusionRadius) {
      ++r.nearZeroCount;
    } else {
      r.supRe = std::max(r.supRe, p.z.real());
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::EmptySet, "no point outside the exclusion radius");
  return r;
}

}  // namespace lindblad
