// End-to-end checks with fixed tolerances. One line per criterion, exit status
// is the number of failing criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lindblad/cloud_io.hpp"
#include "lindblad/disorder.hpp"
#include "lindblad/finite.hpp"
#include "lindblad/model.hpp"
#include "lindblad/numerics.hpp"
#include "lindblad/spectrum.hpp"
#include "oracles.hpp"

using namespace lindblad;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double limitSeconds;
  std::function<void(Outcome&)> body;
};

std::string num(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

Points conjugated(const Points& p) {
  Points c;
  c.reserve(p.size());
  for (const cd z : p) c.push_back(std::conj(z));
  return c;
}

void dephasing_closed_form(Outcome& o) {
  const auto cloud = full_spectrum(dephasing(2), 1024, 1024);
  const double d = hausdorff_distance(cloud.values(), closed_form_spectrum({Builtin::Dephasing}, 2).sample(1e-3));
  o.detail << "G=2 d_H=" << d;
  o.require(d < 0.02, "d_H < 0.02");

  const auto c5 = full_spectrum(dephasing(5), 1024, 1024);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : c5.points)
    if (p.tag == PointTag::JUMP && std::abs(p.z.imag()) <= 1e-9) {
      lo = std::min(lo, p.z.real());
      hi = std::max(hi, p.z.real());
    }
  o.detail << "; G=5 real component [" << lo << ", " << hi << "]";
  o.require(std::abs(lo + 2) <= 1e-9, "left endpoint -2");
  o.require(std::abs(hi) <= 1e-9, "right endpoint 0");
}

void connectivity(Outcome& o) {
  const std::vector<std::pair<double, int>> cases{{3.5, 1}, {4.0, 1}, {4.5, 2}};
  for (const auto& [G, expected] : cases) {
    const int k = component_count(full_spectrum(dephasing(G), 1024, 1024).values(), 0.05);
    o.detail << "G=" << G << ":" << k << " ";
    o.require(k == expected, "component count at G=" + num(G));
  }
}

void finite_equivalence(Outcome& o) {
  double worstResidual = 0, worstMultiset = 0;
  for (const auto& m : {dephasing(1), incoherent_hopping(1, 1), exclusion(1), non_normal(1, 0, 1)})
    for (const int n : {5, 6, 7}) {
      worstResidual = std::max(worstResidual, equivalence_check(m, n));
      const Points fibers = finite_spectrum(m, n, Boundary::Periodic).values();
      const Points dense = dense_eigenvalues(vectorized_lindbladian(m, n, Boundary::Periodic), false).values;
      worstMultiset = std::max(worstMultiset, oracle::multiset_distance(fibers, dense));
    }
  o.detail << "max residual=" << worstResidual << " max multiset distance=" << worstMultiset;
  o.require(worstResidual < 1e-10, "residual < 1e-10");
  o.require(worstMultiset < 1e-8, "fiber union = dense spectrum to 1e-8");
}

void laurent_inverse(Outcome& o) {
  const cd worked = tridiag_inverse_element<double>(1, -2.5, 1, 0, 0);
  const auto col = oracle::truncated_tridiag_column(1, -2.5, 1, 2000, 1000);
  o.detail << "worked value " << worked.real() << "; ";
  o.require(std::abs(worked + 2.0 / 3) < 1e-12, "worked value -2/3");
  o.require(std::abs(col(1000) + 2.0 / 3) < 1e-8, "worked value against truncated solve");

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const cd l1 = std::polar(1.1 + 2 * u(rng), 2 * kPi * u(rng));
    const cd l2 = std::polar(0.9 * u(rng), 2 * kPi * u(rng));
    const cd g = std::polar(0.3 + u(rng), 2 * kPi * u(rng));
    const cd alpha = g * l1 * l2, beta = -g * (l1 + l2);
    const int k = 1000;
    const auto ref = oracle::truncated_tridiag_column(alpha, beta, g, 2000, k);
    for (int j = k - 8; j <= k + 8; ++j)
      worst = std::max(worst, std::abs(tridiag_inverse_element(alpha, beta, g, j, k) - ref(j)));
  }
  o.detail << "100 random symbols, max error=" << worst;
  o.require(worst < 1e-8, "max error < 1e-8");
}

void circulant_inverse(Outcome& o) {
  double worstDense = 0;
  for (const auto& [a, b, c] : {std::tuple{1.0, -2.5, 1.0}, std::tuple{0.7, -2.1, 1.2}})
    for (const int n : {11, 23, 47}) {
      const auto C = CirculantOperator::from_symbol(BandedSymbol<double>::tridiagonal(a, b, c), n);
      const MatrixXcd inv = C.dense().inverse();
      for (int j = 0; j < n; j += 3)
        for (int k = 0; k < n; k += 5)
          worstDense = std::max(worstDense, std::abs(circulant_inverse_element(C, j, k, InversePath::Prime) - inv(j, k)));
    }
  o.detail << "closed form vs dense max=" << worstDense << "; ";
  o.require(worstDense < 1e-10, "closed form = dense to 1e-10");

  // finite-volume error against the Laurent element, divided by the predicted rate
  const cd alpha = 1.0, beta = -2.2, gamma = 1.0;
  const auto rp = ordered_roots(alpha, beta, gamma);
  std::vector<double> ratios;
  for (const int n : {11, 23, 47}) {
    const auto C = CirculantOperator::from_symbol(BandedSymbol<double>::tridiagonal(alpha, beta, gamma), n);
    const double err = std::abs(circulant_inverse_element(C, 0, 2, InversePath::Prime) -
                                tridiag_inverse_element(alpha, beta, gamma, 0, 2));
    const double rate = std::max(std::pow(std::abs(rp.lambda1), -n), std::pow(std::abs(rp.lambda2), n));
    ratios.push_back(err / rate);
    o.detail << "n=" << n << " err=" << err << " ";
  }
  const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
  o.detail << "err/rate spread=" << spread;
  o.require(spread < 1.1, "error follows max(|l1|^-n, |l2|^n)");
}

void incoherent_hopping_bc(Outcome& o) {
  const auto golden = nlohmann::json::parse(read_file(std::string(GOLDEN_DIR) + "/thresholds.json"));
  const auto& free = golden["incoherent_hopping_free_n50_vs_closed_form"];
  const std::vector<double> Gs{1, 2, 5};
  const int n = 50;

  std::vector<double> freeD(Gs.size());
  parallel_for(Gs.size(), [&](size_t i) {
    const Points cf = closed_form_spectrum({Builtin::IncoherentHopping, 1, 0}, Gs[i]).sample(1e-3);
    freeD[i] = hausdorff_distance(finite_spectrum(incoherent_hopping(Gs[i], 1), n, Boundary::Free).values(), cf);
  });

  for (size_t i = 0; i < Gs.size(); ++i) {
    const double G = Gs[i];
    const LindbladModel m = incoherent_hopping(G, 1);
    const Points cf = closed_form_spectrum({Builtin::IncoherentHopping, 1, 0}, G).sample(1e-3);
    const Points per = finite_spectrum(m, n, Boundary::Periodic).values();
    const double d = hausdorff_distance(per, cf);

    // reference restricted to the momenta the ring actually carries
    Points sameQ;
    for (int k = 0; k < n; ++k) {
      const double q = 2 * kPi * k / n;
      for (const cd z : symbol_curve(fiber(m, q).tSymbol, 2048)) sameQ.push_back(z);
      for (const cd z : jump_roots(m, q)) sameQ.push_back(z);
    }
    o.detail << "G=" << G << " periodic d_H=" << d << " (finite->cf " << directed_distance(per, cf) << ", cf->finite "
             << directed_distance(cf, per) << ", same-momentum d_H " << hausdorff_distance(per, sameQ)
             << "), free d_H=" << freeD[i] << ";";
    o.require(d < 0.15, "periodic d_H < 0.15 at G=" + num(G));
    o.require(freeD[i] > free["min"].get<double>(), "free d_H > 0.5 at G=" + num(G));
    const double frozen = free["measured"][std::to_string(int(G))].get<double>();
    o.require(std::abs(freeD[i] - frozen) <= free["tolerance"].get<double>(), "free d_H matches golden");
  }
}

void exclusion_closed_form(Outcome& o) {
  for (const double G : {0.5, 1.0, 2.0}) {
    const double d = hausdorff_distance(full_spectrum(exclusion(G), 1024, 1024).values(),
                                        closed_form_spectrum({Builtin::Exclusion}, G).sample(1e-3));
    o.detail << "G=" << G << " d_H=" << d << " ";
    o.require(d < 0.02, "d_H < 0.02 at G=" + num(G));
  }
}

// 0 inside, otherwise the distance to the boundary
double distance_to_region(cd z, const Component& region) {
  if (region.contains(z, 0)) return 0;
  double best = INFINITY;
  for (size_t i = 0; i < region.vertices.size(); ++i) {
    const cd a = region.vertices[i], b = region.vertices[(i + 1) % region.vertices.size()];
    const double t = std::clamp(((z - a) * std::conj(b - a)).real() / std::norm(b - a), 0.0, 1.0);
    best = std::min(best, std::abs(z - (a + t * (b - a))));
  }
  return best;
}

double hausdorff_to_region(const Points& samples, const Component& region) {
  double out = 0;
  for (const cd z : samples) out = std::max(out, distance_to_region(z, region));
  return std::max(out, directed_distance(region.sample(0.01), samples));
}

void non_normal_polygon(Outcome& o) {
  const Points nhe = nhe_spectrum(non_normal(1, 0, 1), 512, 512).values();
  Component stated;
  stated.kind = Component::Kind::Polygon;
  stated.vertices = {cd(-8, 0), cd(0, -4), cd(0, 0), cd(0, 4)};
  size_t outside = 0;
  double worstOut = 0;
  for (const cd z : nhe)
    if (!stated.contains(z, 1e-9)) {
      ++outside;
      worstOut = std::max(worstOut, distance_to_region(z, stated));
    }
  const double d = hausdorff_to_region(nhe, stated);
  o.detail << "conv(-8,-4i,0,4i): " << outside << "/" << nhe.size() << " samples outside (max excursion " << worstOut
           << "), d_H=" << d;
  o.require(outside == 0, "all NHE samples inside conv(-8,-4i,0,4i)");
  o.require(d < 0.05, "d_H(samples, polygon) < 0.05");

  const Component rhombus = closed_form_spectrum({Builtin::NonNormal, 1, 0}, 1).components.front();
  size_t outR = 0;
  for (const cd z : nhe)
    if (!rhombus.contains(z, 1e-9)) ++outR;
  o.detail << "; info: conv(-8,-4-4i,0,-4+4i) has " << outR << " outside, d_H=" << hausdorff_to_region(nhe, rhombus);

  const auto jc = jump_curve(non_normal(1, 0, 1), 128);
  size_t inJump = 0;
  for (const auto& p : jc.points)
    if (stated.contains(p.z, 1e-9)) ++inJump;
  o.detail << "; info: jump curve " << inJump << "/" << jc.points.size() << " inside the stated polygon";
}

void gap_scaling_check(Outcome& o) {
  const GapScaling g = gap_scaling(2, {50, 100, 200, 400});
  o.detail << "exponent=" << g.fitExponent << " |gap| n^2=" << g.scaledConstant << " ratio to 16 pi^2/G=" << g.ratio;
  o.require(std::abs(g.fitExponent + 2) <= 0.05, "exponent -2 +- 0.05");
}

void exact_disorder(Outcome& o) {
  const LindbladModel m = exactly_solvable_model(1);
  double worst = 0;
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    const auto V = DisorderRealization::draw(20, 1, seed);
    const Points dense = dense_eigenvalues(vectorized_lindbladian(m, 20, Boundary::Periodic, V.values), false).values;
    worst = std::max(worst, oracle::multiset_distance(exact_solvable_spectrum(V, 1), dense));
  }
  o.detail << "max multiset distance=" << worst;
  o.require(worst < 1e-10, "closed form = dense to 1e-10");
}

void numerical_range(Outcome& o) {
  const double G = 2, lambda = 5;
  const auto V = DisorderRealization::draw(40, lambda, 11);
  const auto s = numerical_range_sample(dephasing(G), 40, V.values, 10000, 12);
  int reBad = 0, imBad = 0;
  double worstRe = 0, worstSlack = -INFINITY;
  for (const auto& x : s) {
    const double re = std::abs(x.z.real() - G * (x.a - 1));
    worstRe = std::max(worstRe, re);
    if (re > 1e-9) ++reBad;
    const double slack = std::abs(x.z.imag()) - range_bound_f(std::clamp(x.a, 0.0, 1.0), lambda);
    worstSlack = std::max(worstSlack, slack);
    if (slack > 1e-9) ++imBad;
  }
  o.detail << s.size() << " samples, Re violations=" << reBad << " (max " << worstRe << "), Im violations=" << imBad
           << " (max |Im|-f=" << worstSlack << ")";
  o.require(s.size() == 10000 && reBad == 0 && imBad == 0, "zero violations");
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void properties(Outcome& o) {
  // conjugation symmetry, up to the grid spacing of the symbol sampling
  const int nQ = 256, nT = 256;
  double worstRel = 0;
  for (const auto& m : {dephasing(2), incoherent_hopping(2, 1), exclusion(1), non_normal(1, 0), non_normal(1, 0.9)}) {
    const Points c = full_spectrum(m, nQ, nT).values();
    double lip = 0;
    for (int k = 0; k < nQ; ++k) {
      const auto f = fiber(m, 2 * kPi * k / nQ);
      double s = 0;
      for (int l = -f.tSymbol.range(); l <= f.tSymbol.range(); ++l) s += std::abs(double(l) * f.tSymbol[l]);
      lip = std::max(lip, s);
    }
    worstRel = std::max(worstRel, hausdorff_distance(c, conjugated(c)) / (2 * kPi / std::min(nQ, nT) * lip));
    for (const int n : {6, 7}) {
      const Points e = finite_spectrum(m, n, Boundary::Periodic).values();
      worstRel = std::max(worstRel, hausdorff_distance(e, conjugated(e)) / 1e-8);
    }
  }
  o.detail << "conjugation d_H / spacing=" << worstRel;
  o.require(worstRel <= 1, "conjugation symmetry");

  std::mt19937_64 rng(99);
  std::normal_distribution<double> N01;
  auto random_matrix = [&](int k) {
    MatrixXcd A(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) A(i, j) = cd(N01(rng), N01(rng));
    return A;
  };
  double worstSum = 0;
  for (int t = 0; t < 5; ++t) {
    const int a = 3 + t, b = 5, c = 2 + 2 * t;
    const MatrixXcd A = random_matrix(a), B = random_matrix(b), C = random_matrix(c);
    MatrixXcd S = MatrixXcd::Zero(a + b + c, a + b + c);
    S.block(0, 0, a, a) = A;
    S.block(a, a, b, b) = B;
    S.block(a + b, a + b, c, c) = C;
    const Box box{-4, 4, -4, 4};
    const auto fs = pseudospectrum_grid(S, box, 16, 16), fa = pseudospectrum_grid(A, box, 16, 16);
    const auto fb = pseudospectrum_grid(B, box, 16, 16), fc = pseudospectrum_grid(C, box, 16, 16);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        worstSum = std::max(worstSum, std::abs(fs.values(i, j) - std::min({fa.values(i, j), fb.values(i, j), fc.values(i, j)})));
  }
  o.detail << "; direct-sum max deviation=" << worstSum;
  o.require(worstSum < 1e-10, "direct-sum identity to 1e-10");

  double worstSlope = 0;
  for (const double q : {0.4, 1.3, 2.5}) {
    const auto f = fiber(dephasing(2), q);
    for (const cd z : jump_roots(dephasing(2), q)) {
      const int K = 30;
      const VectorXcd v = jump_eigenvector(f, z, K);
      const auto rp = ordered_roots(f.tSymbol[-1], f.tSymbol[0] - z, f.tSymbol[1]);
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (int k = 1; k <= K; ++k) {
        const double y = std::log(std::abs(v(K + k)));
        sx += k;
        sy += y;
        sxx += double(k) * k;
        sxy += k * y;
      }
      const double slope = (K * sxy - sx * sy) / (K * sxx - sx * sx);
      worstSlope = std::max(worstSlope, std::abs(slope - std::log(std::abs(rp.lambda2))));
    }
  }
  o.detail << "; decay slope error=" << worstSlope;
  o.require(worstSlope < 1e-6, "eigenvector slope = log|lambda2| to 1e-6");

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("lindblad_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::string> cmds{"spectrum --builtin exclusion --G 1 --qpoints 32 --thetapoints 32 --out ",
                                      "finite --builtin non_normal --G 1 --n 7 --lambda 2 --seed 3 --out ",
                                      "range --G 2 --n 10 --lambda 5 --samples 500 --seed 8 --out "};
  bool identical = true;
  for (size_t i = 0; i < cmds.size(); ++i) {
    const std::string a = (dir / ("a" + std::to_string(i))).string(), b = (dir / ("b" + std::to_string(i))).string();
    identical = identical && run_cli(cmds[i] + a) == 0 && run_cli(cmds[i] + b) == 0 && read_file(a) == read_file(b);
  }
  fs::remove_all(dir);
  o.detail << "; CLI reruns identical=" << (identical ? "yes" : "no");
  o.require(identical, "byte-identical CLI reruns");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "dephasing closed form", 5, dephasing_closed_form},
      {2, "connectivity transition at G=4", 10, connectivity},
      {3, "finite fiber equivalence", 10, finite_equivalence},
      {4, "Laurent inverse vs truncated solves", 20, laurent_inverse},
      {5, "circulant inverse", 5, circulant_inverse},
      {6, "incoherent hopping periodic/free", 30, incoherent_hopping_bc},
      {7, "exclusion closed form", 5, exclusion_closed_form},
      {8, "non-normal NHE polygon", 30, non_normal_polygon},
      {9, "gap scaling", 2, gap_scaling_check},
      {10, "exactly solvable disorder", 5, exact_disorder},
      {11, "numerical range bound", 30, numerical_range},
      {12, "property suites", INFINITY, properties},
  };
  std::printf("threads: %d\n", thread_count());
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limitSeconds) {
      o.pass = false;
      o.detail << " [runtime over " << c.limitSeconds << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
