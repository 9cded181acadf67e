#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lindblad/cloud_io.hpp"
#include "lindblad/disorder.hpp"
#include "lindblad/finite.hpp"
#include "lindblad/model.hpp"
#include "lindblad/numerics.hpp"
#include "lindblad/spectrum.hpp"

using namespace lindblad;
using nlohmann::json;

namespace {

struct ModelArgs {
  std::string file;
  std::string builtin;
  double G = 1;
  int l = 1;
  double delta = 0;
};

void add_model_flags(CLI::App* cmd, ModelArgs& a, bool allowFile = true) {
  auto* b = cmd->add_option("--builtin", a.builtin, "dephasing | incoherent_hopping | exclusion | non_normal");
  if (allowFile) cmd->add_option("--model", a.file, "model JSON file")->excludes(b);
  cmd->add_option("--G", a.G, "coupling strength");
  cmd->add_option("--l", a.l, "hopping distance (incoherent_hopping, non_normal)");
  cmd->add_option("--delta", a.delta, "phase (non_normal)");
}

LindbladModel build_model(const ModelArgs& a) {
  if (!a.file.empty()) return load_model_file(a.file);
  if (a.builtin.empty()) throw Error(ErrorCode::InvalidInput, "need --builtin or --model");
  return make_builtin({parse_builtin(a.builtin), a.l, a.delta}, a.G);
}

Boundary parse_bc(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "free") return Boundary::Free;
  throw Error(ErrorCode::InvalidInput, "unknown boundary '" + s + "'");
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::SizeTooLarge: return 3;
    case ErrorCode::NoConvergence:
    case ErrorCode::Singular:
    case ErrorCode::NoSplit:
    case ErrorCode::OnSymbolCurve:
    case ErrorCode::DegenerateGamma:
    case ErrorCode::RankTooHigh:
    case ErrorCode::EmptySet: return 4;
    default: return 2;
  }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void emit(const std::string& out, const std::string& content, RunManifest man, Clock::time_point t0) {
  write_file_atomic(out, content);
  man.wallSeconds = seconds_since(t0);
  write_file_atomic(manifest_path(out), man.to_json());
}

void print_or_write(const std::string& out, const std::string& content, RunManifest man, Clock::time_point t0) {
  if (out.empty())
    std::cout << content;
  else
    emit(out, content, std::move(man), t0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of translation-invariant Lindbladians"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ModelArgs ma;
  std::string out, format = "csv", bc = "periodic";
  int qpoints = 256, thetapoints = 256, n = 0, nre = 64, nim = 64, samples = 10000;
  double lambda = -1, spacing = 1e-3;
  unsigned long long seed = 0;
  std::vector<unsigned long long> seeds{1, 2, 3};
  std::vector<int> sizes{50, 100, 200, 400};
  std::string fileA, fileB;
  std::vector<double> box{-5, 1, -5, 5};
  bool kunz = false;

  auto* spec = app.add_subcommand("spectrum", "NHE and jump spectrum of the infinite chain");
  add_model_flags(spec, ma);
  spec->add_option("--qpoints", qpoints)->check(CLI::Range(4, 1 << 16));
  spec->add_option("--thetapoints", thetapoints)->check(CLI::Range(4, 1 << 16));
  spec->add_option("--out", out)->required();
  spec->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* fin = app.add_subcommand("finite", "eigenvalues of the n-site Lindbladian");
  add_model_flags(fin, ma);
  fin->add_option("--n", n)->required();
  fin->add_option("--bc", bc)->check(CLI::IsMember({"periodic", "free"}));
  fin->add_option("--seed", seed);
  fin->add_option("--lambda", lambda, "uniform potential on [-lambda, lambda]");
  fin->add_option("--out", out)->required();

  auto* cmp = app.add_subcommand("compare", "Hausdorff distance between two clouds");
  cmp->add_option("--a", fileA)->required();
  auto* bOpt = cmp->add_option("--b", fileB);
  auto* cfOpt = cmp->add_option("--closed-form", ma.builtin, "compare against a sampled closed form instead");
  bOpt->excludes(cfOpt);
  cmp->add_option("--G", ma.G);
  cmp->add_option("--l", ma.l);
  cmp->add_option("--delta", ma.delta);
  cmp->add_option("--spacing", spacing, "closed-form sampling step");

  auto* ps = app.add_subcommand("pseudospectrum", "smallest singular value of L - z on a grid");
  add_model_flags(ps, ma);
  ps->add_option("--n", n)->required();
  ps->add_option("--bc", bc)->check(CLI::IsMember({"periodic", "free"}));
  ps->add_option("--box", box, "re_min re_max im_min im_max")->expected(4);
  ps->add_option("--nre", nre)->check(CLI::Range(1, 4096));
  ps->add_option("--nim", nim)->check(CLI::Range(1, 4096));
  ps->add_option("--out", out)->required();

  auto* gs = app.add_subcommand("gap_scaling", "dephasing spectral gap against n");
  gs->add_option("--G", ma.G);
  gs->add_option("--sizes", sizes)->delimiter(',');
  gs->add_option("--out", out);

  auto* eq = app.add_subcommand("equivalence", "fiber decomposition residual at size n");
  add_model_flags(eq, ma);
  eq->add_option("--n", n)->required();
  eq->add_option("--out", out);

  auto* rg = app.add_subcommand("range", "numerical range samples, or Kunz containment with --kunz");
  add_model_flags(rg, ma, false);
  rg->add_option("--n", n)->required();
  rg->add_option("--lambda", lambda)->required();
  rg->add_option("--samples", samples)->check(CLI::Range(0, 10000000));
  rg->add_option("--seed", seed);
  rg->add_flag("--kunz", kunz);
  rg->add_option("--seeds", seeds)->delimiter(',');
  rg->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 2);
  }

  const auto t0 = Clock::now();
  RunManifest man;
  man.command = app.get_subcommands().front()->get_name();
  try {
    if (spec->parsed()) {
      const LindbladModel m = build_model(ma);
      SpectrumCloud c;
      if (qpoints >= 8) {
        c = full_spectrum(m, qpoints, thetapoints);
      } else {
        // too coarse for the refined jump curve: roots at the grid q only
        c = nhe_spectrum(m, qpoints, thetapoints);
        for (int k = 0; k < qpoints; ++k) {
          const double q = 2 * std::numbers::pi * k / qpoints;
          for (const cd z : jump_roots(m, q)) c.points.push_back({z, PointTag::JUMP, q, NAN});
        }
        c.sort();
      }
      man.model = model_to_json(m);
      man.gridsJson = json{{"qpoints", qpoints}, {"thetapoints", thetapoints}}.dump();
      emit(out, format == "csv" ? cloud_to_csv(c) : cloud_to_json(c), man, t0);
      if (c.failures > 0) std::cerr << "warning: " << c.failures << " jump solves did not converge\n";
    } else if (fin->parsed()) {
      const LindbladModel m = build_model(ma);
      std::vector<double> V;
      if (lambda >= 0) {
        V = DisorderRealization::draw(n, lambda, seed).values;
        man.seeds = {seed};
      }
      const SpectrumCloud c = finite_spectrum(m, n, parse_bc(bc), V);
      man.model = model_to_json(m);
      man.gridsJson = json{{"n", n}, {"bc", bc}, {"lambda", lambda >= 0 ? json(lambda) : json(nullptr)}}.dump();
      emit(out, cloud_to_csv(c), man, t0);
    } else if (cmp->parsed()) {
      const Points a = read_cloud(fileA).values();
      Points b;
      if (!fileB.empty())
        b = read_cloud(fileB).values();
      else if (!ma.builtin.empty())
        b = closed_form_spectrum({parse_builtin(ma.builtin), ma.l, ma.delta}, ma.G).sample(spacing);
      else
        throw Error(ErrorCode::InvalidInput, "need --b or --closed-form");
      std::printf("%.17g\n", hausdorff_distance(a, b));
    } else if (ps->parsed()) {
      const LindbladModel m = build_model(ma);
      if (long(n) * n > kDefaultSizeCap) throw Error(ErrorCode::SizeTooLarge, "n^2 above the size cap");
      const Box bx{box[0], box[1], box[2], box[3]};
      const auto f = pseudospectrum_grid(vectorized_lindbladian(m, n, parse_bc(bc)), bx, nre, nim);
      std::string csv = "re,im,sigma_min\n";
      char buf[96];
      for (int i = 0; i < f.nRe; ++i)
        for (int j = 0; j < f.nIm; ++j) {
          const cd z = f.point(i, j);
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", z.real(), z.imag(), f.values(i, j));
          csv += buf;
        }
      if (!f.boxContainsSpectrum) std::cerr << "warning: spectrum extends outside the box\n";
      man.model = model_to_json(m);
      man.gridsJson = json{{"n", n}, {"bc", bc}, {"box", box}, {"nre", nre}, {"nim", nim}}.dump();
      emit(out, csv, man, t0);
    } else if (gs->parsed()) {
      const GapScaling g = gap_scaling(ma.G, sizes);
      const json j{{"G", ma.G},           {"sizes", g.sizes},
                   {"gaps", g.gaps},      {"fit_exponent", g.fitExponent},
                   {"fit_constant", g.fitConstant}, {"scaled_constant", g.scaledConstant},
                   {"heuristic_constant", g.heuristicConstant}, {"ratio", g.ratio}};
      man.gridsJson = json{{"sizes", sizes}}.dump();
      print_or_write(out, j.dump(2) + "\n", man, t0);
    } else if (eq->parsed()) {
      const LindbladModel m = build_model(ma);
      const EquivalenceReport r = equivalence_report(m, n);
      const json j{{"n", n}, {"off_block", r.offBlock}, {"block_diff", r.blockDiff}, {"residual", r.residual()}};
      man.model = model_to_json(m);
      man.gridsJson = json{{"n", n}}.dump();
      print_or_write(out, j.dump(2) + "\n", man, t0);
    } else if (rg->parsed()) {
      if (kunz) {
        const LindbladModel m = build_model(ma);
        const KunzReport r = kunz_containment(m, n, lambda, std::vector<std::uint64_t>(seeds.begin(), seeds.end()));
        json rows = json::array();
        for (const auto& row : r.rows)
          rows.push_back({{"seed", row.seed},
                          {"upper_excess", row.upperExcess},
                          {"contained", row.contained},
                          {"lower_distance", row.lowerDistance}});
        const json j{{"n", r.n}, {"lambda", r.lambda}, {"angles", r.nAngles}, {"rows", rows}};
        man.model = model_to_json(m);
        man.seeds = seeds;
        man.gridsJson = json{{"n", n}, {"lambda", lambda}}.dump();
        print_or_write(out, j.dump(2) + "\n", man, t0);
      } else {
        ModelArgs dm = ma;
        if (dm.builtin.empty()) dm.builtin = "dephasing";
        const LindbladModel m = build_model(dm);
        const auto V = DisorderRealization::draw(n, lambda, seed);
        const auto s = numerical_range_sample(m, n, V.values, samples, seed);
        std::string csv = "a,re,im,bound\n";
        char buf[128];
        for (const auto& x : s) {
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x.a, x.z.real(), x.z.imag(),
                        range_bound_f(std::clamp(x.a, 0.0, 1.0), lambda));
          csv += buf;
        }
        man.model = model_to_json(m);
        man.seeds = {seed};
        man.gridsJson = json{{"n", n}, {"lambda", lambda}, {"samples", samples}}.dump();
        print_or_write(out, csv, man, t0);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
