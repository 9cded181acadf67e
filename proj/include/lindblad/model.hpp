#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lindblad/laurent.hpp"
#include "lindblad/types.hpp"

namespace lindblad {

// finitely supported vector on Z, ordered by site
using SiteVector = std::map<int, cd>;

enum class Builtin { Dephasing, IncoherentHopping, Exclusion, NonNormal };

struct BuiltinTag {
  Builtin kind = Builtin::Dephasing;
  int l = 1;
  double delta = 0;
};

std::string builtin_name(Builtin b);
Builtin parse_builtin(const std::string& name);

// L_0 = |phi><psi|, L_k = S^k L_0 S^{-k}
struct Channel {
  SiteVector phi, psi;
};

struct LindbladModel {
  BandedSymbol<double> hamHopping;  // h_l = <n|H|n+l>
  std::vector<Channel> channels;
  double G = 1;
  std::optional<BuiltinTag> builtin;

  void validate() const;
  int hamiltonian_range() const;
  int lindblad_range() const;  // widest support span of a channel
  int range() const { return std::max(hamiltonian_range(), lindblad_range()); }
};

LindbladModel dephasing(double G);
LindbladModel incoherent_hopping(double G, int l = 1);
LindbladModel exclusion(double G);
LindbladModel non_normal(double G, double delta, int l = 1);
LindbladModel make_builtin(const BuiltinTag& tag, double G);

// H = -(S + S*)
BandedSymbol<double> nearest_neighbour_hopping();

// q_l = <n|Q|n+l> for Q = sum_k L_k* L_k
BandedSymbol<double> jump_autocorrelation(const LindbladModel& m);
BandedSymbol<double> effective_hopping(const LindbladModel& m);

enum class PhaseConvention { Calibrated, Flipped };

struct FiberOperator {
  double q = 0;
  BandedSymbol<double> tSymbol;
  SiteVector gammaL, gammaR;  // F(q) = |gammaL><gammaR|
  bool rankOne = true;        // false when summed channels leave rank > 1
  MatrixXcd jumpBlock;        // F(q) on sites [-jumpRadius, jumpRadius]
  int jumpRadius = 0;
};

FiberOperator fiber(const LindbladModel& m, double q, PhaseConvention conv = PhaseConvention::Calibrated);

enum class Boundary { Periodic, Free };

// potential V enters as -i[V, .]; empty means none
MatrixXcd vectorized_lindbladian(const LindbladModel& m, int n, Boundary bc, const std::vector<double>& V = {});

// J = I o F_1 o C o vec on C^{n^2}, index (j, k) -> j n + k
MatrixXcd transform_Jn(int n);

// JSON model files
std::string model_to_json(const LindbladModel& m);
LindbladModel model_from_json(const std::string& text);
LindbladModel load_model_file(const std::string& path);

}  // namespace lindblad
