#pragma once

#include <vector>

#include "lindblad/model.hpp"
#include "lindblad/spectrum.hpp"

namespace lindblad {

// C_{jk} = a_{(j-k) mod n}
struct CirculantOperator {
  int n = 0;
  std::vector<cd> firstColumn;

  // periodic wrap of a Laurent symbol, <j|C|k> = sum_p t_{k-j+pn}
  static CirculantOperator from_symbol(const BandedSymbol<double>& t, int n);
  MatrixXcd dense() const;
};

bool is_prime(int n);

// eigenvalue p belongs to the eigenvector (w^{pk})_k, w = e^{2 pi i / n}
std::vector<cd> circulant_eigs(const CirculantOperator& c);

enum class InversePath { Auto, DFT, Prime };

// <j|C^{-1}|k>. Prime needs n prime and a tridiagonal symbol with root split.
cd circulant_inverse_element(const CirculantOperator& c, long j, long k, InversePath path = InversePath::Auto);

struct FiniteFiber {
  double q = 0;
  CirculantOperator circ;
  VectorXcd gammaL, gammaR;  // wrapped into length n; valid when rankOne
  bool rankOne = true;
  MatrixXcd jump;            // F_n(q), n x n

  MatrixXcd dense() const { return circ.dense() + jump; }
};

// q must be 2 pi k / n for the unitary equivalence; any q is accepted
FiniteFiber finite_fiber(const LindbladModel& m, int n, double q, PhaseConvention conv = PhaseConvention::Calibrated);

// 1 + <gammaR|(C - z)^{-1}|gammaL> via circulant_inverse_element
cd finite_secular_value(const FiniteFiber& f, cd z);

std::vector<cd> finite_fiber_eigs(const LindbladModel& m, int n, int k);

inline constexpr long kDefaultSizeCap = 6400;

SpectrumCloud finite_spectrum(const LindbladModel& m, int n, Boundary bc, const std::vector<double>& V = {},
                              long cap = kDefaultSizeCap);

struct EquivalenceReport {
  double offBlock = 0;   // largest entry outside the n diagonal blocks
  double blockDiff = 0;  // largest entry of block minus fiber matrix
  double residual() const { return std::max(offBlock, blockDiff); }
};

EquivalenceReport equivalence_report(const LindbladModel& m, int n, PhaseConvention conv = PhaseConvention::Calibrated);
double equivalence_check(const LindbladModel& m, int n);

struct ConvergenceRow {
  int n;
  double distance;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  bool decreasing = true;
};

ConvergenceStudy convergence_study(const LindbladModel& m, const std::vector<int>& sizes, const Points& reference,
                                   Boundary bc = Boundary::Periodic);

struct GapScaling {
  std::vector<int> sizes;
  std::vector<double> gaps;  // |Re z| of the q = 2 pi / n jump root
  double fitExponent = 0, fitConstant = 0;
  double scaledConstant = 0;  // |gap| n^2 at the largest n
  double heuristicConstant = 0;
  double ratio = 0;  // scaledConstant / heuristicConstant
};

// heuristic constant 16 pi^2 / G
GapScaling gap_scaling(double G, const std::vector<int>& sizes);

}  // namespace lindblad
