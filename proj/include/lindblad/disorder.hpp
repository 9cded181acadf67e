#pragma once

#include <cstdint>
#include <vector>

#include "lindblad/model.hpp"
#include "lindblad/numerics.hpp"

namespace lindblad {

// i.i.d. uniform potential on [-lambda, lambda]
struct DisorderRealization {
  int n = 0;
  double lambda = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;

  static DisorderRealization draw(int n, double lambda, std::uint64_t seed);
};

// dephasing channels with no hopping; H = V only
LindbladModel exactly_solvable_model(double G);

// n zeros and -G + i(V_i - V_j) for i != j
std::vector<cd> exact_solvable_spectrum(const DisorderRealization& V, double G);

double range_bound_f(double a, double lambda);

struct RangeSample {
  cd z;      // <rho, L rho>, Hilbert-Schmidt inner product
  double a;  // sum_x |rho(x,x)|^2
};

// <rho, L rho> on a periodic ring of n sites, H = hopping + V
RangeSample range_value(const LindbladModel& m, const std::vector<double>& V, const MatrixXcd& rho);

// rho ~ Gaussian diagonal and off-diagonal blocks scaled to norms sqrt(a),
// sqrt(1-a), a ~ U[0,1]. Dephasing-type models only.
std::vector<RangeSample> numerical_range_sample(const LindbladModel& m, int n, const std::vector<double>& V,
                                                int nSamples, std::uint64_t seed);

// h(phi) = max Re(e^{-i phi} w) over w in W(M), for phi = 2 pi k / nAngles
std::vector<double> numerical_range_support(const MatrixXcd& M, int nAngles);

struct KunzRow {
  std::uint64_t seed;
  double upperExcess;     // max over eigenvalues and angles of the support violation
  bool contained;         // upperExcess <= 1e-6
  double lowerDistance;   // directed d_H from the clean spectrum into the disordered one
};

struct KunzReport {
  int n = 0;
  double lambda = 0;
  int nAngles = 0;
  std::vector<KunzRow> rows;
  bool all_contained() const;
};

// upper inclusion in W(L_0) + i[-2 lambda, 2 lambda], checked against the
// support function on nAngles directions
KunzReport kunz_containment(const LindbladModel& m, int n, double lambda, const std::vector<std::uint64_t>& seeds,
                            int nAngles = 256);

}  // namespace lindblad
