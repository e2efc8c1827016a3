#pragma once

#include <vector>

#include "quadrop/state.hpp"

namespace quadrop {

// Lemma-4.4-style conversion of Gevrey-1/2 derivative bounds into frequency
// decay: from ||d^alpha f|| <= L1 L2^{|alpha|} sqrt(alpha!) one gets
// ||e^{C2 L2^{-2} |D|^2} f|| <= C1 L1 with C1 = 2^n, C2 = 1/(16 e n^2).
struct GevreyFrequencyBound {
  double C1 = 0.0;
  double C2 = 0.0;
  double rhs = 0.0;        // C1 * L1
  double exp_coeff = 0.0;  // C2 / L2^2
};
GevreyFrequencyBound gevrey_to_frequency(double L1, double L2, int n);

// Measures (L1, L2) from derivative norms up to order amax and verifies the
// frequency-decay conclusion via FFT. Returns rhs / lhs (>= 1 means the
// bound holds with margin).
double gevrey_frequency_margin(const FunctionState& f, int amax);

// Gelfand-Shilov sup-norm bound with the dimensional constant fixed by the
// artifact: bound(alpha,beta) =
//   C^{1+|a|+|b|} sqrt(C1/c1^{|a|+N/4} C2/c2^{|b|+floor(N/2)+1+N/4} a! b!).
struct GSBound {
  double C1 = 0, c1 = 0, C2 = 0, c2 = 0;
  int N = 0;
  double C = 0;  // fixed dimensional constant
  double operator()(const std::vector<int>& alpha, const std::vector<int>& beta) const;
};
GSBound gs_bound_constants(double C1, double c1, double C2, double c2, int N);

// sup |x^alpha d^beta f| over the grid (spectral derivative).
double grid_sup_seminorm(const FunctionState& f, const std::vector<int>& alpha,
                         const std::vector<int>& beta);

}  // namespace quadrop
