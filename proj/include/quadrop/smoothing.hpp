#pragma once

#include <utility>
#include <vector>

#include "quadrop/hermite.hpp"
#include "quadrop/state.hpp"

namespace quadrop {

// ||x^alpha d^beta u||_{L2}: ladder action for Hermite states, spectral
// differentiation plus weighted quadrature for grid states.
double seminorm(const FunctionState& u, const std::vector<int>& alpha,
                const std::vector<int>& beta);

struct SmoothingRow {
  std::vector<int> alpha, beta;
  std::vector<double> seminorms;   // per t, 0 where excluded
  std::vector<bool> included;      // discretization filter
  double measured_exp = 0.0;       // blow-up exponent as t -> 0+
  double theorem_exp = 0.0;        // (2k0+1)(|alpha|+|beta|+s)
  bool pass = false;
};

struct SmoothingReport {
  std::vector<double> t_grid;
  std::vector<SmoothingRow> rows;
  int k0 = 0;
  double s = 0.0;                  // 9n/4 + 2 floor(n/2) + 3
  double fitted_C = 0.0;           // single constant explaining all rows
  bool all_pass = false;
};

// Evolves u0 (Hermite representation) over the t grid and fits per-row
// blow-up exponents of log seminorm against log t. Points where the
// N-refinement estimate of the discretization error exceeds 10% of the
// seminorm are excluded from the fit. N_check = 0 disables the filter.
SmoothingReport smoothing_exponent_fit(
    const QuadraticSymbol& q, const FunctionState& u0,
    const std::vector<double>& t_grid,
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>& rows,
    int k0, int N_check = 0);

}  // namespace quadrop
