#pragma once

#include <functional>
#include <vector>

#include "quadrop/matrix_functions.hpp"

namespace quadrop {

// A representation of u in L^2(R^n), either as Hermite coefficients
// (orthonormal basis, N modes per dimension) or as complex samples on the
// uniform tensor grid x_j = -L + j 2L/M over [-L, L)^n.
struct FunctionState {
  enum class Rep { Hermite, Grid };
  Rep rep = Rep::Grid;
  int n = 1;
  // grid parameters
  double L = 0.0;
  int M = 0;
  // hermite parameter
  int N = 0;
  cvec data;  // size M^n or N^n, dimension 0 slowest

  long size() const { return data.size(); }
  double step() const { return 2.0 * L / M; }
};

FunctionState make_grid_state(int n, double L, int M,
                              const std::function<cdouble(const rvec&)>& f);
FunctionState make_hermite_state(int n, int N, const cvec& coeffs);

// Grid coordinates along one axis.
std::vector<double> grid_axis(const FunctionState& u);

double l2_norm(const FunctionState& u);
cdouble inner_product(const FunctionState& u, const FunctionState& v);  // <u,v>, conjugate-linear in u

// L2 mass fraction in the outer 10% band of the grid; used to detect
// under-resolved states.
double boundary_tail_mass(const FunctionState& u);

// Mass fraction carried by the top five Hermite modes per dimension.
double hermite_tail_mass(const FunctionState& u);

// Orthonormal Hermite function values h_k(x), k < N (recurrence evaluation).
rmat hermite_values(int N, const std::vector<double>& x);

// Representation conversions. Round-trips are accurate to ~1e-8 for states
// whose mass is resolved by both discretizations.
FunctionState hermite_to_grid(const FunctionState& u, double L, int M);
FunctionState grid_to_hermite(const FunctionState& u, int N);

// Discrete Fourier data with the continuum convention
// u^(xi_m) = h^n sum_j u(x_j) e^{-i xi_m x_j}, xi_m = pi m / L for
// m in [-M/2, M/2). Stored in natural DFT order.
struct GridFourier {
  int n;
  double L;
  int M;
  cvec coeffs;
  double freq(int index) const;  // frequency of a one-dim DFT index
};

GridFourier grid_fourier(const FunctionState& u);
FunctionState grid_fourier_inverse(const GridFourier& f);

// Applies a multiplier m(xi) in frequency space.
FunctionState apply_fourier_multiplier(const FunctionState& u,
                                       const std::function<cdouble(const rvec&)>& m);

// Spectral derivative d^beta u (FFT along each axis).
FunctionState grid_derivative(const FunctionState& u, const std::vector<int>& beta);

// Pointwise multiplication by x^alpha.
FunctionState grid_monomial_multiply(const FunctionState& u, const std::vector<int>& alpha);

}  // namespace quadrop
