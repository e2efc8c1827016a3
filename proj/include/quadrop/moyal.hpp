#pragma once

#include <map>
#include <vector>

#include "quadrop/mehler.hpp"

namespace quadrop {

using MultiIndex = std::vector<int>;

int multi_abs(const MultiIndex& m);
double multi_factorial(const MultiIndex& m);

// Sparse polynomial in the 2n phase-space variables (x block first, then
// the xi block), finitely supported map multi-index -> coefficient.
struct PolySymbol {
  int dim = 0;  // number of variables
  std::map<MultiIndex, cdouble> terms;

  int degree() const;
  cdouble eval(const rvec& X) const;
  PolySymbol derivative(int var) const;
  PolySymbol multiply(const PolySymbol& other) const;
  void add_term(const MultiIndex& m, cdouble c);
};

PolySymbol poly_constant(int dim, cdouble c);
PolySymbol poly_monomial(int dim, const MultiIndex& m, cdouble c = 1.0);

// x^alpha # xi^beta through the finite composition sum
// sum_gamma (i/2)^{|gamma|} (-1)^{|gamma|}/gamma! alpha!beta!/((alpha-gamma)!(beta-gamma)!)
// x^{alpha-gamma} xi^{beta-gamma}; alpha, beta have length n, the result
// lives on 2n variables. Combinatorics in exact integer arithmetic;
// |alpha|+|beta| is capped at 12.
PolySymbol moyal_monomial(const MultiIndex& alpha, const MultiIndex& beta);

// Polynomial-times-Gaussian symbol. All derivatives of a Gaussian stay in
// this class, so compositions collapse to a single such term.
struct PolyGaussian {
  PolySymbol poly;
  GaussianSymbol gauss;

  cdouble eval(const rvec& X) const { return poly.eval(X) * gauss(X); }
  double abs_eval(const rvec& X) const;
  PolyGaussian derivative(int var) const;
};

PolyGaussian make_poly_gaussian(const GaussianSymbol& g);

// p # g by the composition sum over k <= deg p of
// (i/2)^k sum_{|eta|+|rho|=k} ((-1)^{|rho|}/eta!rho!)
//   (d^rho_x d^eta_xi p)(d^eta_x d^rho_xi g);
// eta and rho run over the n x-variables and n xi-variables respectively.
PolyGaussian moyal_poly_gaussian(const PolySymbol& p, const GaussianSymbol& g);

// Supremum of |poly(X) e^{-q(X)}| over a tensor grid covering the variables
// that are active (appear in the polynomial or are damped by Re A). Returns
// +inf when the polynomial grows along an undamped variable.
double poly_gaussian_sup(const PolyGaussian& pg, int points_per_dim = 81);

}  // namespace quadrop
