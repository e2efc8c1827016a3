#pragma once

#include <vector>

#include "quadrop/symbol.hpp"

namespace quadrop {

// Weyl symbol data of the propagator e^{-tq^w}: q_t(X) = sigma(X, tan(tF)X)
// = <X, A_t X> together with det(cos tF)^{-1/2}, branch continued from 1 at
// t = 0.
struct MehlerSymbol {
  double t = 0.0;
  cmat form;             // A_t, symmetric
  cdouble norm_factor;   // det(cos tF)^{-1/2}
};

// prefactor * exp(-<X, A X>) with A symmetric, Re A positive semidefinite.
struct GaussianSymbol {
  cdouble prefactor{1.0, 0.0};
  cmat A;

  int dim() const { return static_cast<int>(A.rows()); }
  cdouble operator()(const rvec& X) const {
    const cdouble e = (X.cast<cdouble>().transpose() * A * X.cast<cdouble>())(0);
    return prefactor * std::exp(-e);
  }
};

GaussianSymbol make_gaussian(cdouble prefactor, const cmat& A);

// Square root of det(A) for symmetric A with Re A >= 0 and A nonsingular,
// on the branch continued from positive definite real matrices (the
// convention behind the Gaussian Fourier transform). Throws SingularForm.
cdouble sqrt_det_branch(const cmat& A);

// Simultaneous diagonalization of a positive definite form and a symmetric
// one: returns P with P^T ReA P = I and P^T ImA P = diag(lambda).
struct SimDiag {
  rmat P;
  rvec lambda;
};
SimDiag simultaneous_diagonalize(const rmat& ReA, const rmat& ImA);

// Mehler symbol at time t; throws FocalTime past the first focal time. The
// normalization branch is tracked along a refining path from t = 0 (argument
// jumps above 0.5 trigger refinement, path cap 2^20 steps).
MehlerSymbol mehler_form(const HamiltonMap& F, double t, MatFunPath path = MatFunPath::Auto);

// Exact Fourier transform with the convention g^(Xi) = int e^{-i<X,Xi>} g(X) dX:
// prefactor pi^{N/2} det(A)^{-1/2} exp(-1/4 <A^{-1} Xi, Xi>).
GaussianSymbol gaussian_fourier(const GaussianSymbol& g);

// Auxiliary time-dependent form Q_t(X) =
// -i sigma(conj((e^{2itF}+I)X), (e^{2itF}-I)X); its real part is
// nonnegative and nondecreasing in t.
cdouble auxiliary_Qt(const HamiltonMap& F, double t, const cvec& X,
                     MatFunPath path = MatFunPath::Auto);

// (2k+1)-th t-derivative of Re Q_t at t = 0 under the vanishing of the lower
// odd derivatives: 4^{k+1} binom(2k,k) sigma(conj(F^k X), (Re F)(F^k X)).
double odd_derivative_test(const HamiltonMap& F, const cvec& X, int k);

// Log-log fit of min_{X in sphere samples of S^perp} Re q_t(X) against t.
struct CoercivityFit {
  double slope = 0.0;      // fitted exponent
  double constant = 0.0;   // c with Re q_t >= c t^{2k0+1} |X|^2 on all samples
  bool bound_holds = false;
  std::vector<double> t_grid;
  std::vector<double> min_values;
};
CoercivityFit coercivity_exponent(const HamiltonMap& F, const SingularAnalysis& S,
                                  const std::vector<double>& t_grid,
                                  int sphere_samples, unsigned long seed = 31u);

// Exact squared L2 norm of x^p e^{-cx^2} and the Gevrey-type upper bound
// pi^{1/4} c^{-(p/2+1/4)} (p!)^{1/2}; evaluation is done in the log domain.
struct WeightedGaussianNorm {
  double norm_sq = 0.0;
  double norm = 0.0;
  double bound = 0.0;     // upper bound on norm
};
WeightedGaussianNorm weighted_gaussian_norm(int p, double c);

// I_p = 4^{-p} (2p)!/p! sqrt(pi), log-domain closed form and the recursion
// I_{p+1} = (2p+1)/2 I_p (exposed for the acceptance check).
double gaussian_moment_closed_form(int p);
double gaussian_moment_recursion(int p);

}  // namespace quadrop
