#pragma once

#include <complex>

#include <Eigen/Dense>

namespace quadrop {

using cdouble = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using rmat = Eigen::MatrixXd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

// Standard symplectic matrix J = [[0, I],[-I, 0]] of size 2n x 2n.
rmat symplectic_matrix(int n);

// Bilinear (non-sesquilinear) symplectic form sigma((x,xi),(y,eta)) =
// <xi,y> - <x,eta> on C^{2n} x C^{2n}.
cdouble symplectic_form(const cvec& X, const cvec& Y);

// Relative deviation from symmetry, ||M - M^T|| / ||M||; zero matrix gives 0.
double symmetry_defect(const cmat& M);

// Smallest eigenvalue of a real symmetric matrix (selfadjoint solver).
double min_symmetric_eigenvalue(const rmat& A);

// Orthonormal basis (columns) of the null space of a real matrix, using
// singular values thresholded at tol * sigma_max. Requires a factor-10
// spectral gap at the rank cut, otherwise throws IllConditioned.
rmat nullspace(const rmat& A, double rank_tol);

// Orthonormal basis of the column span, same thresholding rule as nullspace.
rmat column_space(const rmat& A, double rank_tol);

// Numerical rank with the same gap rule.
int numerical_rank(const rmat& A, double rank_tol);

// Largest principal angle (radians) between the spans of two orthonormal
// column blocks; throws BadDimension if the dimensions of the spans differ.
double max_principal_angle(const rmat& U, const rmat& V);

// Matrix exponential by scaling and squaring with a truncated Taylor series;
// the truncation point is chosen from a rigorous tail bound at unit
// roundoff, so the result is backward stable for the scaled matrix.
cmat expm_series(const cmat& A);

enum class MatFunPath { Auto, Eigendecomposition, Series };

// cos(tF), tan(tF), e^{2itF} and det cos(tF) for the Mehler propagator.
struct PropagatorMatrices {
  cmat cos_tf;
  cmat tan_tf;
  cmat exp_2itf;
  cdouble det_cos;
};

// Evaluates the propagator matrix functions. Auto uses an eigendecomposition
// of F when the eigenvector basis is well conditioned (cond < 1e8) and falls
// back to the series path otherwise (the key examples have nilpotent blocks).
// Throws FocalTime when |det cos(tF)| < 1e-10.
PropagatorMatrices propagator_matrices(const cmat& F, double t,
                                       MatFunPath path = MatFunPath::Auto);

// det cos(tF) only, without the focal-time guard (used for branch tracking).
cdouble det_cos_tf(const cmat& F, double t, MatFunPath path = MatFunPath::Auto);

}  // namespace quadrop
