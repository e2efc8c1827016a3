#pragma once

#include <optional>
#include <vector>

#include "quadrop/matrix_functions.hpp"

namespace quadrop {

// Default numerical rank threshold, 2n * eps relative to the largest
// singular value. All kernel computations assume the paper-side algebra is
// exact, so anything below this is treated as zero.
double default_rank_tol(int phase_dim);

// Complex-valued quadratic form q(X) = <X, C X> on R^{2n}, C symmetric with
// positive semidefinite real part. The bilinear pairing carries no factor
// 1/2 and no conjugation.
struct QuadraticSymbol {
  int n = 0;        // phase-space half-dimension
  cmat coeff;       // 2n x 2n symmetric

  cdouble operator()(const cvec& X) const { return X.transpose() * coeff * X; }
  double real_part(const rvec& X) const;
};

// Hamilton map F = J C of a quadratic symbol; sigma(X, FY) is the polarized
// form of q.
struct HamiltonMap {
  int n = 0;
  cmat F;

  rmat re() const { return F.real(); }
  rmat im() const { return F.imag(); }
};

// Coordinate index sets I, J of Definition 1; entries are 1-based and
// strictly increasing.
struct IndexSets {
  std::vector<int> I;
  std::vector<int> J;
};

// Result of the singular-space computation.
struct SingularAnalysis {
  rmat basis_S;               // 2n x d, orthonormal columns
  int dim_S = 0;
  int k0 = 0;                 // smallest j with the partial intersection equal to S
  std::optional<IndexSets> index_sets;  // present only when S is axis aligned
  bool diffusive = false;
  bool imF_kernel_inclusion = false;
  double rank_tol = 0.0;
};

// Generalized Ornstein-Uhlenbeck data: diffusion Q, potential R, drift B.
struct GOUSpec {
  int n = 0;
  rmat Q;  // symmetric PSD
  rmat R;  // symmetric PSD
  rmat B;
};

// Validates and wraps a coefficient matrix. Throws BadDimension for an odd
// side, NotSymmetric above 1e-12 relative asymmetry, NotAccretive when the
// real part has an eigenvalue below -1e-10 * ||Re C||.
QuadraticSymbol build_symbol(const cmat& coeff);

HamiltonMap hamilton_map(const QuadraticSymbol& q);

// Singular space S = cap_{j=0}^{2n-1} Ker(Re F (Im F)^j) over R^{2n},
// computed as the null space of the stacked matrix with SVD thresholding.
// Fills k0, the axis-aligned index sets when they exist, the diffusive flag
// and the S subset Ker(Im F) flag.
SingularAnalysis singular_space(const HamiltonMap& F, double rank_tol = -1.0);

// Detects whether span(basis_S)^perp is a coordinate subspace R^n_I x R^n_J.
// Entries of candidate basis vectors below rank_tol snap to zero; only
// permutation-like bases are accepted. Absent result means not axis aligned.
std::optional<IndexSets> diffusive_decomposition(const rmat& basis_S, int n, double rank_tol);

bool im_kernel_inclusion(const HamiltonMap& F, const rmat& basis_S, double rank_tol);

int smallest_k0(const HamiltonMap& F, double rank_tol = -1.0);

// Builds the symbol q(x,xi) = 1/2|Q^{1/2}xi|^2 + 1/2|R^{1/2}x|^2 - i<Bx,xi>
// together with the closed-form singular space
// [cap_j Ker(R B^j)] x [cap_j Ker(Q (B^T)^j)], j < n.
struct GOUSymbol {
  QuadraticSymbol symbol;
  rmat closed_form_S;  // orthonormal columns
};
GOUSymbol gou_symbol(const GOUSpec& spec);

// Kalman rank of [Qhalf, B Qhalf, ..., B^{n-1} Qhalf]; the boolean is rank
// == n, cross-checked against the emptiness of cap_j Ker(Qhalf (B^T)^j).
struct KalmanResult {
  int rank = 0;
  bool full = false;
};
KalmanResult kalman_rank(const rmat& B, const rmat& Qhalf, double rank_tol = -1.0);

// Evaluates the iterated Poisson brackets (H^k_{Im q} Re q)(X) for k <=
// k_max through the coefficient-matrix recursion G_{k+1} = 2(G_k F_im +
// F_im^T G_k); true when every value stays below rank_tol * ||q|| * |X|^2.
bool hamilton_flow_vanishing(const QuadraticSymbol& q, const rvec& X, int k_max,
                             double rank_tol = -1.0);

// The individual bracket values, exposed for cross-validation tests.
std::vector<double> hamilton_flow_values(const QuadraticSymbol& q, const rvec& X, int k_max);

// Reference operators.
// Kramers-Fokker-Planck with quadratic potential a/2 |x|^2 on R^{2n}_{x,v}:
// q = |eta|^2 + 1/4 |v|^2 + i(<v,xi> - a<x,eta>); phase half-dimension 2n.
QuadraticSymbol kfp_symbol(int n, double a);
// Kolmogorov operator -d_v^2 + v d_x on R^2: q = eta^2 + i v xi.
QuadraticSymbol kolmogorov_symbol();
// Harmonic oscillator q = x^2 + xi^2 (n = 1).
QuadraticSymbol harmonic_oscillator_symbol();
// Free heat q = |xi|^2 on R^n.
QuadraticSymbol heat_symbol(int n);

}  // namespace quadrop
