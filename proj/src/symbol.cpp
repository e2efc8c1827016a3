#include "quadrop/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "quadrop/errors.hpp"

namespace quadrop {

double default_rank_tol(int phase_dim) {
  return phase_dim * std::numeric_limits<double>::epsilon();
}

double QuadraticSymbol::real_part(const rvec& X) const {
  return X.transpose() * coeff.real() * X;
}

QuadraticSymbol build_symbol(const cmat& coeff) {
  if (coeff.rows() != coeff.cols() || coeff.rows() < 2 || coeff.rows() % 2 != 0)
    throw BadDimension("build_symbol: coefficient matrix must be square with even side >= 2");
  if (symmetry_defect(coeff) > 1e-12)
    throw NotSymmetric("build_symbol: coefficient matrix asymmetry exceeds 1e-12 relative");
  const rmat re = 0.5 * (coeff.real() + coeff.real().transpose());
  const double lam_min = min_symmetric_eigenvalue(re);
  if (lam_min < -1e-10 * std::max(re.norm(), 1e-300))
    throw NotAccretive("build_symbol: Re q has a negative eigenvalue");
  QuadraticSymbol q;
  q.n = static_cast<int>(coeff.rows()) / 2;
  q.coeff = 0.5 * (coeff + coeff.transpose());
  return q;
}

HamiltonMap hamilton_map(const QuadraticSymbol& q) {
  HamiltonMap h;
  h.n = q.n;
  h.F = symplectic_matrix(q.n) * q.coeff;
  return h;
}

namespace {

// Orthonormal bases of the partial intersections cap_{j<=k} Ker(Re F (Im F)^j),
// one entry per k in [0, 2n-1].
std::vector<rmat> kernel_chain(const HamiltonMap& h, double rank_tol) {
  const int dim = 2 * h.n;
  const rmat re = h.re();
  const rmat im = h.im();
  std::vector<rmat> chain;
  rmat stacked(0, dim);
  rmat factor = rmat::Identity(dim, dim);
  for (int j = 0; j < dim; ++j) {
    rmat block = re * factor;
    stacked.conservativeResize(stacked.rows() + dim, dim);
    stacked.bottomRows(dim) = block;
    chain.push_back(nullspace(stacked, rank_tol));
    factor = im * factor;
  }
  return chain;
}

std::vector<int> full_range(int n) {
  std::vector<int> v(n);
  for (int j = 0; j < n; ++j) v[j] = j + 1;
  return v;
}

}  // namespace

std::optional<IndexSets> diffusive_decomposition(const rmat& basis_S, int n, double rank_tol) {
  const int dim = 2 * n;
  // Every canonical basis vector must lie entirely in S or entirely in
  // S^perp for the complement to be a coordinate subspace.
  IndexSets sets;
  const double snap = std::max(rank_tol, 1e-10);
  for (int m = 0; m < dim; ++m) {
    double proj_sq = 0.0;
    if (basis_S.cols() > 0) proj_sq = basis_S.row(m).squaredNorm();
    const bool in_S = proj_sq > 1.0 - snap;
    const bool in_perp = proj_sq < snap;
    if (!in_S && !in_perp) return std::nullopt;
    if (in_perp) {
      if (m < n)
        sets.I.push_back(m + 1);
      else
        sets.J.push_back(m - n + 1);
    }
  }
  return sets;
}

bool im_kernel_inclusion(const HamiltonMap& F, const rmat& basis_S, double rank_tol) {
  if (basis_S.cols() == 0) return true;
  const rmat im = F.im();
  const double scale = std::max(im.norm(), 1e-300);
  return (im * basis_S).norm() <= std::max(rank_tol, 1e-12) * scale;
}

SingularAnalysis singular_space(const HamiltonMap& F, double rank_tol) {
  const int dim = 2 * F.n;
  if (rank_tol <= 0.0) rank_tol = default_rank_tol(dim);
  const auto chain = kernel_chain(F, rank_tol);

  SingularAnalysis out;
  out.rank_tol = rank_tol;
  out.basis_S = chain.back();
  out.dim_S = static_cast<int>(out.basis_S.cols());
  out.k0 = 0;
  for (int j = 0; j < static_cast<int>(chain.size()); ++j) {
    if (chain[j].cols() == out.dim_S) {
      out.k0 = j;
      break;
    }
  }
  out.index_sets = diffusive_decomposition(out.basis_S, F.n, rank_tol);
  if (out.index_sets) {
    out.diffusive = static_cast<int>(out.index_sets->J.size()) == F.n;
  }
  out.imF_kernel_inclusion = im_kernel_inclusion(F, out.basis_S, rank_tol);
  return out;
}

int smallest_k0(const HamiltonMap& F, double rank_tol) {
  if (rank_tol <= 0.0) rank_tol = default_rank_tol(2 * F.n);
  const auto chain = kernel_chain(F, rank_tol);
  const int dim_S = static_cast<int>(chain.back().cols());
  for (int j = 0; j < static_cast<int>(chain.size()); ++j)
    if (chain[j].cols() == dim_S) return j;
  return 2 * F.n - 1;
}

GOUSymbol gou_symbol(const GOUSpec& spec) {
  const int n = spec.n;
  if (spec.Q.rows() != n || spec.Q.cols() != n || spec.R.rows() != n ||
      spec.R.cols() != n || spec.B.rows() != n || spec.B.cols() != n)
    throw BadDimension("gou_symbol: Q, R, B must all be n x n");
  if (symmetry_defect(spec.Q.cast<cdouble>()) > 1e-12 ||
      symmetry_defect(spec.R.cast<cdouble>()) > 1e-12)
    throw NotSymmetric("gou_symbol: Q and R must be symmetric");
  if (min_symmetric_eigenvalue(spec.Q) < -1e-10 * std::max(spec.Q.norm(), 1e-300) ||
      min_symmetric_eigenvalue(spec.R) < -1e-10 * std::max(spec.R.norm(), 1e-300))
    throw NotAccretive("gou_symbol: Q and R must be positive semidefinite");

  const cdouble iu(0.0, 1.0);
  cmat coeff = cmat::Zero(2 * n, 2 * n);
  coeff.topLeftCorner(n, n) = 0.5 * spec.R.cast<cdouble>();
  coeff.bottomRightCorner(n, n) = 0.5 * spec.Q.cast<cdouble>();
  coeff.topRightCorner(n, n) = -0.5 * iu * spec.B.transpose().cast<cdouble>();
  coeff.bottomLeftCorner(n, n) = -0.5 * iu * spec.B.cast<cdouble>();

  GOUSymbol out;
  out.symbol = build_symbol(coeff);

  // Closed-form singular space: the x-factor is cap_j Ker(R B^j) and the
  // xi-factor is cap_j Ker(Q (B^T)^j), both for j < n.
  const double tol = default_rank_tol(2 * n);
  rmat stack_x(0, n), stack_xi(0, n);
  rmat powB = rmat::Identity(n, n), powBt = rmat::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    stack_x.conservativeResize(stack_x.rows() + n, n);
    stack_x.bottomRows(n) = spec.R * powB;
    stack_xi.conservativeResize(stack_xi.rows() + n, n);
    stack_xi.bottomRows(n) = spec.Q * powBt;
    powB = powB * spec.B;
    powBt = powBt * spec.B.transpose();
  }
  const rmat ker_x = nullspace(stack_x, tol);
  const rmat ker_xi = nullspace(stack_xi, tol);
  rmat S = rmat::Zero(2 * n, ker_x.cols() + ker_xi.cols());
  S.topLeftCorner(n, ker_x.cols()) = ker_x;
  S.bottomRightCorner(n, ker_xi.cols()) = ker_xi;
  out.closed_form_S = S;
  return out;
}

KalmanResult kalman_rank(const rmat& B, const rmat& Qhalf, double rank_tol) {
  const int n = static_cast<int>(B.rows());
  if (B.cols() != n || Qhalf.rows() != n || Qhalf.cols() != n)
    throw BadDimension("kalman_rank: B and Qhalf must be square of the same size");
  if (rank_tol <= 0.0) rank_tol = default_rank_tol(2 * n);

  rmat K(n, n * n);
  rmat block = Qhalf;
  for (int j = 0; j < n; ++j) {
    K.middleCols(j * n, n) = block;
    block = B * block;
  }
  KalmanResult out;
  out.rank = numerical_rank(K, rank_tol);
  out.full = (out.rank == n);

  // Cross-check against the kernel-intersection characterization.
  rmat stack(0, n);
  rmat powBt = rmat::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    stack.conservativeResize(stack.rows() + n, n);
    stack.bottomRows(n) = Qhalf * powBt;
    powBt = powBt * B.transpose();
  }
  const bool empty_kernel = nullspace(stack, rank_tol).cols() == 0;
  if (empty_kernel != out.full)
    throw IllConditioned("kalman_rank: rank test and kernel-intersection test disagree");
  return out;
}

std::vector<double> hamilton_flow_values(const QuadraticSymbol& q, const rvec& X, int k_max) {
  const rmat F_im = symplectic_matrix(q.n) * q.coeff.imag();
  rmat G = q.coeff.real();
  std::vector<double> values;
  values.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    values.push_back(X.transpose() * G * X);
    G = 2.0 * (G * F_im + F_im.transpose() * G);
  }
  return values;
}

bool hamilton_flow_vanishing(const QuadraticSymbol& q, const rvec& X, int k_max,
                             double rank_tol) {
  if (k_max < 2 * q.n - 1)
    throw BadDimension("hamilton_flow_vanishing: k_max must be at least 2n-1");
  if (rank_tol <= 0.0) rank_tol = default_rank_tol(2 * q.n);
  // The bracket coefficient matrices grow with k; the vanishing test is
  // relative to the size of the bracket actually evaluated.
  const rmat F_im = symplectic_matrix(q.n) * q.coeff.imag();
  rmat G = q.coeff.real();
  const double floor_scale = std::max(q.coeff.norm(), 1e-300);
  for (int k = 0; k <= k_max; ++k) {
    const double v = X.transpose() * G * X;
    const double scale = std::max(rank_tol, 1e-12) * std::max(G.norm(), floor_scale) * X.squaredNorm();
    if (std::abs(v) > scale) return false;
    G = 2.0 * (G * F_im + F_im.transpose() * G);
  }
  return true;
}

QuadraticSymbol kfp_symbol(int n, double a) {
  const cdouble iu(0.0, 1.0);
  const int dim = 4 * n;
  cmat C = cmat::Zero(dim, dim);
  const auto blk = [&](int r, int c) { return std::pair<int, int>(r * n, c * n); };
  const cmat I = cmat::Identity(n, n);
  // variable order (x, v, xi, eta)
  C.block(blk(3, 3).first, blk(3, 3).second, n, n) = I;               // |eta|^2
  C.block(blk(1, 1).first, blk(1, 1).second, n, n) = 0.25 * I;        // 1/4 |v|^2
  C.block(blk(1, 2).first, blk(1, 2).second, n, n) = 0.5 * iu * I;    // i <v, xi>
  C.block(blk(2, 1).first, blk(2, 1).second, n, n) = 0.5 * iu * I;
  C.block(blk(0, 3).first, blk(0, 3).second, n, n) = -0.5 * a * iu * I;  // -i a <x, eta>
  C.block(blk(3, 0).first, blk(3, 0).second, n, n) = -0.5 * a * iu * I;
  return build_symbol(C);
}

QuadraticSymbol kolmogorov_symbol() {
  const cdouble iu(0.0, 1.0);
  cmat C = cmat::Zero(4, 4);
  C(3, 3) = 1.0;           // eta^2
  C(1, 2) = 0.5 * iu;      // i v xi
  C(2, 1) = 0.5 * iu;
  return build_symbol(C);
}

QuadraticSymbol harmonic_oscillator_symbol() {
  cmat C = cmat::Identity(2, 2);
  return build_symbol(C);
}

QuadraticSymbol heat_symbol(int n) {
  cmat C = cmat::Zero(2 * n, 2 * n);
  C.bottomRightCorner(n, n) = cmat::Identity(n, n);
  return build_symbol(C);
}

}  // namespace quadrop
