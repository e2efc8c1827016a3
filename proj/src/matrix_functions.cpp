#include "quadrop/matrix_functions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "quadrop/errors.hpp"

namespace quadrop {

rmat symplectic_matrix(int n) {
  rmat J = rmat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = rmat::Identity(n, n);
  J.bottomLeftCorner(n, n) = -rmat::Identity(n, n);
  return J;
}

cdouble symplectic_form(const cvec& X, const cvec& Y) {
  const int dim = static_cast<int>(X.size());
  if (dim % 2 != 0 || Y.size() != dim) throw BadDimension("symplectic_form: odd or mismatched dimension");
  const int n = dim / 2;
  // sigma(X,Y) = <xi, y> - <x, eta>, bilinear in both arguments.
  cdouble s = 0.0;
  for (int j = 0; j < n; ++j) s += X(n + j) * Y(j) - X(j) * Y(n + j);
  return s;
}

double symmetry_defect(const cmat& M) {
  const double nrm = M.norm();
  if (nrm == 0.0) return 0.0;
  return (M - M.transpose()).norm() / nrm;
}

double min_symmetric_eigenvalue(const rmat& A) {
  Eigen::SelfAdjointEigenSolver<rmat> es(0.5 * (A + A.transpose()));
  return es.eigenvalues().minCoeff();
}

namespace {

struct SvdSplit {
  Eigen::JacobiSVD<rmat> svd;
  int rank;
};

SvdSplit split_rank(const rmat& A, double rank_tol) {
  SvdSplit out{Eigen::JacobiSVD<rmat>(A, Eigen::ComputeFullU | Eigen::ComputeFullV), 0};
  const auto& sv = out.svd.singularValues();
  if (sv.size() == 0) return out;
  const double cut = rank_tol * sv(0);
  int r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  // The cut is only trusted when the spectrum has a clear gap there.
  if (r > 0 && r < sv.size()) {
    const double below = sv(r);
    if (below > 0.0 && sv(r - 1) / below < 10.0)
      throw IllConditioned("ambiguous numerical rank: spectral gap below factor 10 at the cut");
  }
  out.rank = r;
  return out;
}

}  // namespace

rmat nullspace(const rmat& A, double rank_tol) {
  if (A.size() == 0) return rmat::Identity(0, 0);
  SvdSplit s = split_rank(A, rank_tol);
  return s.svd.matrixV().rightCols(A.cols() - s.rank);
}

rmat column_space(const rmat& A, double rank_tol) {
  SvdSplit s = split_rank(A, rank_tol);
  return s.svd.matrixU().leftCols(s.rank);
}

int numerical_rank(const rmat& A, double rank_tol) {
  return split_rank(A, rank_tol).rank;
}

double max_principal_angle(const rmat& U, const rmat& V) {
  if (U.cols() != V.cols())
    throw BadDimension("max_principal_angle: subspace dimensions differ");
  if (U.cols() == 0) return 0.0;
  Eigen::JacobiSVD<rmat> svd(U.transpose() * V);
  double worst = 0.0;
  for (int j = 0; j < svd.singularValues().size(); ++j) {
    const double c = std::clamp(svd.singularValues()(j), -1.0, 1.0);
    worst = std::max(worst, std::acos(c));
  }
  return worst;
}

cmat expm_series(const cmat& A) {
  const int n = static_cast<int>(A.rows());
  const double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const cmat B = A / std::pow(2.0, s);

  cmat sum = cmat::Identity(n, n);
  cmat term = cmat::Identity(n, n);
  const double bn = 0.5;  // scaled norm bound
  double term_bound = 1.0;
  for (int k = 1; k <= 64; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
    term_bound *= bn / k;
    // Geometric tail bound: remaining terms are below term_bound * 1/(1-r).
    const double tail = term_bound * (bn / (k + 1)) / (1.0 - bn / (k + 2));
    if (tail < 1e-18) break;
  }
  for (int j = 0; j < s; ++j) sum = sum * sum;
  return sum;
}

namespace {

struct EigenPath {
  bool usable = false;
  Eigen::ComplexEigenSolver<cmat> es;
  cmat vinv;
};

EigenPath try_eigen_path(const cmat& F) {
  EigenPath p;
  p.es.compute(F);
  if (p.es.info() != Eigen::Success) return p;
  const cmat& V = p.es.eigenvectors();
  Eigen::JacobiSVD<cmat> svd(V);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin >= 1e8) return p;
  p.vinv = V.inverse();
  p.usable = true;
  return p;
}

cmat apply_scalar_function(const EigenPath& p, const std::function<cdouble(cdouble)>& f) {
  cvec d = p.es.eigenvalues();
  for (int j = 0; j < d.size(); ++j) d(j) = f(d(j));
  return p.es.eigenvectors() * d.asDiagonal() * p.vinv;
}

}  // namespace

PropagatorMatrices propagator_matrices(const cmat& F, double t, MatFunPath path) {
  if (t < 0.0) throw BadDimension("propagator_matrices: negative time");
  const int dim = static_cast<int>(F.rows());
  const cdouble iu(0.0, 1.0);
  PropagatorMatrices out;

  bool used_eigen = false;
  if (path != MatFunPath::Series) {
    EigenPath p = try_eigen_path(F);
    if (p.usable) {
      out.cos_tf = apply_scalar_function(p, [&](cdouble z) { return std::cos(t * z); });
      const cmat sin_tf = apply_scalar_function(p, [&](cdouble z) { return std::sin(t * z); });
      out.exp_2itf = apply_scalar_function(p, [&](cdouble z) { return std::exp(2.0 * iu * t * z); });
      out.tan_tf = out.cos_tf.partialPivLu().solve(sin_tf);
      used_eigen = true;
    } else if (path == MatFunPath::Eigendecomposition) {
      throw IllConditioned("eigendecomposition path requested but eigenvector basis is ill conditioned");
    }
  }
  if (!used_eigen) {
    const cmat Ep = expm_series(iu * t * F);
    const cmat Em = expm_series(-iu * t * F);
    out.cos_tf = 0.5 * (Ep + Em);
    const cmat sin_tf = (Ep - Em) / (2.0 * iu);
    out.exp_2itf = Ep * Ep;
    out.tan_tf = out.cos_tf.partialPivLu().solve(sin_tf);
  }

  out.det_cos = out.cos_tf.determinant();
  if (std::abs(out.det_cos) < 1e-10)
    throw FocalTime("det cos(tF) below 1e-10: propagator symbol singular at t = " + std::to_string(t));
  (void)dim;
  return out;
}

cdouble det_cos_tf(const cmat& F, double t, MatFunPath path) {
  const cdouble iu(0.0, 1.0);
  if (path != MatFunPath::Series) {
    EigenPath p = try_eigen_path(F);
    if (p.usable) {
      cdouble det = 1.0;
      for (int j = 0; j < p.es.eigenvalues().size(); ++j) det *= std::cos(t * p.es.eigenvalues()(j));
      return det;
    }
    if (path == MatFunPath::Eigendecomposition)
      throw IllConditioned("eigendecomposition path requested but eigenvector basis is ill conditioned");
  }
  const cmat Ep = expm_series(iu * t * F);
  const cmat Em = expm_series(-iu * t * F);
  return (0.5 * (Ep + Em)).determinant();
}

}  // namespace quadrop
