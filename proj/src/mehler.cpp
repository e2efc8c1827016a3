#include "quadrop/mehler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "quadrop/errors.hpp"

namespace quadrop {

GaussianSymbol make_gaussian(cdouble prefactor, const cmat& A) {
  if (A.rows() != A.cols()) throw BadDimension("make_gaussian: A must be square");
  if (symmetry_defect(A) > 1e-12) throw NotSymmetric("make_gaussian: A asymmetry exceeds 1e-12");
  const rmat re = 0.5 * (A.real() + A.real().transpose());
  if (min_symmetric_eigenvalue(re) < -1e-10 * std::max(re.norm(), 1e-300))
    throw NotAccretive("make_gaussian: Re A must be positive semidefinite");
  GaussianSymbol g;
  g.prefactor = prefactor;
  g.A = 0.5 * (A + A.transpose());
  return g;
}

namespace {

// Branch for positive definite real part: A = L (I + iM) L^T with
// M = L^{-1} Im A L^{-T}, so det(A)^{1/2} = det(L) prod (1+i lambda_j)^{1/2}
// with principal square roots (each factor has real part 1).
cdouble sqrt_det_pd(const cmat& A) {
  const rmat re = A.real();
  Eigen::LLT<rmat> llt(re);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("sqrt_det_pd: real part is not positive definite");
  const rmat L = llt.matrixL();
  const rmat M = L.triangularView<Eigen::Lower>().solve(
      rmat(L.triangularView<Eigen::Lower>().solve(A.imag()).transpose()));
  Eigen::SelfAdjointEigenSolver<rmat> es(0.5 * (M + M.transpose()));
  cdouble out = 1.0;
  for (int j = 0; j < es.eigenvalues().size(); ++j)
    out *= std::sqrt(cdouble(1.0, es.eigenvalues()(j)));
  double det_L = 1.0;
  for (int j = 0; j < L.rows(); ++j) det_L *= L(j, j);
  return det_L * out;
}

}  // namespace

cdouble sqrt_det_branch(const cmat& A) {
  const int N = static_cast<int>(A.rows());
  const double scale = std::max(A.norm(), 1e-300);
  const cdouble det = A.determinant();
  if (std::abs(det) < 1e-12 * std::pow(scale, N))
    throw SingularForm("sqrt_det_branch: form matrix is numerically singular");

  const rmat re = 0.5 * (A.real() + A.real().transpose());
  if (min_symmetric_eigenvalue(re) > 1e-12 * scale) return sqrt_det_pd(A);

  // Re A only semidefinite: regularize, evaluate the PD branch at A + eps I,
  // and continue the square root to eps = 0 through the determinant ratio.
  double eps = 1e-6 * scale;
  for (int iter = 0; iter < 60; ++iter) {
    const cmat Ae = A + eps * cmat::Identity(N, N);
    const cdouble ratio = det / Ae.determinant();
    if (std::abs(std::arg(ratio)) < 0.5 && std::abs(std::abs(ratio) - 1.0) < 0.5) {
      return sqrt_det_pd(Ae) * std::sqrt(ratio);
    }
    eps *= 0.5;
  }
  throw IllConditioned("sqrt_det_branch: branch continuation to the semidefinite limit failed");
}

SimDiag simultaneous_diagonalize(const rmat& ReA, const rmat& ImA) {
  Eigen::LLT<rmat> llt(0.5 * (ReA + ReA.transpose()));
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("simultaneous_diagonalize: ReA is not positive definite");
  const rmat L = llt.matrixL();
  const rmat M = L.triangularView<Eigen::Lower>().solve(
      rmat(L.triangularView<Eigen::Lower>().solve(0.5 * (ImA + ImA.transpose())).transpose()));
  Eigen::SelfAdjointEigenSolver<rmat> es(0.5 * (M + M.transpose()));
  SimDiag out;
  out.lambda = es.eigenvalues();
  out.P = L.transpose().triangularView<Eigen::Upper>().solve(rmat(es.eigenvectors()));
  const double resid1 = (out.P.transpose() * ReA * out.P - rmat::Identity(ReA.rows(), ReA.cols())).norm();
  const double resid2 = (out.P.transpose() * ImA * out.P - rmat(out.lambda.asDiagonal())).norm();
  const double scale = std::max({ReA.norm(), ImA.norm(), 1.0});
  if (resid1 > 1e-9 * scale || resid2 > 1e-9 * scale)
    throw IllConditioned("simultaneous_diagonalize: reconstruction residual above 1e-9");
  return out;
}

namespace {

// Continuous determination of log det cos(tF) from 0 to t. Steps with an
// argument jump above 0.5 are bisected; total step cap 2^20.
cdouble log_det_cos_path(const cmat& F, double t, MatFunPath path) {
  cdouble log_acc = 0.0;
  cdouble d_prev = 1.0;
  double t_prev = 0.0;
  std::vector<double> pending{t};
  long steps = 0;
  while (!pending.empty()) {
    if (++steps > (1L << 20))
      throw IllConditioned("mehler_form: branch path refinement exceeded 2^20 steps");
    const double t_next = pending.back();
    const cdouble d_next = det_cos_tf(F, t_next, path);
    const cdouble ratio = d_next / d_prev;
    if (std::abs(std::arg(ratio)) > 0.5 || std::abs(d_next) < 1e-14) {
      if (t_next - t_prev < 1e-12)
        throw FocalTime("mehler_form: determinant path hits a focal point");
      pending.push_back(0.5 * (t_prev + t_next));
      continue;
    }
    log_acc += std::log(std::abs(ratio)) + cdouble(0.0, std::arg(ratio));
    d_prev = d_next;
    t_prev = t_next;
    pending.pop_back();
  }
  return log_acc;
}

}  // namespace

MehlerSymbol mehler_form(const HamiltonMap& F, double t, MatFunPath path) {
  const PropagatorMatrices prop = propagator_matrices(F.F, t, path);
  MehlerSymbol out;
  out.t = t;
  // sigma(X, MX) = X^T J^T M X; the symmetric part carries the form.
  const cmat M = symplectic_matrix(F.n).transpose().cast<cdouble>() * prop.tan_tf;
  out.form = 0.5 * (M + M.transpose());
  out.norm_factor = std::exp(-0.5 * log_det_cos_path(F.F, t, path));
  return out;
}

GaussianSymbol gaussian_fourier(const GaussianSymbol& g) {
  const int N = g.dim();
  const cdouble sqrt_det = sqrt_det_branch(g.A);  // throws SingularForm
  const cmat Ainv = g.A.inverse();
  GaussianSymbol out;
  out.prefactor = g.prefactor * std::pow(M_PI, 0.5 * N) / sqrt_det;
  const cmat B = 0.25 * Ainv;
  out.A = 0.5 * (B + B.transpose());
  return out;
}

cdouble auxiliary_Qt(const HamiltonMap& F, double t, const cvec& X, MatFunPath path) {
  const int dim = 2 * F.n;
  cmat E;
  const cdouble iu(0.0, 1.0);
  if (path != MatFunPath::Series) {
    try {
      E = propagator_matrices(F.F, t, path).exp_2itf;
    } catch (const FocalTime&) {
      E = expm_series(2.0 * iu * t * F.F);
    }
  } else {
    E = expm_series(2.0 * iu * t * F.F);
  }
  const cmat I = cmat::Identity(dim, dim);
  const cvec u = ((E + I) * X).conjugate();
  const cvec v = (E - I) * X;
  return -iu * symplectic_form(u, v);
}

double odd_derivative_test(const HamiltonMap& F, const cvec& X, int k) {
  if (k < 0) throw BadDimension("odd_derivative_test: k must be nonnegative");
  cvec Y = X;
  for (int j = 0; j < k; ++j) Y = F.F * Y;
  const cvec W = F.re().cast<cdouble>() * Y;
  double binom = 1.0;
  for (int j = 1; j <= k; ++j) binom *= static_cast<double>(k + j) / j;  // C(2k,k)
  const cdouble s = symplectic_form(Y.conjugate(), W);
  return std::pow(4.0, k + 1) * binom * s.real();
}

CoercivityFit coercivity_exponent(const HamiltonMap& F, const SingularAnalysis& S,
                                  const std::vector<double>& t_grid,
                                  int sphere_samples, unsigned long seed) {
  const int dim = 2 * F.n;
  if (S.dim_S == dim) throw EmptyComplement("coercivity_exponent: S is the whole phase space");
  if (static_cast<int>(t_grid.size()) < 8)
    throw InsufficientData("coercivity_exponent: need at least 8 t values");
  if (sphere_samples < 200)
    throw InsufficientData("coercivity_exponent: need at least 200 sphere samples");

  // Orthonormal basis of S^perp.
  rmat perp;
  if (S.dim_S == 0) {
    perp = rmat::Identity(dim, dim);
  } else {
    perp = nullspace(rmat(S.basis_S.transpose()), S.rank_tol);
  }
  const int d = static_cast<int>(perp.cols());

  std::vector<rvec> samples;
  for (int j = 0; j < d; ++j) {
    samples.push_back(perp.col(j));
    samples.push_back(-perp.col(j));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(samples.size()) < sphere_samples) {
    rvec c(d);
    for (int j = 0; j < d; ++j) c(j) = gauss(rng);
    if (c.norm() < 1e-8) continue;
    rvec X = perp * c;
    samples.push_back(X / X.norm());
  }

  CoercivityFit fit;
  fit.t_grid = t_grid;
  const int k0 = S.k0;
  double c_min = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    const PropagatorMatrices prop = propagator_matrices(F.F, t);
    const cmat M = symplectic_matrix(F.n).transpose().cast<cdouble>() * prop.tan_tf;
    const rmat A_re = 0.5 * (M + M.transpose()).real();
    double m = std::numeric_limits<double>::infinity();
    for (const rvec& X : samples) {
      const double v = X.transpose() * A_re * X;
      m = std::min(m, v);
      c_min = std::min(c_min, v / std::pow(t, 2 * k0 + 1));
    }
    fit.min_values.push_back(m);
  }

  // Least-squares slope of log m against log t.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (size_t j = 0; j < t_grid.size(); ++j) {
    if (fit.min_values[j] <= 0.0) continue;
    const double x = std::log(t_grid[j]);
    const double y = std::log(fit.min_values[j]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; ++cnt;
  }
  if (cnt < 4) throw InsufficientData("coercivity_exponent: too few positive minima for the fit");
  fit.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  fit.constant = c_min;
  fit.bound_holds = c_min > 0.0;
  return fit;
}

double gaussian_moment_closed_form(int p) {
  const double lg = -p * std::log(4.0) + std::lgamma(2.0 * p + 1.0) - std::lgamma(p + 1.0);
  return std::exp(lg) * std::sqrt(M_PI);
}

double gaussian_moment_recursion(int p) {
  double log_I = 0.5 * std::log(M_PI);
  for (int j = 0; j < p; ++j) log_I += std::log(0.5 * (2.0 * j + 1.0));
  return std::exp(log_I);
}

WeightedGaussianNorm weighted_gaussian_norm(int p, double c) {
  if (p < 0 || p > 170) throw OverflowGuard("weighted_gaussian_norm: p must be in [0, 170]");
  if (c <= 0.0) throw ParameterOutOfRange("weighted_gaussian_norm: c must be positive");
  const double log_Ip = -p * std::log(4.0) + std::lgamma(2.0 * p + 1.0) -
                        std::lgamma(p + 1.0) + 0.5 * std::log(M_PI);
  WeightedGaussianNorm out;
  const double log_norm_sq = log_Ip - (p + 0.5) * std::log(2.0 * c);
  out.norm_sq = std::exp(log_norm_sq);
  out.norm = std::exp(0.5 * log_norm_sq);
  out.bound = std::exp(0.25 * std::log(M_PI) - (0.5 * p + 0.25) * std::log(c) +
                       0.5 * std::lgamma(p + 1.0));
  if (out.norm > out.bound * (1.0 + 1e-12))
    throw IllConditioned("weighted_gaussian_norm: exact norm exceeds the Gevrey bound");
  return out;
}

}  // namespace quadrop
