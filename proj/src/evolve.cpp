#include "quadrop/evolve.hpp"

#include <cmath>

#include "quadrop/errors.hpp"

namespace quadrop {

cdouble GaussianWeylOp::kernel(const rvec& x, const rvec& y) const {
  cvec v(2 * n);
  v.head(n) = x.cast<cdouble>();
  v.tail(n) = y.cast<cdouble>();
  const cdouble e = (v.transpose() * W * v)(0);
  return c * std::exp(e);
}

GaussianWeylOp GaussianWeylOp::adjoint() const {
  GaussianWeylOp out = *this;
  out.prefactor = std::conj(prefactor);
  out.A = A.conjugate();
  out.c = std::conj(c);
  out.W = W.conjugate();
  return out;
}

GaussianWeylOp weyl_gaussian_op(int n, cdouble prefactor, const cmat& A) {
  if (A.rows() != 2 * n || A.cols() != 2 * n)
    throw BadDimension("weyl_gaussian_op: A must be 2n x 2n");
  GaussianWeylOp op;
  op.n = n;
  op.prefactor = prefactor;
  op.A = A;

  const cmat Axx = A.topLeftCorner(n, n);
  const cmat Axxi = A.topRightCorner(n, n);
  const cmat Axixi = A.bottomRightCorner(n, n);
  const cdouble sdet = sqrt_det_branch(Axixi);  // throws SingularForm
  const cmat S = Axixi.inverse();

  // Exponent in the midpoint/difference frame (z, w) = ((x+y)/2, x-y):
  //   z^T (Axxi S Axxi^T - Axx) z - i z^T Axxi S w - 1/4 w^T S w.
  const cdouble iu(0.0, 1.0);
  cmat C = cmat::Zero(2 * n, 2 * n);
  C.topLeftCorner(n, n) = Axxi * S * Axxi.transpose() - Axx;
  C.topRightCorner(n, n) = -0.5 * iu * Axxi * S;
  C.bottomLeftCorner(n, n) = C.topRightCorner(n, n).transpose();
  C.bottomRightCorner(n, n) = -0.25 * S;

  cmat T = cmat::Zero(2 * n, 2 * n);  // (x,y) -> (z,w)
  T.topLeftCorner(n, n) = 0.5 * cmat::Identity(n, n);
  T.topRightCorner(n, n) = 0.5 * cmat::Identity(n, n);
  T.bottomLeftCorner(n, n) = cmat::Identity(n, n);
  T.bottomRightCorner(n, n) = -cmat::Identity(n, n);

  op.W = T.transpose() * C * T;
  op.W = 0.5 * (op.W + cmat(op.W.transpose()));
  op.c = prefactor * std::pow(2.0 * M_PI, -n) * std::pow(M_PI, 0.5 * n) / sdet;
  return op;
}

GaussianWeylOp mehler_op(const HamiltonMap& F, double t, MatFunPath path) {
  const MehlerSymbol ms = mehler_form(F, t, path);
  return weyl_gaussian_op(F.n, ms.norm_factor, ms.form);
}

namespace {

struct ModeData {
  // Per-mode y-integral of the kernel against e^{i xi0 y}:
  //   E(x) = c2 exp(x^T Q1 x) exp(<Q2 xi0, x>) exp(xi0^T Q3 xi0).
  cdouble c2;
  cmat Q1, Q2, Q3;
};

ModeData mode_data(const GaussianWeylOp& op) {
  const int n = op.n;
  const cmat Wxx = op.W.topLeftCorner(n, n);
  const cmat Wxy = op.W.topRightCorner(n, n);
  const cmat Wyy = op.W.bottomRightCorner(n, n);
  const cmat negWyy = -Wyy;
  const cdouble sdet = sqrt_det_branch(negWyy);
  const cmat G = negWyy.inverse();
  const cdouble iu(0.0, 1.0);
  ModeData md;
  md.Q1 = Wxx + Wxy * G * Wxy.transpose();
  md.Q2 = iu * Wxy * G;
  md.Q3 = -0.25 * G;
  md.c2 = op.c * std::pow(M_PI, 0.5 * n) / sdet;
  return md;
}

}  // namespace

FunctionState evolve_plane_wave(const GaussianWeylOp& op, const rvec& xi0,
                                const FunctionState& like) {
  const ModeData md = mode_data(op);
  const int n = op.n;
  const cdouble phase3 = std::exp((xi0.cast<cdouble>().transpose() * md.Q3 * xi0.cast<cdouble>())(0));
  const cvec q = md.Q2 * xi0.cast<cdouble>();
  const double norm = std::pow(2.0 * like.L, -0.5 * n);
  FunctionState out = like;
  const double h = like.step();
  rvec x(n);
  for (long idx = 0; idx < out.data.size(); ++idx) {
    long rem = idx;
    for (int d = n - 1; d >= 0; --d) {
      x(d) = -like.L + h * (rem % like.M);
      rem /= like.M;
    }
    const cdouble e1 = (x.cast<cdouble>().transpose() * md.Q1 * x.cast<cdouble>())(0);
    const cdouble e2 = (q.transpose() * x.cast<cdouble>())(0);
    out.data(idx) = norm * md.c2 * phase3 * std::exp(e1 + e2);
  }
  return out;
}

FunctionState apply_weyl_spectral(const GaussianWeylOp& op, const FunctionState& u) {
  if (u.rep != FunctionState::Rep::Grid) throw BadDimension("apply_weyl_spectral: grid state required");
  const int n = op.n;
  const int M = u.M;
  const ModeData md = mode_data(op);
  const GridFourier fu = grid_fourier(u);
  // Mode amplitudes of the trigonometric interpolant:
  // u(x) = sum_m a_m e^{i xi_m x}, a_m = u^_m / (2L)^n.
  const double amp = std::pow(2.0 * u.L, -n);

  FunctionState out = u;
  const double h = u.step();
  std::vector<double> xs(M), freqs(M);
  for (int j = 0; j < M; ++j) {
    xs[j] = -u.L + h * j;
    freqs[j] = fu.freq(j);
  }

  if (n == 1) {
    cvec acc = cvec::Zero(M);
    for (int m = 0; m < M; ++m) {
      const cdouble a = fu.coeffs(m) * amp;
      if (a == cdouble(0.0, 0.0)) continue;
      const double xi = freqs[m];
      const cdouble s = a * md.c2 * std::exp(md.Q3(0, 0) * xi * xi);
      const cdouble q = md.Q2(0, 0) * xi;
      for (int j = 0; j < M; ++j) acc(j) += s * std::exp(q * xs[j]);
    }
    for (int j = 0; j < M; ++j) {
      const cdouble e1 = md.Q1(0, 0) * xs[j] * xs[j];
      out.data(j) = std::exp(e1) * acc(j);
    }
    return out;
  }
  if (n != 2) throw BadDimension("apply_weyl_spectral: only n <= 2 is supported");

  // Each mode contributes s_m T1_m(x1) T2_m(x2); the double sum collapses to
  // one GEMM of the per-mode one-dimensional tables.
  const long modes = static_cast<long>(M) * M;
  cmat S1(M, modes);   // column m: s_m * T1_m
  cmat T2(modes, M);   // row m: T2_m
  S1.setZero();
  T2.setZero();
  for (long m = 0; m < modes; ++m) {
    const cdouble a = fu.coeffs(m) * amp;
    const double xi1 = freqs[m / M];
    const double xi2 = freqs[m % M];
    rvec xi(2);
    xi << xi1, xi2;
    const cdouble e3 = (xi.cast<cdouble>().transpose() * md.Q3 * xi.cast<cdouble>())(0);
    const cdouble s = a * md.c2 * std::exp(e3);
    const cvec q = md.Q2 * xi.cast<cdouble>();
    for (int j = 0; j < M; ++j) {
      S1(j, m) = s * std::exp(q(0) * xs[j]);
      T2(m, j) = std::exp(q(1) * xs[j]);
    }
  }
  const cmat R = S1 * T2;  // R(j1, j2)
  for (int j1 = 0; j1 < M; ++j1)
    for (int j2 = 0; j2 < M; ++j2) {
      rvec x(2);
      x << xs[j1], xs[j2];
      const cdouble e1 = (x.cast<cdouble>().transpose() * md.Q1 * x.cast<cdouble>())(0);
      out.data(static_cast<long>(j1) * M + j2) = std::exp(e1) * R(j1, j2);
    }
  return out;
}

FunctionState apply_weyl_trapezoid(const GaussianWeylOp& op, const FunctionState& u) {
  if (u.rep != FunctionState::Rep::Grid) throw BadDimension("apply_weyl_trapezoid: grid state required");
  const int n = op.n;
  const int M = u.M;
  const double h = u.step();
  const double hn = std::pow(h, n);
  FunctionState out = u;
  const long total = u.data.size();

  std::vector<rvec> pts(total, rvec(n));
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int d = n - 1; d >= 0; --d) {
      pts[idx](d) = -u.L + h * (rem % M);
      rem /= M;
    }
  }
#pragma omp parallel for schedule(static)
  for (long ix = 0; ix < total; ++ix) {
    cdouble acc = 0.0;
    for (long iy = 0; iy < total; ++iy) acc += op.kernel(pts[ix], pts[iy]) * u.data(iy);
    out.data(ix) = hn * acc;
  }
  return out;
}

FunctionState evolve_mehler(const HamiltonMap& F, double t, const FunctionState& u,
                            MatFunPath path, bool adjoint) {
  if (u.rep != FunctionState::Rep::Grid) throw BadDimension("evolve_mehler: grid state required");
  if (boundary_tail_mass(u) > 1e-6)
    throw GridUnderResolved("evolve_mehler: input state is not resolved by the grid");
  if (t == 0.0) return u;
  GaussianWeylOp op = mehler_op(F, t, path);
  if (adjoint) op = op.adjoint();
  FunctionState out = apply_weyl_spectral(op, u);
  if (boundary_tail_mass(out) > 1e-6)
    throw GridUnderResolved("evolve_mehler: evolved state leaks into the boundary band");
  return out;
}

}  // namespace quadrop
