#include "quadrop/hermite.hpp"

#include <cmath>

#include "quadrop/errors.hpp"

namespace quadrop {

rmat hermite_op_x(int N) {
  rmat X = rmat::Zero(N, N);
  for (int k = 1; k < N; ++k) {
    X(k - 1, k) = std::sqrt(0.5 * k);
    X(k, k - 1) = std::sqrt(0.5 * k);
  }
  return X;
}

rmat hermite_op_ddx(int N) {
  rmat D = rmat::Zero(N, N);
  for (int k = 1; k < N; ++k) {
    D(k - 1, k) = std::sqrt(0.5 * k);
    D(k, k - 1) = -std::sqrt(0.5 * k);
  }
  return D;
}

rmat hermite_op_x2(int N) {
  rmat X2 = rmat::Zero(N, N);
  for (int k = 0; k < N; ++k) {
    X2(k, k) = k + 0.5;
    if (k + 2 < N) {
      const double v = 0.5 * std::sqrt((k + 1.0) * (k + 2.0));
      X2(k, k + 2) = v;
      X2(k + 2, k) = v;
    }
  }
  return X2;
}

rmat hermite_op_d2(int N) {
  rmat D2 = rmat::Zero(N, N);
  for (int k = 0; k < N; ++k) {
    D2(k, k) = -(k + 0.5);
    if (k + 2 < N) {
      const double v = 0.5 * std::sqrt((k + 1.0) * (k + 2.0));
      D2(k, k + 2) = v;
      D2(k + 2, k) = v;
    }
  }
  return D2;
}

rmat hermite_op_xd_plus_dx(int N) {
  // x d/dx + d/dx x = a^2 - (a^+)^2.
  rmat A = rmat::Zero(N, N);
  for (int k = 0; k + 2 < N; ++k) {
    const double v = std::sqrt((k + 1.0) * (k + 2.0));
    A(k, k + 2) = v;
    A(k + 2, k) = -v;
  }
  return A;
}

namespace {

// Kronecker product A0 (dimension 0) with A1 (dimension 1).
cmat kron2(const cmat& A0, const cmat& A1) {
  const int N = static_cast<int>(A0.rows());
  cmat out(static_cast<long>(N) * N, static_cast<long>(N) * N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      out.block(static_cast<long>(a) * N, static_cast<long>(b) * N, N, N) = A0(a, b) * A1;
  return out;
}

// Places a one-dimensional operator on tensor factor d.
cmat place(const cmat& A, int n, int d) {
  if (n == 1) return A;
  const cmat I = cmat::Identity(A.rows(), A.cols());
  return d == 0 ? kron2(A, I) : kron2(I, A);
}

}  // namespace

HermiteOperator hermite_matrix(const QuadraticSymbol& q, int N) {
  const int n = q.n;
  if (n > 2) throw TruncationTooLarge("hermite_matrix: only n <= 2 is supported");
  if (N > 64 || N < 2) throw TruncationTooLarge("hermite_matrix: N must lie in [2, 64]");

  const cdouble iu(0.0, 1.0);
  const long dim = (n == 1) ? N : static_cast<long>(N) * N;
  HermiteOperator H;
  H.n = n;
  H.N = N;
  H.M = cmat::Zero(dim, dim);

  const cmat Qxx = q.coeff.topLeftCorner(n, n);
  const cmat Qxxi = q.coeff.topRightCorner(n, n);
  const cmat Qxixi = q.coeff.bottomRightCorner(n, n);

  const cmat X = hermite_op_x(N).cast<cdouble>();
  const cmat D = -iu * hermite_op_ddx(N).cast<cdouble>();
  const cmat X2 = hermite_op_x2(N).cast<cdouble>();
  const cmat D2 = -hermite_op_d2(N).cast<cdouble>();  // (xi^2)^w = -d^2/dx^2
  const cmat XDsym = -0.5 * iu * hermite_op_xd_plus_dx(N).cast<cdouble>();  // (x xi)^w

  // Same-dimension Weyl monomials come from the exact second-order
  // matrices; cross-dimension products factor through the tensor structure.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        H.M += Qxx(i, i) * place(X2, n, i);
        H.M += Qxixi(i, i) * place(D2, n, i);
        H.M += 2.0 * Qxxi(i, i) * place(XDsym, n, i);
      } else {
        const auto pair = [&](const cmat& Oi, const cmat& Oj) {
          return (i == 0) ? kron2(Oi, Oj) : kron2(Oj, Oi);
        };
        H.M += Qxx(i, j) * pair(X, X);
        H.M += Qxixi(i, j) * pair(D, D);
        H.M += 2.0 * Qxxi(i, j) * pair(X, D);
      }
    }
  return H;
}

cmat expm_pade(const cmat& A) {
  // Higham's degree-13 Pade coefficients.
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const int n = static_cast<int>(A.rows());
  const double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  const double theta13 = 5.371920351148152;
  if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
  const cmat As = A / std::pow(2.0, s);

  const cmat A2 = As * As;
  const cmat A4 = A2 * A2;
  const cmat A6 = A2 * A4;
  const cmat I = cmat::Identity(n, n);
  const cmat U = As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) +
                       b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const cmat V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) +
                 b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  cmat R = (V - U).partialPivLu().solve(V + U);
  for (int j = 0; j < s; ++j) R = R * R;
  return R;
}

const cmat& HermitePropagator::at(double t) {
  auto it = cache_.find(t);
  if (it != cache_.end()) return it->second;

  // Reach t from the largest cached time below it.
  double t0 = 0.0;
  for (const auto& [tc, mat] : cache_)
    if (tc < t && tc > t0) t0 = tc;
  cmat E = expm_pade(cmat(-(t - t0) * op_.M));
  if (t0 > 0.0) E = E * cache_.at(t0);
  return cache_.emplace(t, std::move(E)).first->second;
}

FunctionState evolve_hermite(HermitePropagator& prop, double t, const FunctionState& u) {
  if (u.rep != FunctionState::Rep::Hermite)
    throw BadDimension("evolve_hermite: expected a hermite state");
  if (u.N != prop.op().N || u.n != prop.op().n)
    throw BadDimension("evolve_hermite: truncation mismatch");
  FunctionState out = u;
  if (t > 0.0) out.data = prop.at(t) * u.data;
  const double before = u.data.norm();
  if (before > 0.0 && out.data.norm() > before * (1.0 + 1e-8))
    throw StageDivergence("evolve_hermite: semigroup norm increased beyond tolerance");
  return out;
}

namespace {

// Ladder action of x_d or d/dx_d; the truncation grows by one mode so the
// result is exact on the span of the input.
FunctionState hermite_apply_1d(const FunctionState& u, int d, bool derivative) {
  if (u.rep != FunctionState::Rep::Hermite)
    throw BadDimension("hermite ladder apply: expected a hermite state");
  if (d < 0 || d >= u.n) throw BadDimension("hermite ladder apply: bad dimension index");
  const int N = u.N;
  const int Np = N + 1;
  FunctionState out;
  out.rep = FunctionState::Rep::Hermite;
  out.n = u.n;
  out.N = Np;
  out.data = cvec::Zero((u.n == 1) ? Np : static_cast<long>(Np) * Np);

  const auto in_at = [&](int k, int other) -> cdouble {
    if (k < 0 || k >= N) return 0.0;
    if (u.n == 1) return u.data(k);
    return (d == 0) ? u.data(static_cast<long>(k) * N + other)
                    : u.data(static_cast<long>(other) * N + k);
  };
  const int lim_other = (u.n == 1) ? 1 : N;
  for (int other = 0; other < lim_other; ++other)
    for (int k = 0; k < Np; ++k) {
      // (x u)_k = sqrt(k/2) c_{k-1} + sqrt((k+1)/2) c_{k+1}
      // (u' )_k = sqrt((k+1)/2) c_{k+1} - sqrt(k/2) c_{k-1}
      cdouble v = (derivative ? -1.0 : 1.0) * std::sqrt(0.5 * k) * in_at(k - 1, other) +
                  std::sqrt(0.5 * (k + 1)) * in_at(k + 1, other);
      if (u.n == 1)
        out.data(k) = v;
      else if (d == 0)
        out.data(static_cast<long>(k) * Np + other) = v;
      else
        out.data(static_cast<long>(other) * Np + k) = v;
    }
  return out;
}

}  // namespace

FunctionState hermite_apply_x(const FunctionState& u, int d) {
  return hermite_apply_1d(u, d, false);
}

FunctionState hermite_apply_ddx(const FunctionState& u, int d) {
  return hermite_apply_1d(u, d, true);
}

double hermite_seminorm(const FunctionState& u, const std::vector<int>& alpha,
                        const std::vector<int>& beta) {
  if (u.rep != FunctionState::Rep::Hermite)
    throw BadDimension("hermite_seminorm: expected a hermite state");
  if (static_cast<int>(alpha.size()) != u.n || static_cast<int>(beta.size()) != u.n)
    throw BadDimension("hermite_seminorm: bad multi-index length");
  int total = 0;
  for (int v : alpha) total += v;
  for (int v : beta) total += v;
  if (total > 8) throw BadDimension("hermite_seminorm: |alpha|+|beta| above 8");

  FunctionState w = u;
  for (int d = 0; d < u.n; ++d)
    for (int c = 0; c < beta[d]; ++c) w = hermite_apply_ddx(w, d);
  for (int d = 0; d < u.n; ++d)
    for (int c = 0; c < alpha[d]; ++c) w = hermite_apply_x(w, d);
  return w.data.norm();
}

}  // namespace quadrop
