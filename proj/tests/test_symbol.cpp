#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "quadrop/errors.hpp"
#include "quadrop/symbol.hpp"

using namespace quadrop;

namespace {

// ----- exact rational arithmetic oracle (test-only) -----

struct Frac {
  long long num = 0, den = 1;
  Frac() = default;
  Frac(long long n, long long d = 1) : num(n), den(d) { normalize(); }
  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(std::abs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }
  Frac operator+(const Frac& o) const { return Frac(num * o.den + o.num * den, den * o.den); }
  Frac operator-(const Frac& o) const { return Frac(num * o.den - o.num * den, den * o.den); }
  Frac operator*(const Frac& o) const { return Frac(num * o.num, den * o.den); }
  Frac operator/(const Frac& o) const { return Frac(num * o.den, den * o.num); }
  bool is_zero() const { return num == 0; }
};

using FracMat = std::vector<std::vector<Frac>>;

FracMat frac_from(const rmat& A, long long scale = 4) {
  FracMat out(A.rows(), std::vector<Frac>(A.cols()));
  for (int r = 0; r < A.rows(); ++r)
    for (int c = 0; c < A.cols(); ++c) {
      const double v = A(r, c) * scale;
      const long long iv = std::llround(v);
      REQUIRE(std::abs(v - iv) < 1e-12);  // oracle inputs must be exact quarters
      out[r][c] = Frac(iv, scale);
    }
  return out;
}

int frac_rank(FracMat A) {
  const int rows = static_cast<int>(A.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(A[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (!A[r][c].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(A[rank], A[pivot]);
    for (int r = 0; r < rows; ++r) {
      if (r == rank || A[r][c].is_zero()) continue;
      const Frac f = A[r][c] / A[rank][c];
      for (int cc = c; cc < cols; ++cc) A[r][cc] = A[r][cc] - f * A[rank][cc];
    }
    ++rank;
  }
  return rank;
}

FracMat frac_multiply(const FracMat& A, const FracMat& B) {
  const int n = static_cast<int>(A.size());
  const int m = static_cast<int>(B[0].size());
  const int k = static_cast<int>(B.size());
  FracMat C(n, std::vector<Frac>(m));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) {
      Frac acc(0);
      for (int j = 0; j < k; ++j) acc = acc + A[r][j] * B[j][c];
      C[r][c] = acc;
    }
  return C;
}

// Nullity of the stacked matrix [Re F; Re F Im F; ...; Re F (Im F)^k].
int exact_partial_kernel_dim(const rmat& reF, const rmat& imF, int k) {
  const FracMat re = frac_from(reF);
  const FracMat im = frac_from(imF);
  FracMat stacked;
  FracMat factor(re[0].size(), std::vector<Frac>(re[0].size()));
  for (size_t j = 0; j < factor.size(); ++j) factor[j][j] = Frac(1);
  for (int j = 0; j <= k; ++j) {
    const FracMat block = frac_multiply(re, factor);
    for (const auto& row : block) stacked.push_back(row);
    factor = frac_multiply(im, factor);
  }
  return static_cast<int>(re[0].size()) - frac_rank(stacked);
}

cmat random_accretive(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  rmat G(2 * n, 2 * n), H(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c) {
      G(r, c) = g(rng);
      H(r, c) = g(rng);
    }
  const rmat re = G * G.transpose();  // PSD
  const rmat im = 0.5 * (H + H.transpose());
  return re.cast<cdouble>() + cdouble(0.0, 1.0) * im.cast<cdouble>();
}

std::vector<int> range_set(int lo, int hi) {
  std::vector<int> v;
  for (int j = lo; j <= hi; ++j) v.push_back(j);
  return v;
}

}  // namespace

TEST_CASE("build_symbol validates shape, symmetry, accretivity") {
  cmat ok(2, 2);
  ok << 0.0, 0.0, 0.0, 1.0;
  const QuadraticSymbol q = build_symbol(ok);
  CHECK(q.n == 1);

  cmat neg(2, 2);
  neg << 0.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(build_symbol(neg), NotAccretive);

  CHECK_THROWS_AS(build_symbol(cmat::Zero(3, 3)), BadDimension);

  cmat asym(2, 2);
  asym << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(build_symbol(asym), NotSymmetric);

  CHECK_NOTHROW(kfp_symbol(1, 0.0));
  CHECK(kfp_symbol(1, 0.0).n == 2);
}

TEST_CASE("hamilton_map matches the reference matrices") {
  SUBCASE("free heat n=1") {
    const HamiltonMap F = hamilton_map(heat_symbol(1));
    cmat expected(2, 2);
    expected << 0.0, 1.0, 0.0, 0.0;
    CHECK((F.F - expected).norm() < 1e-15);
  }
  SUBCASE("Kramers-Fokker-Planck with potential parameter") {
    const double a = 0.7;
    const int n = 2;
    const HamiltonMap F = hamilton_map(kfp_symbol(n, a));
    const cdouble iu(0.0, 1.0);
    cmat expected = cmat::Zero(4 * n, 4 * n);
    const cmat I = cmat::Identity(n, n);
    expected.block(0 * n, 1 * n, n, n) = 0.5 * iu * I;
    expected.block(1 * n, 0 * n, n, n) = -0.5 * a * iu * I;
    expected.block(1 * n, 3 * n, n, n) = I;
    expected.block(2 * n, 3 * n, n, n) = 0.5 * a * iu * I;
    expected.block(3 * n, 1 * n, n, n) = -0.25 * I;
    expected.block(3 * n, 2 * n, n, n) = -0.5 * iu * I;
    CHECK((F.F - expected).norm() < 1e-14);
  }
  SUBCASE("generalized Ornstein-Uhlenbeck block form") {
    GOUSpec spec;
    spec.n = 2;
    spec.Q = (rmat(2, 2) << 2.0, 1.0, 1.0, 3.0).finished();
    spec.R = (rmat(2, 2) << 1.0, 0.0, 0.0, 0.5).finished();
    spec.B = (rmat(2, 2) << 0.0, 1.5, -0.5, 0.25).finished();
    const GOUSymbol built = gou_symbol(spec);
    const HamiltonMap F = hamilton_map(built.symbol);
    const cdouble iu(0.0, 1.0);
    cmat expected(4, 4);
    expected.topLeftCorner(2, 2) = -0.5 * iu * spec.B.cast<cdouble>();
    expected.topRightCorner(2, 2) = 0.5 * spec.Q.cast<cdouble>();
    expected.bottomLeftCorner(2, 2) = -0.5 * spec.R.cast<cdouble>();
    expected.bottomRightCorner(2, 2) = 0.5 * iu * spec.B.transpose().cast<cdouble>();
    CHECK((F.F - expected).norm() < 1e-14);
  }
}

TEST_CASE("singular space of the KFP family") {
  for (int n : {1, 2}) {
    CAPTURE(n);
    SUBCASE("a = 0: S is the position block") {
      const HamiltonMap F = hamilton_map(kfp_symbol(n, 0.0));
      const SingularAnalysis an = singular_space(F);
      CHECK(an.dim_S == n);
      CHECK(an.k0 == 1);
      REQUIRE(an.index_sets.has_value());
      CHECK(an.index_sets->I == range_set(n + 1, 2 * n));
      CHECK(an.index_sets->J == range_set(1, 2 * n));
      CHECK(an.diffusive);
      CHECK(an.imF_kernel_inclusion);
      // basis vectors live in the x block
      CHECK(an.basis_S.bottomRows(3 * n).norm() < 1e-10);
    }
    SUBCASE("a != 0: S is trivial") {
      const HamiltonMap F = hamilton_map(kfp_symbol(n, 0.4));
      const SingularAnalysis an = singular_space(F);
      CHECK(an.dim_S == 0);
      CHECK(an.k0 == 1);
      CHECK(an.diffusive);
      CHECK(an.imF_kernel_inclusion);
      REQUIRE(an.index_sets.has_value());
      CHECK(an.index_sets->I == range_set(1, 2 * n));
      CHECK(an.index_sets->J == range_set(1, 2 * n));
    }
  }
}

TEST_CASE("Kolmogorov operator: alignment without the Im F inclusion") {
  const HamiltonMap F = hamilton_map(kolmogorov_symbol());
  const SingularAnalysis an = singular_space(F);
  CHECK(an.dim_S == 2);
  CHECK(an.k0 == 1);
  REQUIRE(an.index_sets.has_value());
  CHECK(an.index_sets->I.empty());
  CHECK(an.index_sets->J == range_set(1, 2));
  CHECK(an.diffusive);
  CHECK_FALSE(an.imF_kernel_inclusion);

  // exact-arithmetic oracle for the kernel intersection dimensions
  const int d0 = exact_partial_kernel_dim(F.re(), F.im(), 0);
  const int d1 = exact_partial_kernel_dim(F.re(), F.im(), 1);
  const int d3 = exact_partial_kernel_dim(F.re(), F.im(), 3);
  CHECK(d0 == 3);
  CHECK(d1 == 2);
  CHECK(d3 == 2);  // stabilizes at k0 = 1
  CHECK(smallest_k0(F) == 1);
}

TEST_CASE("k0 for the harmonic oscillator is zero") {
  const HamiltonMap F = hamilton_map(harmonic_oscillator_symbol());
  CHECK(smallest_k0(F) == 0);
  const SingularAnalysis an = singular_space(F);
  CHECK(an.dim_S == 0);
  CHECK(an.k0 == 0);
}

TEST_CASE("exact oracle confirms k0 = 1 for KFP without potential") {
  const HamiltonMap F = hamilton_map(kfp_symbol(1, 0.0));
  CHECK(exact_partial_kernel_dim(F.re(), F.im(), 0) == 2);
  CHECK(exact_partial_kernel_dim(F.re(), F.im(), 1) == 1);
  CHECK(exact_partial_kernel_dim(F.re(), F.im(), 3) == 1);
}

TEST_CASE("gou_symbol closed form against the generic computation") {
  SUBCASE("heat: Q = 2I, R = 0, B = 0") {
    GOUSpec spec;
    spec.n = 2;
    spec.Q = 2.0 * rmat::Identity(2, 2);
    spec.R = rmat::Zero(2, 2);
    spec.B = rmat::Zero(2, 2);
    const GOUSymbol built = gou_symbol(spec);
    // q = |xi|^2
    cmat expected = cmat::Zero(4, 4);
    expected.bottomRightCorner(2, 2) = cmat::Identity(2, 2);
    CHECK((built.symbol.coeff - expected).norm() < 1e-14);
    CHECK(built.closed_form_S.cols() == 2);
    CHECK(built.closed_form_S.bottomRows(2).norm() < 1e-12);  // R^n x {0}
  }
  SUBCASE("worked two-dimensional example") {
    const double a = 0.3, b = 1.2, c = 0.5, d = 0.8, e = 1.4;
    GOUSpec spec;
    spec.n = 2;
    const rmat Qh = (rmat(2, 2) << a, c, c, b).finished();
    spec.Q = Qh * Qh;
    spec.R = (rmat(2, 2) << 0.0, 0.0, 0.0, e).finished();
    spec.B = (rmat(2, 2) << 0.0, d, 0.0, 0.0).finished();
    const GOUSymbol built = gou_symbol(spec);
    // x-factor of S is Ker R cap Ker RB = R x {0}
    const rmat Sx = built.closed_form_S.topRows(2);
    REQUIRE(built.closed_form_S.cols() == 1);
    CHECK(std::abs(std::abs(Sx(0, 0)) - 1.0) < 1e-12);
    CHECK(std::abs(Sx(1, 0)) < 1e-12);
    // matches the generic kernel-intersection computation
    const SingularAnalysis an = singular_space(hamilton_map(built.symbol));
    REQUIRE(an.dim_S == 1);
    CHECK(max_principal_angle(an.basis_S, built.closed_form_S) < 1e-8);
  }
  SUBCASE("trivial singular space when everything is elliptic") {
    GOUSpec spec;
    spec.n = 2;
    spec.Q = rmat::Identity(2, 2);
    spec.R = rmat::Identity(2, 2);
    spec.B = rmat::Zero(2, 2);
    const GOUSymbol built = gou_symbol(spec);
    CHECK(built.closed_form_S.cols() == 0);
  }
}

TEST_CASE("gou closed form agrees with generic S on random specs") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int rq = 1 + static_cast<int>(rng() % n);
    const int rr = static_cast<int>(rng() % (n + 1));
    rmat GQ(n, rq), GR(n, std::max(rr, 1)), B(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < rq; ++c) GQ(r, c) = g(rng);
      for (int c = 0; c < std::max(rr, 1); ++c) GR(r, c) = g(rng);
      for (int c = 0; c < n; ++c) B(r, c) = g(rng);
    }
    GOUSpec spec;
    spec.n = n;
    spec.Q = GQ * GQ.transpose();
    spec.R = rr == 0 ? rmat::Zero(n, n) : rmat(GR * GR.transpose());
    spec.B = B;
    const GOUSymbol built = gou_symbol(spec);
    const SingularAnalysis an = singular_space(hamilton_map(built.symbol));
    CAPTURE(trial);
    REQUIRE(an.dim_S == built.closed_form_S.cols());
    if (an.dim_S > 0) CHECK(max_principal_angle(an.basis_S, built.closed_form_S) < 1e-8);
  }
}

TEST_CASE("kalman_rank") {
  SUBCASE("worked example has full rank") {
    const double b = 1.2, c = 0.5, d = 0.8;
    const rmat Qh = (rmat(2, 2) << 0.3, c, c, b).finished();
    const rmat B = (rmat(2, 2) << 0.0, d, 0.0, 0.0).finished();
    const KalmanResult res = kalman_rank(B, Qh);
    CHECK(res.rank == 2);
    CHECK(res.full);
  }
  SUBCASE("identity diffusion is always controllable") {
    const KalmanResult res = kalman_rank(rmat::Zero(3, 3), rmat::Identity(3, 3));
    CHECK(res.rank == 3);
    CHECK(res.full);
  }
  SUBCASE("nilpotent drift against a degenerate diffusion") {
    const rmat B = (rmat(2, 2) << 0.0, 1.0, 0.0, 0.0).finished();
    const rmat Qh = (rmat(2, 2) << 1.0, 0.0, 0.0, 0.0).finished();
    const KalmanResult res = kalman_rank(B, Qh);
    CHECK(res.rank == 1);
    CHECK_FALSE(res.full);
    // direct column enumeration oracle in exact arithmetic:
    // columns of [Qh, B Qh] are (1,0),(0,0),(0,0),(0,0) -> rank 1
    FracMat K(2, std::vector<Frac>(4));
    K[0][0] = Frac(1);
    CHECK(frac_rank(K) == 1);
  }
  SUBCASE("kalman iff trivial xi-factor of the closed-form S") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 3);
      const int rq = 1 + static_cast<int>(rng() % n);
      rmat GQ(n, rq), B(n, n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < rq; ++c) GQ(r, c) = g(rng);
        for (int c = 0; c < n; ++c) B(r, c) = g(rng);
      }
      GOUSpec spec;
      spec.n = n;
      spec.Q = GQ * GQ.transpose();
      spec.R = rmat::Zero(n, n);
      spec.B = B;
      const GOUSymbol built = gou_symbol(spec);
      const bool xi_trivial = built.closed_form_S.bottomRows(n).norm() < 1e-10 &&
                              built.closed_form_S.cols() == n;  // S = R^n x {0}
      Eigen::SelfAdjointEigenSolver<rmat> es(spec.Q);
      const rmat Qh = es.eigenvectors() *
                      rvec(es.eigenvalues().cwiseMax(0.0).cwiseSqrt()).asDiagonal() *
                      es.eigenvectors().transpose();
      CHECK(kalman_rank(B, Qh).full == xi_trivial);
    }
  }
}

TEST_CASE("hamilton_flow_vanishing cross-validates the singular space") {
  const QuadraticSymbol q = kfp_symbol(1, 0.0);
  rvec ex = rvec::Zero(4), ev = rvec::Zero(4);
  ex(0) = 1.0;
  ev(1) = 1.0;
  CHECK(hamilton_flow_vanishing(q, ex, 3));
  CHECK_FALSE(hamilton_flow_vanishing(q, ev, 3));
  CHECK(hamilton_flow_vanishing(q, rvec::Zero(4), 3));
  CHECK_THROWS_AS(hamilton_flow_vanishing(q, ex, 1), BadDimension);

  // flow test agrees with the computed basis and its complement
  const SingularAnalysis an = singular_space(hamilton_map(q));
  for (int j = 0; j < an.dim_S; ++j)
    CHECK(hamilton_flow_vanishing(q, an.basis_S.col(j), 3, an.rank_tol));
  const rmat perp = nullspace(rmat(an.basis_S.transpose()), an.rank_tol);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    rvec c(perp.cols());
    for (int j = 0; j < c.size(); ++j) c(j) = g(rng);
    rvec X = perp * c;
    X /= X.norm();
    CHECK_FALSE(hamilton_flow_vanishing(q, X, 3, an.rank_tol));
  }
}

TEST_CASE("random accretive symbols: Hamilton maps are sigma-skew") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const QuadraticSymbol q = build_symbol(random_accretive(n, rng));
    const HamiltonMap F = hamilton_map(q);
    cvec X(2 * n), Y(2 * n);
    for (int j = 0; j < 2 * n; ++j) {
      X(j) = g(rng);
      Y(j) = g(rng);
    }
    const cdouble resid = symplectic_form(X, cvec(F.F * Y)) + symplectic_form(cvec(F.F * X), Y);
    CHECK(std::abs(resid) <= 1e-10 * F.F.norm() * X.norm() * Y.norm());
  }
}

TEST_CASE("k0 minimality: partial intersection dimensions decrease then freeze") {
  for (const QuadraticSymbol& q :
       {kfp_symbol(1, 0.0), kfp_symbol(1, 0.3), kolmogorov_symbol(), heat_symbol(2)}) {
    const HamiltonMap F = hamilton_map(q);
    const SingularAnalysis an = singular_space(F);
    const int dim = 2 * q.n;
    rmat stacked(0, dim);
    rmat factor = rmat::Identity(dim, dim);
    int prev = dim + 1;
    for (int j = 0; j < dim; ++j) {
      stacked.conservativeResize(stacked.rows() + dim, dim);
      stacked.bottomRows(dim) = F.re() * factor;
      const int d = static_cast<int>(nullspace(stacked, an.rank_tol).cols());
      if (j <= an.k0 && j > 0) CHECK(d <= prev);
      if (j < an.k0) CHECK(d > an.dim_S);
      if (j >= an.k0) CHECK(d == an.dim_S);
      prev = d;
      factor = F.im() * factor;
    }
  }
}

TEST_CASE("diffusive decomposition refuses rotated singular spaces") {
  // q = (xi cos(th) + x sin(th))^2 has a one-dimensional kernel tilted away
  // from the axes.
  const double th = 0.5;
  cmat C(2, 2);
  const double s = std::sin(th), c = std::cos(th);
  C << s * s, s * c, s * c, c * c;
  const QuadraticSymbol q = build_symbol(C);
  const SingularAnalysis an = singular_space(hamilton_map(q));
  CHECK(an.dim_S == 1);
  CHECK_FALSE(an.index_sets.has_value());
  CHECK_FALSE(an.diffusive);
}

TEST_CASE("ambiguous rank raises IllConditioned") {
  const double tol = default_rank_tol(4);
  rmat A = rmat::Zero(4, 4);
  A(0, 0) = 1.0;
  A(1, 1) = 3.0 * tol;     // just above the cut
  A(2, 2) = 0.5 * tol;     // just below: factor-6 gap only
  CHECK_THROWS_AS(nullspace(A, tol), IllConditioned);
}
