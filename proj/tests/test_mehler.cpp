#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "quadrop/errors.hpp"
#include "quadrop/mehler.hpp"

using namespace quadrop;

namespace {

// Adaptive Simpson quadrature for complex integrands (test-only oracle).
cdouble simpson(const std::function<cdouble(double)>& f, double a, double b,
                cdouble fa, cdouble fb, cdouble fm, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const cdouble flm = f(lm), frm = f(rm);
  const cdouble whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const cdouble left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const cdouble right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, fm, flm, 0.5 * eps, depth - 1) +
         simpson(f, m, b, fm, fb, frm, 0.5 * eps, depth - 1);
}

cdouble integrate(const std::function<cdouble(double)>& f, double a, double b,
                  double eps = 1e-12) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(b), f(m), eps, 48);
}

// Finite-difference derivative of odd order 2k+1 at 0, Richardson
// extrapolated once (O(h^4) truncation).
double odd_fd(const std::function<double(double)>& f, int k, double h) {
  const auto base = [&](double hh) {
    if (k == 0) return (8.0 * (f(hh) - f(-hh)) - (f(2 * hh) - f(-2 * hh))) / (12.0 * hh);
    return (f(2 * hh) - 2.0 * f(hh) + 2.0 * f(-hh) - f(-2 * hh)) / (2.0 * hh * hh * hh);
  };
  return (4.0 * base(0.5 * h) - base(h)) / 3.0;
}

}  // namespace

TEST_CASE("propagator matrices") {
  SUBCASE("nilpotent heat map: cos = I, tan = tF") {
    const HamiltonMap F = hamilton_map(heat_symbol(1));
    const PropagatorMatrices p = propagator_matrices(F.F, 0.7);
    CHECK((p.cos_tf - cmat::Identity(2, 2)).norm() < 1e-14);
    CHECK((p.tan_tf - 0.7 * F.F).norm() < 1e-14);
    CHECK(std::abs(p.det_cos - 1.0) < 1e-14);
  }
  SUBCASE("Schroedinger harmonic oscillator hits a focal time at pi/2") {
    const cdouble iu(0.0, 1.0);
    const QuadraticSymbol q = build_symbol(cmat(iu * cmat::Identity(2, 2)));
    const HamiltonMap F = hamilton_map(q);
    CHECK_NOTHROW(propagator_matrices(F.F, 1.0));
    CHECK_THROWS_AS(propagator_matrices(F.F, M_PI / 2.0), FocalTime);
  }
  SUBCASE("KFP: eigendecomposition and series paths agree") {
    const HamiltonMap F = hamilton_map(kfp_symbol(1, 0.0));
    const cdouble d_series = det_cos_tf(F.F, 0.3, MatFunPath::Series);
    const cdouble d_auto = det_cos_tf(F.F, 0.3, MatFunPath::Auto);
    CHECK(std::abs(d_series - d_auto) <= 1e-9 * std::abs(d_series));
    const PropagatorMatrices ps = propagator_matrices(F.F, 0.3, MatFunPath::Series);
    const PropagatorMatrices pa = propagator_matrices(F.F, 0.3, MatFunPath::Auto);
    CHECK((ps.tan_tf - pa.tan_tf).norm() <= 1e-9 * ps.tan_tf.norm());
    CHECK((ps.exp_2itf - pa.exp_2itf).norm() <= 1e-9 * ps.exp_2itf.norm());
  }
}

TEST_CASE("Mehler forms match the closed-form symbols") {
  SUBCASE("Kolmogorov: q_t = (t^3/12) xi^2 + t eta^2 + i t v xi") {
    const HamiltonMap F = hamilton_map(kolmogorov_symbol());
    for (double t : {0.1, 0.5, 1.0}) {
      CAPTURE(t);
      const MehlerSymbol ms = mehler_form(F, t);
      cmat expected = cmat::Zero(4, 4);
      expected(2, 2) = t * t * t / 12.0;
      expected(3, 3) = t;
      expected(1, 2) = cdouble(0.0, 0.5 * t);
      expected(2, 1) = expected(1, 2);
      CHECK((ms.form - expected).norm() <= 1e-9 * expected.norm());
      CHECK(std::abs(ms.norm_factor - 1.0) < 1e-12);  // nilpotent F
    }
  }
  SUBCASE("KFP without potential: tanh closed form") {
    const HamiltonMap F = hamilton_map(kfp_symbol(1, 0.0));
    for (double t : {0.1, 0.5, 1.0}) {
      CAPTURE(t);
      const double th = std::tanh(0.5 * t);
      const MehlerSymbol ms = mehler_form(F, t);
      cmat expected = cmat::Zero(4, 4);
      expected(1, 1) = 0.5 * th;              // 1/2 tanh(t/2) v^2
      expected(2, 2) = t - 2.0 * th;          // (t - 2 tanh(t/2)) xi^2
      expected(3, 3) = 2.0 * th;              // 2 tanh(t/2) eta^2
      expected(1, 2) = cdouble(0.0, th);      // 2i tanh(t/2) v xi
      expected(2, 1) = expected(1, 2);
      CHECK((ms.form - expected).norm() <= 1e-9 * expected.norm());
    }
  }
  SUBCASE("heat: q_t = t xi^2 with unit normalization") {
    const HamiltonMap F = hamilton_map(heat_symbol(1));
    const MehlerSymbol ms = mehler_form(F, 0.4);
    cmat expected = cmat::Zero(2, 2);
    expected(1, 1) = 0.4;
    CHECK((ms.form - expected).norm() < 1e-12);
    CHECK(std::abs(ms.norm_factor - 1.0) < 1e-12);
  }
  SUBCASE("norm factor is continuous from 1 at t = 0") {
    const HamiltonMap F = hamilton_map(kfp_symbol(1, 0.3));
    cdouble prev(1.0, 0.0);
    for (double t = 0.05; t <= 1.0; t += 0.05) {
      const MehlerSymbol ms = mehler_form(F, t);
      CHECK(std::abs(std::arg(ms.norm_factor / prev)) < 0.5);
      prev = ms.norm_factor;
    }
    CHECK(std::abs(mehler_form(F, 1e-6).norm_factor - 1.0) < 1e-5);
  }
  SUBCASE("small-time expansion: A_t = t Q + O(t^3)") {
    for (const QuadraticSymbol& q :
         {kfp_symbol(1, 0.0), kolmogorov_symbol(), harmonic_oscillator_symbol()}) {
      const HamiltonMap F = hamilton_map(q);
      double C = 0.0;
      for (double t : {0.01, 0.02, 0.05, 0.1}) {
        const MehlerSymbol ms = mehler_form(F, t);
        C = std::max(C, (ms.form - t * q.coeff).norm() / (t * t * t));
      }
      CHECK(std::isfinite(C));
      CHECK(C < 100.0);
    }
  }
}

TEST_CASE("gaussian_fourier") {
  SUBCASE("real scalar case") {
    const double c = 0.8;
    const GaussianSymbol g = make_gaussian(1.0, cmat(c * cmat::Identity(2, 2)));
    const GaussianSymbol f = gaussian_fourier(g);
    CHECK(std::abs(f.prefactor - M_PI / c) < 1e-12);
    CHECK((f.A - 1.0 / (4.0 * c) * cmat::Identity(2, 2)).norm() < 1e-12);
  }
  SUBCASE("complex one-dimensional case against adaptive quadrature") {
    const cdouble a(1.0, 1.0);
    const GaussianSymbol g = make_gaussian(1.0, cmat(a * cmat::Identity(1, 1)));
    const GaussianSymbol f = gaussian_fourier(g);
    for (double xi : {0.0, 1.0, 2.5}) {
      const cdouble oracle = integrate(
          [&](double x) {
            return std::exp(-a * x * x) * std::exp(cdouble(0.0, -xi * x));
          },
          -40.0, 40.0);
      rvec X(1);
      X << xi;
      CAPTURE(xi);
      CHECK(std::abs(f(X) - oracle) <= 1e-8 * std::abs(oracle));
    }
  }
  SUBCASE("Kolmogorov symbol transform decays at the t^{2k} rate") {
    // q_t restricted to the coercive (xi, eta) block, where
    // Re q_t >= (t^3/12)|X|^2 for t <= 1, so k = 3.
    const double t = 0.5;
    cmat A = cmat::Zero(2, 2);
    A(0, 0) = t * t * t / 12.0;
    A(1, 1) = t;
    const GaussianSymbol g = make_gaussian(1.0, A);
    const GaussianSymbol f = gaussian_fourier(g);
    CHECK(std::isfinite(std::abs(f.prefactor)));
    // |FT| = |pref| e^{-<Xi, Re A' Xi>}; a positive c2 must fit the decay
    const double c2 = min_symmetric_eigenvalue(f.A.real()) / std::pow(t, 6);
    CHECK(c2 > 0.0);
    CHECK(std::abs(f.prefactor) <= 2.0 * std::pow(M_PI, 1.0) * std::pow(t, -3.0));
  }
  SUBCASE("singular form is rejected") {
    cmat A = cmat::Zero(2, 2);
    A(0, 0) = 1.0;
    CHECK_THROWS_AS(gaussian_fourier(make_gaussian(1.0, A)), SingularForm);
  }
  SUBCASE("involution up to (2pi)^N") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const int N = 1 + static_cast<int>(rng() % 3);
      rmat G(N, N), H(N, N);
      for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
          G(r, c) = gauss(rng);
          H(r, c) = gauss(rng);
        }
      const rmat re = G * G.transpose() + 0.3 * rmat::Identity(N, N);
      const rmat im = 0.5 * (H + H.transpose());
      const GaussianSymbol g =
          make_gaussian(cdouble(1.2, -0.4),
                        cmat(re.cast<cdouble>() + cdouble(0, 1) * im.cast<cdouble>()));
      const GaussianSymbol f2 = gaussian_fourier(gaussian_fourier(g));
      const double scale = std::pow(2.0 * M_PI, N);
      CHECK(std::abs(f2.prefactor - scale * g.prefactor) <= 1e-9 * scale * std::abs(g.prefactor));
      CHECK((f2.A - g.A).norm() <= 1e-9 * g.A.norm());
    }
  }
}

TEST_CASE("auxiliary form Q_t") {
  const HamiltonMap Fho = hamilton_map(harmonic_oscillator_symbol());
  SUBCASE("vanishes at t = 0") {
    cvec X(2);
    X << cdouble(1.0, 0.5), cdouble(-0.3, 0.2);
    CHECK(std::abs(auxiliary_Qt(Fho, 0.0, X)) < 1e-14);
  }
  SUBCASE("harmonic oscillator: increasing with the stated derivative") {
    cvec X(2);
    X << 1.0, 0.0;
    double prev = 0.0;
    for (double t = 0.05; t <= 0.5; t += 0.05) {
      const double v = auxiliary_Qt(Fho, t, X).real();
      CHECK(v > prev);
      prev = v;
    }
    // dQ/dt = 4(Re q)(Re e^{2isF}X) + 4(Re q)(Im e^{2isF}X)
    const QuadraticSymbol q = harmonic_oscillator_symbol();
    for (double s : {0.1, 0.3}) {
      const cmat E = propagator_matrices(Fho.F, s).exp_2itf;
      const cvec Y = E * X;
      const double expected = 4.0 * q.real_part(Y.real()) + 4.0 * q.real_part(Y.imag());
      const double h = 1e-5;
      const double fd = (auxiliary_Qt(Fho, s + h, X).real() -
                         auxiliary_Qt(Fho, s - h, X).real()) /
                        (2.0 * h);
      CHECK(std::abs(fd - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
    }
  }
  SUBCASE("Kolmogorov: Re Q_t vanishes along the singular space") {
    const HamiltonMap F = hamilton_map(kolmogorov_symbol());
    const SingularAnalysis an = singular_space(F);
    for (int j = 0; j < an.dim_S; ++j) {
      const cvec X = an.basis_S.col(j).cast<cdouble>();
      for (double t = 0.1; t <= 1.0; t += 0.1)
        CHECK(std::abs(auxiliary_Qt(F, t, X).real()) < 1e-10);
    }
  }
  SUBCASE("monotone on random complex directions for the example operators") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const QuadraticSymbol& q :
         {kfp_symbol(1, 0.0), kolmogorov_symbol(), heat_symbol(1)}) {
      const HamiltonMap F = hamilton_map(q);
      for (int trial = 0; trial < 50; ++trial) {
        cvec X(2 * q.n);
        for (int j = 0; j < X.size(); ++j) X(j) = cdouble(gauss(rng), gauss(rng));
        double prev = -1e300;
        bool monotone = true;
        for (int g = 0; g <= 100; ++g) {
          const double t = 0.01 * g;
          const double v = auxiliary_Qt(F, t, X).real();
          if (v < prev - 1e-9 * (1.0 + std::abs(prev))) monotone = false;
          prev = v;
        }
        CHECK(monotone);
      }
    }
  }
}

TEST_CASE("odd derivative test") {
  const QuadraticSymbol q = kfp_symbol(1, 0.0);
  const HamiltonMap F = hamilton_map(q);
  SUBCASE("k = 0 on real vectors gives 4 Re q") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      rvec X(4);
      for (int j = 0; j < 4; ++j) X(j) = gauss(rng);
      const double v = odd_derivative_test(F, X.cast<cdouble>(), 0);
      CHECK(v == doctest::Approx(4.0 * q.real_part(X)).epsilon(1e-12));
    }
  }
  SUBCASE("vanishes along S, detects non-membership by k <= k0") {
    cvec ex = cvec::Zero(4), exv = cvec::Zero(4);
    ex(0) = 1.0;
    exv(0) = 1.0;
    exv(1) = 1.0;
    CHECK(std::abs(odd_derivative_test(F, ex, 0)) < 1e-14);
    CHECK(std::abs(odd_derivative_test(F, ex, 1)) < 1e-14);
    bool nonzero = false;
    for (int k = 0; k <= 1; ++k)
      if (std::abs(odd_derivative_test(F, exv, k)) > 1e-10) nonzero = true;
    CHECK(nonzero);
  }
  SUBCASE("derivatives of Re Q_t by finite differences") {
    // X with Re q(X) = 0 outside S: the first odd derivative vanishes and
    // the k = 1 value is the third derivative of Re Q_t at 0.
    const auto phi = [&](const cvec& X, double t) {
      const cdouble iu(0.0, 1.0);
      const cmat E = expm_series(cmat(2.0 * iu * t * F.F));
      const cmat I = cmat::Identity(4, 4);
      const cvec u = ((E + I) * X).conjugate();
      const cvec w = (E - I) * X;
      return (-iu * symplectic_form(u, w)).real();
    };
    std::mt19937_64 rng(41);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      cvec X(4);
      for (int j = 0; j < 4; ++j) X(j) = cdouble(gauss(rng), gauss(rng));
      const double v0 = odd_derivative_test(F, X, 0);
      const double fd0 = odd_fd([&](double t) { return phi(X, t); }, 0, 1e-4);
      CHECK(std::abs(fd0 - v0) <= 1e-5 * std::max(1.0, std::abs(v0)));
    }
    cvec X = cvec::Zero(4);
    X(0) = 1.0;
    X(2) = 1.0;  // e_x + e_xi: Re q vanishes, not in S
    CHECK(std::abs(odd_derivative_test(F, X, 0)) < 1e-14);
    const double v1 = odd_derivative_test(F, X, 1);
    CHECK(std::abs(v1) > 1e-10);
    const double fd1 = odd_fd([&](double t) { return phi(X, t); }, 1, 3e-3);
    CHECK(std::abs(fd1 - v1) <= 1e-5 * std::abs(v1));
  }
}

TEST_CASE("coercivity exponents") {
  const std::vector<double> tgrid = [] {
    std::vector<double> t;
    for (int j = 0; j < 10; ++j) t.push_back(0.01 * std::pow(20.0, j / 9.0));
    return t;
  }();
  SUBCASE("Kolmogorov: slope 3, constant 1/12") {
    const HamiltonMap F = hamilton_map(kolmogorov_symbol());
    const SingularAnalysis an = singular_space(F);
    const CoercivityFit fit = coercivity_exponent(F, an, tgrid, 220);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(0.03));
    CHECK(fit.constant == doctest::Approx(1.0 / 12.0).epsilon(0.05));
    CHECK(fit.bound_holds);
  }
  SUBCASE("heat: slope 1, constant 1") {
    const HamiltonMap F = hamilton_map(heat_symbol(1));
    const SingularAnalysis an = singular_space(F);
    const CoercivityFit fit = coercivity_exponent(F, an, tgrid, 220);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.02));
    CHECK(fit.constant == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("harmonic oscillator: slope 1 at k0 = 0") {
    const HamiltonMap F = hamilton_map(harmonic_oscillator_symbol());
    const SingularAnalysis an = singular_space(F);
    const CoercivityFit fit = coercivity_exponent(F, an, tgrid, 220);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("full singular space is rejected") {
    const cdouble iu(0.0, 1.0);
    cmat C = cmat::Zero(2, 2);
    C(0, 1) = 0.5 * iu;
    C(1, 0) = 0.5 * iu;
    const HamiltonMap F = hamilton_map(build_symbol(C));
    const SingularAnalysis an = singular_space(F);
    REQUIRE(an.dim_S == 2);
    CHECK_THROWS_AS(coercivity_exponent(F, an, tgrid, 220), EmptyComplement);
  }
}

TEST_CASE("variable reduction of the Mehler symbol") {
  SUBCASE("KFP without potential reduces in all variables") {
    const QuadraticSymbol q = kfp_symbol(1, 0.0);
    const HamiltonMap F = hamilton_map(q);
    const SingularAnalysis an = singular_space(F);
    REQUIRE(an.imF_kernel_inclusion);
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const MehlerSymbol ms = mehler_form(F, 0.3);
    const rmat P_S = an.basis_S * an.basis_S.transpose();
    for (int trial = 0; trial < 50; ++trial) {
      rvec X(4);
      for (int j = 0; j < 4; ++j) X(j) = gauss(rng);
      const rvec Xp = X - P_S * X;
      const cdouble full = (X.cast<cdouble>().transpose() * ms.form * X.cast<cdouble>())(0);
      const cdouble red = (Xp.cast<cdouble>().transpose() * ms.form * Xp.cast<cdouble>())(0);
      CHECK(std::abs(full - red) < 1e-9);
    }
  }
  SUBCASE("Kolmogorov: real part reduces, imaginary part does not") {
    const HamiltonMap F = hamilton_map(kolmogorov_symbol());
    const SingularAnalysis an = singular_space(F);
    REQUIRE_FALSE(an.imF_kernel_inclusion);
    const double t = 0.4;
    const MehlerSymbol ms = mehler_form(F, t);
    const rmat P_S = an.basis_S * an.basis_S.transpose();
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      rvec X(4);
      for (int j = 0; j < 4; ++j) X(j) = gauss(rng);
      const rvec Xp = X - P_S * X;
      const cdouble full = (X.cast<cdouble>().transpose() * ms.form * X.cast<cdouble>())(0);
      const cdouble red = (Xp.cast<cdouble>().transpose() * ms.form * Xp.cast<cdouble>())(0);
      CHECK(std::abs(full.real() - red.real()) < 1e-9);
    }
    // the witness direction: q_t(0,1,1,0) - q_t(0,0,1,0) = it
    rvec Xw = rvec::Zero(4), Xr = rvec::Zero(4);
    Xw(1) = 1.0;
    Xw(2) = 1.0;
    Xr(2) = 1.0;
    const cdouble diff =
        (Xw.cast<cdouble>().transpose() * ms.form * Xw.cast<cdouble>())(0) -
        (Xr.cast<cdouble>().transpose() * ms.form * Xr.cast<cdouble>())(0);
    CHECK(std::abs(diff - cdouble(0.0, t)) < 1e-12);
  }
}

TEST_CASE("simultaneous diagonalization") {
  SUBCASE("zero imaginary part") {
    const rmat Re = (rmat(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
    const SimDiag sd = simultaneous_diagonalize(Re, rmat::Zero(2, 2));
    CHECK(sd.lambda.norm() < 1e-12);
    CHECK((sd.P.transpose() * Re * sd.P - rmat::Identity(2, 2)).norm() < 1e-12);
  }
  SUBCASE("scalar ratio") {
    const SimDiag sd = simultaneous_diagonalize(2.0 * rmat::Identity(1, 1),
                                                6.0 * rmat::Identity(1, 1));
    CHECK(sd.lambda(0) == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("random pair satisfies the defining relations") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      rmat G(2, 2), H(2, 2);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          G(r, c) = gauss(rng);
          H(r, c) = gauss(rng);
        }
      const rmat Re = G * G.transpose() + 0.2 * rmat::Identity(2, 2);
      const rmat Im = 0.5 * (H + H.transpose());
      const SimDiag sd = simultaneous_diagonalize(Re, Im);
      CHECK((sd.P.transpose() * Re * sd.P - rmat::Identity(2, 2)).norm() < 1e-9);
      CHECK((sd.P.transpose() * Im * sd.P - rmat(sd.lambda.asDiagonal())).norm() < 1e-9);
    }
  }
  SUBCASE("indefinite real part is rejected") {
    CHECK_THROWS_AS(simultaneous_diagonalize(-rmat::Identity(2, 2), rmat::Zero(2, 2)),
                    NotPositiveDefinite);
  }
}

TEST_CASE("weighted Gaussian norms") {
  SUBCASE("p = 0, c = 1/2") {
    const WeightedGaussianNorm w = weighted_gaussian_norm(0, 0.5);
    CHECK(w.norm_sq == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  }
  SUBCASE("p = 1, c = 1") {
    const WeightedGaussianNorm w = weighted_gaussian_norm(1, 1.0);
    CHECK(w.norm_sq == doctest::Approx(std::sqrt(M_PI) / (4.0 * std::sqrt(2.0))).epsilon(1e-14));
  }
  SUBCASE("I_3 = (15/8) sqrt(pi)") {
    CHECK(gaussian_moment_closed_form(3) ==
          doctest::Approx(15.0 / 8.0 * std::sqrt(M_PI)).epsilon(1e-14));
  }
  SUBCASE("closed form matches the recursion to 1e-12 up to p = 20") {
    for (int p = 0; p <= 20; ++p) {
      const double a = gaussian_moment_closed_form(p);
      const double b = gaussian_moment_recursion(p);
      CHECK(std::abs(a - b) <= 1e-12 * b);
    }
  }
  SUBCASE("norm never exceeds the Gevrey bound") {
    for (int p : {0, 1, 2, 5, 10, 40, 170})
      for (double c : {0.1, 0.5, 1.0, 3.0}) {
        const WeightedGaussianNorm w = weighted_gaussian_norm(p, c);
        CHECK(w.norm <= w.bound * (1.0 + 1e-12));
      }
  }
  SUBCASE("overflow and parameter guards") {
    CHECK_THROWS_AS(weighted_gaussian_norm(171, 1.0), OverflowGuard);
    CHECK_THROWS_AS(weighted_gaussian_norm(2, -1.0), ParameterOutOfRange);
  }
}
