#include "quadrop/state.hpp"

#include <cmath>

#include <fftw3.h>

#include "quadrop/errors.hpp"

namespace quadrop {

namespace {

long pow_long(int base, int exp) {
  long v = 1;
  for (int j = 0; j < exp; ++j) v *= base;
  return v;
}

void check_grid(const FunctionState& u) {
  if (u.rep != FunctionState::Rep::Grid) throw BadDimension("expected a grid state");
}

// Unnormalized DFT of sign = -1 (forward) or +1 (inverse) over all axes.
cvec dft(const cvec& in, int n, int M, int sign) {
  cvec out(in.size());
  fftw_plan plan;
  std::vector<int> dims(n, M);
  plan = fftw_plan_dft(n, dims.data(),
                       reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
                       reinterpret_cast<fftw_complex*>(out.data()),
                       sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

}  // namespace

FunctionState make_grid_state(int n, double L, int M,
                              const std::function<cdouble(const rvec&)>& f) {
  FunctionState u;
  u.rep = FunctionState::Rep::Grid;
  u.n = n;
  u.L = L;
  u.M = M;
  u.data.resize(pow_long(M, n));
  const double h = 2.0 * L / M;
  rvec x(n);
  for (long idx = 0; idx < u.data.size(); ++idx) {
    long rem = idx;
    for (int d = n - 1; d >= 0; --d) {
      x(d) = -L + h * (rem % M);
      rem /= M;
    }
    u.data(idx) = f(x);
  }
  return u;
}

FunctionState make_hermite_state(int n, int N, const cvec& coeffs) {
  if (coeffs.size() != pow_long(N, n))
    throw BadDimension("make_hermite_state: coefficient count must be N^n");
  FunctionState u;
  u.rep = FunctionState::Rep::Hermite;
  u.n = n;
  u.N = N;
  u.data = coeffs;
  return u;
}

std::vector<double> grid_axis(const FunctionState& u) {
  check_grid(u);
  std::vector<double> x(u.M);
  for (int j = 0; j < u.M; ++j) x[j] = -u.L + u.step() * j;
  return x;
}

double l2_norm(const FunctionState& u) {
  if (u.rep == FunctionState::Rep::Hermite) return u.data.norm();
  return u.data.norm() * std::pow(u.step(), 0.5 * u.n);
}

cdouble inner_product(const FunctionState& u, const FunctionState& v) {
  if (u.rep != v.rep || u.data.size() != v.data.size())
    throw BadDimension("inner_product: representations differ");
  const cdouble raw = u.data.adjoint() * v.data;
  if (u.rep == FunctionState::Rep::Hermite) return raw;
  return raw * std::pow(u.step(), u.n);
}

double boundary_tail_mass(const FunctionState& u) {
  check_grid(u);
  const int band = std::max(1, u.M / 10);
  double tail = 0.0, total = 0.0;
  for (long idx = 0; idx < u.data.size(); ++idx) {
    long rem = idx;
    bool outer = false;
    for (int d = u.n - 1; d >= 0; --d) {
      const int j = static_cast<int>(rem % u.M);
      rem /= u.M;
      if (j < band || j >= u.M - band) outer = true;
    }
    const double m = std::norm(u.data(idx));
    total += m;
    if (outer) tail += m;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double hermite_tail_mass(const FunctionState& u) {
  if (u.rep != FunctionState::Rep::Hermite) throw BadDimension("expected a hermite state");
  double tail = 0.0, total = 0.0;
  for (long idx = 0; idx < u.data.size(); ++idx) {
    long rem = idx;
    bool top = false;
    for (int d = u.n - 1; d >= 0; --d) {
      const int k = static_cast<int>(rem % u.N);
      rem /= u.N;
      if (k >= u.N - 5) top = true;
    }
    const double m = std::norm(u.data(idx));
    total += m;
    if (top) tail += m;
  }
  return total > 0.0 ? tail / total : 0.0;
}

rmat hermite_values(int N, const std::vector<double>& x) {
  const int M = static_cast<int>(x.size());
  rmat H(M, N);
  for (int j = 0; j < M; ++j) {
    const double v = x[j];
    H(j, 0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * v * v);
    if (N > 1) H(j, 1) = std::sqrt(2.0) * v * H(j, 0);
    for (int k = 2; k < N; ++k)
      H(j, k) = std::sqrt(2.0 / k) * v * H(j, k - 1) - std::sqrt((k - 1.0) / k) * H(j, k - 2);
  }
  return H;
}

FunctionState hermite_to_grid(const FunctionState& u, double L, int M) {
  if (u.rep != FunctionState::Rep::Hermite) throw BadDimension("expected a hermite state");
  FunctionState g;
  g.rep = FunctionState::Rep::Grid;
  g.n = u.n;
  g.L = L;
  g.M = M;
  std::vector<double> x(M);
  for (int j = 0; j < M; ++j) x[j] = -L + 2.0 * L / M * j;
  const rmat H = hermite_values(u.N, x);

  if (u.n == 1) {
    g.data = H.cast<cdouble>() * u.data;
  } else if (u.n == 2) {
    Eigen::Map<const Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        C(u.data.data(), u.N, u.N);
    const cmat G = H.cast<cdouble>() * (C * H.transpose().cast<cdouble>());
    g.data.resize(static_cast<long>(M) * M);
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b) g.data(static_cast<long>(a) * M + b) = G(a, b);
  } else {
    throw BadDimension("hermite_to_grid: only n <= 2 is supported");
  }
  return g;
}

FunctionState grid_to_hermite(const FunctionState& u, int N) {
  check_grid(u);
  const rmat H = hermite_values(N, grid_axis(u));
  const double h = u.step();
  FunctionState out;
  out.rep = FunctionState::Rep::Hermite;
  out.n = u.n;
  out.N = N;
  if (u.n == 1) {
    out.data = h * (H.transpose().cast<cdouble>() * u.data);
  } else if (u.n == 2) {
    Eigen::Map<const Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        G(u.data.data(), u.M, u.M);
    const cmat C = h * h * (H.transpose().cast<cdouble>() * (cmat(G) * H.cast<cdouble>()));
    out.data.resize(static_cast<long>(N) * N);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) out.data(static_cast<long>(a) * N + b) = C(a, b);
  } else {
    throw BadDimension("grid_to_hermite: only n <= 2 is supported");
  }
  return out;
}

double GridFourier::freq(int index) const {
  const int k = index <= M / 2 - 1 ? index : index - M;
  return M_PI * k / L;
}

GridFourier grid_fourier(const FunctionState& u) {
  check_grid(u);
  GridFourier f{u.n, u.L, u.M, dft(u.data, u.n, u.M, -1), };
  // Continuum phase: x_j starts at -L, so mode m picks up (-1)^{k_m} h^n.
  const double hn = std::pow(u.step(), u.n);
  for (long idx = 0; idx < f.coeffs.size(); ++idx) {
    long rem = idx;
    int ksum = 0;
    for (int d = u.n - 1; d >= 0; --d) {
      const int m = static_cast<int>(rem % u.M);
      rem /= u.M;
      ksum += (m <= u.M / 2 - 1) ? m : m - u.M;
    }
    f.coeffs(idx) *= hn * ((ksum % 2 == 0) ? 1.0 : -1.0);
  }
  return f;
}

FunctionState grid_fourier_inverse(const GridFourier& f) {
  cvec pre = f.coeffs;
  const double hn = std::pow(2.0 * f.L / f.M, f.n);
  for (long idx = 0; idx < pre.size(); ++idx) {
    long rem = idx;
    int ksum = 0;
    for (int d = f.n - 1; d >= 0; --d) {
      const int m = static_cast<int>(rem % f.M);
      rem /= f.M;
      ksum += (m <= f.M / 2 - 1) ? m : m - f.M;
    }
    pre(idx) *= ((ksum % 2 == 0) ? 1.0 : -1.0) / (hn * std::pow(f.M, f.n));
  }
  FunctionState u;
  u.rep = FunctionState::Rep::Grid;
  u.n = f.n;
  u.L = f.L;
  u.M = f.M;
  u.data = dft(pre, f.n, f.M, +1);
  return u;
}

FunctionState apply_fourier_multiplier(const FunctionState& u,
                                       const std::function<cdouble(const rvec&)>& m) {
  GridFourier f = grid_fourier(u);
  rvec xi(u.n);
  for (long idx = 0; idx < f.coeffs.size(); ++idx) {
    long rem = idx;
    for (int d = u.n - 1; d >= 0; --d) {
      xi(d) = f.freq(static_cast<int>(rem % u.M));
      rem /= u.M;
    }
    f.coeffs(idx) *= m(xi);
  }
  return grid_fourier_inverse(f);
}

FunctionState grid_derivative(const FunctionState& u, const std::vector<int>& beta) {
  if (static_cast<int>(beta.size()) != u.n) throw BadDimension("grid_derivative: bad multi-index");
  const cdouble iu(0.0, 1.0);
  return apply_fourier_multiplier(u, [&](const rvec& xi) {
    cdouble m = 1.0;
    for (int d = 0; d < u.n; ++d)
      for (int c = 0; c < beta[d]; ++c) m *= iu * xi(d);
    return m;
  });
}

FunctionState grid_monomial_multiply(const FunctionState& u, const std::vector<int>& alpha) {
  check_grid(u);
  if (static_cast<int>(alpha.size()) != u.n)
    throw BadDimension("grid_monomial_multiply: bad multi-index");
  FunctionState out = u;
  const double h = u.step();
  for (long idx = 0; idx < out.data.size(); ++idx) {
    long rem = idx;
    double w = 1.0;
    for (int d = u.n - 1; d >= 0; --d) {
      const double x = -u.L + h * (rem % u.M);
      rem /= u.M;
      for (int c = 0; c < alpha[d]; ++c) w *= x;
    }
    out.data(idx) *= w;
  }
  return out;
}

}  // namespace quadrop
