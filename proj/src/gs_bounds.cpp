#include "quadrop/gs_bounds.hpp"

#include <cmath>

#include "quadrop/errors.hpp"

namespace quadrop {

GevreyFrequencyBound gevrey_to_frequency(double L1, double L2, int n) {
  if (L1 <= 0.0 || L2 <= 0.0)
    throw ParameterOutOfRange("gevrey_to_frequency: L1 and L2 must be positive");
  GevreyFrequencyBound b;
  b.C1 = std::pow(2.0, n);
  b.C2 = 1.0 / (16.0 * std::exp(1.0) * n * n);
  b.rhs = b.C1 * L1;
  b.exp_coeff = b.C2 / (L2 * L2);
  return b;
}

namespace {

void enumerate_orders(int n, int total, std::vector<int>& cur, int pos,
                      const std::function<void(const std::vector<int>&)>& fn) {
  if (pos == n) {
    fn(cur);
    return;
  }
  int used = 0;
  for (int j = 0; j < pos; ++j) used += cur[j];
  for (int v = 0; v <= total - used; ++v) {
    cur[pos] = v;
    enumerate_orders(n, total, cur, pos + 1, fn);
    cur[pos] = 0;
  }
}

double fact(int v) {
  double f = 1.0;
  for (int j = 2; j <= v; ++j) f *= j;
  return f;
}

}  // namespace

double gevrey_frequency_margin(const FunctionState& f, int amax) {
  if (f.rep != FunctionState::Rep::Grid)
    throw BadDimension("gevrey_frequency_margin: grid state required");
  const double L1 = l2_norm(f);
  if (L1 <= 0.0) throw ParameterOutOfRange("gevrey_frequency_margin: zero state");

  // Smallest L2 consistent with the measured derivative norms.
  double L2 = 0.0;
  std::vector<int> alpha(f.n, 0);
  enumerate_orders(f.n, amax, alpha, 0, [&](const std::vector<int>& a) {
    int order = 0;
    double sq_fact = 1.0;
    for (int v : a) {
      order += v;
      sq_fact *= fact(v);
    }
    if (order == 0) return;
    const double d = l2_norm(grid_derivative(f, a));
    L2 = std::max(L2, std::pow(d / (L1 * std::sqrt(sq_fact)), 1.0 / order));
  });

  const GevreyFrequencyBound b = gevrey_to_frequency(L1, L2, f.n);
  // lhs = ||e^{(C2/L2^2)|D|^2} f|| via the Fourier side and Plancherel.
  GridFourier ff = grid_fourier(f);
  double acc = 0.0;
  for (long idx = 0; idx < ff.coeffs.size(); ++idx) {
    long rem = idx;
    double xi_sq = 0.0;
    for (int d = f.n - 1; d >= 0; --d) {
      const double xi = ff.freq(static_cast<int>(rem % f.M));
      rem /= f.M;
      xi_sq += xi * xi;
    }
    acc += std::norm(ff.coeffs(idx)) * std::exp(2.0 * b.exp_coeff * xi_sq);
  }
  const double dxi = M_PI / f.L;
  const double lhs = std::sqrt(acc * std::pow(dxi, f.n) / std::pow(2.0 * M_PI, f.n));
  return b.rhs / lhs;
}

double GSBound::operator()(const std::vector<int>& alpha, const std::vector<int>& beta) const {
  int a = 0, b = 0;
  double fa = 1.0, fb = 1.0;
  for (int v : alpha) {
    a += v;
    fa *= fact(v);
  }
  for (int v : beta) {
    b += v;
    fb *= fact(v);
  }
  const double inner = C1 / std::pow(c1, a + 0.25 * N) *
                       C2 / std::pow(c2, b + N / 2 + 1 + 0.25 * N) * fa * fb;
  return std::pow(C, 1.0 + a + b) * std::sqrt(inner);
}

GSBound gs_bound_constants(double C1, double c1, double C2, double c2, int N) {
  if (!(c1 > 0.0 && c1 < 1.0 && c2 > 0.0 && c2 < 1.0))
    throw ParameterOutOfRange("gs_bound_constants: c1 and c2 must lie in (0,1)");
  if (C1 <= 0.0 || C2 <= 0.0)
    throw ParameterOutOfRange("gs_bound_constants: C1 and C2 must be positive");
  GSBound out;
  out.C1 = C1;
  out.c1 = c1;
  out.C2 = C2;
  out.c2 = c2;
  out.N = N;
  // Sobolev/Leibniz chain constant with s = floor(N/2)+1.
  const int s = N / 2 + 1;
  out.C = std::pow(fact(s), 1.5) * std::pow(2.0, 4.5 * s + 0.75 * N + 3.0);
  return out;
}

double grid_sup_seminorm(const FunctionState& f, const std::vector<int>& alpha,
                         const std::vector<int>& beta) {
  const FunctionState g = grid_monomial_multiply(grid_derivative(f, beta), alpha);
  double sup = 0.0;
  for (long idx = 0; idx < g.data.size(); ++idx) sup = std::max(sup, std::abs(g.data(idx)));
  return sup;
}

}  // namespace quadrop
