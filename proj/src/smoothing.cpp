#include "quadrop/smoothing.hpp"

#include <cmath>
#include <memory>

#include "quadrop/errors.hpp"

namespace quadrop {

double seminorm(const FunctionState& u, const std::vector<int>& alpha,
                const std::vector<int>& beta) {
  int total = 0;
  for (int v : alpha) total += v;
  for (int v : beta) total += v;
  if (total > 8) throw BadDimension("seminorm: |alpha|+|beta| above 8");
  if (u.rep == FunctionState::Rep::Hermite) return hermite_seminorm(u, alpha, beta);
  if (boundary_tail_mass(u) > 1e-6)
    throw GridUnderResolved("seminorm: grid state is not resolved");
  return l2_norm(grid_monomial_multiply(grid_derivative(u, beta), alpha));
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(x.size());
  for (int j = 0; j < m; ++j) {
    sx += x[j];
    sy += y[j];
    sxx += x[j] * x[j];
    sxy += x[j] * y[j];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double sqrt_fact(const std::vector<int>& m) {
  double f = 1.0;
  for (int v : m)
    for (int j = 2; j <= v; ++j) f *= j;
  return std::sqrt(f);
}

FunctionState truncate_hermite(const FunctionState& u, int N) {
  FunctionState out;
  out.rep = FunctionState::Rep::Hermite;
  out.n = u.n;
  out.N = N;
  if (u.n == 1) {
    out.data = u.data.head(N);
  } else {
    out.data.resize(static_cast<long>(N) * N);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        out.data(static_cast<long>(a) * N + b) = u.data(static_cast<long>(a) * u.N + b);
  }
  return out;
}

}  // namespace

SmoothingReport smoothing_exponent_fit(
    const QuadraticSymbol& q, const FunctionState& u0,
    const std::vector<double>& t_grid,
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>& rows,
    int k0, int N_check) {
  if (u0.rep != FunctionState::Rep::Hermite)
    throw BadDimension("smoothing_exponent_fit: Hermite datum required");
  if (static_cast<int>(t_grid.size()) < 8)
    throw InsufficientData("smoothing_exponent_fit: need at least 8 t values");

  const int n = u0.n;
  SmoothingReport rep;
  rep.t_grid = t_grid;
  rep.k0 = k0;
  rep.s = 2.25 * n + 2.0 * (n / 2) + 3.0;

  HermitePropagator prop(hermite_matrix(q, u0.N));
  std::unique_ptr<HermitePropagator> prop_check;
  FunctionState u0_check;
  if (N_check > 0 && N_check < u0.N) {
    prop_check = std::make_unique<HermitePropagator>(hermite_matrix(q, N_check));
    u0_check = truncate_hermite(u0, N_check);
  }

  const double u_norm = l2_norm(u0);
  for (const auto& [alpha, beta] : rows) {
    SmoothingRow row;
    row.alpha = alpha;
    row.beta = beta;
    int order = 0;
    for (int v : alpha) order += v;
    for (int v : beta) order += v;
    row.theorem_exp = (2.0 * k0 + 1.0) * (order + rep.s);
    row.seminorms.resize(t_grid.size(), 0.0);
    row.included.resize(t_grid.size(), true);
    rep.rows.push_back(row);
  }

  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    const FunctionState ut = evolve_hermite(prop, t_grid[ti], u0);
    FunctionState ut_check;
    if (prop_check) ut_check = evolve_hermite(*prop_check, t_grid[ti], u0_check);
    for (size_t r = 0; r < rep.rows.size(); ++r) {
      auto& row = rep.rows[r];
      const double sem = hermite_seminorm(ut, row.alpha, row.beta);
      row.seminorms[ti] = sem;
      if (prop_check) {
        const double sem_check = hermite_seminorm(ut_check, row.alpha, row.beta);
        if (sem <= 0.0 || std::abs(sem - sem_check) > 0.1 * sem) row.included[ti] = false;
      }
    }
  }

  double fitted_C = 0.0;
  bool all_pass = true;
  for (auto& row : rep.rows) {
    std::vector<double> lx, ly;
    int order = 0;
    for (int v : row.alpha) order += v;
    for (int v : row.beta) order += v;
    for (size_t ti = 0; ti < t_grid.size(); ++ti) {
      if (!row.included[ti] || row.seminorms[ti] <= 0.0) continue;
      lx.push_back(std::log(t_grid[ti]));
      ly.push_back(std::log(row.seminorms[ti]));
      const double val = row.seminorms[ti] * std::pow(t_grid[ti], row.theorem_exp) /
                         (sqrt_fact(row.alpha) * sqrt_fact(row.beta) * u_norm);
      fitted_C = std::max(fitted_C, std::pow(val, 1.0 / (1.0 + order)));
    }
    if (lx.size() < 4)
      throw InsufficientData("smoothing_exponent_fit: too few usable t values in a row");
    row.measured_exp = -fit_slope(lx, ly);
    row.pass = row.measured_exp <= row.theorem_exp + 0.2;
    all_pass = all_pass && row.pass;
  }
  rep.fitted_C = fitted_C;
  rep.all_pass = all_pass;
  return rep;
}

}  // namespace quadrop
