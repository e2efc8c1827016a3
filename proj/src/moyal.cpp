#include "quadrop/moyal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Eigenvalues>

#include "quadrop/errors.hpp"

namespace quadrop {

int multi_abs(const MultiIndex& m) {
  int s = 0;
  for (int v : m) s += v;
  return s;
}

double multi_factorial(const MultiIndex& m) {
  double f = 1.0;
  for (int v : m)
    for (int j = 2; j <= v; ++j) f *= j;
  return f;
}

int PolySymbol::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms) d = std::max(d, multi_abs(m));
  return d;
}

cdouble PolySymbol::eval(const rvec& X) const {
  cdouble s = 0.0;
  for (const auto& [m, c] : terms) {
    double mono = 1.0;
    for (int v = 0; v < dim; ++v)
      for (int j = 0; j < m[v]; ++j) mono *= X(v);
    s += c * mono;
  }
  return s;
}

void PolySymbol::add_term(const MultiIndex& m, cdouble c) {
  auto it = terms.find(m);
  if (it == terms.end()) {
    if (c != cdouble(0.0, 0.0)) terms.emplace(m, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) == 0.0) terms.erase(it);
}

PolySymbol PolySymbol::derivative(int var) const {
  PolySymbol out;
  out.dim = dim;
  for (const auto& [m, c] : terms) {
    if (m[var] == 0) continue;
    MultiIndex d = m;
    d[var] -= 1;
    out.add_term(d, c * static_cast<double>(m[var]));
  }
  return out;
}

PolySymbol PolySymbol::multiply(const PolySymbol& other) const {
  PolySymbol out;
  out.dim = dim;
  for (const auto& [m1, c1] : terms)
    for (const auto& [m2, c2] : other.terms) {
      MultiIndex m = m1;
      for (int v = 0; v < dim; ++v) m[v] += m2[v];
      out.add_term(m, c1 * c2);
    }
  return out;
}

PolySymbol poly_constant(int dim, cdouble c) {
  PolySymbol p;
  p.dim = dim;
  p.add_term(MultiIndex(dim, 0), c);
  return p;
}

PolySymbol poly_monomial(int dim, const MultiIndex& m, cdouble c) {
  PolySymbol p;
  p.dim = dim;
  p.add_term(m, c);
  return p;
}

namespace {

// Enumerates all multi-indices of length n with |m| <= cap.
void enumerate_multi(int n, int cap, MultiIndex& cur, int pos,
                     const std::function<void(const MultiIndex&)>& fn) {
  if (pos == n) {
    fn(cur);
    return;
  }
  for (int v = 0; v + multi_abs(cur) <= cap; ++v) {
    cur[pos] = v;
    enumerate_multi(n, cap, cur, pos + 1, fn);
    cur[pos] = 0;
  }
}

long long int_factorial(int v) {
  long long f = 1;
  for (int j = 2; j <= v; ++j) f *= j;
  return f;
}

}  // namespace

PolySymbol moyal_monomial(const MultiIndex& alpha, const MultiIndex& beta) {
  const int n = static_cast<int>(alpha.size());
  if (static_cast<int>(beta.size()) != n)
    throw BadDimension("moyal_monomial: alpha and beta must have equal length");
  if (multi_abs(alpha) + multi_abs(beta) > 12)
    throw DegreeCap("moyal_monomial: |alpha|+|beta| above the degree cap 12");

  PolySymbol out;
  out.dim = 2 * n;

  MultiIndex gamma(n, 0);
  MultiIndex min_ab(n);
  for (int j = 0; j < n; ++j) min_ab[j] = std::min(alpha[j], beta[j]);

  const cdouble half_i(0.0, 0.5);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      // Exact integer coefficient alpha!beta!/((alpha-g)!(beta-g)! g!).
      long long num = 1, den = 1;
      for (int j = 0; j < n; ++j) {
        num *= int_factorial(alpha[j]) / int_factorial(alpha[j] - gamma[j]);
        num *= int_factorial(beta[j]) / int_factorial(beta[j] - gamma[j]);
        den *= int_factorial(gamma[j]);
      }
      const int g = multi_abs(gamma);
      cdouble coeff = std::pow(half_i, g) * static_cast<double>((g % 2 == 0) ? 1 : -1) *
                      static_cast<double>(num) / static_cast<double>(den);
      MultiIndex m(2 * n, 0);
      for (int j = 0; j < n; ++j) {
        m[j] = alpha[j] - gamma[j];
        m[n + j] = beta[j] - gamma[j];
      }
      out.add_term(m, coeff);
      return;
    }
    for (int v = 0; v <= min_ab[pos]; ++v) {
      gamma[pos] = v;
      rec(pos + 1);
      gamma[pos] = 0;
    }
  };
  rec(0);
  return out;
}

double PolyGaussian::abs_eval(const rvec& X) const {
  const double re_q = X.transpose() * gauss.A.real() * X;
  return std::abs(poly.eval(X)) * std::abs(gauss.prefactor) * std::exp(-re_q);
}

PolyGaussian PolyGaussian::derivative(int var) const {
  // d_v (P e^{-q}) = (d_v P - P d_v q) e^{-q}, with d_v q = 2 (A X)_v.
  PolyGaussian out;
  out.gauss = gauss;
  PolySymbol dq;
  dq.dim = poly.dim;
  for (int m = 0; m < poly.dim; ++m) {
    MultiIndex mi(poly.dim, 0);
    mi[m] = 1;
    dq.add_term(mi, 2.0 * gauss.A(var, m));
  }
  out.poly = poly.derivative(var);
  PolySymbol prod = poly.multiply(dq);
  for (const auto& [m, c] : prod.terms) out.poly.add_term(m, -c);
  return out;
}

PolyGaussian make_poly_gaussian(const GaussianSymbol& g) {
  PolyGaussian pg;
  pg.gauss = g;
  pg.poly = poly_constant(g.dim(), 1.0);
  return pg;
}

PolyGaussian moyal_poly_gaussian(const PolySymbol& p, const GaussianSymbol& g) {
  const int dim = g.dim();
  if (p.dim != dim) throw BadDimension("moyal_poly_gaussian: dimension mismatch");
  if (dim % 2 != 0) throw BadDimension("moyal_poly_gaussian: phase dimension must be even");
  const int n = dim / 2;
  const int d = p.degree();
  if (d > 12) throw DegreeCap("moyal_poly_gaussian: polynomial degree above 12");

  // Cache of Gaussian derivatives d^eta_x d^rho_xi g, built one variable at
  // a time; key is the full 2n derivative multi-index.
  std::map<MultiIndex, PolyGaussian> gcache;
  gcache.emplace(MultiIndex(dim, 0), make_poly_gaussian(g));
  std::function<const PolyGaussian&(const MultiIndex&)> gderiv =
      [&](const MultiIndex& m) -> const PolyGaussian& {
    auto it = gcache.find(m);
    if (it != gcache.end()) return it->second;
    int v = 0;
    while (m[v] == 0) ++v;
    MultiIndex prev = m;
    prev[v] -= 1;
    PolyGaussian pg = gderiv(prev).derivative(v);
    return gcache.emplace(m, std::move(pg)).first->second;
  };

  PolyGaussian out;
  out.gauss = g;
  out.poly.dim = dim;

  const cdouble half_i(0.0, 0.5);
  MultiIndex eta(n, 0);
  enumerate_multi(n, d, eta, 0, [&](const MultiIndex& e) {
    MultiIndex rho(n, 0);
    enumerate_multi(n, d - multi_abs(e), rho, 0, [&](const MultiIndex& r) {
      const int k = multi_abs(e) + multi_abs(r);
      // d^rho_x d^eta_xi p
      PolySymbol dp = p;
      for (int j = 0; j < n; ++j) {
        for (int c = 0; c < r[j]; ++c) dp = dp.derivative(j);
        for (int c = 0; c < e[j]; ++c) dp = dp.derivative(n + j);
      }
      if (dp.terms.empty()) return;
      // d^eta_x d^rho_xi g
      MultiIndex gm(dim, 0);
      for (int j = 0; j < n; ++j) {
        gm[j] = e[j];
        gm[n + j] = r[j];
      }
      const PolyGaussian& dg = gderiv(gm);
      cdouble coeff = std::pow(half_i, k) *
                      static_cast<double>((multi_abs(r) % 2 == 0) ? 1 : -1) /
                      (multi_factorial(e) * multi_factorial(r));
      PolySymbol prod = dp.multiply(dg.poly);
      for (const auto& [m, c] : prod.terms) out.poly.add_term(m, coeff * c);
    });
  });
  return out;
}

double poly_gaussian_sup(const PolyGaussian& pg, int points_per_dim) {
  const int dim = pg.poly.dim;
  const rmat re_A = 0.5 * (pg.gauss.A.real() + pg.gauss.A.real().transpose());

  // Active variables: present in the polynomial or damped by Re A.
  std::vector<bool> in_poly(dim, false);
  for (const auto& [m, c] : pg.poly.terms)
    for (int v = 0; v < dim; ++v)
      if (m[v] > 0) in_poly[v] = true;
  const double scale = std::max(re_A.norm(), 1e-300);
  std::vector<int> active;
  for (int v = 0; v < dim; ++v) {
    const bool damped = re_A.row(v).norm() > 1e-13 * scale;
    if (in_poly[v] && !damped) return std::numeric_limits<double>::infinity();
    if (in_poly[v] || damped) active.push_back(v);
  }
  if (active.empty()) return std::abs(pg.gauss.prefactor) * std::abs(pg.poly.eval(rvec::Zero(dim)));

  // Grid radius from the smallest damped rate on the active block.
  const int na = static_cast<int>(active.size());
  rmat block(na, na);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b) block(a, b) = re_A(active[a], active[b]);
  Eigen::SelfAdjointEigenSolver<rmat> es(block);
  const double lam_min = std::max(es.eigenvalues().minCoeff(), 1e-13 * scale);
  const double R = 1.5 * std::sqrt((pg.poly.degree() + 8.0) / (2.0 * lam_min));

  double sup = 0.0;
  rvec X = rvec::Zero(dim);
  std::vector<int> idx(na, 0);
  const long total = static_cast<long>(std::pow(points_per_dim, na));
  for (long it = 0; it < total; ++it) {
    long rem = it;
    for (int a = 0; a < na; ++a) {
      idx[a] = static_cast<int>(rem % points_per_dim);
      rem /= points_per_dim;
      X(active[a]) = -R + 2.0 * R * idx[a] / (points_per_dim - 1);
    }
    sup = std::max(sup, pg.abs_eval(X));
  }
  return sup;
}

}  // namespace quadrop
