#include "quadrop/control.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "quadrop/errors.hpp"

namespace quadrop {

FunctionState lowpass_project(const FunctionState& u, double k) {
  if (u.rep != FunctionState::Rep::Grid)
    throw BadDimension("lowpass_project: grid state required");
  const double nyquist = M_PI * (u.M / 2) / u.L;
  if (k >= nyquist)
    throw NyquistViolation("lowpass_project: cutoff at or above the grid Nyquist frequency");
  return apply_fourier_multiplier(u, [&](const rvec& xi) {
    for (int d = 0; d < xi.size(); ++d)
      if (std::abs(xi(d)) > k) return cdouble(0.0, 0.0);
    return cdouble(1.0, 0.0);
  });
}

std::vector<char> omega_mask(const ThickSet& w, const FunctionState& like) {
  if (like.rep != FunctionState::Rep::Grid)
    throw BadDimension("omega_mask: grid state required");
  std::vector<char> mask(like.size(), 0);
  const double h = like.step();
  rvec x(like.n);
  for (long idx = 0; idx < like.size(); ++idx) {
    long rem = idx;
    for (int d = like.n - 1; d >= 0; --d) {
      x(d) = -like.L + h * (rem % like.M);
      rem /= like.M;
    }
    mask[idx] = w.contains(x) ? 1 : 0;
  }
  return mask;
}

namespace {

double masked_norm(const FunctionState& u, const std::vector<char>& mask) {
  double acc = 0.0;
  for (long idx = 0; idx < u.size(); ++idx)
    if (mask[idx]) acc += std::norm(u.data(idx));
  return std::sqrt(acc) * std::pow(u.step(), 0.5 * u.n);
}

double fit_line_slope(const std::vector<double>& x, const std::vector<double>& y,
                      double* intercept = nullptr, double* max_resid = nullptr) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(x.size());
  for (int j = 0; j < m; ++j) {
    sx += x[j];
    sy += y[j];
    sxx += x[j] * x[j];
    sxy += x[j] * y[j];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double b = (sy - slope * sx) / m;
  if (intercept) *intercept = b;
  if (max_resid) {
    double r = 0.0;
    for (int j = 0; j < m; ++j) r = std::max(r, std::abs(y[j] - slope * x[j] - b));
    *max_resid = r;
  }
  return slope;
}

}  // namespace

double spectral_ratio(const FunctionState& u, const ThickSet& w) {
  const std::vector<char> mask = omega_mask(w, u);
  const double full = l2_norm(u);
  const double on_omega = masked_norm(u, mask);
  if (on_omega < 1e-14 * std::max(full, 1e-300))
    throw ZeroOnOmega("spectral_ratio: band-limited state vanishes on omega at quadrature level");
  return full / on_omega;
}

SpectralEnvelope spectral_ratio_envelope(const ThickSet& w, int n, double L, int M,
                                         const std::vector<double>& ks, int ensemble,
                                         unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralEnvelope env;
  env.ks = ks;
  for (double k : ks) {
    double worst = 0.0;
    for (int e = 0; e < ensemble; ++e) {
      FunctionState noise;
      noise.rep = FunctionState::Rep::Grid;
      noise.n = n;
      noise.L = L;
      noise.M = M;
      noise.data.resize(static_cast<long>(std::pow(M, n)));
      for (long idx = 0; idx < noise.data.size(); ++idx)
        noise.data(idx) = cdouble(gauss(rng), gauss(rng));
      const FunctionState band = lowpass_project(noise, k);
      worst = std::max(worst, spectral_ratio(band, w));
    }
    env.max_ratio.push_back(worst);
  }
  std::vector<double> lx(ks.begin(), ks.end()), ly;
  for (double r : env.max_ratio) ly.push_back(std::log(r));
  env.c1 = fit_line_slope(lx, ly, &env.log_c1p, &env.max_fit_residual);
  return env;
}

double dissipation_measure(const HamiltonMap& F, double k, double t, const FunctionState& u) {
  const FunctionState ut = (t == 0.0) ? u : evolve_mehler(F, t, u);
  const FunctionState low = lowpass_project(ut, k);
  FunctionState high = ut;
  high.data -= low.data;
  return l2_norm(high) / l2_norm(u);
}

DissipationFit dissipation_fit(const HamiltonMap& F, int k0, int n_pos,
                               const std::vector<double>& ks, const std::vector<double>& ts,
                               const FunctionState& u) {
  DissipationFit fit;
  fit.ks = ks;
  fit.ts = ts;
  fit.values.resize(ks.size(), ts.size());
  for (size_t i = 0; i < ks.size(); ++i)
    for (size_t j = 0; j < ts.size(); ++j)
      fit.values(i, j) = dissipation_measure(F, ks[i], ts[j], u);

  // k-exponent at the largest time (strongest dissipation signal).
  const size_t jt = ts.size() - 1;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < ks.size(); ++i) {
    const double m = fit.values(i, jt);
    if (m > 1e-14 && m < 0.9) {
      lx.push_back(std::log(ks[i]));
      ly.push_back(std::log(-std::log(m)));
    }
  }
  if (lx.size() < 3) throw InsufficientData("dissipation_fit: too few usable (k,t) points");
  fit.k_exponent = fit_line_slope(lx, ly);

  // Envelope m <= (1/(c2' t^{(2k0+1)s})) exp(-c2 t^{2(2k0+1)} k^2).
  const double s_const = 2.25 * n_pos + 2.0 * (n_pos / 2) + 3.0;
  const double m1 = 2.0 * (2.0 * k0 + 1.0);
  const double spow = (2.0 * k0 + 1.0) * s_const;
  double c2 = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < ks.size(); ++i)
    for (size_t j = 0; j < ts.size(); ++j) {
      const double m = fit.values(i, j);
      if (m <= 1e-14) continue;
      c2 = std::min(c2, -std::log(m) / (std::pow(ts[j], m1) * ks[i] * ks[i]));
    }
  c2 = std::max(c2, 0.0);
  double c2p = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < ks.size(); ++i)
    for (size_t j = 0; j < ts.size(); ++j) {
      const double m = fit.values(i, j);
      if (m <= 1e-14) continue;
      const double envelope_core =
          std::exp(-c2 * std::pow(ts[j], m1) * ks[i] * ks[i]) / std::pow(ts[j], spow);
      c2p = std::min(c2p, envelope_core / m);
    }
  fit.c2 = c2;
  fit.c2_prime = std::min(c2p, 1e300);
  fit.envelope_holds = c2 > 0.0 && fit.c2_prime > 0.0;
  return fit;
}

LRSchedule lr_schedule(double T, double a_exp, double b_exp, double m1,
                       double k_cap, double k_star) {
  if (T <= 0.0) throw ParameterOutOfRange("lr_schedule: T must be positive");
  LRSchedule sch;
  sch.T = T;
  sch.a_exp = a_exp;
  sch.b_exp = b_exp;
  sch.m1 = m1;

  const double sigma0 = T / 4.0;
  if (k_star <= 0.0) {
    // Smallest dyadic cutoff whose stage-0 dissipation exponent (nominal
    // unit constants, quadratic frequency power) reaches 1.
    k_star = 1.0;
    while (sigma0 * std::pow(k_star, b_exp) < 1.0 && k_star < k_cap) k_star *= 2.0;
  }
  double assigned = 0.0;
  for (int j = 0; j < 12; ++j) {
    LRStage st;
    st.tau = T * std::pow(2.0, -(j + 2));
    st.sigma = st.tau;
    st.k = k_star * std::pow(2.0, j);
    if (st.k > k_cap) break;
    sch.stages.push_back(st);
    assigned += st.tau + st.sigma;
  }
  if (sch.stages.empty()) {
    LRStage st;
    st.tau = T / 2.0;
    st.sigma = T / 2.0;
    st.k = std::min(k_star, k_cap);
    sch.stages.push_back(st);
    assigned = T;
  }
  sch.stages.back().sigma += T - assigned;  // exact total
  return sch;
}

namespace {

// Composite Gauss-Legendre rule: 4 panels of the 8-point rule.
void composite_gl32(double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  static const double x8[] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                              0.7966664774136267,  0.9602898564975363};
  static const double w8[] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                              0.2223810344533745, 0.1012285362903763};
  nodes.clear();
  weights.clear();
  const int panels = 4;
  const double len = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * len;
    for (int q = 0; q < 8; ++q) {
      nodes.push_back(lo + 0.5 * len * (x8[q] + 1.0));
      weights.push_back(0.5 * len * w8[q]);
    }
  }
}

// Band-limited mode set: DFT indices with |xi_j| <= k in every dimension.
std::vector<rvec> band_modes(const FunctionState& like, double k) {
  GridFourier f{like.n, like.L, like.M, cvec()};
  std::vector<rvec> modes;
  const long total = static_cast<long>(std::pow(like.M, like.n));
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    rvec xi(like.n);
    bool keep = true;
    for (int d = like.n - 1; d >= 0; --d) {
      xi(d) = f.freq(static_cast<int>(rem % like.M));
      rem /= like.M;
      if (std::abs(xi(d)) > k) keep = false;
    }
    if (keep) modes.push_back(xi);
  }
  return modes;
}

}  // namespace

StageControl gramian_control(const ControlContext& ctx, double k, double tau,
                             const FunctionState& g) {
  if (g.rep != FunctionState::Rep::Grid) throw BadDimension("gramian_control: grid state required");
  const double nyquist = M_PI * (ctx.M / 2) / ctx.L;
  if (k >= nyquist) throw NyquistViolation("gramian_control: cutoff above Nyquist");

  StageControl out;
  composite_gl32(0.0, tau, out.nodes, out.weights);
  const std::vector<rvec> modes = band_modes(g, k);
  const int d = static_cast<int>(modes.size());
  const long Ng = g.size();
  const double hn = std::pow(g.step(), g.n);

  // v_a^{(i)} = 1_omega adj(E_{sigma_i}) phi_a, assembled per node.
  const int nodes = static_cast<int>(out.nodes.size());
  std::vector<cmat> V(nodes);
  cmat G = cmat::Zero(d, d);
  for (int i = 0; i < nodes; ++i) {
    const GaussianWeylOp op = mehler_op(ctx.F, out.nodes[i]).adjoint();
    V[i].resize(Ng, d);
    for (int a = 0; a < d; ++a) {
      const FunctionState va = evolve_plane_wave(op, modes[a], g);
      for (long idx = 0; idx < Ng; ++idx)
        V[i](idx, a) = ctx.mask[idx] ? va.data(idx) : cdouble(0.0, 0.0);
    }
    G += out.weights[i] * hn * (V[i].adjoint() * V[i]);
  }

  Eigen::SelfAdjointEigenSolver<cmat> es(G);
  out.gram_min_eig = es.eigenvalues().minCoeff();
  out.gram_max_eig = es.eigenvalues().maxCoeff();
  if (out.gram_min_eig < 1e-12 * out.gram_max_eig)
    throw GramianSingular("gramian_control: omega does not observe the band-limited space at this resolution");

  // Target: pi_k coefficients of e^{-tau q^w} g.
  const FunctionState Eg = evolve_mehler(ctx.F, tau, g);
  const GridFourier fEg = grid_fourier(Eg);
  cvec y(d);
  {
    // coefficient of the normalized mode phi_a = e^{i xi_a x} / (2L)^{n/2}
    const double nrm = std::pow(2.0 * g.L, -0.5 * g.n);
    GridFourier ref{g.n, g.L, g.M, cvec()};
    long a = 0;
    const long total = Ng;
    for (long idx = 0; idx < total && a < d; ++idx) {
      long rem = idx;
      rvec xi(g.n);
      bool keep = true;
      for (int dd = g.n - 1; dd >= 0; --dd) {
        xi(dd) = ref.freq(static_cast<int>(rem % g.M));
        rem /= g.M;
        if (std::abs(xi(dd)) > k) keep = false;
      }
      if (keep) {
        // <phi_a, Eg> = nrm * u^(xi_a)
        y(a) = nrm * fEg.coeffs(idx);
        ++a;
      }
    }
  }

  const cvec h = es.eigenvectors() *
                 (es.eigenvalues().cwiseInverse().asDiagonal() *
                  cvec(es.eigenvectors().adjoint() * y));

  // Control snapshots and the controlled final state.
  FunctionState f_tau = Eg;
  out.cost_sq = 0.0;
  for (int i = 0; i < nodes; ++i) {
    FunctionState ui = g;
    ui.data = -(V[i] * h);
    out.cost_sq += out.weights[i] * std::pow(l2_norm(ui), 2);
    const FunctionState propagated = evolve_mehler(ctx.F, out.nodes[i], ui);
    f_tau.data += out.weights[i] * propagated.data;
    out.controls.push_back(std::move(ui));
  }
  out.final_state = f_tau;
  out.residual = l2_norm(lowpass_project(f_tau, k));
  return out;
}

ControlResult lr_control(const ControlContext& ctx, const SingularAnalysis& analysis,
                         const ThickSet& w, const LRSchedule& schedule,
                         const FunctionState& f0) {
  ControlResult res;
  res.hypotheses_ok = analysis.diffusive && analysis.imF_kernel_inclusion;

  const double norm0 = l2_norm(f0);
  if (norm0 == 0.0) {
    res.final_ratio = 0.0;
    res.cost = 0.0;
    res.final_state = f0;
    return res;
  }

  FunctionState f = f0;
  double cost_sq = 0.0;
  double elapsed = 0.0;
  for (const LRStage& st : schedule.stages) {
    const double norm_before = l2_norm(f);
    StageControl stage = gramian_control(ctx, st.k, st.tau, f);
    for (size_t i = 0; i < stage.nodes.size(); ++i) {
      // node at remaining time sigma_i means absolute time elapsed + tau - sigma_i
      res.times.push_back(elapsed + st.tau - stage.nodes[i]);
      res.time_weights.push_back(stage.weights[i]);
      res.controls.push_back(stage.controls[i]);
    }
    cost_sq += stage.cost_sq;
    f = stage.final_state;
    elapsed += st.tau;
    f = evolve_mehler(ctx.F, st.sigma, f);
    elapsed += st.sigma;

    ControlStageDiag diag;
    diag.k = st.k;
    diag.tau = st.tau;
    diag.sigma = st.sigma;
    diag.norm_after = l2_norm(f);
    diag.residual = stage.residual;
    diag.cost_sq = stage.cost_sq;
    res.diags.push_back(diag);
    if (diag.norm_after > 1e3 * std::max(norm_before, 1e-300))
      throw StageDivergence("lr_control: state norm grew by more than 1e3 within a stage");
  }
  res.final_state = f;
  res.final_ratio = l2_norm(f) / norm0;
  res.cost = std::sqrt(cost_sq);
  return res;
}

double observability_cost(double T, int k0, double C) {
  if (T <= 0.0) throw ParameterOutOfRange("observability_cost: T must be positive");
  if (C <= 1.0) throw ParameterOutOfRange("observability_cost: C must exceed 1");
  return C * std::exp(C / std::pow(T, 2.0 * (2.0 * k0 + 1.0)));
}

double fit_cost_envelope(const std::vector<double>& Ts, const std::vector<double>& costs, int k0) {
  if (Ts.size() != costs.size() || Ts.empty())
    throw BadDimension("fit_cost_envelope: mismatched data");
  double lo = 1.0 + 1e-9, hi = 1.0 + 1e-9;
  const auto holds = [&](double C) {
    for (size_t j = 0; j < Ts.size(); ++j)
      if (costs[j] > observability_cost(Ts[j], k0, C)) return false;
    return true;
  };
  while (!holds(hi)) {
    hi *= 2.0;
    if (hi > 1e12) throw IllConditioned("fit_cost_envelope: no envelope constant below 1e12");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace quadrop
