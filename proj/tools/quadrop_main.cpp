#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "quadrop/config.hpp"
#include "quadrop/control.hpp"
#include "quadrop/errors.hpp"
#include "quadrop/evolve.hpp"
#include "quadrop/gs_bounds.hpp"
#include "quadrop/hermite.hpp"
#include "quadrop/moyal.hpp"
#include "quadrop/report.hpp"
#include "quadrop/smoothing.hpp"

namespace quadrop {
namespace {

using njson = nlohmann::ordered_json;

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

njson checks_to_json(const std::vector<Check>& checks, bool* all_pass) {
  njson arr = njson::array();
  for (const auto& c : checks) {
    njson e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    if (!c.detail.empty()) e["detail"] = c.detail;
    arr.push_back(e);
    *all_pass = *all_pass && c.pass;
  }
  return arr;
}

double first_focal_time(const HamiltonMap& F, double scan_max = 4.0) {
  double prev = 0.0;
  for (double t = 0.02; t <= scan_max; t += 0.02) {
    const cdouble det = det_cos_tf(F.F, t);
    if (std::abs(det) < 1e-3) {
      // refine by bisection against the 1e-10 singularity threshold
      double lo = prev, hi = t;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::abs(det_cos_tf(F.F, mid)) < 1e-3)
          hi = mid;
        else
          lo = mid;
      }
      return hi;
    }
    prev = t;
  }
  return scan_max;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> t(count);
  for (int j = 0; j < count; ++j)
    t[j] = lo * std::pow(hi / lo, static_cast<double>(j) / (count - 1));
  return t;
}

std::string index_set_string(const std::vector<int>& v) {
  std::ostringstream ss;
  ss << "{";
  for (size_t j = 0; j < v.size(); ++j) ss << (j ? "," : "") << v[j];
  ss << "}";
  return ss.str();
}

rmat psd_sqrt(const rmat& A) {
  Eigen::SelfAdjointEigenSolver<rmat> es(0.5 * (A + A.transpose()));
  rvec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

// ---------------------------------------------------------------- analyze

Report run_analyze(const RunConfig& cfg) {
  Report rep;
  rep.command = "analyze";
  const HamiltonMap F = hamilton_map(cfg.symbol);
  const SingularAnalysis an = singular_space(F, cfg.rank_tol);

  njson s;
  s["phase_half_dim"] = cfg.symbol.n;
  s["dim_S"] = an.dim_S;
  s["k0"] = an.k0;
  s["rank_tol"] = an.rank_tol;
  if (an.index_sets) {
    s["I"] = an.index_sets->I;
    s["J"] = an.index_sets->J;
  } else {
    s["I"] = nullptr;
    s["J"] = nullptr;
  }
  s["diffusive"] = an.diffusive;
  s["imF_kernel_inclusion"] = an.imF_kernel_inclusion;
  s["smoothing_theorem_hypotheses"] =
      an.index_sets.has_value() && an.imF_kernel_inclusion ? "satisfied" : "unverified";
  s["null_controllability_hypotheses"] =
      an.diffusive && an.imF_kernel_inclusion ? "satisfied" : "unverified";

  if (cfg.gou) {
    const GOUSpec& spec = *cfg.gou;
    const KalmanResult kal = kalman_rank(spec.B, psd_sqrt(spec.Q));
    s["kalman_rank"] = kal.rank;
    s["kalman_full"] = kal.full;
    // x-factor of the closed-form singular space and the Ker B condition
    const GOUSymbol built = gou_symbol(spec);
    const rmat Sx = built.closed_form_S.topRows(spec.n);
    const double tol = std::max(an.rank_tol, 1e-12);
    const bool kerB = (spec.B * built.closed_form_S.topRows(spec.n)).norm() <=
                      tol * std::max(1.0, spec.B.norm());
    s["gou_kernel_drift_condition"] = kerB;
    s["gou_control_theorem_hypotheses"] =
        (kal.full && an.diffusive && kerB) ? "satisfied" : "unverified";
    (void)Sx;
  }

  std::vector<Check> checks;
  {
    // sigma-skew-symmetry of F on seeded random pairs
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int rep_i = 0; rep_i < 100; ++rep_i) {
      cvec X(2 * cfg.symbol.n), Y(2 * cfg.symbol.n);
      for (int j = 0; j < X.size(); ++j) {
        X(j) = gauss(rng);
        Y(j) = gauss(rng);
      }
      const cdouble r = symplectic_form(X, cvec(F.F * Y)) + symplectic_form(cvec(F.F * X), Y);
      worst = std::max(worst, std::abs(r) / (F.F.norm() * X.norm() * Y.norm()));
    }
    checks.push_back({"hamilton_map_skew_symmetry", worst <= 1e-10, fmt_double(worst)});
  }
  {
    // flow-vanishing agreement with the computed singular space
    bool ok = true;
    const int kmax = 2 * cfg.symbol.n - 1;
    for (int j = 0; j < an.dim_S; ++j)
      ok = ok && hamilton_flow_vanishing(cfg.symbol, an.basis_S.col(j), kmax, an.rank_tol);
    if (an.dim_S < 2 * cfg.symbol.n) {
      rmat perp = an.dim_S == 0
                      ? rmat(rmat::Identity(2 * cfg.symbol.n, 2 * cfg.symbol.n))
                      : nullspace(rmat(an.basis_S.transpose()), an.rank_tol);
      std::mt19937_64 rng(cfg.seed + 1);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (int s_i = 0; s_i < 20; ++s_i) {
        rvec c(perp.cols());
        for (int j = 0; j < c.size(); ++j) c(j) = gauss(rng);
        if (c.norm() < 1e-8) continue;
        rvec X = perp * c;
        X /= X.norm();
        ok = ok && !hamilton_flow_vanishing(cfg.symbol, X, kmax, an.rank_tol);
      }
    }
    checks.push_back({"flow_vanishing_matches_singular_space", ok, ""});
  }
  s["checks"] = checks_to_json(checks, &rep.all_pass);
  rep.summary = s;

  // basis CSV
  std::ostringstream csv;
  csv << "component";
  for (int j = 0; j < an.dim_S; ++j) csv << ",s" << j;
  csv << "\n";
  for (int r = 0; r < an.basis_S.rows(); ++r) {
    csv << r;
    for (int j = 0; j < an.dim_S; ++j) csv << "," << fmt_double(an.basis_S(r, j));
    csv << "\n";
  }
  rep.csv_files.emplace_back("singular_basis.csv", csv.str());
  return rep;
}

// ---------------------------------------------------------------- mehler

Report run_mehler(const RunConfig& cfg) {
  Report rep;
  rep.command = "mehler";
  const HamiltonMap F = hamilton_map(cfg.symbol);
  const SingularAnalysis an = singular_space(F, cfg.rank_tol);
  const double t_focal = first_focal_time(F);
  const double t_max = std::min(0.9 * t_focal, 1.0);
  std::vector<double> ts = cfg.t_grid.empty() ? log_spaced(0.02, t_max, 12) : cfg.t_grid;

  std::vector<Check> checks;
  std::ostringstream csv;
  csv << "t,norm_factor_re,norm_factor_im";
  const int dim = 2 * cfg.symbol.n;
  for (int r = 0; r < dim; ++r)
    for (int c = r; c < dim; ++c) csv << ",A" << r << c << "_re,A" << r << c << "_im";
  csv << "\n";

  bool branch_ok = true, psd_ok = true;
  double small_time_C = 0.0;
  cdouble prev_nf(1.0, 0.0);
  for (double t : ts) {
    const MehlerSymbol ms = mehler_form(F, t);
    csv << fmt_double(t) << "," << fmt_double(ms.norm_factor.real()) << ","
        << fmt_double(ms.norm_factor.imag());
    for (int r = 0; r < dim; ++r)
      for (int c = r; c < dim; ++c)
        csv << "," << fmt_double(ms.form(r, c).real()) << "," << fmt_double(ms.form(r, c).imag());
    csv << "\n";
    if (std::abs(std::arg(ms.norm_factor / prev_nf)) > 1.5) branch_ok = false;
    prev_nf = ms.norm_factor;
    const rmat reA = ms.form.real();
    if (min_symmetric_eigenvalue(reA) < -1e-9 * std::max(reA.norm(), 1.0)) psd_ok = false;
    if (t <= 0.1) {
      const double dev = (ms.form - t * cfg.symbol.coeff).norm();
      small_time_C = std::max(small_time_C, dev / (t * t * t));
    }
  }
  checks.push_back({"norm_factor_branch_continuous", branch_ok, ""});
  checks.push_back({"re_form_positive_semidefinite", psd_ok, ""});
  checks.push_back({"small_time_expansion_bounded", std::isfinite(small_time_C),
                    fmt_double(small_time_C)});
  rep.csv_files.emplace_back("mehler_form.csv", csv.str());

  njson s;
  s["first_focal_time"] = t_focal;
  s["t_max"] = t_max;
  s["small_time_cubic_constant"] = small_time_C;
  if (an.dim_S < dim) {
    const CoercivityFit fit =
        coercivity_exponent(F, an, log_spaced(0.01, std::min(0.3, t_max), 10), 220, cfg.seed);
    s["coercivity_slope"] = fit.slope;
    s["coercivity_constant"] = fit.constant;
    s["coercivity_reference_exponent"] = 2 * an.k0 + 1;
    checks.push_back({"coercivity_slope_at_most_reference",
                      fit.slope <= 2 * an.k0 + 1 + 0.1, fmt_double(fit.slope)});
    checks.push_back({"coercivity_lower_bound_holds", fit.bound_holds, fmt_double(fit.constant)});
    std::ostringstream c2;
    c2 << "t,min_re_qt\n";
    for (size_t j = 0; j < fit.t_grid.size(); ++j)
      c2 << fmt_double(fit.t_grid[j]) << "," << fmt_double(fit.min_values[j]) << "\n";
    rep.csv_files.emplace_back("coercivity.csv", c2.str());
  } else {
    s["coercivity_slope"] = nullptr;
  }
  s["checks"] = checks_to_json(checks, &rep.all_pass);
  rep.summary = s;
  return rep;
}

// ---------------------------------------------------------------- evolve

FunctionState seeded_hermite_noise(int n, int N, int band, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const long size = (n == 1) ? N : static_cast<long>(N) * N;
  cvec c = cvec::Zero(size);
  if (n == 1) {
    for (int k = 0; k < band; ++k) c(k) = cdouble(gauss(rng), gauss(rng));
  } else {
    for (int a = 0; a < band; ++a)
      for (int b = 0; b < band; ++b)
        c(static_cast<long>(a) * N + b) = cdouble(gauss(rng), gauss(rng));
  }
  c /= c.norm();
  return make_hermite_state(n, N, c);
}

Report run_evolve(const RunConfig& cfg) {
  Report rep;
  rep.command = "evolve";
  const int n = cfg.symbol.n;
  if (n > 2) throw TruncationTooLarge("evolve: position dimension above 2");
  const HamiltonMap F = hamilton_map(cfg.symbol);
  const SingularAnalysis an = singular_space(F, cfg.rank_tol);

  const int N = (n == 1) ? std::min(cfg.N, 64) : std::min(cfg.N, 32);
  const FunctionState u0 = seeded_hermite_noise(n, N, std::max(8, 2 * N / 3), cfg.seed);

  const double t_focal = first_focal_time(F);
  const double t_hi = std::min(0.4, 0.9 * t_focal);
  std::vector<double> ts = cfg.t_grid;
  if (ts.empty())
    for (int j = 7; j >= 0; --j) ts.push_back(t_hi * std::pow(2.0, -j));

  // alpha supported on I, beta on J (all axes when the sets are absent)
  std::vector<int> I_axes, J_axes;
  if (an.index_sets) {
    for (int v : an.index_sets->I) I_axes.push_back(v - 1);
    for (int v : an.index_sets->J) J_axes.push_back(v - 1);
  } else {
    for (int d = 0; d < n; ++d) {
      I_axes.push_back(d);
      J_axes.push_back(d);
    }
  }
  std::vector<std::pair<std::vector<int>, std::vector<int>>> rows;
  rows.push_back({std::vector<int>(n, 0), std::vector<int>(n, 0)});
  for (int d : I_axes) {
    std::vector<int> a(n, 0);
    a[d] = 1;
    rows.push_back({a, std::vector<int>(n, 0)});
  }
  for (int d : J_axes) {
    std::vector<int> b(n, 0);
    b[d] = 1;
    rows.push_back({std::vector<int>(n, 0), b});
    b[d] = 2;
    rows.push_back({std::vector<int>(n, 0), b});
  }

  const SmoothingReport sm = smoothing_exponent_fit(cfg.symbol, u0, ts, rows, an.k0, N - 8);

  njson s;
  s["k0"] = sm.k0;
  s["s_constant"] = sm.s;
  s["fitted_C"] = sm.fitted_C;
  s["hermite_N"] = N;
  njson rows_json = njson::array();
  std::vector<Check> checks;
  for (const auto& row : sm.rows) {
    njson r;
    r["alpha"] = row.alpha;
    r["beta"] = row.beta;
    r["measured_exponent"] = row.measured_exp;
    r["theorem_exponent"] = row.theorem_exp;
    r["pass"] = row.pass;
    rows_json.push_back(r);
    rep.all_pass = rep.all_pass && row.pass;

    std::ostringstream csv;
    csv << "t,seminorm,bound\n";
    double sqf = 1.0;
    int order = 0;
    for (int v : row.alpha) {
      order += v;
      for (int j = 2; j <= v; ++j) sqf *= j;
    }
    for (int v : row.beta) {
      order += v;
      for (int j = 2; j <= v; ++j) sqf *= j;
    }
    for (size_t ti = 0; ti < sm.t_grid.size(); ++ti) {
      const double bound = std::pow(sm.fitted_C, 1.0 + order) *
                           std::pow(sm.t_grid[ti], -row.theorem_exp) * std::sqrt(sqf);
      csv << fmt_double(sm.t_grid[ti]) << "," << fmt_double(row.seminorms[ti]) << ","
          << fmt_double(bound) << "\n";
    }
    std::ostringstream name;
    name << "smoothing_a";
    for (int v : row.alpha) name << v;
    name << "_b";
    for (int v : row.beta) name << v;
    name << ".csv";
    rep.csv_files.emplace_back(name.str(), csv.str());
  }
  s["rows"] = rows_json;
  s["checks"] = checks_to_json(checks, &rep.all_pass);
  rep.summary = s;
  return rep;
}

// ---------------------------------------------------------------- control

Report run_control(const RunConfig& cfg) {
  Report rep;
  rep.command = "control";
  if (!cfg.omega) throw SchemaError("control: config must provide 'omega'");
  const int n = cfg.symbol.n;
  if (n > 2) throw TruncationTooLarge("control: position dimension above 2");
  const HamiltonMap F = hamilton_map(cfg.symbol);
  const SingularAnalysis an = singular_space(F, cfg.rank_tol);

  njson s;
  const ThickCheckResult thick = thick_check(*cfg.omega, cfg.omega->gamma, cfg.omega->cell);
  s["thick"] = thick.thick;
  s["worst_cell_density"] = thick.worst_density;
  if (!thick.thick) {
    s["reason"] = "thickness check failed";
    rep.all_pass = false;
    rep.summary = s;
    return rep;
  }

  const double L = (n == 1) ? cfg.L : std::min(cfg.L, 6.0);
  const int M = (n == 1) ? cfg.M : std::min(cfg.M, 40);
  ControlContext ctx;
  ctx.F = F;
  ctx.n = n;
  ctx.L = L;
  ctx.M = M;
  FunctionState like = make_grid_state(n, L, M, [](const rvec&) { return cdouble(0.0, 0.0); });
  ctx.mask = omega_mask(*cfg.omega, like);

  // shifted Gaussian initial state
  const FunctionState f0 = make_grid_state(n, L, M, [n](const rvec& x) {
    double e = 0.0;
    for (int d = 0; d < n; ++d) e += (x(d) - ((d == 0) ? 0.5 : 0.0)) * (x(d) - ((d == 0) ? 0.5 : 0.0));
    return cdouble(std::exp(-0.5 * e), 0.0);
  });

  const double k_cap = 0.8 * M_PI * (M / 2) / L;
  const double m1 = 2.0 * (2.0 * an.k0 + 1.0);
  const LRSchedule sch = lr_schedule(cfg.T, 1.0, 2.0, m1, k_cap);
  const ControlResult res = lr_control(ctx, an, *cfg.omega, sch, f0);

  s["hypotheses_ok"] = res.hypotheses_ok;
  if (!res.hypotheses_ok)
    s["warning"] = "diffusive or Ker(Im F) hypothesis unverified; run treated as an experiment";
  s["final_ratio"] = res.final_ratio;
  s["cost"] = res.cost;
  s["fitted_C"] = fit_cost_envelope({cfg.T}, {res.cost}, an.k0);
  s["stage_count"] = res.diags.size();
  njson stages = njson::array();
  for (const auto& d : res.diags) {
    njson e;
    e["k"] = d.k;
    e["tau"] = d.tau;
    e["sigma"] = d.sigma;
    e["norm_after"] = d.norm_after;
    e["residual"] = d.residual;
    e["cost_sq"] = d.cost_sq;
    stages.push_back(e);
  }
  s["stages"] = stages;

  // support invariant: controls vanish off omega exactly
  bool support_ok = true;
  for (const auto& u : res.controls)
    for (long idx = 0; idx < u.size(); ++idx)
      if (!ctx.mask[idx] && u.data(idx) != cdouble(0.0, 0.0)) support_ok = false;
  std::vector<Check> checks;
  checks.push_back({"control_support_exact", support_ok, ""});
  s["checks"] = checks_to_json(checks, &rep.all_pass);
  rep.summary = s;

  std::ostringstream csv;
  csv << "t";
  for (int d = 0; d < n; ++d) csv << ",x" << d;
  csv << ",re,im\n";
  const double h = 2.0 * L / M;
  for (size_t ci = 0; ci < res.controls.size(); ++ci) {
    const FunctionState& u = res.controls[ci];
    for (long idx = 0; idx < u.size(); ++idx) {
      if (u.data(idx) == cdouble(0.0, 0.0)) continue;
      csv << fmt_double(res.times[ci]);
      long rem = idx;
      double coords[2] = {0.0, 0.0};
      for (int d = n - 1; d >= 0; --d) {
        coords[d] = -L + h * (rem % M);
        rem /= M;
      }
      for (int d = 0; d < n; ++d) csv << "," << fmt_double(coords[d]);
      csv << "," << fmt_double(u.data(idx).real()) << "," << fmt_double(u.data(idx).imag()) << "\n";
    }
  }
  rep.csv_files.emplace_back("control.csv", csv.str());
  return rep;
}

// ---------------------------------------------------------------- verify

Report run_verify(const RunConfig& cfg) {
  Report rep;
  rep.command = "verify";
  const int n = cfg.symbol.n;
  const HamiltonMap F = hamilton_map(cfg.symbol);
  const SingularAnalysis an = singular_space(F, cfg.rank_tol);
  std::vector<Check> checks;

  // 1. Hamilton map skew-symmetry on seeded pairs.
  {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
      cvec X(2 * n), Y(2 * n);
      for (int j = 0; j < 2 * n; ++j) {
        X(j) = gauss(rng);
        Y(j) = gauss(rng);
      }
      worst = std::max(worst, std::abs(symplectic_form(X, cvec(F.F * Y)) +
                                       symplectic_form(cvec(F.F * X), Y)) /
                                  (F.F.norm() * X.norm() * Y.norm()));
    }
    checks.push_back({"skew_symmetry", worst <= 1e-10, fmt_double(worst)});
  }
  // 2. Singular-space flow agreement.
  {
    bool ok = true;
    for (int j = 0; j < an.dim_S; ++j)
      ok = ok && hamilton_flow_vanishing(cfg.symbol, an.basis_S.col(j), 2 * n - 1, an.rank_tol);
    checks.push_back({"singular_space_flow_vanishing", ok, ""});
  }
  // 3. k0 minimality: partial-intersection dimensions strictly decrease.
  {
    const int k0_direct = smallest_k0(F, cfg.rank_tol);
    checks.push_back({"k0_consistent", k0_direct == an.k0,
                      std::to_string(k0_direct) + " vs " + std::to_string(an.k0)});
  }
  // 4. Mehler branch and small-time expansion.
  {
    const double t_focal = first_focal_time(F);
    const double t_max = std::min(0.5, 0.9 * t_focal);
    bool ok = true;
    cdouble prev(1.0, 0.0);
    double devC = 0.0;
    for (double t : log_spaced(0.01, t_max, 10)) {
      const MehlerSymbol ms = mehler_form(F, t);
      if (std::abs(std::arg(ms.norm_factor / prev)) > 1.5) ok = false;
      prev = ms.norm_factor;
      if (t <= 0.1) devC = std::max(devC, (ms.form - t * cfg.symbol.coeff).norm() / (t * t * t));
    }
    checks.push_back({"mehler_branch_and_expansion", ok && std::isfinite(devC), fmt_double(devC)});
  }
  // 5. Monotonicity of Re Q_t on seeded directions.
  {
    std::mt19937_64 rng(cfg.seed + 2);
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool ok = true;
    for (int it = 0; it < 50 && ok; ++it) {
      cvec X(2 * n);
      for (int j = 0; j < 2 * n; ++j) X(j) = cdouble(gauss(rng), gauss(rng));
      double prev = -1e-12;
      for (int g = 1; g <= 100; ++g) {
        const double t = 0.01 * g * 0.5;
        const double v = auxiliary_Qt(F, t, X).real();
        if (v < prev - 1e-9 * (1.0 + std::abs(prev))) {
          ok = false;
          break;
        }
        prev = v;
      }
    }
    checks.push_back({"auxiliary_Qt_monotone", ok, ""});
  }
  // 6. Gaussian Fourier involution on the Mehler symbol where invertible.
  {
    bool ok = true;
    try {
      const MehlerSymbol ms = mehler_form(F, 0.3);
      cmat A = ms.form;
      const int N2 = 2 * n;
      // regularize the degenerate directions so the transform exists
      A += 1e-2 * cmat::Identity(N2, N2);
      const GaussianSymbol g0 = make_gaussian(1.0, A);
      const GaussianSymbol g2 = gaussian_fourier(gaussian_fourier(g0));
      const double scale = std::pow(2.0 * M_PI, N2);
      ok = std::abs(g2.prefactor - scale * g0.prefactor) <= 1e-9 * scale &&
           (g2.A - g0.A).norm() <= 1e-9 * std::max(1.0, g0.A.norm());
    } catch (const Error&) {
      ok = false;
    }
    checks.push_back({"gaussian_fourier_involution", ok, ""});
  }
  // 7. Exact Gaussian moments against the recursion.
  {
    bool ok = true;
    for (int p = 0; p <= 20; ++p) {
      const double a = gaussian_moment_closed_form(p);
      const double b = gaussian_moment_recursion(p);
      if (std::abs(a - b) > 1e-12 * b) ok = false;
    }
    checks.push_back({"gaussian_moments", ok, ""});
  }
  // 8. Semigroup contraction + law on a small Hermite discretization.
  if (n <= 2) {
    const int N = (n == 1) ? 32 : 16;
    HermitePropagator prop(hermite_matrix(cfg.symbol, N));
    const FunctionState u0 = seeded_hermite_noise(n, N, N / 2, cfg.seed + 3);
    bool ok = true;
    const FunctionState u1 = evolve_hermite(prop, 0.1, u0);
    const FunctionState u2 = evolve_hermite(prop, 0.15, u1);
    const FunctionState u3 = evolve_hermite(prop, 0.25, u0);
    ok = ok && l2_norm(u1) <= l2_norm(u0) * (1.0 + 1e-8);
    FunctionState diff = u2;
    diff.data -= u3.data;
    ok = ok && l2_norm(diff) <= 1e-5 * l2_norm(u0);
    checks.push_back({"semigroup_contraction_and_law", ok, fmt_double(l2_norm(diff))});
  }
  // 9. Projection idempotence and self-adjointness on seeded grid states.
  {
    const int M = 64;
    const double L = 8.0;
    std::mt19937_64 rng(cfg.seed + 4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FunctionState u = make_grid_state(1, L, M, [&](const rvec&) {
      return cdouble(gauss(rng), gauss(rng));
    });
    FunctionState v = make_grid_state(1, L, M, [&](const rvec&) {
      return cdouble(gauss(rng), gauss(rng));
    });
    const double k = 3.0;
    const FunctionState pu = lowpass_project(u, k);
    const FunctionState ppu = lowpass_project(pu, k);
    FunctionState d = ppu;
    d.data -= pu.data;
    const cdouble lhs = inner_product(lowpass_project(u, k), v);
    const cdouble rhs = inner_product(u, lowpass_project(v, k));
    const bool ok = l2_norm(d) <= 1e-12 * std::max(1.0, l2_norm(pu)) &&
                    std::abs(lhs - rhs) <= 1e-10 * l2_norm(u) * l2_norm(v);
    checks.push_back({"projection_idempotent_selfadjoint", ok, ""});
  }

  njson s;
  s["operator_mode"] = cfg.mode;
  s["dim_S"] = an.dim_S;
  s["k0"] = an.k0;
  s["checks"] = checks_to_json(checks, &rep.all_pass);
  rep.summary = s;
  return rep;
}

}  // namespace
}  // namespace quadrop

int main(int argc, char** argv) {
  using namespace quadrop;
  CLI::App app{"quadrop: numerical laboratory for accretive quadratic differential operators"};
  app.require_subcommand(1);

  std::string config_path, out_dir, formats = "json,csv";
  unsigned long long seed_override = 0;
  bool seed_set = false;

  const std::vector<std::string> names = {"analyze", "mehler", "evolve", "control", "verify"};
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "path to the JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (defaults to the config's out_dir)");
    sub->add_option("--format", formats, "comma list of json,csv");
    sub->add_option_function<unsigned long long>(
        "--seed", [&](unsigned long long v) { seed_override = v; seed_set = true; },
        "seed override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << std::endl;
    return 2;
  }

#ifdef _OPENMP
  if (const char* env = std::getenv("QUADROP_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) omp_set_num_threads(t);
  }
#endif

  try {
    RunConfig cfg = parse_config_file(config_path);
    if (seed_set) {
      cfg.seed = seed_override;
      cfg.raw["seed"] = seed_override;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    Report rep;
    if (cmd == "analyze")
      rep = run_analyze(cfg);
    else if (cmd == "mehler")
      rep = run_mehler(cfg);
    else if (cmd == "evolve")
      rep = run_evolve(cfg);
    else if (cmd == "control")
      rep = run_control(cfg);
    else
      rep = run_verify(cfg);
    rep.config_hash = config_hash(cfg);

    const bool want_json = formats.find("json") != std::string::npos;
    const bool want_csv = formats.find("csv") != std::string::npos;
    const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
    emit_report(rep, dir, want_json, want_csv);
    std::cout << (rep.all_pass ? "PASS" : "FAIL") << " " << rep.command
              << " (hash " << rep.config_hash << ")" << std::endl;
    return rep.all_pass ? 0 : 1;
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const FileNotFound& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
