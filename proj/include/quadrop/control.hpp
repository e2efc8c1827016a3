#pragma once

#include <vector>

#include "quadrop/evolve.hpp"
#include "quadrop/thick_set.hpp"

namespace quadrop {

// Frequency cutoff projection pi_k: keeps |xi_j| <= k for every j. Throws
// NyquistViolation when k reaches the grid Nyquist frequency.
FunctionState lowpass_project(const FunctionState& u, double k);

// Indicator of the control set at the grid points (exact support mask).
std::vector<char> omega_mask(const ThickSet& w, const FunctionState& like);

// ||u|| / ||u||_{L2(omega)}; throws ZeroOnOmega when the denominator
// vanishes at quadrature level.
double spectral_ratio(const FunctionState& u, const ThickSet& w);

// Envelope fit of the spectral inequality over a random band-limited
// ensemble: max ratio per cutoff k, with a linear fit of log ratio vs k.
struct SpectralEnvelope {
  std::vector<double> ks;
  std::vector<double> max_ratio;
  double c1 = 0.0;       // fitted exponent slope
  double log_c1p = 0.0;  // fitted intercept (log c'_1)
  double max_fit_residual = 0.0;
};
SpectralEnvelope spectral_ratio_envelope(const ThickSet& w, int n, double L, int M,
                                         const std::vector<double>& ks, int ensemble,
                                         unsigned long seed);

// ||(1 - pi_k) e^{-t q^w} u|| / ||u|| for one (k, t).
double dissipation_measure(const HamiltonMap& F, double k, double t, const FunctionState& u);

// Batch dissipation data with fitted envelope constants for
// m <= (1/(c2' t^{(2k0+1)s})) exp(-c2 t^{2(2k0+1)} k^2).
struct DissipationFit {
  std::vector<double> ks, ts;
  rmat values;          // ks.size() x ts.size()
  double k_exponent = 0.0;  // slope of log(-log m) vs log k at the largest t
  double c2 = 0.0, c2_prime = 0.0;
  bool envelope_holds = false;
};
DissipationFit dissipation_fit(const HamiltonMap& F, int k0, int n_pos,
                               const std::vector<double>& ks, const std::vector<double>& ts,
                               const FunctionState& u);

// Lebeau-Robbiano schedule: stage j has tau_j = sigma_j = T 2^{-(j+2)} and
// cutoff k_j = k* 2^j; the last stage absorbs the time remainder so the
// lengths sum to T exactly. Stage count caps at 12 and cutoffs at k_cap.
struct LRStage {
  double tau = 0.0;    // control phase
  double sigma = 0.0;  // dissipation phase
  double k = 0.0;      // cutoff
};
struct LRSchedule {
  double T = 0.0;
  double a_exp = 1.0, b_exp = 2.0, m1 = 2.0;
  std::vector<LRStage> stages;
};
LRSchedule lr_schedule(double T, double a_exp, double b_exp, double m1,
                       double k_cap, double k_star = 0.0);

struct ControlContext {
  HamiltonMap F;
  int n = 1;
  double L = 0.0;
  int M = 0;
  std::vector<char> mask;  // omega at grid points
};

// One finite-dimensional HUM solve on the band-limited space E_k: kills the
// pi_k component of e^{-tau q^w} g with a least-norm control supported in
// omega. Controls are returned at the 32 composite Gauss-Legendre nodes.
struct StageControl {
  std::vector<double> nodes;    // remaining-time coordinates sigma_i in (0,tau)
  std::vector<double> weights;
  std::vector<FunctionState> controls;
  FunctionState final_state;    // f(tau)
  double residual = 0.0;        // ||pi_k f(tau)||
  double cost_sq = 0.0;
  double gram_min_eig = 0.0, gram_max_eig = 0.0;
};
StageControl gramian_control(const ControlContext& ctx, double k, double tau,
                             const FunctionState& g);

struct ControlStageDiag {
  double k = 0.0, tau = 0.0, sigma = 0.0;
  double norm_after = 0.0, residual = 0.0, cost_sq = 0.0;
};
struct ControlResult {
  double final_ratio = 0.0;
  double cost = 0.0;
  bool hypotheses_ok = false;   // diffusive + Ker(Im F) inclusion
  std::vector<ControlStageDiag> diags;
  // flattened control samples: per stage, per node
  std::vector<double> times;    // absolute times in (0,T)
  std::vector<double> time_weights;
  std::vector<FunctionState> controls;
  FunctionState final_state;
};

// Full Lebeau-Robbiano loop: alternate low-mode HUM control and free
// dissipation following the schedule. Throws StageDivergence when the state
// norm grows by a factor above 1e3 within one stage.
ControlResult lr_control(const ControlContext& ctx, const SingularAnalysis& analysis,
                         const ThickSet& w, const LRSchedule& schedule,
                         const FunctionState& f0);

// Observability-cost envelope C exp(C / T^{2(2k0+1)}).
double observability_cost(double T, int k0, double C);

// Smallest C >= 1 + 1e-9 with cost(T_i) <= C exp(C/T_i^{2(2k0+1)}) for all
// supplied pairs (bisection; the envelope is monotone in C).
double fit_cost_envelope(const std::vector<double>& Ts, const std::vector<double>& costs, int k0);

}  // namespace quadrop
