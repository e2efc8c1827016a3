#pragma once

#include "quadrop/mehler.hpp"
#include "quadrop/state.hpp"

namespace quadrop {

// Weyl operator with Gaussian symbol prefactor * e^{-<Z, A Z>}. The integral
// kernel K(x,y) = (2pi)^{-n} int e^{i(x-y)xi} p((x+y)/2, xi) dxi is Gaussian
// in (x,y); it is stored through its exponent form W and constant c with
// K(x,y) = c exp(<(x,y), W (x,y)>).
struct GaussianWeylOp {
  int n = 0;
  cdouble prefactor{1.0, 0.0};
  cmat A;        // 2n x 2n symbol form
  cdouble c;     // kernel constant
  cmat W;        // kernel exponent, 2n x 2n symmetric over (x,y)

  cdouble kernel(const rvec& x, const rvec& y) const;
  GaussianWeylOp adjoint() const;  // conjugate-symbol operator
};

// Builds the kernel data; throws SingularForm when the xi-block of A is
// singular (xi-integral undefined).
GaussianWeylOp weyl_gaussian_op(int n, cdouble prefactor, const cmat& A);

// Propagator data of e^{-tq^w} at time t (Mehler symbol + normalization).
GaussianWeylOp mehler_op(const HamiltonMap& F, double t, MatFunPath path = MatFunPath::Auto);

// Application by exact per-mode y-integrals: the state is expanded in its
// DFT modes and each plane wave is propagated in closed form. This stays
// accurate when the kernel is much narrower than the grid spacing.
FunctionState apply_weyl_spectral(const GaussianWeylOp& op, const FunctionState& u);

// Literal trapezoidal y-quadrature of the kernel on the grid; valid when the
// kernel width is resolved (cross-check path, n = 1 or small n = 2 grids).
FunctionState apply_weyl_trapezoid(const GaussianWeylOp& op, const FunctionState& u);

// Closed-form propagation of the normalized DFT mode e^{i xi0 x} / (2L)^{n/2}
// sampled on the grid of u (shape parameters taken from `like`).
FunctionState evolve_plane_wave(const GaussianWeylOp& op, const rvec& xi0,
                                const FunctionState& like);

// e^{-tq^w} u on the grid; t = 0 returns the input unchanged. Checks the
// boundary tail mass of input and output (threshold 1e-6, GridUnderResolved).
FunctionState evolve_mehler(const HamiltonMap& F, double t, const FunctionState& u,
                            MatFunPath path = MatFunPath::Auto, bool adjoint = false);

}  // namespace quadrop
