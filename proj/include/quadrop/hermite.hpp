#pragma once

#include <map>

#include "quadrop/state.hpp"
#include "quadrop/symbol.hpp"

namespace quadrop {

// One-dimensional operator matrices on the orthonormal Hermite basis
// h_0..h_{N-1}, entries assembled exactly from the ladder coefficients.
rmat hermite_op_x(int N);        // multiplication by x
rmat hermite_op_ddx(int N);      // d/dx
rmat hermite_op_x2(int N);       // x^2
rmat hermite_op_d2(int N);       // d^2/dx^2
rmat hermite_op_xd_plus_dx(int N);  // x d/dx + d/dx x

// Dense Galerkin matrix of q^w(x, D_x) on the tensor Hermite basis with N
// modes per dimension. Supports n <= 2, N <= 64.
struct HermiteOperator {
  int n = 0;
  int N = 0;
  cmat M;
};
HermiteOperator hermite_matrix(const QuadraticSymbol& q, int N);

// Matrix exponential by scaling and squaring with a degree-13 Pade
// approximant (used for the semigroup where the series path would be slow).
cmat expm_pade(const cmat& A);

// Shares e^{-tM} across evolution calls; new times are reached by
// multiplying a cached factor with a short-step exponential.
class HermitePropagator {
 public:
  explicit HermitePropagator(HermiteOperator op) : op_(std::move(op)) {}
  const cmat& at(double t);
  const HermiteOperator& op() const { return op_; }

 private:
  HermiteOperator op_;
  std::map<double, cmat> cache_;
};

// e^{-tM} u for a Hermite state with matching truncation. The L2 norm may
// not increase beyond 1e-8 relative slack (contraction).
FunctionState evolve_hermite(HermitePropagator& prop, double t, const FunctionState& u);

// x_d u and (d/dx_d) u with the truncation grown by one mode.
FunctionState hermite_apply_x(const FunctionState& u, int d);
FunctionState hermite_apply_ddx(const FunctionState& u, int d);

// ||x^alpha d^beta u||_{L2} by ladder action in a padded coefficient space.
double hermite_seminorm(const FunctionState& u, const std::vector<int>& alpha,
                        const std::vector<int>& beta);

}  // namespace quadrop
