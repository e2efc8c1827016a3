#pragma once

#include <vector>

#include "quadrop/matrix_functions.hpp"

namespace quadrop {

struct Box {
  rvec lo, hi;
  double measure() const;
};

// Periodic union of axis-aligned boxes inside the fundamental cell
// [0,a_1]x...x[0,a_n], minus finitely many carve-out boxes (absolute
// coordinates). Pattern boxes must be disjoint.
struct ThickSet {
  int n = 1;
  rvec cell;                    // a
  std::vector<Box> pattern;     // within the cell
  std::vector<Box> carveouts;   // removed regions
  double gamma = 1.0;           // claimed density

  bool contains(const rvec& x) const;
};

ThickSet make_thick_set(int n, const rvec& cell, const std::vector<Box>& pattern,
                        double gamma, const std::vector<Box>& carveouts = {});

// Exact Lebesgue measure of the set intersected with a query box.
double thick_measure_in_box(const ThickSet& w, const Box& query);

struct ThickCheckResult {
  bool thick = false;
  double worst_density = 0.0;  // min over translates of |w cap (x+P)| / |P|
};

// Exact minimum of |w cap (x+P)| over translates of P = [0,a], evaluated on
// the breakpoint lattice where the piecewise-multilinear density attains its
// minimum. True iff the worst density is >= gamma.
ThickCheckResult thick_check(const ThickSet& w, double gamma, const rvec& a);

}  // namespace quadrop
