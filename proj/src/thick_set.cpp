#include "quadrop/thick_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "quadrop/errors.hpp"

namespace quadrop {

double Box::measure() const {
  double m = 1.0;
  for (int d = 0; d < lo.size(); ++d) m *= std::max(0.0, hi(d) - lo(d));
  return m;
}

namespace {

bool boxes_overlap(const Box& a, const Box& b) {
  for (int d = 0; d < a.lo.size(); ++d)
    if (a.hi(d) <= b.lo(d) || b.hi(d) <= a.lo(d)) return false;
  return true;
}

Box box_intersection(const Box& a, const Box& b) {
  Box out;
  const int n = static_cast<int>(a.lo.size());
  out.lo = rvec(n);
  out.hi = rvec(n);
  for (int d = 0; d < n; ++d) {
    out.lo(d) = std::max(a.lo(d), b.lo(d));
    out.hi(d) = std::min(a.hi(d), b.hi(d));
  }
  return out;
}

}  // namespace

ThickSet make_thick_set(int n, const rvec& cell, const std::vector<Box>& pattern,
                        double gamma, const std::vector<Box>& carveouts) {
  if (cell.size() != n) throw BadDimension("make_thick_set: cell length mismatch");
  for (int d = 0; d < n; ++d)
    if (cell(d) <= 0.0) throw ParameterOutOfRange("make_thick_set: cell sides must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ParameterOutOfRange("make_thick_set: gamma must lie in (0,1]");
  for (const Box& b : pattern)
    for (int d = 0; d < n; ++d)
      if (b.lo(d) < -1e-12 || b.hi(d) > cell(d) + 1e-12 || b.lo(d) >= b.hi(d))
        throw ParameterOutOfRange("make_thick_set: pattern boxes must be nonempty and inside the cell");
  for (size_t i = 0; i < pattern.size(); ++i)
    for (size_t j = i + 1; j < pattern.size(); ++j)
      if (boxes_overlap(pattern[i], pattern[j]))
        throw ParameterOutOfRange("make_thick_set: pattern boxes must be disjoint");

  ThickSet w;
  w.n = n;
  w.cell = cell;
  w.pattern = pattern;
  w.carveouts = carveouts;
  w.gamma = gamma;

  // Claimed density must not exceed the in-cell density of the pattern.
  double covered = 0.0;
  for (const Box& b : pattern) covered += b.measure();
  double cell_measure = 1.0;
  for (int d = 0; d < n; ++d) cell_measure *= cell(d);
  if (covered < gamma * cell_measure - 1e-12)
    throw ParameterOutOfRange("make_thick_set: claimed gamma exceeds the in-cell density");
  return w;
}

bool ThickSet::contains(const rvec& x) const {
  for (const Box& c : carveouts) {
    bool inside = true;
    for (int d = 0; d < n; ++d)
      if (x(d) < c.lo(d) || x(d) >= c.hi(d)) inside = false;
    if (inside) return false;
  }
  rvec folded(n);
  for (int d = 0; d < n; ++d) {
    folded(d) = std::fmod(x(d), cell(d));
    if (folded(d) < 0.0) folded(d) += cell(d);
  }
  for (const Box& b : pattern) {
    bool inside = true;
    for (int d = 0; d < n; ++d)
      if (folded(d) < b.lo(d) || folded(d) >= b.hi(d)) inside = false;
    if (inside) return true;
  }
  return false;
}

double thick_measure_in_box(const ThickSet& w, const Box& query) {
  // Periodic pattern pieces clipped to the query box; pattern boxes are
  // disjoint so measures add, then carved parts are subtracted piecewise.
  double total = 0.0;
  std::vector<Box> pieces;
  std::vector<long> k_lo(w.n), k_hi(w.n);
  for (int d = 0; d < w.n; ++d) {
    k_lo[d] = static_cast<long>(std::floor(query.lo(d) / w.cell(d))) - 1;
    k_hi[d] = static_cast<long>(std::ceil(query.hi(d) / w.cell(d))) + 1;
  }
  std::vector<long> k(w.n, 0);
  const std::function<void(int)> rec = [&](int d) {
    if (d == w.n) {
      for (const Box& b : w.pattern) {
        Box shifted = b;
        for (int dd = 0; dd < w.n; ++dd) {
          shifted.lo(dd) += k[dd] * w.cell(dd);
          shifted.hi(dd) += k[dd] * w.cell(dd);
        }
        const Box piece = box_intersection(shifted, query);
        const double m = piece.measure();
        if (m > 0.0) {
          total += m;
          pieces.push_back(piece);
        }
      }
      return;
    }
    for (k[d] = k_lo[d]; k[d] <= k_hi[d]; ++k[d]) rec(d + 1);
  };
  rec(0);
  for (const Box& piece : pieces)
    for (const Box& c : w.carveouts) total -= box_intersection(piece, c).measure();
  return total;
}

ThickCheckResult thick_check(const ThickSet& w, double gamma, const rvec& a) {
  if (a.size() != w.n) throw BadDimension("thick_check: translate box dimension mismatch");
  // Breakpoints of x -> |w cap (x+P)| per dimension: box faces minus the
  // faces of P, folded over one period, plus the carve-out influence range.
  std::vector<std::vector<double>> breaks(w.n);
  for (int d = 0; d < w.n; ++d) {
    std::set<double> s;
    std::vector<double> faces;
    for (const Box& b : w.pattern) {
      faces.push_back(b.lo(d));
      faces.push_back(b.hi(d));
    }
    for (double f : faces)
      for (int period = -2; period <= 2; ++period)
        for (double e : {0.0, a(d)}) {
          double v = f + period * w.cell(d) - e;
          v = std::fmod(v, w.cell(d));
          if (v < 0.0) v += w.cell(d);
          s.insert(v);
        }
    breaks[d].assign(s.begin(), s.end());
    // Carve-outs break periodicity: also scan their influence window.
    for (const Box& c : w.carveouts) {
      for (double f : {c.lo(d), c.hi(d)})
        for (double e : {0.0, a(d)}) {
          const double base = f - e;
          for (double off : breaks[d]) {
            // align the periodic breakpoints with the carved window
            const double v = base + off;
            s.insert(v);
          }
          s.insert(base);
        }
    }
    if (!w.carveouts.empty()) breaks[d].assign(s.begin(), s.end());
  }

  double vol_P = 1.0;
  for (int d = 0; d < w.n; ++d) vol_P *= a(d);

  double worst = std::numeric_limits<double>::infinity();
  std::vector<size_t> idx(w.n, 0);
  std::function<void(int, rvec&)> rec = [&](int d, rvec& x) {
    if (d == w.n) {
      Box q;
      q.lo = x;
      q.hi = x + a;
      worst = std::min(worst, thick_measure_in_box(w, q));
      return;
    }
    for (double v : breaks[d]) {
      x(d) = v;
      rec(d + 1, x);
    }
  };
  rvec x(w.n);
  rec(0, x);

  ThickCheckResult out;
  out.worst_density = worst / vol_P;
  out.thick = worst >= gamma * vol_P - 1e-12;
  return out;
}

}  // namespace quadrop
