#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "errors.hpp"

namespace lossprobe::search {

struct Minimum {
  double x;
  double value;
};

/// Golden-section search for a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than `tol`.
template <class F>
Minimum golden_section(F&& f, double lo, double hi, double tol = 1e-10,
                       int max_iterations = 400) {
  if (!(lo <= hi)) throw DomainError("golden_section: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && (hi - lo) > tol; ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  const double fx = f(x);
  // the interior probes can beat the midpoint on flat plateaus
  if (fc < fx && fc <= fd) return {c, fc};
  if (fd < fx) return {d, fd};
  return {x, fx};
}

/// Uniform grid scan over [lo, hi] with `points` samples, followed by golden
/// refinement inside the two cells around the best grid point. Valid for
/// unimodal objectives; ties on the grid resolve to the lowest abscissa.
template <class F>
Minimum grid_then_golden(F&& f, double lo, double hi, std::size_t points,
                         double tol) {
  if (points < 3) throw DomainError("grid_then_golden: need at least 3 grid points");
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double x = (i + 1 == points) ? hi : lo + step * static_cast<double>(i);
    const double v = f(x);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double best_x = (best + 1 == points) ? hi : lo + step * static_cast<double>(best);
  const double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  const double b = best + 1 >= points ? hi : std::min(hi, lo + step * static_cast<double>(best + 1));
  Minimum refined = golden_section(f, a, b, tol);
  if (refined.value <= best_value) return refined;
  return {best_x, best_value};
}

/// Bisection for a sign change of f on [lo, hi].
/// Requires f(lo) and f(hi) of opposite sign (or one of them zero).
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-12,
              int max_iterations = 300) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("bisect: no sign change in bracket");
  for (int i = 0; i < max_iterations && (hi - lo) > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace lossprobe::search
