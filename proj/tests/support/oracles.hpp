#pragma once

// Test-side oracles.  Everything here recomputes expected values through
// routes independent of the library paths under test: plain-double trig
// sums, adaptive quadrature, bisection on the flow itself.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "solenoid/flows.hpp"

namespace oracles {

using Real1D = std::function<double(double)>;

namespace detail {

inline double adapt(const Real1D& f, double a, double m, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adapt(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adapt(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

inline double adaptive_simpson(const Real1D& f, double a, double b, double tol,
                               int max_depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adapt(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

// Long-range integral split into unit chunks (oscillatory integrands).
inline double chunked_simpson(const Real1D& f, double a, double b, double tol_per_unit) {
  double total = 0.0;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(lo + 1.0, b);
    total += adaptive_simpson(f, lo, hi, tol_per_unit);
    lo = hi;
  }
  return total;
}

// Composite Simpson over n subintervals (n forced even); global error is
// O(h^4 (b-a) max f'''').
inline double composite_simpson(const Real1D& f, double a, double b, long long n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double sum = f(a) + f(b);
  for (long long i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

// Least-squares slope of log(y) against log(x).
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[static_cast<size_t>(i)]);
    const double ly = std::log(y[static_cast<size_t>(i)]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Plain-double evaluator of a finite series along the orbit of x:
// f(x + pi_N(s)) = sum (f_r chi_r(x)) e^{2 pi i r s}, summed directly.
inline Real1D orbit_function(const solenoid::BohrSeries& f, const solenoid::SolenoidPoint& x) {
  struct Term {
    double omega;
    std::complex<double> c;
  };
  std::vector<Term> terms;
  const auto list = solenoid::term_list(f, 1e-14, x.depth() - 1);
  for (const auto& t : list.terms) {
    std::complex<double> c = t.coeff;
    if (t.m != 0)
      c *= solenoid::unit_phase(solenoid::frac1(t.m * x.angle(t.level + 1)));
    terms.push_back({2.0 * M_PI * solenoid::to_double(t.freq), c});
  }
  return [terms](double s) {
    double sum = 0.0;
    for (const auto& t : terms)
      sum += (t.c * std::complex<double>(std::cos(t.omega * s), std::sin(t.omega * s))).real();
    return sum;
  };
}

// Measured first p_1-return of a linear flow: scan for the angle wrap, then
// bisect it.  Uses only linear_evolve and the first coordinate.
inline double measure_first_p1_return(const solenoid::LinearFlow& flow,
                                      const solenoid::SolenoidPoint& x) {
  const double start = x.angle_real(1);
  const double step = 1.0 / (16.0 * flow.alpha());
  auto rel = [&](double t) {
    double d = linear_evolve(flow, t, x).angle_real(1) - start;
    return d < 0.0 ? d + 1.0 : d;  // progress of the first angle in [0, 1)
  };
  double prev = 0.0, t = 0.0;
  for (int i = 1; i < 64; ++i) {
    const double cur = rel(i * step);
    if (cur < prev) {  // wrapped
      double lo = (i - 1) * step, hi = i * step;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rel(mid) >= prev * 0.5 ? lo : hi) = mid;  // before wrap: still large
      }
      t = 0.5 * (lo + hi);
      break;
    }
    prev = cur;
  }
  return t;
}

}  // namespace oracles
