#pragma once
// 1-D root finding: Brent's method on a sign-changing bracket, plus a
// uniform-grid bracket scanner for multi-root problems.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "core.hpp"

namespace dpp {

struct RootOptions {
  double f_tol = 1e-9;   // accept when |f| drops below this
  double x_tol = 1e-13;  // or when the bracket collapses (relative)
  int max_iter = 200;
};

// Brent-Dekker on [a,b]; requires f(a), f(b) of opposite sign.
template <class F>
double brent(F&& f, double a, double b, const RootOptions& opt = {}) {
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw NumericalError("brent: non-finite function value at an endpoint");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb))
    throw NumericalError("brent: endpoints do not bracket a root");

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < opt.max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + opt.x_tol;
    const double m = 0.5 * (c - b);
    if (std::abs(fb) <= opt.f_tol || std::abs(m) <= tol) return b;

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      // inverse quadratic interpolation (secant when only two points distinct)
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = m; e = m;
      }
    } else {
      d = m; e = m;
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
    if (!std::isfinite(fb)) throw NumericalError("brent: non-finite function value");
    if (fb == 0.0) return b;
    if (std::signbit(fb) == std::signbit(fc)) { c = a; fc = fa; d = b - a; e = d; }
  }
  throw NumericalError("brent: no convergence within iteration limit");
}

// Sample f on n+1 uniform nodes over [a,b]; return every adjacent sign-change
// bracket. Nodes where f is exactly zero yield a degenerate [x,x] bracket;
// non-finite nodes break brackets instead of raising.
template <class F>
std::vector<std::pair<double, double>> scan_brackets(F&& f, double a, double b, int n) {
  std::vector<std::pair<double, double>> out;
  if (n < 1) return out;
  double x_prev = a, f_prev = f(a);
  for (int i = 1; i <= n; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / n;
    const double fx = f(x);
    if (f_prev == 0.0) {
      out.emplace_back(x_prev, x_prev);
    } else if (std::isfinite(f_prev) && std::isfinite(fx) && fx != 0.0 &&
               std::signbit(fx) != std::signbit(f_prev)) {
      out.emplace_back(x_prev, x);
    }
    x_prev = x; f_prev = fx;
  }
  if (f_prev == 0.0) out.emplace_back(x_prev, x_prev);
  return out;
}

}  // namespace dpp
