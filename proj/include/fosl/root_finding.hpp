#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace fosl {

/// Outcome of a Luxemburg-type root search: the smallest lambda with
/// modular(lambda) <= 1, located to a relative bracket width.
struct LuxemburgRoot {
  double lambda = 0.0;      ///< upper bracket end; modular(lambda) <= 1 holds
  double lower = 0.0;       ///< lower bracket end; modular(lower) > 1 holds
  double modular_at = 0.0;  ///< modular(lambda)
  int evaluations = 0;
};

/// Finds lambda* with modular(lambda*) = 1 for a modular that is nonincreasing
/// in lambda. The search runs on g(mu) = log modular(e^mu): a doubling bracket
/// (accelerated by secant steps using `slope_hint` ~ -dg/dmu) followed by an
/// Illinois-safeguarded bisection. Terminates once the bracket is narrower than
/// `rel_tol` relative. Throws std::runtime_error if no bracket is found.
LuxemburgRoot luxemburg_root(const std::function<double(double)>& modular, double lambda0,
                             double slope_hint = 1.0, double rel_tol = 1e-8);

/// Bisection for an increasing function: returns t with f(t) = y, given
/// f(lo) <= y <= f(hi). Stops at machine resolution.
template <class F>
double bisect_increasing(F&& f, double lo, double hi, double y, int max_iter = 400) {
  for (int i = 0; i < max_iter; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) <= y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double flo = f(lo);
  const double fhi = f(hi);
  return std::abs(flo - y) <= std::abs(fhi - y) ? lo : hi;
}

/// Golden-section minimisation of a unimodal function on [a, b] down to an
/// interval of width `tol`. Returns the abscissa of the best evaluated point.
template <class F>
double golden_minimize(F&& f, double a, double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace fosl
