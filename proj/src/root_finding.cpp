#include "fosl/root_finding.hpp"

#include <algorithm>
#include <limits>

namespace fosl {

namespace {

struct Side {
  bool set = false;
  double mu = 0.0;
  double g = 0.0;  // log modular
  double modular = 0.0;
};

}  // namespace

LuxemburgRoot luxemburg_root(const std::function<double(double)>& modular, double lambda0,
                             double slope_hint, double rel_tol) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw std::invalid_argument("luxemburg_root: starting lambda must be positive and finite");
  }
  LuxemburgRoot out;
  Side lo;  // modular > 1
  Side hi;  // modular <= 1
  const double tol_mu = std::log1p(rel_tol);
  double slope = std::clamp(slope_hint, 0.25, 64.0);

  auto eval = [&](double mu) {
    ++out.evaluations;
    const double m = modular(std::exp(mu));
    if (std::isnan(m)) throw std::runtime_error("luxemburg_root: modular evaluated to NaN");
    Side s{true, mu, std::log(m), m};
    if (m > 1.0) {
      if (!lo.set || mu > lo.mu) lo = s;
    } else {
      if (!hi.set || mu < hi.mu) hi = s;
    }
    return s;
  };

  // Bracketing: secant-accelerated steps in log-log coordinates, with the step
  // at least doubling whenever the sign fails to change.
  Side cur = eval(std::log(lambda0));
  double min_step = 0.5 * tol_mu;
  double blind_step = 1.0;
  int guard = 0;
  while (!(lo.set && hi.set)) {
    if (++guard > 400) throw std::runtime_error("luxemburg_root: could not bracket modular = 1");
    double step;
    if (std::isfinite(cur.g)) {
      step = cur.g / slope;
      step += std::copysign(std::max(min_step, 1e-3 * std::abs(step)), step);
      if (cur.g == 0.0) step = -min_step;  // exactly on the root: probe below it
      min_step *= 4.0;
    } else {
      step = cur.g > 0 ? blind_step : -blind_step;
      blind_step *= 2.0;
    }
    step = std::clamp(step, -80.0, 80.0);
    Side next = eval(cur.mu + step);
    if (std::isfinite(next.g) && std::isfinite(cur.g) && next.mu != cur.mu) {
      const double secant = (cur.g - next.g) / (next.mu - cur.mu);
      if (secant > 1e-6) slope = std::clamp(secant, 1e-3, 1e3);
    }
    cur = next;
  }

  // Illinois on the bracket; probes across the root once a point lands on it.
  int side_repeats = 0;
  int last_side = 0;
  while (hi.mu - lo.mu > tol_mu) {
    if (++guard > 2000) break;
    double mu;
    const double width = hi.mu - lo.mu;
    if (std::isfinite(lo.g) && std::isfinite(hi.g) && lo.g != hi.g) {
      double glo = lo.g;
      double ghi = hi.g;
      if (side_repeats >= 2) {
        if (last_side > 0) ghi *= 0.5; else glo *= 0.5;
      }
      mu = lo.mu + glo * width / (glo - ghi);
      const double margin = std::min(0.25 * width, 0.5 * tol_mu);
      mu = std::clamp(mu, lo.mu + margin, hi.mu - margin);
    } else {
      mu = lo.mu + 0.5 * width;
    }
    const Side s = eval(mu);
    const int side = s.modular > 1.0 ? 1 : -1;
    side_repeats = side == last_side ? side_repeats + 1 : 1;
    last_side = side;
    if (std::abs(s.modular - 1.0) <= 1e-12 && hi.mu - lo.mu > tol_mu) {
      const double probe = side > 0 ? s.mu + 0.5 * tol_mu : s.mu - 0.5 * tol_mu;
      if (probe > lo.mu && probe < hi.mu) eval(probe);
    }
  }
  out.lambda = std::exp(hi.mu);
  out.lower = std::exp(lo.mu);
  out.modular_at = hi.modular;
  return out;
}

}  // namespace fosl
