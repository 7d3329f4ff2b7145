#include "fosl/young.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "fosl/root_finding.hpp"
#include "fosl/summation.hpp"

namespace fosl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double get(const Params& params, const char* key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void require(bool ok, std::string_view family, const char* what) {
  if (!ok) {
    throw std::invalid_argument("make_young(" + std::string(family) + "): " + what);
  }
}

// Sum_{j > m} x^j / j!, stable for moderate x.
double taylor_tail(double x, int m) {
  if (x <= 0.0) return 0.0;
  if (x > m + 2.0) {
    double head = 0.0;
    double term = 1.0;
    for (int j = 0; j <= m; ++j) {
      head += term;
      term *= x / (j + 1);
    }
    return std::exp(x) - head;
  }
  double term = 1.0;
  for (int j = 1; j <= m + 1; ++j) term *= x / j;
  double sum = 0.0;
  for (int j = m + 1; j < m + 400; ++j) {
    sum += term;
    if (term <= 1e-17 * sum) break;
    term *= x / (j + 1);
  }
  return sum;
}

// 8-point Gauss-Legendre on [a, b].
template <class F>
double gauss8(F&& f, double a, double b) {
  static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290,
                                              0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    s += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  }
  return s * half;
}

template <class F>
double adaptive_gauss(F&& f, double a, double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss8(f, a, m);
  const double right = gauss8(f, m, b);
  const double both = left + right;
  if (depth <= 0 || std::abs(both - whole) <= tol * std::max(std::abs(both), 1e-300)) {
    return both;
  }
  return adaptive_gauss(f, a, m, left, tol, depth - 1) +
         adaptive_gauss(f, m, b, right, tol, depth - 1);
}

std::vector<double> log_grid(const ScanSpec& scan) {
  if (!(scan.t_min > 0.0) || !(scan.t_max > scan.t_min) || scan.points < 2) {
    throw std::invalid_argument("scan range must satisfy 0 < t_min < t_max with >= 2 points");
  }
  std::vector<double> ts(static_cast<std::size_t>(scan.points));
  const double l0 = std::log(scan.t_min);
  const double l1 = std::log(scan.t_max);
  for (int i = 0; i < scan.points; ++i) {
    ts[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (scan.points - 1));
  }
  return ts;
}

struct InnerIntegral {
  EstimateStatus status;
  double value;
};

// int_0^inf phi(t e^{-v}) / phi(t) e^{beta v} dv, chunked on [k, k+1].
InnerIntegral c_beta_integral(const YoungFunction& phi, double beta, double t) {
  const double log_phi_t = phi.log_eval(t);
  auto integrand = [&](double v) {
    const double s = t * std::exp(-v);
    if (s <= 0.0) return 0.0;
    return std::exp(phi.log_eval(s) - log_phi_t + beta * v);
  };
  CompensatedSum total;
  double prev = kInf;
  int nondecreasing = 0;
  constexpr int kMaxChunks = 720;
  for (int k = 0; k < kMaxChunks; ++k) {
    const double a = k;
    const double b = k + 1.0;
    const double chunk = adaptive_gauss(integrand, a, b, gauss8(integrand, a, b), 1e-13, 24);
    if (!std::isfinite(chunk)) return {EstimateStatus::divergent, kInf};
    total.add(chunk);
    const double s = total.value();
    if (chunk >= prev * (1.0 - 1e-12)) {
      if (++nondecreasing >= 6 && k >= 8) return {EstimateStatus::divergent, kInf};
    } else {
      nondecreasing = 0;
    }
    if (k >= 2 && chunk < prev) {
      const double r = chunk / prev;
      const double tail = r < 1.0 ? chunk * r / (1.0 - r) : kInf;
      if (tail <= 1e-12 * s || chunk <= 1e-16 * s) return {EstimateStatus::finite, s};
    }
    prev = chunk;
  }
  return {EstimateStatus::not_converged, total.value()};
}

}  // namespace

// ---------------------------------------------------------------------------
// YoungFunction

double YoungFunction::base_eval(double t) const {
  if (t <= 0.0) return 0.0;
  switch (family_) {
    case YoungFamily::power:
      return std::pow(t, p_);
    case YoungFamily::power_log:
      return std::pow(t, p_) * std::pow(std::log1p(t), alpha_);
    case YoungFamily::power_max:
      return t <= 1.0 ? std::pow(t, p_) : std::pow(t, p_ + delta_);
    case YoungFamily::power_exp:
      return std::pow(t, p_) * std::exp(c_ * std::pow(t, alpha_));
    case YoungFamily::exp_minus_taylor:
      return taylor_tail(c_ * std::pow(t, alpha_), taylor_terms_);
  }
  return 0.0;
}

double YoungFunction::base_log_eval(double t) const {
  if (t <= 0.0) return -kInf;
  const double lt = std::log(t);
  switch (family_) {
    case YoungFamily::power:
      return p_ * lt;
    case YoungFamily::power_log:
      return p_ * lt + alpha_ * std::log(std::log1p(t));
    case YoungFamily::power_max:
      return t <= 1.0 ? p_ * lt : (p_ + delta_) * lt;
    case YoungFamily::power_exp:
      return p_ * lt + c_ * std::pow(t, alpha_);
    case YoungFamily::exp_minus_taylor: {
      const double x = c_ * std::pow(t, alpha_);
      if (x > 40.0) {
        // log(e^x - P(x)) = x + log1p(-P(x) e^{-x})
        double head = 0.0;
        double term = 1.0;
        for (int j = 0; j <= taylor_terms_; ++j) {
          head += term;
          term *= x / (j + 1);
        }
        return x + std::log1p(-head * std::exp(-x));
      }
      return std::log(taylor_tail(x, taylor_terms_));
    }
  }
  return -kInf;
}

double YoungFunction::eval(double t) const {
  if (!(t > 0.0)) return 0.0;
  const double base = base_eval(t);
  return outer_ == 1.0 ? base : std::pow(base, outer_);
}

double YoungFunction::log_eval(double t) const { return outer_ * base_log_eval(t); }

std::optional<double> YoungFunction::pure_power() const {
  if (family_ == YoungFamily::power) return p_ * outer_;
  return std::nullopt;
}

std::optional<double> YoungFunction::closed_inverse(double y) const {
  const auto e = pure_power();
  if (!e) return std::nullopt;
  if (y <= 0.0) return 0.0;
  return std::pow(y, 1.0 / *e);
}

double YoungFunction::log_slope_at_one() const {
  constexpr double d = 1e-3;
  return (log_eval(1.0 + d) - log_eval(1.0 - d)) / (std::log1p(d) - std::log1p(-d));
}

const std::vector<std::string>& young_family_names() {
  static const std::vector<std::string> names = {"power", "power_log", "power_max", "power_exp",
                                                 "exp_minus_taylor"};
  return names;
}

YoungFunction make_young(std::string_view name, const Params& params) {
  static const std::map<std::string, std::set<std::string>, std::less<>> allowed = {
      {"power", {"p"}},
      {"power_log", {"p", "alpha"}},
      {"power_max", {"p", "delta"}},
      {"power_exp", {"p", "c", "alpha"}},
      {"exp_minus_taylor", {"c", "alpha", "n"}},
  };
  const auto fam = allowed.find(name);
  if (fam == allowed.end()) {
    throw std::invalid_argument("make_young: unknown family '" + std::string(name) + "'");
  }
  for (const auto& [key, value] : params) {
    if (!fam->second.contains(key)) {
      throw std::invalid_argument("make_young(" + std::string(name) + "): unknown parameter '" +
                                  key + "'");
    }
    if (!std::isfinite(value)) {
      throw std::invalid_argument("make_young(" + std::string(name) + "): parameter '" + key +
                                  "' is not finite");
    }
  }

  YoungFunction phi;
  phi.name_ = std::string(name);
  if (name == "power") {
    phi.family_ = YoungFamily::power;
    phi.p_ = get(params, "p", 2.0);
    require(phi.p_ >= 1.0, name, "p must be >= 1");
    phi.params_ = {{"p", phi.p_}};
  } else if (name == "power_log") {
    phi.family_ = YoungFamily::power_log;
    phi.p_ = get(params, "p", 2.0);
    phi.alpha_ = get(params, "alpha", 1.0);
    require(phi.p_ >= 1.0, name, "p must be >= 1");
    require(phi.alpha_ >= 1.0, name, "alpha must be >= 1");
    phi.params_ = {{"p", phi.p_}, {"alpha", phi.alpha_}};
  } else if (name == "power_max") {
    phi.family_ = YoungFamily::power_max;
    phi.p_ = get(params, "p", 1.0);
    phi.delta_ = get(params, "delta", 1.0);
    require(phi.p_ >= 1.0, name, "p must be >= 1");
    require(phi.delta_ > 0.0, name, "delta must be > 0");
    phi.params_ = {{"p", phi.p_}, {"delta", phi.delta_}};
  } else if (name == "power_exp") {
    phi.family_ = YoungFamily::power_exp;
    phi.p_ = get(params, "p", 2.0);
    phi.c_ = get(params, "c", 1.0);
    phi.alpha_ = get(params, "alpha", 1.0);
    require(phi.p_ >= 1.0, name, "p must be >= 1");
    require(phi.c_ > 0.0, name, "c must be > 0");
    require(phi.alpha_ > 0.0, name, "alpha must be > 0");
    phi.params_ = {{"p", phi.p_}, {"c", phi.c_}, {"alpha", phi.alpha_}};
  } else {
    phi.family_ = YoungFamily::exp_minus_taylor;
    phi.c_ = get(params, "c", 1.0);
    phi.alpha_ = get(params, "alpha", 1.0);
    const double n = get(params, "n", 2.0);
    require(phi.c_ > 0.0, name, "c must be > 0");
    require(phi.alpha_ > 0.0, name, "alpha must be > 0");
    require(n >= 1.0 && n == std::floor(n), name, "n must be a positive integer");
    phi.taylor_terms_ = static_cast<int>(std::floor(n / phi.alpha_));
    require(phi.taylor_terms_ <= 200, name, "n/alpha too large");
    phi.params_ = {{"c", phi.c_}, {"alpha", phi.alpha_}, {"n", n}};
  }
  return phi;
}

YoungFunction power_compose(const YoungFunction& phi, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) {
    throw std::invalid_argument("power_compose: exponent q must be >= 1");
  }
  YoungFunction out = phi;
  out.outer_ = phi.outer_ * q;
  if (q != 1.0) out.name_ = phi.name_ + "^" + nlohmann::json(q).dump();
  out.params_["q"] = out.outer_;
  if (out.outer_ == 1.0) out.params_.erase("q");
  return out;
}

double inverse(const YoungFunction& phi, double y) {
  if (y < 0.0 || std::isnan(y)) throw std::invalid_argument("inverse: y must be >= 0");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return std::numeric_limits<double>::infinity();
  double lo = 1.0;
  double hi = 1.0;
  if (phi.eval(1.0) < y) {
    while (phi.eval(hi) < y) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw std::runtime_error("inverse: bracket overflow");
    }
  } else {
    while (phi.eval(lo) > y) {
      hi = lo;
      lo *= 0.5;
      if (lo == 0.0) return hi;  // y below the representable range of phi
    }
  }
  return bisect_increasing([&](double t) { return phi.eval(t); }, lo, hi, y);
}

std::string to_string(EstimateStatus s) {
  switch (s) {
    case EstimateStatus::finite:
      return "finite";
    case EstimateStatus::divergent:
      return "divergent";
    case EstimateStatus::not_converged:
      return "not_converged";
  }
  return "unknown";
}

CBetaEstimate estimate_C_beta(const YoungFunction& phi, double beta, ScanSpec scan) {
  if (!(beta > 0.0)) throw std::invalid_argument("estimate_C_beta: beta must be > 0");
  CBetaEstimate out;
  out.scan = scan;
  for (double t : log_grid(scan)) {
    const InnerIntegral r = c_beta_integral(phi, beta, t);
    if (r.status != EstimateStatus::finite) {
      out.status = r.status;
      out.value = kInf;
      out.argmax_t = t;
      return out;
    }
    if (r.value > out.value) {
      out.value = r.value;
      out.argmax_t = t;
    }
  }
  return out;
}

DoublingEstimate estimate_doubling(const YoungFunction& phi, ScanSpec scan) {
  DoublingEstimate out;
  out.scan = scan;
  const std::vector<double> ts = log_grid(scan);
  std::vector<double> ratios;
  ratios.reserve(ts.size());
  for (double t : ts) {
    const double r = std::exp(phi.log_eval(2.0 * t) - phi.log_eval(t));
    ratios.push_back(r);
    if (!std::isfinite(r) || r > 1e6) {
      out.finite = false;
      out.value = kInf;
      out.argmax_t = t;
      return out;
    }
    if (r > out.value) {
      out.value = r;
      out.argmax_t = t;
    }
  }
  const std::size_t tail = std::max<std::size_t>(ts.size() / 10, 3);
  bool increasing = true;
  for (std::size_t i = ts.size() - tail + 1; i < ts.size(); ++i) {
    if (!(ratios[i] > ratios[i - 1])) {
      increasing = false;
      break;
    }
  }
  if (increasing && ratios.back() > ratios[ts.size() - tail] * (1.0 + 1e-9)) {
    out.finite = false;
    out.value = kInf;
    out.argmax_t = ts.back();
  }
  return out;
}

YoungAnalysis analyze_young(const YoungFunction& phi, double beta) {
  return {phi.name(), beta, estimate_C_beta(phi, beta), estimate_doubling(phi)};
}

namespace {
nlohmann::json scan_json(const ScanSpec& s) {
  return {{"t_min", s.t_min}, {"t_max", s.t_max}, {"points", s.points}};
}
nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}
}  // namespace

nlohmann::json to_json(const YoungAnalysis& a) {
  return {{"young", a.young},
          {"beta", a.beta},
          {"C_beta", finite_or_null(a.c_beta.value)},
          {"C_beta_status", to_string(a.c_beta.status)},
          {"C_beta_argmax_t", a.c_beta.argmax_t},
          {"C_beta_scan", scan_json(a.c_beta.scan)},
          {"K", finite_or_null(a.doubling.value)},
          {"K_finite", a.doubling.finite},
          {"K_argmax_t", a.doubling.argmax_t},
          {"K_scan", scan_json(a.doubling.scan)}};
}

std::size_t count_young_violations(const YoungFunction& phi, std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  const double l0 = std::log(1e-6);
  const double l1 = std::log(1e6);
  auto draw = [&] { return std::exp(l0 + (l1 - l0) * unit_uniform(rng())); };
  std::size_t bad = phi.eval(0.0) == 0.0 ? 0 : 1;
  for (int i = 0; i < samples; ++i) {
    double s = draw();
    double t = draw();
    if (s > t) std::swap(s, t);
    const double fs = phi.eval(s);
    const double ft = phi.eval(t);
    if (!(fs > 0.0) && std::isfinite(std::log(s))) {
      // underflow of tiny arguments is not a violation
      if (phi.log_eval(s) > -700.0) ++bad;
    }
    if (fs > ft) ++bad;
    const double fm = phi.eval(0.5 * (s + t));
    if (std::isfinite(ft) && fm > 0.5 * (fs + ft) * (1.0 + 1e-12) + 1e-300) ++bad;
  }
  return bad;
}

}  // namespace fosl
