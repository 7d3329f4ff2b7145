#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fosl {

using Params = std::map<std::string, double>;

enum class YoungFamily { power, power_log, power_max, power_exp, exp_minus_taylor };

/// A Young function: convex, continuous, phi(0) = 0 and phi(t) > 0 for t > 0.
///
/// Instances are immutable values drawn from a closed catalog of families,
/// optionally raised to an outer power q >= 1 (see power_compose). The closed
/// catalog lets the pair-sum kernels specialise on pure powers.
class YoungFunction {
 public:
  double operator()(double t) const { return eval(t); }
  double eval(double t) const;

  /// log(phi(t)), computed without overflow for the exponential families.
  double log_eval(double t) const;

  /// Analytic inverse, available for pure powers only.
  std::optional<double> closed_inverse(double y) const;

  const std::string& name() const { return name_; }
  const Params& params() const { return params_; }
  YoungFamily family() const { return family_; }
  double outer_exponent() const { return outer_; }

  /// Exponent e when phi(t) = t^e exactly, otherwise nullopt.
  std::optional<double> pure_power() const;

  /// d log phi / d log t at t = 1; a slope hint for log-log root finding.
  double log_slope_at_one() const;

  friend YoungFunction make_young(std::string_view name, const Params& params);
  friend YoungFunction power_compose(const YoungFunction& phi, double q);

 private:
  double base_eval(double t) const;
  double base_log_eval(double t) const;

  std::string name_;
  Params params_;
  YoungFamily family_ = YoungFamily::power;
  double p_ = 1.0;
  double alpha_ = 1.0;
  double delta_ = 1.0;
  double c_ = 1.0;
  int taylor_terms_ = 0;  // highest subtracted Taylor index for exp_minus_taylor
  double outer_ = 1.0;
};

/// Builds a catalog Young function. Families and parameters (defaults in
/// parentheses):
///   power            t^p                                  p >= 1 (2)
///   power_log        t^p [ln(1+t)]^alpha                  p >= 1 (2), alpha >= 1 (1)
///   power_max        max{t^p, t^(p+delta)}                p >= 1 (1), delta > 0 (1)
///   power_exp        t^p exp(c t^alpha)                   p >= 1 (2), c > 0 (1), alpha > 0 (1)
///   exp_minus_taylor exp(c t^alpha) - sum_{j<=[n/alpha]} (c t^alpha)^j / j!
///                                                         c > 0 (1), alpha > 0 (1), n >= 1 (2)
/// Throws std::invalid_argument on unknown names, unknown keys or parameters
/// outside these ranges.
YoungFunction make_young(std::string_view name, const Params& params);

/// t -> phi(t)^q. Throws std::invalid_argument when q < 1.
YoungFunction power_compose(const YoungFunction& phi, double q);

/// Names of the catalog families, in catalog order.
const std::vector<std::string>& young_family_names();

/// phi^{-1}(y): doubling bracket around t = 1 then bisection to machine
/// resolution. inverse(phi, 0) == 0. Throws std::invalid_argument for y < 0.
double inverse(const YoungFunction& phi, double y);

/// Log-spaced scan of t used by the constant estimators.
struct ScanSpec {
  double t_min = 1e-4;
  double t_max = 1e4;
  int points = 200;
};

enum class EstimateStatus { finite, divergent, not_converged };

std::string to_string(EstimateStatus s);

struct CBetaEstimate {
  EstimateStatus status = EstimateStatus::finite;
  double value = 0.0;  ///< sup over the scan; +inf unless status == finite
  double argmax_t = 0.0;
  ScanSpec scan;
};

/// sup_t (t^beta / phi(t)) * int_0^t phi(s) s^{-beta-1} ds over the scan.
/// The inner integral is evaluated in v = log(t/s) as
///   int_0^inf phi(t e^{-v}) / phi(t) * e^{beta v} dv
/// by adaptive Gauss-Legendre on unit chunks. Divergence is declared when the
/// chunk contributions stop decreasing (integrand no better than s^{-1} near 0);
/// this is a heuristic on a finite range.
CBetaEstimate estimate_C_beta(const YoungFunction& phi, double beta, ScanSpec scan = {});

struct DoublingEstimate {
  bool finite = true;
  double value = 0.0;  ///< sup phi(2t)/phi(t) over the scan, or +inf
  double argmax_t = 0.0;
  ScanSpec scan;
};

/// sup_t phi(2t)/phi(t) over the scan (default [1e-6, 1e6], 400 points).
/// Flagged infinite when a ratio exceeds 1e6, is not finite, or the ratio is
/// still strictly increasing over the last tenth of the scan.
DoublingEstimate estimate_doubling(const YoungFunction& phi,
                                   ScanSpec scan = {1e-6, 1e6, 400});

/// Measured constants for one (phi, beta).
struct YoungAnalysis {
  std::string young;
  double beta = 0.0;
  CBetaEstimate c_beta;
  DoublingEstimate doubling;
};

YoungAnalysis analyze_young(const YoungFunction& phi, double beta);
nlohmann::json to_json(const YoungAnalysis& a);

/// Sampled checks of the Young-function axioms on log-uniform points in
/// [1e-6, 1e6]: phi(0) = 0, positivity, monotonicity and midpoint convexity.
/// Returns the number of violated samples.
std::size_t count_young_violations(const YoungFunction& phi, std::uint64_t seed, int samples);

}  // namespace fosl
