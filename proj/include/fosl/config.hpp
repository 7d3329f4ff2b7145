#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fosl/harness.hpp"
#include "fosl/young.hpp"

namespace fosl {

/// Configuration error; `key()` is the dotted key path (e.g. "domain.shape").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// One experiment. INI layout (all sections optional except [domain] and [young]):
///
///   [experiment] beta, seed, threads, output, checks, resolutions, trials, samples
///   [domain]     shape, <shape parameters>
///   [young]      family, <family parameters>
///   [family]     kind, count
///   [ball]       radius, cx, cy
///   [cutoff]     x, y, r, t
///   [tolerances] poincare, testfn, holder, geometric_drift, embedding_drift,
///                extension_drift, stable_growth, divergent_growth, inverse_slack
struct ExperimentConfig {
  double beta = 1.0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output = "out";
  std::vector<std::string> checks;
  std::vector<int> resolutions{48, 96};
  int trials = 500;
  int samples = 1000;

  std::string domain_shape = "disk";
  Params domain_params;
  std::string young_family = "power";
  Params young_params;

  std::string family_kind = "polynomial";
  int family_count = 0;

  double ball_radius = 1.0;
  double ball_cx = 0.0;
  double ball_cy = 0.0;

  double cutoff_x = 0.0;
  double cutoff_y = 0.0;
  double cutoff_r = 0.25;
  double cutoff_t = 0.5;

  Tolerances tol;

  bool operator==(const ExperimentConfig&) const;
};

/// Check ids accepted in experiment.checks, in catalog order.
const std::vector<std::string>& check_names();

/// Parses INI text and validates names against the catalogs. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical INI text; parse_config(write_config(c)) == c.
std::string write_config(const ExperimentConfig& c);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace fosl
