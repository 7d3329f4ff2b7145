#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fosl/geometry.hpp"
#include "fosl/norms.hpp"
#include "fosl/young.hpp"

namespace fosl {

/// A test function as a continuous point function, so a member can be
/// resampled at any resolution.
struct TestFunction {
  std::string label;
  std::function<double(const Point&)> f;
};

enum class FamilyKind { polynomial, radial_bump, trig, cutoff, truncation };

FamilyKind family_kind_from_string(std::string_view s);
std::string to_string(FamilyKind k);
const std::vector<std::string>& family_kind_names();

/// Members are placed relative to `frame` (centre and half of the longest side).
/// polynomial: x^a y^b, 1 <= a + b <= 3 (x^a in 1-D), centred on the frame;
/// radial_bump: exp(1 - 1/(1 - s^2)) with seeded centres and radii;
/// trig: seeded sums of four sines; cutoff: seeded u_{x,r,t};
/// truncation: trig members clamped at half their amplitude bound.
std::vector<TestFunction> make_family(FamilyKind kind, int count, std::uint64_t seed, const Box& frame,
                                      int dim);

/// u_{x,r,t}(z) = 1 for |z - x| <= r, (t - |z - x|)/(t - r) for r < |z - x| < t,
/// 0 beyond t, as a point function.
double cutoff_value(const Point& x, double r, double t, const Point& z);

/// u_{x,r,t} sampled on the inside cells. Throws std::invalid_argument unless
/// x lies in the domain and 0 < r < t < diam.
SampledFunction make_cutoff(std::shared_ptr<const Grid> grid, const Point& x, double r, double t);

/// Lebesgue measure of the unit sphere S^{n-1}: 2 for n = 1, 2 pi for n = 2.
double sphere_measure(int n);

struct CaseRow {
  std::string label;
  int resolution = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool skipped = false;
};

/// Outcome of one inequality check. `pass` is empty for report-only checks.
struct InequalityReport {
  std::string id;
  nlohmann::json params = nlohmann::json::object();
  std::vector<CaseRow> cases;
  double max_ratio = 0.0;
  double constant = 0.0;
  double tolerance = 0.0;
  std::optional<bool> pass;
  nlohmann::json measured = nlohmann::json::object();
  double runtime_s = 0.0;

  void add(CaseRow row);
};

/// CSV columns: case,resolution,lhs,rhs,ratio,skipped.
void write_csv(const InequalityReport& r, const std::string& path);
/// JSON summary; `with_runtime` false leaves out the wall-clock field.
nlohmann::json to_json(const InequalityReport& r, bool with_runtime = true);

/// The ball B(center, radius) as a domain (interval in 1-D, disk in 2-D).
Domain make_ball(int dim, const Point& center, double radius);

struct Tolerances {
  double poincare = 0.02;
  double testfn = 0.05;
  double holder = 0.0;
  double geometric_drift = 0.30;
  double embedding_drift = 0.30;
  double extension_drift = 0.50;
  double stable_growth = 0.05;
  double divergent_growth = 0.50;
  double inverse_slack = 1e-6;
};

/// Mean |u - u_B| <= phi^{-1}(2^{n+beta} r^{beta-n} omega_n^2) ||u|| (1 + tol).
InequalityReport check_poincare(const YoungFunction& phi, double beta, const Domain& ball, int resolution,
                                const std::vector<TestFunction>& family, const Tolerances& tol = {});

/// |u(x) - u(y)| / (phi^{-1}(|x-y|^{beta-n}) ||u||) <= C_chain over every cell
/// pair. Throws std::invalid_argument for beta <= n or a non-doubling phi.
/// `measured` carries the u = x modulus sub-check on the unit interval.
InequalityReport check_holder(const YoungFunction& phi, double beta, const Domain& ball, int resolution,
                              const std::vector<TestFunction>& family, const Tolerances& tol = {});

/// min over trials of lhs |E|^{beta/n} with E a union of random discs;
/// passes when positive and within the drift tolerance across resolutions.
InequalityReport check_geometric(double beta, const Domain& ball, const std::vector<int>& resolutions,
                                 int trials, std::uint64_t seed, const Tolerances& tol = {});

/// inf_c ||u - c||_{L^{phi^{n/(n-beta)}}} / ||u||, maximum over the family per
/// resolution; passes when the maximum drifts within tolerance.
InequalityReport check_embedding(const YoungFunction& phi, double beta, const Domain& ball,
                                 const std::vector<int>& resolutions,
                                 const std::vector<TestFunction>& family, const Tolerances& tol = {});

struct CutoffCase {
  Point x;
  double r;
  double t;
};

/// ||u_{x,r,t}|| <= C / phi^{-1}((t-r)^beta / |B_Omega(x,t)|) (1 + tol) with C
/// assembled from the measured C_beta. Throws when C_beta is not finite.
InequalityReport check_testfn_bound(const YoungFunction& phi, double beta, const Domain& domain,
                                    int resolution, const std::vector<CutoffCase>& cases,
                                    const Tolerances& tol = {});

/// ||Eu||_{box} / ||u||_{Omega} per member and resolution. For Ahlfors-regular
/// domains passes when the maximum drifts within tolerance; otherwise reports
/// only, recording whether every member's ratio increased.
InequalityReport check_extension(const YoungFunction& phi, double beta, const Domain& domain,
                                 const std::vector<int>& resolutions,
                                 const std::vector<TestFunction>& family, const Tolerances& tol = {});

/// Seminorm of a smooth interior bump at two resolutions: stable when C_beta
/// is finite, growing by more than the divergent tolerance otherwise.
InequalityReport check_nontriviality(const YoungFunction& phi, double beta, const Domain& domain,
                                     const std::vector<int>& resolutions, const Tolerances& tol = {});

/// C_beta and doubling estimates as a report (report only).
InequalityReport check_c_beta(const YoungFunction& phi, double beta);
InequalityReport check_doubling(const YoungFunction& phi);

/// Sampled inverse laws for a doubling phi:
///   phi^{-1}(2x) <= 2 phi^{-1}(x), phi^{-1}(tx) <= t^{1/(K-1)} phi^{-1}(x),
///   t^{K-1} phi(x) <= phi(tx).
InequalityReport check_inverse_laws(const YoungFunction& phi, std::uint64_t seed, int samples,
                                    const Tolerances& tol = {});

/// Empirical Ahlfors constant with the default sample set (report only).
InequalityReport check_ahlfors(const Domain& domain, int resolution);

}  // namespace fosl
