#include "fosl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fosl/summation.hpp"
#include "fosl/whitney.hpp"

namespace fosl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool is_constant(const std::vector<double>& v) {
  if (v.empty()) return true;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return !(*hi > *lo);
}

double smooth_bump(double s) {
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::shared_ptr<const Grid> make_grid(const Domain& d, int resolution) {
  return std::make_shared<const Grid>(d, resolution);
}

double drift(double first, double last) { return last / first - 1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// families

const std::vector<std::string>& family_kind_names() {
  static const std::vector<std::string> names = {"polynomial", "radial_bump", "trig", "cutoff",
                                                 "truncation"};
  return names;
}

FamilyKind family_kind_from_string(std::string_view s) {
  if (s == "polynomial") return FamilyKind::polynomial;
  if (s == "radial_bump") return FamilyKind::radial_bump;
  if (s == "trig") return FamilyKind::trig;
  if (s == "cutoff") return FamilyKind::cutoff;
  if (s == "truncation") return FamilyKind::truncation;
  throw std::invalid_argument("unknown family kind '" + std::string(s) + "'");
}

std::string to_string(FamilyKind k) {
  return family_kind_names()[static_cast<std::size_t>(k)];
}

double cutoff_value(const Point& x, double r, double t, const Point& z) {
  const double d = distance(x, z);
  if (d <= r) return 1.0;
  if (d >= t) return 0.0;
  return (t - d) / (t - r);
}

std::vector<TestFunction> make_family(FamilyKind kind, int count, std::uint64_t seed, const Box& frame,
                                      int dim) {
  const Point c = frame.center();
  const double s = 0.5 * (dim == 1 ? frame.extent(0) : std::max(frame.extent(0), frame.extent(1)));
  std::mt19937_64 rng(seed);
  auto U = [&] { return unit_uniform(rng()); };
  std::vector<TestFunction> out;
  switch (kind) {
    case FamilyKind::polynomial: {
      std::vector<std::array<int, 2>> powers;
      for (int deg = 1; deg <= 3; ++deg) {
        if (dim == 1) {
          powers.push_back({deg, 0});
        } else {
          for (int b = 0; b <= deg; ++b) powers.push_back({deg - b, b});
        }
      }
      const std::size_t m = count <= 0 ? powers.size() : std::min<std::size_t>(powers.size(), count);
      for (std::size_t k = 0; k < m; ++k) {
        const auto [a, b] = powers[k];
        std::string label = "x^" + std::to_string(a);
        if (dim == 2) label += "y^" + std::to_string(b);
        out.push_back({label, [=](const Point& x) {
                         return std::pow((x[0] - c[0]) / s, a) * std::pow((x[1] - c[1]) / s, b);
                       }});
      }
      break;
    }
    case FamilyKind::radial_bump:
      for (int k = 0; k < count; ++k) {
        Point z{c[0] + 0.5 * s * (2 * U() - 1), c[1]};
        if (dim == 2) z[1] = c[1] + 0.5 * s * (2 * U() - 1);
        const double rho = s * (0.3 + 0.4 * U());
        out.push_back({"bump_" + std::to_string(k),
                       [=](const Point& x) { return smooth_bump(distance(x, z) / rho); }});
      }
      break;
    case FamilyKind::trig:
    case FamilyKind::truncation:
      for (int k = 0; k < count; ++k) {
        std::array<double, 4> amp{};
        std::array<Point, 4> freq{};
        std::array<double, 4> phase{};
        double bound = 0.0;
        for (int j = 0; j < 4; ++j) {
          amp[j] = (2 * U() - 1) / (j + 1);
          const double ang = 2 * std::numbers::pi * U();
          const double w = (j + 1) * std::numbers::pi / s;
          freq[j] = dim == 1 ? Point{ang < std::numbers::pi ? w : -w, 0.0}
                             : Point{w * std::cos(ang), w * std::sin(ang)};
          phase[j] = 2 * std::numbers::pi * U();
          bound += std::abs(amp[j]);
        }
        auto f = [=](const Point& x) {
          double v = 0.0;
          for (int j = 0; j < 4; ++j) {
            v += amp[j] * std::sin(freq[j][0] * (x[0] - c[0]) + freq[j][1] * (x[1] - c[1]) + phase[j]);
          }
          return v;
        };
        if (kind == FamilyKind::trig) {
          out.push_back({"trig_" + std::to_string(k), f});
        } else {
          const double N = 0.5 * bound;
          out.push_back({"trunc_" + std::to_string(k),
                         [=](const Point& x) { return std::clamp(f(x), -N, N); }});
        }
      }
      break;
    case FamilyKind::cutoff:
      for (int k = 0; k < count; ++k) {
        Point z{c[0] + 0.5 * s * (2 * U() - 1), c[1]};
        if (dim == 2) z[1] = c[1] + 0.5 * s * (2 * U() - 1);
        const double r = s * (0.1 + 0.3 * U());
        const double t = r + s * (0.1 + 0.4 * U());
        out.push_back({"cutoff_" + std::to_string(k),
                       [=](const Point& x) { return cutoff_value(z, r, t, x); }});
      }
      break;
  }
  return out;
}

SampledFunction make_cutoff(std::shared_ptr<const Grid> grid, const Point& x, double r, double t) {
  const Domain& d = grid->domain();
  if (!d.inside(x)) throw std::invalid_argument("make_cutoff: x must lie in the domain");
  if (!(r > 0.0 && t > r && t < d.diam())) {
    throw std::invalid_argument("make_cutoff: need 0 < r < t < diam");
  }
  return sample(std::move(grid), [=](const Point& z) { return cutoff_value(x, r, t, z); }, "cutoff");
}

double sphere_measure(int n) {
  if (n == 1) return 2.0;
  if (n == 2) return 2.0 * std::numbers::pi;
  throw std::invalid_argument("sphere_measure: n must be 1 or 2");
}

Domain make_ball(int dim, const Point& center, double radius) {
  if (dim == 1) return make_domain("interval", {{"a", center[0] - radius}, {"b", center[0] + radius}});
  return make_domain("disk", {{"cx", center[0]}, {"cy", center[1]}, {"radius", radius}});
}

// ---------------------------------------------------------------------------
// reports

void InequalityReport::add(CaseRow row) {
  if (!row.skipped && std::isfinite(row.ratio)) max_ratio = std::max(max_ratio, row.ratio);
  cases.push_back(std::move(row));
}

void write_csv(const InequalityReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "case,resolution,lhs,rhs,ratio,skipped\n";
  for (const auto& c : r.cases) {
    out << c.label << ',' << c.resolution << ',' << c.lhs << ',' << c.rhs << ',' << c.ratio << ','
        << (c.skipped ? 1 : 0) << '\n';
  }
}

nlohmann::json to_json(const InequalityReport& r, bool with_runtime) {
  nlohmann::json j = {{"id", r.id},
                      {"params", r.params},
                      {"cases", r.cases.size()},
                      {"max_ratio", json_number(r.max_ratio)},
                      {"constant", json_number(r.constant)},
                      {"tolerance", r.tolerance},
                      {"measured", r.measured}};
  j["pass"] = r.pass ? nlohmann::json(*r.pass) : nlohmann::json(nullptr);
  if (with_runtime) j["runtime_s"] = r.runtime_s;
  return j;
}

// ---------------------------------------------------------------------------
// checks

InequalityReport check_poincare(const YoungFunction& phi, double beta, const Domain& ball, int resolution,
                                const std::vector<TestFunction>& family, const Tolerances& tol) {
  Timer timer;
  InequalityReport rep;
  rep.id = "poincare";
  const int n = ball.dim();
  const double r = 0.5 * ball.diam();
  const double w = sphere_measure(n);
  const double factor = inverse(phi, std::pow(2.0, n + beta) * std::pow(r, beta - n) * w * w);
  rep.params = {{"young", phi.name()}, {"beta", beta}, {"n", n}, {"radius", r}, {"resolution", resolution}};
  rep.constant = 1.0;
  rep.tolerance = tol.poincare;
  const auto grid = make_grid(ball, resolution);
  const PairSum engine(grid, beta);
  std::size_t median_violations = 0;
  for (const auto& tf : family) {
    const auto u = sample(grid, tf.f, tf.label);
    // median: both half-measure conditions in cell counts
    const double m = median(u);
    std::size_t above = 0;
    std::size_t below = 0;
    for (double v : u.values) {
      above += v > m;
      below += v < m;
    }
    if (2 * above > u.size() || 2 * below > u.size()) ++median_violations;
    if (is_constant(u.values)) {
      rep.add({tf.label, resolution, 0.0, 0.0, 0.0, true});
      continue;
    }
    const double mean = average(u);
    CompensatedSum dev;
    for (double v : u.values) dev.add(std::abs(v - mean));
    const double lhs = dev.value() / static_cast<double>(u.size());
    const double rhs = factor * luxemburg_seminorm(engine, u.values, phi);
    rep.add({tf.label, resolution, lhs, rhs, lhs / rhs, false});
  }
  rep.measured = {{"phi_inverse_factor", factor}, {"median_violations", median_violations}};
  rep.pass = rep.max_ratio <= rep.constant * (1.0 + tol.poincare) && median_violations == 0;
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_holder(const YoungFunction& phi, double beta, const Domain& ball, int resolution,
                              const std::vector<TestFunction>& family, const Tolerances& tol) {
  Timer timer;
  const int n = ball.dim();
  if (!(beta > n)) throw std::invalid_argument("check_holder: requires beta > n");
  const auto K = estimate_doubling(phi);
  if (!K.finite) throw std::invalid_argument("check_holder: phi is not doubling");
  InequalityReport rep;
  rep.id = "holder";
  const double w = sphere_measure(n);
  const double chain = 4.0 * std::pow(2.0, beta + 2 * n) * w * w /
                       (1.0 - std::pow(2.0, -(beta - n) / (K.value - 1.0)));
  rep.params = {{"young", phi.name()}, {"beta", beta}, {"n", n}, {"resolution", resolution}};
  rep.constant = chain;
  rep.tolerance = tol.holder;
  const auto grid = make_grid(ball, resolution);
  const Grid& g = *grid;
  const PairSum engine(grid, beta);
  // phi^{-1}(|x-y|^{beta-n}) per offset (|dx|, |dy|)
  std::vector<double> inv(static_cast<std::size_t>(g.nx()) * g.ny(), 0.0);
  for (int dy = 0; dy < g.ny(); ++dy) {
    for (int dx = 0; dx < g.nx(); ++dx) {
      if (dx == 0 && dy == 0) continue;
      const double d = g.h() * std::hypot(dx, dy);
      inv[static_cast<std::size_t>(dy) * g.nx() + dx] = inverse(phi, std::pow(d, beta - n));
    }
  }
  double min_pair_ratio_bound = kInf;
  for (const auto& tf : family) {
    const auto u = sample(grid, tf.f, tf.label);
    if (is_constant(u.values)) {
      rep.add({tf.label, resolution, 0.0, 0.0, 0.0, true});
      continue;
    }
    const double norm = luxemburg_seminorm(engine, u.values, phi);
    double best = 0.0;
    double best_lhs = 0.0;
    double best_rhs = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto [xi, yi] = g.inside_cell(i);
      for (std::size_t j = i + 1; j < u.size(); ++j) {
        const auto [xj, yj] = g.inside_cell(j);
        const double f = inv[static_cast<std::size_t>(std::abs(yj - yi)) * g.nx() +
                             static_cast<std::size_t>(std::abs(xj - xi))];
        const double lhs = std::abs(u.values[i] - u.values[j]);
        const double ratio = lhs / (f * norm);
        if (ratio > best) {
          best = ratio;
          best_lhs = lhs;
          best_rhs = f * norm;
        }
      }
    }
    min_pair_ratio_bound = std::min(min_pair_ratio_bound, inv[1]);
    rep.add({tf.label, resolution, best_lhs, best_rhs, best, false});
  }
  rep.measured = {{"doubling_K", K.value}, {"phi_inverse_at_h", inv[1]}};
  // u = x on (0, 1): numeric norm against the closed form, and the modulus exponent
  if (n == 1) {
    if (const auto p = phi.pure_power(); p && *p > beta) {
      const auto unit = std::make_shared<const Grid>(make_domain("interval", {{"a", 0.0}, {"b", 1.0}}), 2048);
      const auto ux = sample(unit, [](const Point& x) { return x[0]; }, "x");
      const double numeric = luxemburg_seminorm(ux, phi, beta);
      const double closed = std::pow(2.0 / ((*p - beta) * (*p - beta + 1.0)), 1.0 / *p);
      const double exponent = (beta - n) / *p;
      double inverse_err = 0.0;
      for (double d : {1e-3, 1e-2, 0.1, 0.5, 1.0}) {
        const double a = inverse(phi, std::pow(d, beta - n));
        inverse_err = std::max(inverse_err, std::abs(a / std::pow(d, exponent) - 1.0));
      }
      rep.measured["modulus"] = {{"exponent", exponent},
                                 {"norm_numeric", numeric},
                                 {"norm_closed", closed},
                                 {"norm_rel_err", std::abs(numeric / closed - 1.0)},
                                 {"inverse_rel_err", inverse_err}};
    }
  }
  rep.pass = rep.max_ratio <= chain * (1.0 + tol.holder);
  rep.runtime_s = timer.seconds();
  return rep;
}

namespace {

struct GeoTrial {
  std::vector<std::pair<Point, double>> discs;
  Point x;
};

}  // namespace

InequalityReport check_geometric(double beta, const Domain& ball, const std::vector<int>& resolutions,
                                 int trials, std::uint64_t seed, const Tolerances& tol) {
  Timer timer;
  const int n = ball.dim();
  if (!(beta > 0.0 && beta < n)) throw std::invalid_argument("check_geometric: requires 0 < beta < n");
  if (resolutions.empty() || trials <= 0) throw std::invalid_argument("check_geometric: empty trial set");
  InequalityReport rep;
  rep.id = "geometric";
  rep.tolerance = tol.geometric_drift;
  const Point c = ball.bbox().center();
  const double R = 0.5 * ball.diam();
  rep.params = {{"beta", beta}, {"n", n}, {"radius", R}, {"trials", trials}, {"seed", seed},
                {"resolutions", resolutions}};
  std::mt19937_64 rng(seed);
  auto U = [&] { return unit_uniform(rng()); };
  auto point_in_ball = [&](const Point& ctr, double rad) {
    for (;;) {
      Point p{ctr[0] + rad * (2 * U() - 1), n == 1 ? 0.0 : ctr[1] + rad * (2 * U() - 1)};
      if (distance(p, ctr) < rad && ball.inside(p)) return p;
    }
  };
  auto in_set = [](const GeoTrial& t, const Point& p) {
    for (const auto& [q, rad] : t.discs) {
      if (distance(p, q) < rad) return true;
    }
    return false;
  };

  const auto coarse = make_grid(ball, resolutions.front());
  const double half_measure = 0.5 * static_cast<double>(coarse->inside_count());
  std::vector<GeoTrial> set;
  while (static_cast<int>(set.size()) < trials) {
    GeoTrial t;
    const int k = 1 + static_cast<int>(3 * U());
    for (int j = 0; j < k; ++j) {
      const Point q = point_in_ball(c, R);
      t.discs.emplace_back(q, R * (0.05 + 0.4 * U()));
    }
    if (U() < 0.5) {
      const auto& [q, rad] = t.discs[static_cast<std::size_t>(U() * k)];
      t.x = point_in_ball(q, rad);
    } else {
      t.x = point_in_ball(c, R);
    }
    std::size_t count = 0;
    for (std::size_t m = 0; m < coarse->inside_count(); ++m) count += in_set(t, coarse->inside_center(m));
    if (count == 0 || static_cast<double>(count) >= 0.9 * half_measure) continue;
    set.push_back(std::move(t));
  }

  std::vector<double> cemp;
  for (int res : resolutions) {
    const auto grid = make_grid(ball, res);
    const Grid& g = *grid;
    const double hn = g.cell_measure();
    const double half = 0.5 * static_cast<double>(g.inside_count()) * hn;
    std::vector<char> member(g.inside_count());
    double best = kInf;
    for (std::size_t ti = 0; ti < set.size(); ++ti) {
      const GeoTrial& t = set[ti];
      std::size_t count = 0;
      for (std::size_t m = 0; m < g.inside_count(); ++m) {
        member[m] = in_set(t, g.inside_center(m));
        count += member[m];
      }
      const double measure = static_cast<double>(count) * hn;
      const std::string label = "trial_" + std::to_string(ti);
      if (count == 0 || !(measure < half)) {
        rep.add({label, res, 0.0, 0.0, 0.0, true});
        continue;
      }
      const auto own = g.locate(t.x);
      CompensatedSum lhs;
      for (std::size_t m = 0; m < g.inside_count(); ++m) {
        if (member[m]) continue;
        const auto cell = g.inside_cell(m);
        if (cell == own) continue;
        lhs.add(hn * std::pow(distance(g.inside_center(m), t.x), -(n + beta)));
      }
      const double rhs = std::pow(measure, -beta / n);
      const double product = lhs.value() / rhs;
      best = std::min(best, product);
      rep.add({label, res, lhs.value(), rhs, product, false});
    }
    cemp.push_back(best);
  }
  rep.constant = cemp.back();
  rep.measured = {{"c_emp", cemp}};
  bool ok = true;
  for (double v : cemp) ok = ok && v > 0.0 && std::isfinite(v);
  const double d = drift(cemp.front(), cemp.back());
  rep.measured["drift"] = d;
  rep.pass = ok && std::abs(d) <= tol.geometric_drift;
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_embedding(const YoungFunction& phi, double beta, const Domain& ball,
                                 const std::vector<int>& resolutions,
                                 const std::vector<TestFunction>& family, const Tolerances& tol) {
  Timer timer;
  const int n = ball.dim();
  if (!(beta > 0.0 && beta < n)) throw std::invalid_argument("check_embedding: requires 0 < beta < n");
  if (resolutions.empty()) throw std::invalid_argument("check_embedding: no resolutions");
  const auto K = estimate_doubling(phi);
  if (!K.finite) throw std::invalid_argument("check_embedding: phi is not doubling");
  const YoungFunction psi = power_compose(phi, n / (n - beta));
  InequalityReport rep;
  rep.id = "embedding";
  rep.tolerance = tol.embedding_drift;
  rep.params = {{"young", phi.name()}, {"target", psi.name()}, {"beta", beta}, {"n", n},
                {"resolutions", resolutions}};
  std::vector<double> cemb;
  nlohmann::json trunc = nlohmann::json::array();
  for (std::size_t ri = 0; ri < resolutions.size(); ++ri) {
    const int res = resolutions[ri];
    const auto grid = make_grid(ball, res);
    const PairSum engine(grid, beta);
    double best = 0.0;
    for (const auto& tf : family) {
      const auto u = sample(grid, tf.f, tf.label);
      if (is_constant(u.values)) {
        rep.add({tf.label, res, 0.0, 0.0, 0.0, true});
        continue;
      }
      const double lhs = inf_centered_norm(u, psi).norm;
      const double rhs = luxemburg_seminorm(engine, u.values, phi);
      rep.add({tf.label, res, lhs, rhs, lhs / rhs, false});
      best = std::max(best, lhs / rhs);
      if (ri + 1 == resolutions.size() && trunc.empty()) {
        double amax = 0.0;
        for (double v : u.values) amax = std::max(amax, std::abs(v));
        const double full = lhs / rhs;
        for (double frac : {0.25, 0.5, 1.0}) {
          const auto t = truncate(u, frac * amax);
          const double a = inf_centered_norm(t, psi).norm;
          const double b = luxemburg_seminorm(engine, t.values, phi);
          trunc.push_back({{"member", tf.label}, {"fraction", frac}, {"ratio", a / b},
                           {"gap", std::abs(a / b - full)}});
        }
      }
    }
    cemb.push_back(best);
  }
  rep.constant = cemb.back();
  const double d = drift(cemb.front(), cemb.back());
  rep.measured = {{"c_emb", cemb}, {"drift", d}, {"truncation", trunc}};
  rep.pass = std::abs(d) <= tol.embedding_drift;
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_testfn_bound(const YoungFunction& phi, double beta, const Domain& domain,
                                    int resolution, const std::vector<CutoffCase>& cases,
                                    const Tolerances& tol) {
  Timer timer;
  const auto cb = estimate_C_beta(phi, beta);
  if (cb.status != EstimateStatus::finite) {
    throw std::invalid_argument("check_testfn_bound: C_beta is not finite (" + to_string(cb.status) + ")");
  }
  const int n = domain.dim();
  const double w = sphere_measure(n);
  const double m1 = 4.0 * (std::pow(4.0, beta) / beta + 1.0) * (n / beta) * w * (beta + 1.0);
  const double m2 = 2.0 * (n / beta) * (beta + 1.0) * w * cb.value;
  const double M = std::max(m1, m2);
  InequalityReport rep;
  rep.id = "testfn_bound";
  rep.constant = 1.0;
  rep.tolerance = tol.testfn;
  rep.params = {{"young", phi.name()}, {"beta", beta}, {"domain", domain.name()}, {"resolution", resolution}};
  const auto grid = make_grid(domain, resolution);
  const PairSum engine(grid, beta);
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& cc = cases[k];
    const auto u = make_cutoff(grid, cc.x, cc.r, cc.t);
    const double lhs = luxemburg_seminorm(engine, u.values, phi);
    const double measure = ball_measure(*grid, cc.x, cc.t);
    const double rhs = M / inverse(phi, std::pow(cc.t - cc.r, beta) / measure);
    rep.add({"cutoff_" + std::to_string(k), resolution, lhs, rhs, lhs / rhs, false});
  }
  rep.measured = {{"C_beta", cb.value}, {"M", M}, {"M_first", m1}, {"M_second", m2}};
  rep.pass = rep.max_ratio <= 1.0 + tol.testfn;
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_extension(const YoungFunction& phi, double beta, const Domain& domain,
                                 const std::vector<int>& resolutions,
                                 const std::vector<TestFunction>& family, const Tolerances& tol) {
  Timer timer;
  if (resolutions.empty()) throw std::invalid_argument("check_extension: no resolutions");
  InequalityReport rep;
  rep.id = "extension";
  rep.tolerance = tol.extension_drift;
  rep.params = {{"young", phi.name()}, {"beta", beta}, {"domain", domain.name()},
                {"resolutions", resolutions}, {"ahlfors_regular", domain.ahlfors_regular()}};
  std::vector<double> cext;
  nlohmann::json ops = nlohmann::json::array();
  std::map<std::string, std::vector<double>> per_member;
  for (int res : resolutions) {
    const auto grid = make_grid(domain, res);
    const auto ah = ahlfors_theta(*grid, default_ahlfors_samples(*grid), default_ahlfors_radii(*grid));
    const ExtensionOperator op(grid, ah.theta_hat);
    const PairSum inner(grid, beta);
    const PairSum outer(op.box_grid(), beta);
    double best = 0.0;
    for (const auto& tf : family) {
      const auto u = sample(grid, tf.f, tf.label);
      if (is_constant(u.values)) {
        rep.add({tf.label, res, 0.0, 0.0, 0.0, true});
        continue;
      }
      const auto eu = op.extend(u);
      const double lhs = luxemburg_seminorm(outer, eu.values, phi);
      const double rhs = luxemburg_seminorm(inner, u.values, phi);
      rep.add({tf.label, res, lhs, rhs, lhs / rhs, false});
      per_member[tf.label].push_back(lhs / rhs);
      best = std::max(best, lhs / rhs);
    }
    cext.push_back(best);
    const auto v = validate(op.decomposition());
    nlohmann::json j = {{"resolution", res}, {"theta", ah.theta_hat},
                        {"decomposition", to_json(op.decomposition(), v)},
                        {"reflection", to_json(op.reflection())},
                        {"covered_cells", op.covered_cells()},
                        {"uncovered_cells", op.uncovered_cells()}};
    ops.push_back(std::move(j));
  }
  rep.constant = cext.back();
  const double d = drift(cext.front(), cext.back());
  bool increasing = !per_member.empty();
  for (const auto& [label, ratios] : per_member) {
    for (std::size_t k = 1; k < ratios.size(); ++k) increasing = increasing && ratios[k] > ratios[k - 1];
    if (ratios.size() < 2) increasing = false;
  }
  rep.measured = {{"c_ext", cext}, {"drift", d}, {"increasing", increasing}, {"operators", ops}};
  if (domain.ahlfors_regular()) rep.pass = std::abs(d) < tol.extension_drift;
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_nontriviality(const YoungFunction& phi, double beta, const Domain& domain,
                                     const std::vector<int>& resolutions, const Tolerances& tol) {
  Timer timer;
  if (resolutions.size() < 2) throw std::invalid_argument("check_nontriviality: needs two resolutions");
  const auto cb = estimate_C_beta(phi, beta);
  InequalityReport rep;
  rep.id = "nontriviality";
  rep.params = {{"young", phi.name()}, {"beta", beta}, {"domain", domain.name()}, {"resolutions", resolutions},
                {"C_beta_status", to_string(cb.status)}};
  const Box& b = domain.bbox();
  const Point c = b.center();
  const int n = domain.dim();
  const double rho = 0.5 * (n == 1 ? b.extent(0) : std::min(b.extent(0), b.extent(1))) * 0.5;
  if (!domain.inside(c)) throw std::invalid_argument("check_nontriviality: bbox centre is outside the domain");
  std::vector<double> values;
  for (int res : resolutions) {
    const auto grid = make_grid(domain, res);
    const auto k = constant(grid, 1.0);
    rep.add({"constant", res, luxemburg_seminorm(k, phi, beta), 0.0, 0.0, true});
    const auto u = sample(grid, [=](const Point& x) { return smooth_bump(distance(x, c) / rho); }, "bump");
    const double s = luxemburg_seminorm(u, phi, beta);
    values.push_back(s);
    const double prev = values.size() > 1 ? values[values.size() - 2] : s;
    rep.add({"bump", res, s, prev, s / prev, false});
  }
  double min_growth = kInf;
  double max_abs_growth = 0.0;
  std::vector<double> growth;
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double g = values[k] / values[k - 1] - 1.0;
    growth.push_back(g);
    min_growth = std::min(min_growth, g);
    max_abs_growth = std::max(max_abs_growth, std::abs(g));
  }
  rep.measured = {{"seminorm", values}, {"growth", growth}, {"C_beta", json_number(cb.value)}};
  if (cb.status == EstimateStatus::finite) {
    rep.tolerance = tol.stable_growth;
    rep.measured["expect"] = "stable";
    rep.pass = max_abs_growth < tol.stable_growth;
  } else if (cb.status == EstimateStatus::divergent) {
    rep.tolerance = tol.divergent_growth;
    rep.measured["expect"] = "divergent";
    rep.pass = min_growth > tol.divergent_growth;
  }
  rep.constant = values.back();
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_c_beta(const YoungFunction& phi, double beta) {
  Timer timer;
  InequalityReport rep;
  rep.id = "c_beta";
  const auto cb = estimate_C_beta(phi, beta);
  rep.params = {{"young", phi.name()}, {"beta", beta}};
  rep.add({"sup", 0, cb.value, cb.argmax_t, cb.value, false});
  rep.constant = cb.value;
  rep.measured = {{"status", to_string(cb.status)}, {"value", json_number(cb.value)},
                  {"scan", {cb.scan.t_min, cb.scan.t_max, cb.scan.points}}};
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_doubling(const YoungFunction& phi) {
  Timer timer;
  InequalityReport rep;
  rep.id = "doubling";
  const auto k = estimate_doubling(phi);
  rep.params = {{"young", phi.name()}};
  rep.add({"sup", 0, k.value, k.argmax_t, k.value, false});
  rep.constant = k.value;
  rep.measured = {{"finite", k.finite}, {"value", json_number(k.value)},
                  {"scan", {k.scan.t_min, k.scan.t_max, k.scan.points}}};
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_inverse_laws(const YoungFunction& phi, std::uint64_t seed, int samples,
                                    const Tolerances& tol) {
  Timer timer;
  const auto K = estimate_doubling(phi);
  if (!K.finite) throw std::invalid_argument("check_inverse_laws: phi is not doubling");
  InequalityReport rep;
  rep.id = "inverse_laws";
  rep.constant = 1.0;
  rep.tolerance = tol.inverse_slack;
  rep.params = {{"young", phi.name()}, {"seed", seed}, {"samples", samples}};
  std::mt19937_64 rng(seed);
  auto U = [&] { return unit_uniform(rng()); };
  const double k1 = K.value - 1.0;
  for (int s = 0; s < samples; ++s) {
    const double x = std::pow(10.0, -6.0 + 12.0 * U());
    const double t = 1.0 - U();
    const std::string tag = std::to_string(s);
    const double ix = inverse(phi, x);
    const double a = inverse(phi, 2 * x);
    rep.add({"double_" + tag, 0, a, 2 * ix, a / (2 * ix), false});
    const double b = inverse(phi, t * x);
    const double rb = std::pow(t, 1.0 / k1) * ix;
    rep.add({"scale_" + tag, 0, b, rb, b / rb, false});
    const double c = std::pow(t, k1) * phi(x);
    const double rc = phi(t * x);
    rep.add({"power_" + tag, 0, c, rc, c / rc, false});
  }
  rep.measured = {{"doubling_K", K.value}};
  rep.pass = rep.max_ratio <= 1.0 + tol.inverse_slack;
  rep.runtime_s = timer.seconds();
  return rep;
}

InequalityReport check_ahlfors(const Domain& domain, int resolution) {
  Timer timer;
  InequalityReport rep;
  rep.id = "ahlfors";
  rep.params = {{"domain", domain.name()}, {"resolution", resolution}};
  const auto grid = make_grid(domain, resolution);
  const auto a = ahlfors_theta(*grid, default_ahlfors_samples(*grid), default_ahlfors_radii(*grid));
  for (const auto& row : a.rows) {
    rep.add({"r=" + std::to_string(row.r), resolution, row.min_ratio, row.r, row.min_ratio, false});
  }
  rep.constant = a.theta_hat;
  rep.measured = to_json(a);
  rep.runtime_s = timer.seconds();
  return rep;
}

}  // namespace fosl
