// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fosl/cli.hpp"
#include "fosl/harness.hpp"
#include "fosl/whitney.hpp"

using namespace fosl;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Line {
  std::ostringstream detail;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

void criterion(int id, const std::function<void(Line&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Line line;
  try {
    body(line);
  } catch (const std::exception& e) {
    line.ok = false;
    line.detail << " [exception: " << e.what() << "]";
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!line.ok) ++failures;
  std::printf("criterion %2d %s:%s (%.1f s)\n", id, line.ok ? "PASS" : "FAIL", line.detail.str().c_str(), s);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double theta_of(const Grid& g) {
  return ahlfors_theta(g, default_ahlfors_samples(g), default_ahlfors_radii(g)).theta_hat;
}

std::shared_ptr<const Grid> grid_of(const Domain& d, int res) { return std::make_shared<const Grid>(d, res); }

// Gagliardo p-sums of many functions at once, by a plain double loop over pairs.
std::vector<double> direct_gagliardo(const Grid& g, const std::vector<std::vector<double>>& us, double p,
                                     double beta) {
  const int n = g.dim();
  const double h2n = std::pow(g.h(), 2 * n);
  std::vector<long double> acc(us.size(), 0.0L);
  const std::size_t m = g.inside_count();
  for (std::size_t i = 0; i < m; ++i) {
    const Point xi = g.inside_center(i);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double w = 2.0 * h2n / std::pow(distance(xi, g.inside_center(j)), n + beta);
      for (std::size_t f = 0; f < us.size(); ++f) acc[f] += w * std::pow(std::abs(us[f][i] - us[f][j]), p);
    }
  }
  std::vector<double> out;
  for (long double a : acc) out.push_back(std::pow(static_cast<double>(a), 1.0 / p));
  return out;
}

void power_oracle(Line& line) {
  const struct {
    int n;
    double p, beta;
  } cases[] = {{1, 2, 1}, {2, 2, 1}, {2, 3, 2}};
  double worst = 0.0;
  double norm_time = 0.0;
  for (const auto& c : cases) {
    const Domain d = c.n == 1 ? make_domain("interval", {}) : make_domain("square", {});
    const auto g = grid_of(d, c.n == 1 ? 64 * 64 : 64);
    const auto fam = make_family(FamilyKind::trig, 20, 1, d.bbox(), c.n);
    std::vector<std::vector<double>> us;
    for (const auto& tf : fam) us.push_back(sample(g, tf.f, tf.label).values);
    const auto oracle = direct_gagliardo(*g, us, c.p, c.beta);
    const auto phi = make_young("power", {{"p", c.p}});
    const auto t0 = std::chrono::steady_clock::now();
    const PairSum engine(g, c.beta);
    std::vector<double> got;
    for (const auto& u : us) got.push_back(luxemburg_seminorm(engine, u, phi));
    norm_time += seconds_since(t0);
    for (std::size_t f = 0; f < us.size(); ++f) worst = std::max(worst, std::abs(got[f] / oracle[f] - 1.0));
  }
  line.detail << " max rel err " << worst << " over 60 functions, seminorm time " << norm_time << " s";
  line.require(worst <= 1e-6, "rel err <= 1e-6");
  line.require(norm_time < 60.0, "runtime < 60 s");
}

void c_beta(Line& line) {
  const auto t0 = std::chrono::steady_clock::now();
  const struct {
    double p, beta;
  } finite[] = {{2, 1}, {3, 1}, {3, 2.5}};
  for (const auto& c : finite) {
    const auto e = estimate_C_beta(make_young("power", {{"p", c.p}}), c.beta);
    const double err = std::abs(e.value * (c.p - c.beta) - 1.0);
    line.detail << " (" << c.p << "," << c.beta << ")=" << e.value;
    line.require(e.status == EstimateStatus::finite && err <= 1e-3, "closed form 1/(p-beta)");
  }
  for (const auto& c : {std::pair{1.0, 2.0}, std::pair{2.0, 2.0}, std::pair{1.0, 1.5}}) {
    const auto e = estimate_C_beta(make_young("power", {{"p", c.first}}), c.second);
    line.detail << " (" << c.first << "," << c.second << ")=" << to_string(e.status);
    line.require(e.status == EstimateStatus::divergent, "divergence flag for p <= beta");
  }
  line.require(seconds_since(t0) < 5.0, "runtime < 5 s");
}

void doubling(Line& line) {
  for (double p : {1.0, 2.0, 3.0}) {
    const auto d = estimate_doubling(make_young("power", {{"p", p}}));
    line.detail << " K(t^" << p << ")=" << d.value;
    line.require(d.finite && std::abs(d.value - std::pow(2.0, p)) <= 1e-6, "K = 2^p");
  }
  const auto e = estimate_doubling(make_young("power_exp", {{"p", 2}, {"c", 1}, {"alpha", 1}}));
  line.detail << " power_exp " << (e.finite ? "finite" : "non-doubling");
  line.require(!e.finite, "power_exp flagged");
}

void inverse_laws(Line& line) {
  const std::vector<YoungFunction> doubling = {
      make_young("power", {{"p", 1}}), make_young("power", {{"p", 2}}), make_young("power", {{"p", 3}}),
      make_young("power_log", {{"p", 1}, {"alpha", 1}}), make_young("power_log", {{"p", 2}, {"alpha", 2}}),
      make_young("power_max", {{"p", 1}, {"delta", 1}}), make_young("power_max", {{"p", 2}, {"delta", 0.5}})};
  std::size_t rows = 0;
  for (const auto& phi : doubling) {
    const auto rep = check_inverse_laws(phi, 17, 1000);
    rows += rep.cases.size();
    line.require(rep.pass.value_or(false), phi.name());
  }
  line.detail << " " << doubling.size() << " doubling built-ins, " << rows << " law evaluations";
  for (const auto& nd : {make_young("power_exp", {{"p", 2}}), make_young("exp_minus_taylor", {})}) {
    line.require(!estimate_doubling(nd).finite, nd.name() + " excluded as non-doubling");
  }
}

void whitney(Line& line) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* name : {"disk", "square"}) {
    for (int res : {48, 96}) {
      const auto g = grid_of(make_domain(name, {}), res);
      const auto d = whitney_decompose(*g);
      const auto v = validate(d);
      line.detail << " " << name << "@" << res << ": " << d.cubes.size() << " cubes, dist ratio ["
                  << v.min_dist_ratio << "," << v.max_dist_ratio << "], gamma0 " << d.gamma0 << ";";
      line.require(v.distance_violations == 0 && v.min_dist_ratio >= 1.0 && v.max_dist_ratio <= 4.0,
                   "distance bound");
      line.require(v.ratio_violations == 0, "neighbor ratio");
      line.require(v.overlapping_pairs == 0, "disjointness");
      line.require(d.gamma0 <= 144, "gamma0 <= 144");
    }
  }
  line.require(seconds_since(t0) < 120.0, "runtime < 120 s");
}

void partition(Line& line) {
  std::vector<double> Ls;
  for (const char* name : {"disk", "square"}) {
    for (int res : {48, 96}) {
      const auto g = grid_of(make_domain(name, {}), res);
      const auto d = whitney_decompose(*g);
      const PartitionOfUnity pou(d);
      const double L = pou.measure_L();
      Ls.push_back(L);
      std::mt19937_64 rng(res);
      std::uniform_real_distribution<double> ux(d.box.lo[0], d.box.hi[0]);
      std::uniform_real_distribution<double> uy(d.box.lo[1], d.box.hi[1]);
      double worst = 0.0;
      std::size_t grad_bad = 0;
      for (int k = 0; k < 10000;) {
        const Point x{ux(rng), uy(rng)};
        if (pou.bump_sum(x) <= 0.0) continue;
        ++k;
        double s = 0.0;
        for (const auto& [q, w] : pou.weights(x)) {
          s += w;
          const double l = d.cubes[static_cast<std::size_t>(q)].side;
          const double e = 1e-7 * l;
          const double gx = (pou.phi(q, {x[0] + e, x[1]}) - pou.phi(q, {x[0] - e, x[1]})) / (2 * e);
          const double gy = (pou.phi(q, {x[0], x[1] + e}) - pou.phi(q, {x[0], x[1] - e})) / (2 * e);
          if (std::hypot(gx, gy) > L / l * (1 + 1e-3)) ++grad_bad;
        }
        worst = std::max(worst, std::abs(s - 1.0));
      }
      line.detail << " " << name << "@" << res << ": |sum-1| " << worst << ", L " << L << ";";
      line.require(worst <= 1e-10, "sum = 1");
      line.require(grad_bad == 0, "gradient bound");
    }
  }
  for (double L : Ls) line.require(std::abs(L / Ls[0] - 1.0) <= 0.10, "L stable within 10%");
}

void extension(Line& line) {
  const auto t2 = make_young("power", {{"p", 2}});
  {
    const auto g = grid_of(make_domain("disk", {}), 48);
    const ExtensionOperator op(g, theta_of(*g));
    const auto& bg = *op.box_grid();
    const auto u = sample(g, [](const Point& x) { return std::cos(2 * x[0]) * x[1]; });
    const auto v = sample(g, [](const Point& x) { return x[0] * x[0] - x[1]; });
    const auto eu = op.extend(u);
    const auto ev = op.extend(v);
    const auto ek = op.extend(constant(g, -3.0));
    const auto el = op.extend(combine(2.0, u, -0.5, v));
    std::size_t identity_bad = 0;
    double const_err = 0.0;
    double lin_err = 0.0;
    for (std::size_t k = 0; k < bg.inside_count(); ++k) {
      const Point x = bg.inside_center(k);
      lin_err = std::max(lin_err, std::abs(el.values[k] - (2.0 * eu.values[k] - 0.5 * ev.values[k])));
      if (g->domain().inside(x)) {
        const auto [ix, iy] = g->locate(x);
        if (eu.values[k] != u.values[static_cast<std::size_t>(g->inside_ordinal(ix, iy))]) ++identity_bad;
      }
      if (ek.values[k] != 0.0) const_err = std::max(const_err, std::abs(ek.values[k] + 3.0));
    }
    line.detail << " identity mismatches " << identity_bad << ", constant err " << const_err << ", linearity err "
                << lin_err << ";";
    line.require(identity_bad == 0, "identity on the domain");
    line.require(const_err <= 1e-12, "constants preserved");
    line.require(lin_err <= 1e-12, "linearity");
  }
  {
    const auto disk = make_domain("disk", {});
    const auto rep =
        check_extension(t2, 1.0, disk, {48, 96}, make_family(FamilyKind::polynomial, 0, 1, disk.bbox(), 2));
    const auto c = rep.measured["c_ext"];
    line.detail << " disk C_ext " << c[0].get<double>() << " -> " << c[1].get<double>() << " (drift "
                << rep.measured["drift"].get<double>() << ");";
    line.require(rep.pass.value_or(false), "disk drift < 50%");
  }
  {
    // cutoffs at the tip, scaled with the grid: x = (a, 0), r = a/2, t = a, a = sqrt(c h)
    const auto cusp = make_domain("cusp", {{"s", 2}});
    std::vector<std::vector<double>> ratios(3);
    for (int res : {48, 96}) {
      const auto g = grid_of(cusp, res);
      const ExtensionOperator op(g, theta_of(*g));
      const PairSum inner(g, 1.0);
      const PairSum outer(op.box_grid(), 1.0);
      int k = 0;
      for (double c : {2.0, 3.0, 4.0}) {
        const double a = std::sqrt(c * g->h());
        const auto u = make_cutoff(g, {a, 0.0}, a / 2, a);
        const double r = luxemburg_seminorm(outer, op.extend(u).values, t2) / luxemburg_seminorm(inner, u.values, t2);
        ratios[static_cast<std::size_t>(k++)].push_back(r);
      }
    }
    line.detail << " cusp tip ratios";
    for (const auto& r : ratios) {
      line.detail << " " << r[0] << "->" << r[1];
      line.require(r[1] > r[0], "cusp ratio increases");
    }
  }
}

std::vector<TestFunction> all_families(const Domain& ball) {
  std::vector<TestFunction> fam;
  for (const auto& k : family_kind_names()) {
    const FamilyKind kind = family_kind_from_string(k);
    const int count = kind == FamilyKind::polynomial ? 0 : (kind == FamilyKind::trig ? 20 : 8);
    const auto part = make_family(kind, count, 7, ball.bbox(), ball.dim());
    fam.insert(fam.end(), part.begin(), part.end());
  }
  return fam;
}

void poincare(Line& line) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ball = make_ball(2, {0, 0}, 1.0);
  const auto fam = all_families(ball);
  for (const auto& phi : {make_young("power", {{"p", 2}}), make_young("power_log", {{"p", 2}, {"alpha", 1}})}) {
    const auto rep = check_poincare(phi, 1.0, ball, 48, fam);
    line.detail << " " << phi.name() << ": " << rep.cases.size() << " members, max ratio " << rep.max_ratio << ";";
    line.require(rep.pass.value_or(false), phi.name());
  }
  line.require(seconds_since(t0) < 120.0, "runtime < 120 s");
}

void holder(Line& line) {
  const auto ball = make_ball(1, {0.5, 0.0}, 0.5);
  const auto rep = check_holder(make_young("power", {{"p", 2}}), 1.5, ball, 512,
                                make_family(FamilyKind::trig, 20, 9, ball.bbox(), 1));
  const auto& m = rep.measured["modulus"];
  line.detail << " max ratio " << rep.max_ratio << " <= C_chain " << rep.constant << "; u = x norm "
              << m["norm_numeric"].get<double>() << " vs closed form " << m["norm_closed"].get<double>()
              << ", modulus exponent " << m["exponent"].get<double>() << " with inverse rel err "
              << m["inverse_rel_err"].get<double>();
  line.require(rep.pass.value_or(false), "max ratio <= C_chain");
  line.require(std::abs(m["exponent"].get<double>() - 0.25) < 1e-12, "exponent 1/4");
  line.require(m["norm_rel_err"].get<double>() <= 0.05, "u = x norm within 5%");
  line.require(m["inverse_rel_err"].get<double>() <= 0.05, "modulus within 5%");
}

void geometric(Line& line) {
  const auto ball = make_ball(2, {0, 0}, 1.0);
  const auto g = check_geometric(1.0, ball, {48, 96}, 500, 11);
  const auto& c = g.measured["c_emp"];
  line.detail << " C_emp " << c[0].get<double>() << " -> " << c[1].get<double>();
  line.require(g.constant > 0.0, "C_emp > 0");
  line.require(g.pass.value_or(false), "C_emp stable within 30%");
  const auto e = check_embedding(make_young("power", {{"p", 2}}), 1.0, ball, {48, 96},
                                 make_family(FamilyKind::polynomial, 0, 1, ball.bbox(), 2));
  const auto& ce = e.measured["c_emb"];
  line.detail << "; C_emb " << ce[0].get<double>() << " -> " << ce[1].get<double>();
  line.require(e.pass.value_or(false), "C_emb stable within 30%");
}

void nontriviality(Line& line) {
  const auto t2 = make_young("power", {{"p", 2}});
  const auto s1 = check_nontriviality(t2, 1.0, make_domain("interval", {}), {128, 256});
  const auto s2 = check_nontriviality(t2, 1.0, make_domain("disk", {}), {48, 96});
  const auto dv = check_nontriviality(make_young("power", {{"p", 1}}), 1.5, make_domain("disk", {}), {48, 96});
  line.detail << " (2,1) growth n=1 " << s1.measured["growth"][0].get<double>() << ", n=2 "
              << s2.measured["growth"][0].get<double>() << "; (1,1.5) n=2 growth "
              << dv.measured["growth"][0].get<double>();
  line.require(s1.pass.value_or(false) && s2.pass.value_or(false), "stable for p > beta");
  line.require(dv.pass.value_or(false), "divergent for p <= beta");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Line& line) {
  const auto root = fs::temp_directory_path() / "fosl_acceptance_determinism";
  fs::remove_all(root);
  ExperimentConfig c;
  c.domain_shape = "disk";
  c.young_family = "power";
  c.young_params = {{"p", 2}};
  c.beta = 1.0;
  c.seed = 42;
  c.resolutions = {24, 32};
  c.trials = 100;
  c.samples = 200;
  c.family_kind = "trig";
  c.family_count = 6;
  c.checks = {"c_beta",    "doubling",  "inverse_laws", "ahlfors",      "poincare",
              "geometric", "embedding", "testfn_bound", "extension", "nontriviality"};
  std::vector<std::string> runs;
  for (unsigned threads : {1u, 4u, 2u, 4u}) {
    c.threads = threads;
    c.output = (root / ("run" + std::to_string(runs.size()))).string();
    std::ostringstream log, err;
    const int code = run_experiment(c, log, err);
    line.require(code == exit_ok, "run exit code 0: " + err.str());
    std::string all;
    for (const auto& id : c.checks) all += slurp(fs::path(c.output) / (id + ".csv"));
    runs.push_back(all);
  }
  bool same = true;
  for (const auto& r : runs) same = same && r == runs[0];
  line.detail << " " << c.checks.size() << " checks, threads 1/4/2/4, " << runs[0].size() << " CSV bytes per run, "
              << (same ? "identical" : "DIFFERENT");
  line.require(same, "byte-identical CSVs");
  fs::remove_all(root);
}

}  // namespace

int main() {
  criterion(1, power_oracle);
  criterion(2, c_beta);
  criterion(3, doubling);
  criterion(4, inverse_laws);
  criterion(5, whitney);
  criterion(6, partition);
  criterion(7, extension);
  criterion(8, poincare);
  criterion(9, holder);
  criterion(10, geometric);
  criterion(11, nontriviality);
  criterion(12, determinism);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
