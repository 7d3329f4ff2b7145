#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>

#include "fosl/harness.hpp"

using namespace fosl;
using std::numbers::pi;

namespace {

const YoungFunction t2 = make_young("power", {{"p", 2}});

std::vector<TestFunction> single(std::string label, std::function<double(const Point&)> f) {
  return {{std::move(label), std::move(f)}};
}

}  // namespace

TEST_CASE("cutoff profile") {
  const Point x{0.1, -0.2};
  CHECK(cutoff_value(x, 0.2, 0.6, {0.15, -0.2}) == 1.0);
  CHECK(cutoff_value(x, 0.2, 0.6, {0.1 + 0.4, -0.2}) == doctest::Approx(0.5));
  CHECK(cutoff_value(x, 0.2, 0.6, {0.9, 0.5}) == 0.0);
  const auto g = std::make_shared<const Grid>(make_domain("disk", {}), 40);
  const auto u = make_cutoff(g, x, 0.2, 0.6);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(u.values[i] >= 0.0);
    CHECK(u.values[i] <= 1.0);
  }
  // Lipschitz 1/(t-r) in |x - z|
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double dz = distance(g->inside_center(i), g->inside_center(i + 1));
    CHECK(std::abs(u.values[i] - u.values[i + 1]) <= dz / 0.4 + 1e-12);
  }
  CHECK_THROWS_AS(make_cutoff(g, x, 0.6, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(make_cutoff(g, {3, 0}, 0.1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(make_cutoff(g, x, 0.1, 5.0), std::invalid_argument);
}

TEST_CASE("families") {
  const Box frame{{-1, -1}, {1, 1}};
  CHECK(make_family(FamilyKind::polynomial, 0, 1, frame, 2).size() == 9);
  CHECK(make_family(FamilyKind::polynomial, 0, 1, frame, 1).size() == 3);
  const auto a = make_family(FamilyKind::trig, 5, 7, frame, 2);
  const auto b = make_family(FamilyKind::trig, 5, 7, frame, 2);
  const auto c = make_family(FamilyKind::trig, 5, 8, frame, 2);
  REQUIRE(a.size() == 5);
  const Point z{0.3, -0.4};
  for (int i = 0; i < 5; ++i) CHECK(a[i].f(z) == b[i].f(z));
  CHECK(a[0].f(z) != c[0].f(z));
  for (const auto& k : family_kind_names()) {
    const auto fam = make_family(family_kind_from_string(k), 4, 3, frame, 2);
    for (const auto& m : fam) {
      double lo = 1e300, hi = -1e300;
      for (int i = 0; i < 21; ++i) {
        for (int j = 0; j < 21; ++j) {
          const double v = m.f({-1 + 0.1 * i, -1 + 0.1 * j});
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      INFO(m.label);
      CHECK(hi > lo);
    }
  }
  CHECK_THROWS(family_kind_from_string("wavelet"));
  CHECK(sphere_measure(1) == 2.0);
  CHECK(sphere_measure(2) == doctest::Approx(2 * pi));
}

TEST_CASE("poincare: u = x1 on the unit disk") {
  const auto ball = make_ball(2, {0, 0}, 1.0);
  const auto rep = check_poincare(t2, 1.0, ball, 128, single("x", [](const Point& x) { return x[0]; }));
  REQUIRE(rep.cases.size() == 1);
  CHECK(std::abs(rep.cases[0].lhs / (4 / (3 * pi)) - 1) < 0.02);
  CHECK(rep.cases[0].ratio < 1.0);
  REQUIRE(rep.pass);
  CHECK(*rep.pass);
}

TEST_CASE("poincare: constants and the seeded trig family") {
  const auto ball = make_ball(2, {0, 0}, 1.0);
  const auto k = check_poincare(t2, 1.0, ball, 32, single("one", [](const Point&) { return 1.0; }));
  CHECK(k.cases[0].lhs == 0.0);
  const auto rep = check_poincare(t2, 1.0, ball, 40, make_family(FamilyKind::trig, 20, 7, ball.bbox(), 2));
  CHECK(rep.cases.size() == 20);
  CHECK(rep.max_ratio <= 1.02);
  CHECK(*rep.pass);
  CHECK(rep.measured["median_violations"].get<int>() == 0);
}

TEST_CASE("poincare in one dimension across beta") {
  const auto ball = make_ball(1, {0.5, 0}, 0.5);
  const auto fam = make_family(FamilyKind::trig, 6, 3, ball.bbox(), 1);
  for (double beta : {0.5, 1.0}) {
    for (const auto& phi : {t2, make_young("power_log", {{"p", 2}, {"alpha", 1}})}) {
      const auto rep = check_poincare(phi, beta, ball, 256, fam);
      INFO(phi.name() << " beta " << beta);
      CHECK(*rep.pass);
    }
  }
}

TEST_CASE("holder") {
  const auto ball = make_ball(1, {0.5, 0}, 0.5);
  const auto k = check_holder(t2, 1.5, ball, 128, single("one", [](const Point&) { return 1.0; }));
  CHECK(k.max_ratio == 0.0);
  const auto rep = check_holder(t2, 1.5, ball, 256, single("x", [](const Point& x) { return x[0]; }));
  CHECK(std::isfinite(rep.max_ratio));
  CHECK(rep.max_ratio > 0);
  CHECK(*rep.pass);
  CHECK(rep.measured["phi_inverse_at_h"].get<double>() > 0);
  CHECK(rep.measured["modulus"]["exponent"].get<double>() == doctest::Approx(0.25));
  CHECK(rep.measured["modulus"]["norm_rel_err"].get<double>() < 0.05);
  CHECK_THROWS_AS(check_holder(t2, 1.0, ball, 64, {}), std::invalid_argument);
  CHECK_THROWS_AS(check_holder(make_young("power_exp", {{"p", 2}}), 1.5, ball, 64, {}), std::invalid_argument);
}

TEST_CASE("geometric") {
  const auto ball = make_ball(2, {0, 0}, 1.0);
  const auto rep = check_geometric(1.0, ball, {24, 48}, 60, 11);
  CHECK(rep.cases.size() == 120);
  CHECK(rep.constant > 0.0);
  REQUIRE(rep.pass);
  const auto again = check_geometric(1.0, ball, {24, 48}, 60, 11);
  CHECK(again.constant == rep.constant);
}

TEST_CASE("embedding") {
  const auto ball = make_ball(2, {0, 0}, 1.0);
  const auto rep = check_embedding(t2, 1.0, ball, {32, 48},
                                   {{"one", [](const Point&) { return 1.0; }},
                                    {"x", [](const Point& x) { return x[0]; }}});
  CHECK(rep.cases[0].skipped);
  CHECK_FALSE(rep.cases[1].skipped);
  CHECK(std::isfinite(rep.cases[1].ratio));
  CHECK(rep.cases[1].ratio > 0);
  // ratio of the truncations approaches the full ratio
  const auto& tr = rep.measured["truncation"];
  REQUIRE(tr.size() == 3);
  CHECK(tr[2]["gap"].get<double>() == 0.0);
  CHECK(tr[1]["gap"].get<double>() <= tr[0]["gap"].get<double>());
}

TEST_CASE("test-function bound") {
  const auto disk = make_domain("disk", {});
  const auto rep = check_testfn_bound(t2, 1.0, disk, 64, {{{0, 0}, 0.25, 0.5}, {{0, 0}, 0.45, 0.5}});
  CHECK(*rep.pass);
  // r close to t inflates the right side
  CHECK(rep.cases[1].rhs > rep.cases[0].rhs);
  CHECK_THROWS(check_testfn_bound(make_young("power", {{"p", 1}}), 1.5, disk, 32, {{{0, 0}, 0.25, 0.5}}));

  const auto cusp = make_domain("cusp", {{"s", 2}});
  const auto c = check_testfn_bound(t2, 1.0, cusp, 96, {{{0.2, 0}, 0.1, 0.2}});
  CHECK(*c.pass);
}

TEST_CASE("nontriviality") {
  const auto stable = check_nontriviality(t2, 1.0, make_domain("interval", {}), {128, 256});
  CHECK(stable.measured["expect"] == "stable");
  CHECK(*stable.pass);
  for (const auto& row : stable.cases) {
    if (row.label == "constant") CHECK(row.lhs == 0.0);
  }
  const auto div = check_nontriviality(make_young("power", {{"p", 1}}), 1.5, make_domain("disk", {}), {24, 48});
  CHECK(div.measured["expect"] == "divergent");
  CHECK(*div.pass);
  CHECK_THROWS(check_nontriviality(t2, 1.0, make_domain("interval", {}), {64}));
}

TEST_CASE("report-only checks") {
  const auto cb = check_c_beta(t2, 1.0);
  CHECK_FALSE(cb.pass.has_value());
  CHECK(cb.constant == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_FALSE(check_doubling(t2).pass.has_value());
  const auto ah = check_ahlfors(make_domain("square", {}), 48);
  CHECK_FALSE(ah.pass.has_value());
  CHECK(ah.constant > 0);
}

TEST_CASE("inverse laws") {
  for (const auto& phi : {t2, make_young("power_log", {{"p", 1}, {"alpha", 1}}),
                          make_young("power_max", {{"p", 1}, {"delta", 1}})}) {
    const auto rep = check_inverse_laws(phi, 3, 200);
    INFO(phi.name());
    CHECK(*rep.pass);
    CHECK(rep.cases.size() == 600);
  }
  CHECK_THROWS(check_inverse_laws(make_young("power_exp", {{"p", 2}}), 3, 10));
}

TEST_CASE("report serialization") {
  InequalityReport r;
  r.id = "demo";
  r.add({"a", 10, 1.0, 2.0, 0.5, false});
  r.add({"b", 10, 0.0, 0.0, 0.0, true});
  r.add({"c", 20, 3.0, 2.0, 1.5, false});
  CHECK(r.max_ratio == 1.5);
  r.pass = false;
  r.runtime_s = 1.25;
  const auto path = (std::filesystem::temp_directory_path() / "fosl_report.csv").string();
  write_csv(r, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "case,resolution,lhs,rhs,ratio,skipped");
  CHECK(row.rfind("a,10,", 0) == 0);
  std::filesystem::remove(path);
  const auto j = to_json(r);
  CHECK(j["pass"] == false);
  CHECK(j["runtime_s"].get<double>() == 1.25);
  CHECK_FALSE(to_json(r, false).contains("runtime_s"));
  r.pass.reset();
  CHECK(to_json(r)["pass"].is_null());
}
