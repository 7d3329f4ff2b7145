#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "fosl/geometry.hpp"

using namespace fosl;
using std::numbers::pi;

TEST_CASE("catalog examples") {
  CHECK(make_domain("disk", {{"radius", 1}}).sdist({2, 0}) == doctest::Approx(1.0));
  CHECK(make_domain("square", {{"side", 1}}).inside({0.5, 0.5}));
  const auto cusp = make_domain("cusp", {{"s", 2}});
  CHECK(cusp.inside({0.1, 0.005}));
  CHECK_FALSE(cusp.inside({0.1, 0.02}));
  CHECK(domain_names().size() == 6);
  CHECK(make_domain("interval", {}).dim() == 1);
  CHECK_FALSE(cusp.ahlfors_regular());
  CHECK(make_domain("annulus", {}).ahlfors_regular());
}

TEST_CASE("catalog errors") {
  CHECK_THROWS_AS(make_domain("torus", {}), std::invalid_argument);
  CHECK_THROWS_AS(make_domain("cusp", {{"s", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_domain("disk", {{"radius", -1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_domain("disk", {{"r", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_domain("annulus", {{"r_in", 2}, {"r_out", 1}}), std::invalid_argument);
}

TEST_CASE("sdist and inside agree, bounded inside points lie in the bbox") {
  std::mt19937_64 rng(2);
  for (const auto& name : domain_names()) {
    const auto d = make_domain(name, {});
    const Box b = d.bbox();
    std::uniform_real_distribution<double> ux(b.lo[0] - 0.5, b.hi[0] + 0.5);
    std::uniform_real_distribution<double> uy(b.lo[1] - 0.5, b.hi[1] + 0.5);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
      const Point x{ux(rng), d.dim() == 1 ? 0.0 : uy(rng)};
      const double s = d.sdist(x);
      if (std::abs(s) <= 1e-6) continue;
      if (d.inside(x) != (s < 0)) ++bad;
      if (std::isfinite(d.diam()) && d.inside(x) && (x[0] < b.lo[0] || x[0] > b.hi[0] || x[1] < b.lo[1] || x[1] > b.hi[1])) ++bad;
    }
    INFO(name);
    CHECK(bad == 0);
  }
}

TEST_CASE("annulus sdist is analytic") {
  const auto a = make_domain("annulus", {{"r_in", 0.5}, {"r_out", 1}});
  CHECK(a.sdist({0.75, 0}) == doctest::Approx(-0.25));
  CHECK(a.sdist({0, 0.2}) == doctest::Approx(0.3));
  CHECK(a.sdist({0, 1.5}) == doctest::Approx(0.5));
}

TEST_CASE("cusp sdist against a dense boundary scan") {
  const auto cusp = make_domain("cusp", {{"s", 2}});
  auto brute = [](const Point& x) {
    double best = 1e300;
    const int m = 400000;
    for (int i = 0; i <= m; ++i) {
      const double u = static_cast<double>(i) / m;
      best = std::min(best, std::hypot(x[0] - u, x[1] - u * u));
      best = std::min(best, std::hypot(x[0] - u, x[1] + u * u));
    }
    for (int i = 0; i <= m; ++i) {
      const double v = -1.0 + 2.0 * i / m;
      best = std::min(best, std::hypot(x[0] - 1.0, x[1] - v));
    }
    return best;
  };
  for (const Point x : {Point{0.5, 0.1}, Point{0.5, 0.3}, Point{0.2, 0.0}, Point{-0.3, 0.2}, Point{0.9, -0.5},
                        Point{1.4, 0.2}, Point{0.7, 0.48}}) {
    INFO(x[0] << "," << x[1]);
    CHECK(std::abs(std::abs(cusp.sdist(x)) - brute(x)) < 1e-7);
  }
}

TEST_CASE("project_to_boundary lands on the boundary") {
  const auto disk = make_domain("disk", {});
  const Point p = disk.project_to_boundary({2.0, 2.0});
  CHECK(std::abs(disk.sdist(p)) < 1e-12);
  CHECK(p[0] == doctest::Approx(std::sqrt(0.5)));
  const auto cusp = make_domain("cusp", {{"s", 2}});
  CHECK(std::abs(cusp.sdist(cusp.project_to_boundary({0.5, 0.5}))) < 1e-8);
}

TEST_CASE("grid mask follows cell centres") {
  const auto d = make_domain("annulus", {});
  const Grid g(d, 40);
  std::size_t inside = 0;
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      const bool in = g.state(ix, iy) == CellState::inside;
      CHECK(in == d.inside(g.center(ix, iy)));
      if (in) {
        CHECK(g.inside_ordinal(ix, iy) == static_cast<std::int64_t>(inside));
        ++inside;
      }
    }
  }
  CHECK(inside == g.inside_count());
  CHECK(g.locate(g.inside_center(7)) == g.inside_cell(7));
}

TEST_CASE("region_measure examples") {
  const Grid disk(make_domain("disk", {}), 512);
  CHECK(std::abs(region_measure(disk, [](const Point&) { return true; }) / pi - 1.0) < 0.02);
  CHECK(region_measure(disk, [](const Point&) { return false; }) == 0.0);
  const Grid sq(make_domain("square", {}), 200);
  CHECK(std::abs(region_measure(sq, [](const Point& x) { return x[0] < 0.5; }) - 0.5) <= 2 * sq.h());
}

TEST_CASE("region_measure converges at rate h times perimeter") {
  const struct {
    const char* name;
    double perimeter;
  } cases[] = {{"disk", 2 * pi}, {"square", 4.0}};
  for (const auto& c : cases) {
    const auto d = make_domain(c.name, {});
    for (int res : {32, 64, 128}) {
      const Grid a(d, res);
      const Grid b(d, 2 * res);
      const double ma = region_measure(a, [](const Point&) { return true; });
      const double mb = region_measure(b, [](const Point&) { return true; });
      CHECK(std::abs(ma - mb) <= 4 * a.h() * c.perimeter);
    }
  }
}

TEST_CASE("ball_measure") {
  const Grid g(make_domain("disk", {}), 256);
  CHECK(ball_measure(g, {0, 0}, 0.5) == doctest::Approx(pi * 0.25).epsilon(2e-3));
  CHECK(ball_measure(g, {0, 0}, 10.0) == doctest::Approx(g.inside_count() * g.cell_measure()));
  // continuity in r
  CHECK(ball_measure(g, {0.1, 0}, 0.3) < ball_measure(g, {0.1, 0}, 0.3 + 1e-4));
}

TEST_CASE("ahlfors theta on the disk") {
  const Grid g(make_domain("disk", {}), 128);
  const auto rep = ahlfors_theta(g, default_ahlfors_samples(g), default_ahlfors_radii(g));
  CHECK(rep.theta_hat >= pi / 16 * 0.98);
  CHECK(rep.theta_hat > 0);
  double m = 1e300;
  for (const auto& row : rep.rows) m = std::min(m, row.min_ratio);
  CHECK(rep.theta_hat == m);
}

TEST_CASE("ahlfors ratio at a square corner") {
  const Grid g(make_domain("square", {}), 512);
  const Point corner{g.h() / 2, g.h() / 2};
  const auto rep = ahlfors_theta(g, {corner}, {0.1});
  CHECK(std::abs(rep.theta_hat / (pi / 4) - 1.0) < 0.05);
}

TEST_CASE("ahlfors ratio at the cusp tip decays like 2r/3") {
  const auto cusp = make_domain("cusp", {{"s", 2}});
  double prev = 1e300;
  for (int k = 3; k <= 7; ++k) {
    const double r = std::ldexp(1.0, -k);
    const double h = r * r / 32;
    const int nx = static_cast<int>(std::ceil(r / h)) + 2;
    const int ny = 2 * static_cast<int>(std::ceil(r * r / h)) + 2;
    const Grid g(cusp, nx, ny, h, {0.0, -0.5 * ny * h});
    const auto rep = ahlfors_theta(g, {Point{1e-9, 0.0}}, {r});
    INFO("k=" << k << " ratio " << rep.theta_hat);
    CHECK(std::abs(rep.theta_hat / (2 * r / 3) - 1.0) < 0.05);
    CHECK(rep.theta_hat < prev);
    prev = rep.theta_hat;
  }
}

TEST_CASE("ahlfors theta is monotone under sample enrichment") {
  const Grid g(make_domain("square", {}), 64);
  const auto radii = default_ahlfors_radii(g);
  std::vector<Point> few{{0.5, 0.5}, {0.3, 0.6}};
  const double a = ahlfors_theta(g, few, radii).theta_hat;
  few.push_back({0.01, 0.5});
  const double b = ahlfors_theta(g, few, radii).theta_hat;
  few.push_back(g.inside_center(0));
  const double c = ahlfors_theta(g, few, radii).theta_hat;
  CHECK(b <= a);
  CHECK(c <= b);
}

TEST_CASE("ahlfors errors") {
  const Grid g(make_domain("disk", {}), 32);
  CHECK_THROWS(ahlfors_theta(g, {}, {0.5}));
  CHECK_THROWS(ahlfors_theta(g, {{0, 0}}, {}));
  CHECK_THROWS(ahlfors_theta(g, {{0, 0}}, {5.0}));
  CHECK_THROWS(ahlfors_theta(g, {{3, 0}}, {0.5}));
}

TEST_CASE("halving radii") {
  const Grid g(make_domain("disk", {}), 256);
  const auto b = halving_radii(g, {0, 0}, 0.5, 3);
  REQUIRE(b.size() == 4);
  for (int j = 0; j <= 3; ++j) CHECK(std::abs(b[j] / std::pow(2.0, -j / 2.0) - 1.0) < 0.01);
  CHECK(halving_radii(g, {0, 0}, 0.5, 0) == std::vector<double>{1.0});
  CHECK_THROWS_AS(halving_radii(g, {0, 0}, 0.01, 2), std::runtime_error);

  const Grid c(make_domain("cusp", {{"s", 2}}), 512);
  const auto bc = halving_radii(c, {1e-3, 0}, 0.5, 1);
  CHECK(bc[1] > std::pow(2.0, -0.5));
}

TEST_CASE("ahlfors json") {
  const Grid g(make_domain("interval", {}), 64);
  const auto rep = ahlfors_theta(g, default_ahlfors_samples(g), default_ahlfors_radii(g));
  const auto j = to_json(rep);
  CHECK(j["theta_hat"].get<double>() == rep.theta_hat);
  CHECK(rep.theta_hat == doctest::Approx(0.5).epsilon(0.05));
}
