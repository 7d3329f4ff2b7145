#include "fosl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "fosl/root_finding.hpp"

namespace fosl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double param(const Params& p, const char* key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_keys(std::string_view shape, const Params& p, std::set<std::string> keys) {
  for (const auto& [k, v] : p) {
    if (!keys.contains(k)) {
      throw std::invalid_argument("make_domain(" + std::string(shape) + "): unknown parameter '" +
                                  k + "'");
    }
    if (!std::isfinite(v)) {
      throw std::invalid_argument("make_domain(" + std::string(shape) + "): parameter '" + k +
                                  "' is not finite");
    }
  }
}

double box_sdist(const Point& x, const Point& lo, const Point& hi) {
  const double qx = std::abs(x[0] - 0.5 * (lo[0] + hi[0])) - 0.5 * (hi[0] - lo[0]);
  const double qy = std::abs(x[1] - 0.5 * (lo[1] + hi[1])) - 0.5 * (hi[1] - lo[1]);
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  return outside + std::min(std::max(qx, qy), 0.0);
}

// Distance from (x, y), y >= 0, to the curve {(u, u^s) : 0 <= u <= 1}.
double distance_to_power_curve(double x, double y, double s) {
  auto d2 = [&](double u) {
    const double dx = u - x;
    const double dy = std::pow(u, s) - y;
    return dx * dx + dy * dy;
  };
  constexpr int kSamples = 128;
  int best = 0;
  double best_val = d2(0.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double v = d2(static_cast<double>(i) / kSamples);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = std::max(0.0, (best - 1.0) / kSamples);
  const double b = std::min(1.0, (best + 1.0) / kSamples);
  const double u = golden_minimize(d2, a, b, 1e-13);
  return std::sqrt(std::min({d2(u), best_val, d2(a), d2(b)}));
}

double cusp_sdist(const Point& p, double s) {
  const double x = p[0];
  const double ay = std::abs(p[1]);
  const double curve = distance_to_power_curve(x, ay, s);
  // right edge {x = 1, |y| <= 1}
  const double edge = std::hypot(x - 1.0, std::max(ay - 1.0, 0.0));
  const double d = std::min(curve, edge);
  const bool in = x > 0.0 && x < 1.0 && ay < std::pow(x, s);
  return in ? -d : d;
}

}  // namespace

double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

Domain::Domain(std::string name, int dim, Params params,
               std::function<double(const Point&)> sdist, Box bbox, double diam,
               bool ahlfors_regular)
    : name_(std::move(name)),
      dim_(dim),
      params_(std::move(params)),
      sdist_(std::move(sdist)),
      bbox_(bbox),
      diam_(diam),
      ahlfors_regular_(ahlfors_regular) {}

Point Domain::project_to_boundary(const Point& x) const {
  Point p = x;
  const double scale = std::max({1.0, std::abs(x[0]), std::abs(x[1])});
  const double step = 1e-7 * scale;
  for (int it = 0; it < 4; ++it) {
    const double d = sdist(p);
    if (std::abs(d) < 1e-13 * scale) break;
    double gx = (sdist({p[0] + step, p[1]}) - sdist({p[0] - step, p[1]})) / (2 * step);
    double gy = 0.0;
    if (dim_ == 2) gy = (sdist({p[0], p[1] + step}) - sdist({p[0], p[1] - step})) / (2 * step);
    const double norm = std::hypot(gx, gy);
    if (norm < 1e-12) break;
    gx /= norm;
    gy /= norm;
    p = {p[0] - d * gx, p[1] - d * gy};
  }
  return p;
}

const std::vector<std::string>& domain_names() {
  static const std::vector<std::string> names = {"interval", "disk", "square",
                                                 "annulus", "cusp", "halfplane_truncated"};
  return names;
}

Domain make_domain(std::string_view name, const Params& p) {
  if (name == "interval") {
    check_keys(name, p, {"a", "b"});
    const double a = param(p, "a", 0.0);
    const double b = param(p, "b", 1.0);
    if (!(b > a)) throw std::invalid_argument("make_domain(interval): need a < b");
    return Domain("interval", 1, {{"a", a}, {"b", b}},
                  [a, b](const Point& x) { return std::max(a - x[0], x[0] - b); },
                  Box{{a, 0.0}, {b, 0.0}}, b - a, true);
  }
  if (name == "disk") {
    check_keys(name, p, {"cx", "cy", "radius"});
    const double cx = param(p, "cx", 0.0);
    const double cy = param(p, "cy", 0.0);
    const double r = param(p, "radius", 1.0);
    if (!(r > 0)) throw std::invalid_argument("make_domain(disk): radius must be > 0");
    return Domain("disk", 2, {{"cx", cx}, {"cy", cy}, {"radius", r}},
                  [cx, cy, r](const Point& x) { return std::hypot(x[0] - cx, x[1] - cy) - r; },
                  Box{{cx - r, cy - r}, {cx + r, cy + r}}, 2 * r, true);
  }
  if (name == "square") {
    check_keys(name, p, {"x0", "y0", "side"});
    const double x0 = param(p, "x0", 0.0);
    const double y0 = param(p, "y0", 0.0);
    const double side = param(p, "side", 1.0);
    if (!(side > 0)) throw std::invalid_argument("make_domain(square): side must be > 0");
    const Point lo{x0, y0};
    const Point hi{x0 + side, y0 + side};
    return Domain("square", 2, {{"x0", x0}, {"y0", y0}, {"side", side}},
                  [lo, hi](const Point& x) { return box_sdist(x, lo, hi); }, Box{lo, hi},
                  side * std::sqrt(2.0), true);
  }
  if (name == "annulus") {
    check_keys(name, p, {"cx", "cy", "r_in", "r_out"});
    const double cx = param(p, "cx", 0.0);
    const double cy = param(p, "cy", 0.0);
    const double ri = param(p, "r_in", 0.5);
    const double ro = param(p, "r_out", 1.0);
    if (!(ri > 0 && ro > ri)) throw std::invalid_argument("make_domain(annulus): need 0 < r_in < r_out");
    return Domain("annulus", 2, {{"cx", cx}, {"cy", cy}, {"r_in", ri}, {"r_out", ro}},
                  [cx, cy, ri, ro](const Point& x) {
                    const double rho = std::hypot(x[0] - cx, x[1] - cy);
                    return std::max(rho - ro, ri - rho);
                  },
                  Box{{cx - ro, cy - ro}, {cx + ro, cy + ro}}, 2 * ro, true);
  }
  if (name == "cusp") {
    check_keys(name, p, {"s"});
    const double s = param(p, "s", 2.0);
    if (!(s > 1.0)) throw std::invalid_argument("make_domain(cusp): exponent s must be > 1");
    return Domain("cusp", 2, {{"s", s}}, [s](const Point& x) { return cusp_sdist(x, s); },
                  Box{{0.0, -1.0}, {1.0, 1.0}}, 2.0, false);
  }
  if (name == "halfplane_truncated") {
    check_keys(name, p, {"L"});
    const double L = param(p, "L", 1.0);
    if (!(L > 0)) throw std::invalid_argument("make_domain(halfplane_truncated): L must be > 0");
    return Domain("halfplane_truncated", 2, {{"L", L}}, [](const Point& x) { return x[0]; },
                  Box{{-L, -L}, {0.0, L}}, kInf, true);
  }
  throw std::invalid_argument("make_domain: unknown shape '" + std::string(name) + "'");
}

Domain make_box_domain(const Box& box, int dim) {
  const Point lo = box.lo;
  const Point hi = box.hi;
  std::function<double(const Point&)> sd;
  double diam;
  if (dim == 1) {
    sd = [lo, hi](const Point& x) { return std::max(lo[0] - x[0], x[0] - hi[0]); };
    diam = hi[0] - lo[0];
  } else {
    sd = [lo, hi](const Point& x) { return box_sdist(x, lo, hi); };
    diam = std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
  }
  return Domain("box", dim, {}, sd, box, diam, true);
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(const Domain& domain, int resolution)
    : domain_(std::make_shared<const Domain>(domain)) {
  if (resolution < 2) throw std::invalid_argument("Grid: resolution must be >= 2");
  const Box& b = domain.bbox();
  if (domain.dim() == 1) {
    h_ = b.extent(0) / resolution;
    nx_ = resolution;
    ny_ = 1;
    origin_ = {b.lo[0], 0.0};
  } else {
    const double longest = std::max(b.extent(0), b.extent(1));
    h_ = longest / resolution;
    nx_ = std::max(1, static_cast<int>(std::ceil(b.extent(0) / h_ - 1e-9)));
    ny_ = std::max(1, static_cast<int>(std::ceil(b.extent(1) / h_ - 1e-9)));
    origin_ = b.lo;
  }
  classify();
}

Grid::Grid(const Domain& domain, int nx, int ny, double h, Point origin)
    : domain_(std::make_shared<const Domain>(domain)), nx_(nx), ny_(ny), h_(h), origin_(origin) {
  if (nx < 1 || ny < 1 || !(h > 0)) throw std::invalid_argument("Grid: invalid shape");
  if (domain.dim() == 1 && ny != 1) throw std::invalid_argument("Grid: 1-D grids have ny = 1");
  classify();
}

void Grid::classify() {
  const int n = dim();
  cell_measure_ = n == 1 ? h_ : h_ * h_;
  state_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), CellState::outside);
  ordinal_.assign(state_.size(), -1);
  inside_.clear();
  const double half_diag = 0.5 * h_ * std::sqrt(static_cast<double>(n));
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ix = 0; ix < nx_; ++ix) {
      const double sd = domain_->sdist(center(ix, iy));
      const std::size_t c = cell_index(ix, iy);
      if (sd < 0.0) {
        state_[c] = CellState::inside;
        ordinal_[c] = static_cast<std::int64_t>(inside_.size());
        inside_.push_back({ix, iy});
      } else if (sd <= half_diag) {
        state_[c] = CellState::boundary;
      }
    }
  }
}

Point Grid::center(int ix, int iy) const {
  if (dim() == 1) return {origin_[0] + (ix + 0.5) * h_, 0.0};
  return {origin_[0] + (ix + 0.5) * h_, origin_[1] + (iy + 0.5) * h_};
}

Box Grid::box() const {
  if (dim() == 1) return {{origin_[0], 0.0}, {origin_[0] + nx_ * h_, 0.0}};
  return {origin_, {origin_[0] + nx_ * h_, origin_[1] + ny_ * h_}};
}

std::array<int, 2> Grid::locate(const Point& x) const {
  int ix = static_cast<int>(std::floor((x[0] - origin_[0]) / h_));
  int iy = dim() == 1 ? 0 : static_cast<int>(std::floor((x[1] - origin_[1]) / h_));
  ix = std::clamp(ix, 0, nx_ - 1);
  iy = std::clamp(iy, 0, ny_ - 1);
  return {ix, iy};
}

double region_measure(const Grid& grid, const std::function<bool(const Point&)>& region) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < grid.inside_count(); ++k) {
    if (region(grid.inside_center(k))) ++count;
  }
  return static_cast<double>(count) * grid.cell_measure();
}

namespace {

struct Window {
  int x0, x1, y0, y1;  // inclusive
};

Window ball_window(const Grid& grid, const Point& x, double r) {
  const double h = grid.h();
  const Point o = grid.origin();
  Window w{};
  w.x0 = std::max(0, static_cast<int>(std::floor((x[0] - r - o[0]) / h)) - 1);
  w.x1 = std::min(grid.nx() - 1, static_cast<int>(std::floor((x[0] + r - o[0]) / h)) + 1);
  if (grid.dim() == 1) {
    w.y0 = w.y1 = 0;
  } else {
    w.y0 = std::max(0, static_cast<int>(std::floor((x[1] - r - o[1]) / h)) - 1);
    w.y1 = std::min(grid.ny() - 1, static_cast<int>(std::floor((x[1] + r - o[1]) / h)) + 1);
  }
  return w;
}

}  // namespace

double ball_measure(const Grid& grid, const Point& x, double r) {
  if (!(r > 0.0)) return 0.0;
  const Window w = ball_window(grid, x, r);
  const double h = grid.h();
  const bool one_d = grid.dim() == 1;
  constexpr int kSub = 16;
  const std::int64_t per_cell = one_d ? kSub : kSub * kSub;
  std::int64_t units = 0;  // in 1/per_cell of a cell
  const double r2 = r * r;
  for (int iy = w.y0; iy <= w.y1; ++iy) {
    for (int ix = w.x0; ix <= w.x1; ++ix) {
      if (grid.state(ix, iy) != CellState::inside) continue;
      const Point c = grid.center(ix, iy);
      const double dx = std::abs(c[0] - x[0]);
      const double dy = one_d ? 0.0 : std::abs(c[1] - x[1]);
      const double fx = dx + 0.5 * h;
      const double fy = one_d ? 0.0 : dy + 0.5 * h;
      if (fx * fx + fy * fy <= r2) {
        units += per_cell;
        continue;
      }
      const double nxd = std::max(dx - 0.5 * h, 0.0);
      const double nyd = one_d ? 0.0 : std::max(dy - 0.5 * h, 0.0);
      if (nxd * nxd + nyd * nyd >= r2) continue;
      const double x0 = c[0] - 0.5 * h;
      const double y0 = c[1] - 0.5 * h;
      if (one_d) {
        for (int a = 0; a < kSub; ++a) {
          const double px = x0 + (a + 0.5) * h / kSub - x[0];
          if (px * px < r2) ++units;
        }
      } else {
        for (int b = 0; b < kSub; ++b) {
          const double py = y0 + (b + 0.5) * h / kSub - x[1];
          for (int a = 0; a < kSub; ++a) {
            const double px = x0 + (a + 0.5) * h / kSub - x[0];
            if (px * px + py * py < r2) ++units;
          }
        }
      }
    }
  }
  return static_cast<double>(units) * grid.cell_measure() / static_cast<double>(per_cell);
}

std::size_t ball_cell_count(const Grid& grid, const Point& x, double r) {
  const Window w = ball_window(grid, x, r);
  std::size_t count = 0;
  for (int iy = w.y0; iy <= w.y1; ++iy) {
    for (int ix = w.x0; ix <= w.x1; ++ix) {
      if (grid.state(ix, iy) == CellState::inside && distance(grid.center(ix, iy), x) < r) ++count;
    }
  }
  return count;
}

AhlforsReport ahlfors_theta(const Grid& grid, const std::vector<Point>& samples,
                            const std::vector<double>& radii) {
  if (samples.empty() || radii.empty()) {
    throw std::invalid_argument("ahlfors_theta: empty sample or radius set");
  }
  const Domain& dom = grid.domain();
  for (const Point& x : samples) {
    if (!dom.inside(x)) throw std::invalid_argument("ahlfors_theta: sample point outside the domain");
  }
  for (double r : radii) {
    if (!(r > 0.0) || !(r < 2.0 * dom.diam())) {
      throw std::invalid_argument("ahlfors_theta: radius outside (0, 2 diam)");
    }
  }
  AhlforsReport rep;
  rep.sample_count = samples.size();
  rep.theta_hat = kInf;
  const double n = grid.dim();
  for (double r : radii) {
    AhlforsRow row{r, kInf, samples.front()};
    for (const Point& x : samples) {
      const double ratio = ball_measure(grid, x, r) / std::pow(r, n);
      if (ratio < row.min_ratio) {
        row.min_ratio = ratio;
        row.argmin = x;
      }
    }
    rep.theta_hat = std::min(rep.theta_hat, row.min_ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<Point> default_ahlfors_samples(const Grid& grid, std::size_t interior_count) {
  std::vector<Point> out;
  std::vector<Point> interior;
  for (std::size_t k = 0; k < grid.inside_count(); ++k) {
    const auto [ix, iy] = grid.inside_cell(k);
    bool edge = false;
    for (int d = 0; d < 4 && !edge; ++d) {
      const int jx = ix + (d == 0) - (d == 1);
      const int jy = iy + (d == 2) - (d == 3);
      if (grid.dim() == 1 && d >= 2) continue;
      if (jx < 0 || jy < 0 || jx >= grid.nx() || jy >= grid.ny()) continue;
      edge = grid.state(jx, jy) != CellState::inside;
    }
    (edge ? out : interior).push_back(grid.inside_center(k));
  }
  if (!interior.empty() && interior_count > 0) {
    const std::size_t stride = std::max<std::size_t>(1, interior.size() / interior_count);
    for (std::size_t k = 0; k < interior.size(); k += stride) out.push_back(interior[k]);
  }
  return out;
}

std::vector<double> default_ahlfors_radii(const Grid& grid, int count) {
  const Domain& d = grid.domain();
  const Box b = d.bbox();
  const double extent = std::max(b.extent(0), b.extent(1));
  const double top = std::min(2.0 * d.diam(), 2.0 * extent) * (1.0 - 1e-9);
  const double bottom = 4.0 * grid.h();
  std::vector<double> radii;
  if (!(top > bottom)) return {top};
  for (int i = 0; i < count; ++i) {
    radii.push_back(bottom * std::pow(top / bottom, static_cast<double>(i) / (count - 1)));
  }
  return radii;
}

std::vector<double> halving_radii(const Grid& grid, const Point& x, double t, int j_max) {
  const Domain& dom = grid.domain();
  if (!dom.inside(x)) throw std::invalid_argument("halving_radii: x must lie in the domain");
  if (!(t > 0.0) || !(t < dom.diam())) throw std::invalid_argument("halving_radii: need 0 < t < diam");
  if (j_max < 0) throw std::invalid_argument("halving_radii: j_max must be >= 0");
  std::vector<double> b{1.0};
  const double total = ball_measure(grid, x, t);
  for (int j = 1; j <= j_max; ++j) {
    const double target = total * std::ldexp(1.0, -j);
    if (target / grid.cell_measure() < 32.0) {
      throw std::runtime_error("halving_radii: target ball for j = " + std::to_string(j) +
                               " holds fewer than 32 cells; refine the grid");
    }
    const double bj = bisect_increasing([&](double s) { return ball_measure(grid, x, s * t); },
                                        0.0, b.back(), target, 100);
    const double got = ball_measure(grid, x, bj * t);
    if (std::abs(got - target) > 0.01 * target) {
      throw std::runtime_error("halving_radii: could not match half measure to 1% at j = " +
                               std::to_string(j));
    }
    b.push_back(bj);
  }
  return b;
}

void write_ahlfors_csv(const AhlforsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "x,y,r,ratio\n";
  for (const auto& row : report.rows) {
    out << row.argmin[0] << ',' << row.argmin[1] << ',' << row.r << ',' << row.min_ratio << '\n';
  }
}

nlohmann::json to_json(const AhlforsReport& report) {
  return {{"theta_hat", report.theta_hat},
          {"samples", report.sample_count},
          {"scales", report.rows.size()}};
}

}  // namespace fosl
