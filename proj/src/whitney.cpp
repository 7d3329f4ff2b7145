#include "fosl/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "fosl/summation.hpp"

namespace fosl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double snap(double v, double origin, double h) { return origin + std::round((v - origin) / h) * h; }

double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

int WhitneyDecomposition::owner_at(int fx, int fy) const {
  const int F = finest_count();
  if (fx < 0 || fx >= F) return -1;
  if (dim == 1) return fy == 0 ? owner[static_cast<std::size_t>(fx)] : -1;
  if (fy < 0 || fy >= F) return -1;
  return owner[static_cast<std::size_t>(fy) * F + static_cast<std::size_t>(fx)];
}

std::array<int, 2> WhitneyDecomposition::finest_cell(const Point& x) const {
  const double f = finest_side();
  const int fx = static_cast<int>(std::floor((x[0] - box.lo[0]) / f));
  const int fy = dim == 1 ? 0 : static_cast<int>(std::floor((x[1] - box.lo[1]) / f));
  return {fx, fy};
}

std::array<int, 4> WhitneyDecomposition::finest_extent(const WhitneyCube& q) const {
  const int span = 1 << (max_level - q.level);
  const int x0 = q.coords[0] * span;
  const int y0 = dim == 1 ? 0 : q.coords[1] * span;
  return {x0, x0 + span, y0, dim == 1 ? 1 : y0 + span};
}

Box truncation_box(const Grid& grid) {
  const Domain& dom = grid.domain();
  const Box& b = dom.bbox();
  const double h = grid.h();
  const int n = dom.dim();
  const double extent = n == 1 ? b.extent(0) : std::max(b.extent(0), b.extent(1));
  // unbounded shapes: the sampling window mirrored across the boundary
  const bool bounded = std::isfinite(dom.diam());
  const double side = std::round((bounded ? 3.0 : 1.0) * extent / h) * h;
  const Point c = bounded ? b.center() : dom.project_to_boundary(b.center());
  Box box;
  box.lo[0] = snap(c[0] - 0.5 * side, grid.origin()[0], h);
  box.hi[0] = box.lo[0] + side;
  if (n == 2) {
    box.lo[1] = snap(c[1] - 0.5 * side, grid.origin()[1], h);
    box.hi[1] = box.lo[1] + side;
  }
  return box;
}

namespace {

double sampled_boundary_distance(const Domain& dom, const WhitneyCube& q) {
  const double half = 0.5 * q.side;
  if (dom.dim() == 1) {
    return std::min(dom.sdist({q.center[0] - half, 0.0}), dom.sdist({q.center[0] + half, 0.0}));
  }
  constexpr int kPerEdge = 32;
  double best = kInf;
  for (int k = 0; k <= kPerEdge; ++k) {
    const double s = -half + q.side * k / kPerEdge;
    best = std::min({best, dom.sdist({q.center[0] + s, q.center[1] - half}),
                     dom.sdist({q.center[0] + s, q.center[1] + half}),
                     dom.sdist({q.center[0] - half, q.center[1] + s}),
                     dom.sdist({q.center[0] + half, q.center[1] + s})});
  }
  return best;
}

}  // namespace

WhitneyDecomposition whitney_decompose(const Grid& grid) {
  WhitneyDecomposition d;
  d.domain = grid.domain_ptr();
  d.dim = grid.dim();
  d.box = truncation_box(grid);
  d.top_side = d.box.extent(0);
  d.max_level = std::max(1, static_cast<int>(std::floor(std::log2(d.top_side / (2.0 * grid.h())))));
  const Domain& dom = *d.domain;
  const int n = d.dim;
  const double rn = std::sqrt(static_cast<double>(n));

  struct Item {
    int level;
    int i;
    int j;
  };
  std::vector<Item> stack{{0, 0, 0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const double l = d.top_side * std::ldexp(1.0, -it.level);
    Point c{d.box.lo[0] + (it.i + 0.5) * l, n == 1 ? 0.0 : d.box.lo[1] + (it.j + 0.5) * l};
    const double sd = dom.sdist(c);
    const double halfdiag = 0.5 * rn * l;
    if (sd <= -halfdiag) continue;  // inside Omega
    if (sd - halfdiag >= rn * l) {
      WhitneyCube q;
      q.level = it.level;
      q.coords = {it.i, it.j};
      q.side = l;
      q.center = c;
      q.dist_to_boundary = sampled_boundary_distance(dom, q);
      d.cubes.push_back(std::move(q));
      continue;
    }
    if (it.level == d.max_level) {
      ++d.discarded;
      continue;
    }
    // push children in reverse so they pop in natural order
    const int ny = n == 1 ? 1 : 2;
    for (int b = ny - 1; b >= 0; --b) {
      for (int a = 1; a >= 0; --a) {
        stack.push_back({it.level + 1, 2 * it.i + a, n == 1 ? 0 : 2 * it.j + b});
      }
    }
  }

  const int F = d.finest_count();
  d.owner.assign(n == 1 ? static_cast<std::size_t>(F) : static_cast<std::size_t>(F) * F, -1);
  for (std::size_t k = 0; k < d.cubes.size(); ++k) {
    const auto e = d.finest_extent(d.cubes[k]);
    for (int fy = e[2]; fy < e[3]; ++fy) {
      for (int fx = e[0]; fx < e[1]; ++fx) {
        d.owner[static_cast<std::size_t>(fy) * (n == 1 ? 0 : F) + static_cast<std::size_t>(fx)] =
            static_cast<int>(k);
      }
    }
  }
  for (std::size_t k = 0; k < d.cubes.size(); ++k) {
    const auto e = d.finest_extent(d.cubes[k]);
    std::vector<int> nb;
    auto visit = [&](int fx, int fy) {
      const int o = d.owner_at(fx, fy);
      if (o >= 0 && o != static_cast<int>(k)) nb.push_back(o);
    };
    if (n == 1) {
      visit(e[0] - 1, 0);
      visit(e[1], 0);
    } else {
      for (int fx = e[0] - 1; fx <= e[1]; ++fx) {
        visit(fx, e[2] - 1);
        visit(fx, e[3]);
      }
      for (int fy = e[2]; fy < e[3]; ++fy) {
        visit(e[0] - 1, fy);
        visit(e[1], fy);
      }
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    d.gamma0 = std::max(d.gamma0, nb.size() + 1);
    d.cubes[k].neighbors = std::move(nb);
  }
  return d;
}

WhitneyValidation validate(const WhitneyDecomposition& d) {
  WhitneyValidation v;
  const double rn = std::sqrt(static_cast<double>(d.dim));
  v.min_dist_ratio = kInf;
  v.max_dist_ratio = 0.0;
  std::vector<std::array<int, 4>> ext;
  ext.reserve(d.cubes.size());
  for (const auto& q : d.cubes) {
    const double ratio = q.dist_to_boundary / (rn * q.side);
    v.min_dist_ratio = std::min(v.min_dist_ratio, ratio);
    v.max_dist_ratio = std::max(v.max_dist_ratio, ratio);
    if (ratio < 1.0 || ratio > 4.0) ++v.distance_violations;
    for (int o : q.neighbors) {
      if (std::abs(d.cubes[static_cast<std::size_t>(o)].level - q.level) > 2) ++v.ratio_violations;
    }
    ext.push_back(d.finest_extent(q));
  }
  for (std::size_t a = 0; a < ext.size(); ++a) {
    for (std::size_t b = a + 1; b < ext.size(); ++b) {
      ++v.pairs_checked;
      if (ext[a][0] < ext[b][1] && ext[b][0] < ext[a][1] && ext[a][2] < ext[b][3] &&
          ext[b][2] < ext[a][3]) {
        ++v.overlapping_pairs;
      }
    }
  }
  if (d.cubes.empty()) v.min_dist_ratio = 0.0;
  return v;
}

// ---------------------------------------------------------------------------
// reflection

namespace {

struct ClipRect {
  double x0, x1, y0, y1;
};

// Max number of rectangles covering one point, over rectangles clipped to a cell.
std::size_t max_depth(const std::vector<ClipRect>& rects) {
  std::size_t best = 0;
  for (const auto& a : rects) {
    for (const auto& b : rects) {
      const double px = a.x0;
      const double py = b.y0;
      std::size_t c = 0;
      for (const auto& r : rects) {
        if (r.x0 <= px && px < r.x1 && r.y0 <= py && py < r.y1) ++c;
      }
      best = std::max(best, c);
    }
  }
  return best;
}

void fill_weights(const Grid& grid, ReflectedCube& rc) {
  rc.cells.clear();
  const double h = grid.h();
  const Point o = grid.origin();
  const bool one_d = grid.dim() == 1;
  const int ix0 = std::max(0, static_cast<int>(std::floor((rc.region.lo[0] - o[0]) / h)));
  const int ix1 = std::min(grid.nx() - 1, static_cast<int>(std::floor((rc.region.hi[0] - o[0]) / h)));
  int iy0 = 0;
  int iy1 = 0;
  if (!one_d) {
    iy0 = std::max(0, static_cast<int>(std::floor((rc.region.lo[1] - o[1]) / h)));
    iy1 = std::min(grid.ny() - 1, static_cast<int>(std::floor((rc.region.hi[1] - o[1]) / h)));
  }
  double total = 0.0;
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const std::int64_t k = grid.inside_ordinal(ix, iy);
      if (k < 0) continue;
      const double cx0 = o[0] + ix * h;
      double w = overlap_1d(cx0, cx0 + h, rc.region.lo[0], rc.region.hi[0]) / h;
      if (!one_d) {
        const double cy0 = o[1] + iy * h;
        w *= overlap_1d(cy0, cy0 + h, rc.region.lo[1], rc.region.hi[1]) / h;
      }
      if (w > 0.0) {
        rc.cells.emplace_back(static_cast<std::size_t>(k), w);
        total += w;
      }
    }
  }
  rc.measure = total * grid.cell_measure();
}

Box centered_box(const Point& c, double half, int n) {
  Box b{{c[0] - half, c[1] - half}, {c[0] + half, c[1] + half}};
  if (n == 1) b.lo[1] = b.hi[1] = 0.0;
  return b;
}

}  // namespace

Reflection reflect(const WhitneyDecomposition& d, const Grid& grid, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("reflect: theta must be > 0");
  const Domain& dom = *d.domain;
  const int n = d.dim;
  const double rn = std::sqrt(static_cast<double>(n));
  Reflection out;
  out.theta = theta;
  out.epsilon0 = std::pow(theta / (2.0 * static_cast<double>(std::max<std::size_t>(d.gamma0, 1))),
                          1.0 / n) / (30.0 * rn);
  const double large_side = dom.diam() / out.epsilon0;

  // inside cells with a non-inside 4-neighbour
  std::vector<std::size_t> boundary_cells;
  for (std::size_t k = 0; k < grid.inside_count(); ++k) {
    const auto [ix, iy] = grid.inside_cell(k);
    bool edge = false;
    const int dirs = n == 1 ? 2 : 4;
    for (int dd = 0; dd < dirs; ++dd) {
      const int jx = ix + (dd == 0) - (dd == 1);
      const int jy = iy + (dd == 2) - (dd == 3);
      if (jx < 0 || jy < 0 || jx >= grid.nx() || jy >= grid.ny() ||
          grid.state(jx, jy) != CellState::inside) {
        edge = true;
      }
    }
    if (edge) boundary_cells.push_back(k);
  }

  out.table.resize(d.cubes.size());
  out.gamma1 = 0.0;
  for (std::size_t qi = 0; qi < d.cubes.size(); ++qi) {
    const WhitneyCube& q = d.cubes[qi];
    ReflectedCube& rc = out.table[qi];
    if (q.side >= large_side) {
      rc.mode = ReflectedCube::Mode::large;
      rc.anchor = q.center;
      rc.region = grid.box();
      for (std::size_t k = 0; k < grid.inside_count(); ++k) rc.cells.emplace_back(k, 1.0);
      rc.measure = static_cast<double>(grid.inside_count()) * grid.cell_measure();
      rc.inside_10Q = false;
    } else {
      ++out.small_count;
      rc.anchor = dom.project_to_boundary(q.center);
      double half = 0.5 * out.epsilon0 * q.side;
      rc.region = centered_box(rc.anchor, half, n);
      fill_weights(grid, rc);
      while (rc.cells.empty() && rc.enlargements < 2) {
        ++rc.enlargements;
        half *= 2.0;
        rc.region = centered_box(rc.anchor, half, n);
        fill_weights(grid, rc);
      }
      if (rc.cells.empty()) {
        if (boundary_cells.empty()) {
          throw std::runtime_error("reflect: empty reflected region and no discrete boundary; grid too coarse");
        }
        std::size_t best = boundary_cells.front();
        double best_d = kInf;
        for (std::size_t k : boundary_cells) {
          const double dist = distance(grid.inside_center(k), rc.anchor);
          if (dist < best_d) {
            best_d = dist;
            best = k;
          }
        }
        rc.anchor = grid.inside_center(best);
        rc.snapped = true;
        rc.region = centered_box(rc.anchor, half, n);
        fill_weights(grid, rc);
        if (rc.cells.empty()) {
          throw std::runtime_error("reflect: empty reflected region for cube at level " +
                                   std::to_string(q.level) + "; grid too coarse");
        }
      }
      if (rc.enlargements > 0) ++out.enlarged;
      if (rc.snapped) ++out.snapped;
      const double reach = 5.0 * q.side;
      rc.inside_10Q = rc.region.lo[0] >= q.center[0] - reach && rc.region.hi[0] <= q.center[0] + reach;
      if (n == 2) {
        rc.inside_10Q = rc.inside_10Q && rc.region.lo[1] >= q.center[1] - reach &&
                        rc.region.hi[1] <= q.center[1] + reach;
      }
      if (rc.inside_10Q) ++out.within_10Q;
    }
    out.gamma1 = std::max(out.gamma1, std::pow(q.side, n) / rc.measure);
  }

  // pointwise overlap of the reflected regions, for all cubes and for W^(k)
  std::vector<char> member(d.cubes.size(), 0);
  for (std::size_t qi = 0; qi < d.cubes.size(); ++qi) {
    member[qi] = out.table[qi].mode == ReflectedCube::Mode::small;
  }
  auto depth_for = [&](const std::vector<char>& mask) {
    std::vector<std::vector<ClipRect>> per_cell(grid.inside_count());
    std::size_t large = 0;
    const double h = grid.h();
    for (std::size_t qi = 0; qi < d.cubes.size(); ++qi) {
      if (!mask[qi]) continue;
      const ReflectedCube& rc = out.table[qi];
      if (rc.mode == ReflectedCube::Mode::large) {
        ++large;
        continue;
      }
      for (const auto& [k, w] : rc.cells) {
        const auto [ix, iy] = grid.inside_cell(k);
        const double cx0 = grid.origin()[0] + ix * h;
        ClipRect r{std::max(cx0, rc.region.lo[0]), std::min(cx0 + h, rc.region.hi[0]), 0.0, 1.0};
        if (n == 2) {
          const double cy0 = grid.origin()[1] + iy * h;
          r.y0 = std::max(cy0, rc.region.lo[1]);
          r.y1 = std::min(cy0 + h, rc.region.hi[1]);
        }
        per_cell[k].push_back(r);
      }
    }
    std::size_t best = 0;
    for (const auto& rects : per_cell) best = std::max(best, max_depth(rects));
    return best + large;
  };
  std::vector<char> all(d.cubes.size(), 1);
  out.gamma2 = depth_for(all);
  std::vector<char> wk = member;
  for (int k = 0; k < 3; ++k) {
    if (k > 0) {
      std::vector<char> next = wk;
      for (std::size_t qi = 0; qi < d.cubes.size(); ++qi) {
        if (!wk[qi]) continue;
        for (int o : d.cubes[qi].neighbors) next[static_cast<std::size_t>(o)] = 1;
      }
      wk = std::move(next);
    }
    out.overlap_k[static_cast<std::size_t>(k)] = depth_for(wk);
  }
  return out;
}

// ---------------------------------------------------------------------------
// partition of unity

double cutoff_rho(double s) {
  const double t = (17.0 / 32.0 - std::abs(s)) * 32.0;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  // f(t) / (f(t) + f(1-t)) with f(t) = exp(-1/t)
  return 1.0 / (1.0 + std::exp(1.0 / t - 1.0 / (1.0 - t)));
}

namespace {

double rho_slope(double s) {
  const double t = (17.0 / 32.0 - std::abs(s)) * 32.0;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double r = cutoff_rho(s);
  const double dt = r * (1.0 - r) * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
  return (s > 0.0 ? -32.0 : 32.0) * dt;
}

}  // namespace

PartitionOfUnity::PartitionOfUnity(const WhitneyDecomposition& d) : d_(&d) {}

double PartitionOfUnity::bump(int cube, const Point& x) const {
  const WhitneyCube& q = d_->cubes[static_cast<std::size_t>(cube)];
  double b = cutoff_rho((x[0] - q.center[0]) / q.side);
  if (d_->dim == 2 && b > 0.0) b *= cutoff_rho((x[1] - q.center[1]) / q.side);
  return b;
}

std::vector<int> PartitionOfUnity::candidates(const Point& x) const {
  const auto [fx, fy] = d_->finest_cell(x);
  std::vector<int> out;
  const int dy = d_->dim == 1 ? 0 : 1;
  for (int j = -dy; j <= dy; ++j) {
    for (int i = -1; i <= 1; ++i) {
      const int o = d_->owner_at(fx + i, fy + j);
      if (o < 0) continue;
      out.push_back(o);
      const auto& nb = d_->cubes[static_cast<std::size_t>(o)].neighbors;
      out.insert(out.end(), nb.begin(), nb.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double PartitionOfUnity::bump_sum(const Point& x) const {
  double s = 0.0;
  for (int q : candidates(x)) s += bump(q, x);
  return s;
}

std::vector<std::pair<int, double>> PartitionOfUnity::weights(const Point& x) const {
  std::vector<std::pair<int, double>> out;
  double total = 0.0;
  for (int q : candidates(x)) {
    const double b = bump(q, x);
    if (b > 0.0) {
      out.emplace_back(q, b);
      total += b;
    }
  }
  if (total == 0.0) return {};
  for (auto& e : out) e.second /= total;
  return out;
}

double PartitionOfUnity::phi(int cube, const Point& x) const {
  const double b = bump(cube, x);
  if (b == 0.0) return 0.0;
  return b / bump_sum(x);
}

double PartitionOfUnity::measure_L() const {
  // Gradients vanish off the transition layers. The layers are scanned with
  // the closed-form slope to find where l_Q |grad phi_Q| peaks; the reported
  // value is the central difference quotient at the polished peaks.
  const int n = d_->dim;
  constexpr double kOuter = 17.0 / 32.0;
  constexpr int kAcross = 24;
  constexpr int kEnd = 16;
  constexpr int kMid = 9;
  std::vector<double> along;
  if (n == 1) {
    along.push_back(0.0);
  } else {
    for (int a = 0; a < kMid; ++a) along.push_back(-0.5 + (a + 0.5) / kMid);
    for (int a = 0; a < kEnd; ++a) {
      const double s = 0.5 - 1.0 / 32.0 + (kOuter - 0.5 + 1.0 / 32.0) * (a + 0.5) / kEnd;
      along.push_back(s);
      along.push_back(-s);
    }
  }
  auto covered = [&](const Point& x) {
    const auto [fx, fy] = d_->finest_cell(x);
    return d_->owner_at(fx, fy) >= 0;
  };
  struct Active {
    int q;
    double b;
    Point g;
  };
  std::vector<Active> act;
  auto peak = [&](const Point& x, int& arg) {
    act.clear();
    double S = 0.0;
    Point dS{0.0, 0.0};
    for (int q : candidates(x)) {
      const WhitneyCube& c = d_->cubes[static_cast<std::size_t>(q)];
      const double sx = (x[0] - c.center[0]) / c.side;
      const double rx = cutoff_rho(sx);
      double ry = 1.0;
      double sy = 0.0;
      if (n == 2) {
        sy = (x[1] - c.center[1]) / c.side;
        ry = cutoff_rho(sy);
      }
      const double b = rx * ry;
      if (b <= 0.0) continue;
      const Point g{rho_slope(sx) * ry / c.side, n == 2 ? rx * rho_slope(sy) / c.side : 0.0};
      act.push_back({q, b, g});
      S += b;
      dS[0] += g[0];
      dS[1] += g[1];
    }
    double best = 0.0;
    for (const auto& a : act) {
      const double l = d_->cubes[static_cast<std::size_t>(a.q)].side;
      const double v = l * std::hypot(a.g[0] - a.b / S * dS[0], a.g[1] - a.b / S * dS[1]) / S;
      if (v > best) {
        best = v;
        arg = a.q;
      }
    }
    return best;
  };

  struct Hit {
    double value;
    int cube;
    Point x;
    double step;
  };
  std::vector<Hit> hits;
  for (const auto& p : d_->cubes) {
    for (int axis = 0; axis < n; ++axis) {
      for (int sign = -1; sign <= 1; sign += 2) {
        for (int k = 0; k < kAcross; ++k) {
          const double s = 0.5 + (kOuter - 0.5) * (k + 0.5) / kAcross;
          for (double t : along) {
            Point x = p.center;
            x[static_cast<std::size_t>(axis)] += sign * s * p.side;
            if (n == 2) x[static_cast<std::size_t>(1 - axis)] += t * p.side;
            if (!covered(x)) continue;
            int arg = -1;
            const double v = peak(x, arg);
            if (arg >= 0) hits.push_back({v, arg, x, (kOuter - 0.5) * p.side / kAcross});
          }
        }
      }
    }
  }
  if (hits.empty()) return 0.0;
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.value > b.value; });
  if (hits.size() > 64) hits.resize(64);

  auto difference_quotient = [&](int q, const Point& x) {
    const double l = d_->cubes[static_cast<std::size_t>(q)].side;
    const double delta = 1e-7 * l;
    const double gx = (phi(q, {x[0] + delta, x[1]}) - phi(q, {x[0] - delta, x[1]})) / (2 * delta);
    double gy = 0.0;
    if (n == 2) gy = (phi(q, {x[0], x[1] + delta}) - phi(q, {x[0], x[1] - delta})) / (2 * delta);
    return l * std::hypot(gx, gy);
  };
  double L = 0.0;
  for (auto& h : hits) {
    double step = h.step;
    while (step > 1e-9 * h.step * kAcross) {
      bool moved = false;
      for (int axis = 0; axis < n; ++axis) {
        for (int sign = -1; sign <= 1; sign += 2) {
          Point y = h.x;
          y[static_cast<std::size_t>(axis)] += sign * step;
          if (!covered(y)) continue;
          int arg = -1;
          const double v = peak(y, arg);
          if (v > h.value) {
            h = {v, arg, y, h.step};
            moved = true;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    L = std::max(L, difference_quotient(h.cube, h.x));
  }
  return L;
}

// ---------------------------------------------------------------------------
// extension

ExtensionOperator::ExtensionOperator(std::shared_ptr<const Grid> grid, double theta)
    : grid_(std::move(grid)),
      decomp_(whitney_decompose(*grid_)),
      reflection_(reflect(decomp_, *grid_, theta)),
      pou_(std::make_unique<PartitionOfUnity>(decomp_)) {
  const Grid& g = *grid_;
  const int n = g.dim();
  const double h = g.h();
  const Box& box = decomp_.box;
  const int nbx = static_cast<int>(std::lround(box.extent(0) / h));
  const int nby = n == 1 ? 1 : static_cast<int>(std::lround(box.extent(1) / h));
  box_grid_ = std::make_shared<const Grid>(make_box_domain(box, n), nbx, nby, h, box.lo);
  const int ox = static_cast<int>(std::lround((box.lo[0] - g.origin()[0]) / h));
  const int oy = n == 1 ? 0 : static_cast<int>(std::lround((box.lo[1] - g.origin()[1]) / h));
  const Grid& bg = *box_grid_;
  source_.assign(bg.cell_count(), -1);
  row_start_.assign(bg.cell_count() + 1, 0);
  for (int iy = 0; iy < bg.ny(); ++iy) {
    for (int ix = 0; ix < bg.nx(); ++ix) {
      const std::size_t c = bg.cell_index(ix, iy);
      const int dx = ix + ox;
      const int dy = iy + oy;
      if (dx >= 0 && dy >= 0 && dx < g.nx() && dy < g.ny() && g.state(dx, dy) == CellState::inside) {
        source_[c] = g.inside_ordinal(dx, dy);
      } else {
        const auto w = pou_->weights(bg.center(ix, iy));
        if (w.empty()) {
          ++uncovered_;
        } else {
          ++covered_;
          entries_.insert(entries_.end(), w.begin(), w.end());
        }
      }
      row_start_[c + 1] = entries_.size();
    }
  }
}

std::vector<double> ExtensionOperator::averages(const SampledFunction& u) const {
  if (u.values.size() != grid_->inside_count()) {
    throw std::invalid_argument("extend: function is not sampled on the operator grid");
  }
  std::vector<double> avg(reflection_.table.size(), 0.0);
  for (std::size_t q = 0; q < avg.size(); ++q) {
    const auto& cells = reflection_.table[q].cells;
    double s = 0.0;
    double w = 0.0;
    for (const auto& [k, wt] : cells) {
      s += wt * u.values[k];
      w += wt;
    }
    avg[q] = s / w;
  }
  return avg;
}

SampledFunction ExtensionOperator::extend(const SampledFunction& u) const {
  const auto avg = averages(u);
  SampledFunction out{box_grid_, std::vector<double>(box_grid_->cell_count(), 0.0), "E" + u.name};
  for (std::size_t c = 0; c < source_.size(); ++c) {
    if (source_[c] >= 0) {
      out.values[c] = u.values[static_cast<std::size_t>(source_[c])];
      continue;
    }
    double s = 0.0;
    for (std::size_t e = row_start_[c]; e < row_start_[c + 1]; ++e) {
      s += entries_[e].second * avg[static_cast<std::size_t>(entries_[e].first)];
    }
    out.values[c] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// export

void write_cubes_csv(const WhitneyDecomposition& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "level,ix,iy,side,cx,cy,dist,neighbors\n";
  for (const auto& q : d.cubes) {
    out << q.level << ',' << q.coords[0] << ',' << q.coords[1] << ',' << q.side << ',' << q.center[0]
        << ',' << q.center[1] << ',' << q.dist_to_boundary << ',' << q.neighbors.size() << '\n';
  }
}

void write_cubes_svg(const WhitneyDecomposition& d, const Grid& grid, const std::string& path) {
  if (d.dim != 2) throw std::invalid_argument("write_cubes_svg: 2-D decompositions only");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const double size = 800.0;
  const double s = size / d.top_side;
  auto X = [&](double x) { return (x - d.box.lo[0]) * s; };
  auto Y = [&](double y) { return (d.box.hi[1] - y) * s; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  out << "<g fill=\"#9ab\" stroke=\"none\">\n";
  const double h = grid.h();
  for (int iy = 0; iy < grid.ny(); ++iy) {
    int ix = 0;
    while (ix < grid.nx()) {
      if (grid.state(ix, iy) != CellState::inside) {
        ++ix;
        continue;
      }
      const int start = ix;
      while (ix < grid.nx() && grid.state(ix, iy) == CellState::inside) ++ix;
      const double x0 = grid.origin()[0] + start * h;
      const double y1 = grid.origin()[1] + (iy + 1) * h;
      out << "<rect x=\"" << X(x0) << "\" y=\"" << Y(y1) << "\" width=\"" << (ix - start) * h * s
          << "\" height=\"" << h * s << "\"/>\n";
    }
  }
  out << "</g>\n<g fill=\"none\" stroke=\"#333\" stroke-width=\"0.5\">\n";
  for (const auto& q : d.cubes) {
    const double x0 = q.center[0] - 0.5 * q.side;
    const double y1 = q.center[1] + 0.5 * q.side;
    out << "<rect x=\"" << X(x0) << "\" y=\"" << Y(y1) << "\" width=\"" << q.side * s << "\" height=\""
        << q.side * s << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

nlohmann::json to_json(const WhitneyDecomposition& d, const WhitneyValidation& v) {
  return {{"cubes", d.cubes.size()},
          {"max_level", d.max_level},
          {"top_side", d.top_side},
          {"discarded", d.discarded},
          {"gamma0", d.gamma0},
          {"distance_violations", v.distance_violations},
          {"ratio_violations", v.ratio_violations},
          {"overlapping_pairs", v.overlapping_pairs},
          {"min_dist_ratio", v.min_dist_ratio},
          {"max_dist_ratio", v.max_dist_ratio}};
}

nlohmann::json to_json(const Reflection& r) {
  return {{"epsilon0", r.epsilon0},
          {"theta", r.theta},
          {"gamma1", r.gamma1},
          {"gamma2", r.gamma2},
          {"overlap_w0", r.overlap_k[0]},
          {"overlap_w1", r.overlap_k[1]},
          {"overlap_w2", r.overlap_k[2]},
          {"small", r.small_count},
          {"enlarged", r.enlarged},
          {"snapped", r.snapped},
          {"within_10Q", r.within_10Q}};
}

}  // namespace fosl
