#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fosl/young.hpp"

namespace fosl {

/// A point of R^n, n in {1, 2}; the second coordinate is 0 when n = 1.
using Point = std::array<double, 2>;

struct Box {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};

  double extent(int axis) const { return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]; }
  Point center() const { return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])}; }
};

double distance(const Point& a, const Point& b);

/// Open region of R^n with an indicator and a signed distance (negative inside).
class Domain {
 public:
  Domain(std::string name, int dim, Params params, std::function<double(const Point&)> sdist,
         Box bbox, double diam, bool ahlfors_regular);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Params& params() const { return params_; }
  bool inside(const Point& x) const { return sdist_(x) < 0.0; }
  double sdist(const Point& x) const { return sdist_(x); }
  const Box& bbox() const { return bbox_; }
  /// Analytic diameter; +inf for the half-plane.
  double diam() const { return diam_; }
  /// Whether the shape is Ahlfors n-regular (every catalog shape except the cusp).
  bool ahlfors_regular() const { return ahlfors_regular_; }

  /// Nearest boundary point by a gradient step on the signed distance.
  Point project_to_boundary(const Point& x) const;

 private:
  std::string name_;
  int dim_;
  Params params_;
  std::function<double(const Point&)> sdist_;
  Box bbox_;
  double diam_;
  bool ahlfors_regular_;
};

/// Catalog shapes (parameters and defaults):
///   interval            a (0), b (1)                               n = 1
///   disk                cx (0), cy (0), radius (1)                 n = 2
///   square              x0 (0), y0 (0), side (1)                   n = 2
///   annulus             cx (0), cy (0), r_in (0.5), r_out (1)      n = 2
///   cusp                s (2): {0 < x < 1, |y| < x^s}              n = 2
///   halfplane_truncated L (1): {x < 0}, window [-L,0]x[-L,L]        n = 2
/// Throws std::invalid_argument for unknown shapes, unknown keys or invalid
/// parameters (e.g. cusp exponent s <= 1).
Domain make_domain(std::string_view name, const Params& params);

/// Axis-aligned square region; used as the "domain" of an extended field.
Domain make_box_domain(const Box& box, int dim);

const std::vector<std::string>& domain_names();

enum class CellState : std::uint8_t { inside, outside, boundary };

/// Uniform cell decomposition of a box with square cells of side h. A cell is
/// `inside` iff its center lies in the domain, `boundary` if its center is
/// outside but within half a cell diagonal of the boundary, `outside` otherwise.
class Grid {
 public:
  /// `resolution` cells along the longest side of `box` (domain bbox by default).
  Grid(const Domain& domain, int resolution);
  Grid(const Domain& domain, int nx, int ny, double h, Point origin);

  const Domain& domain() const { return *domain_; }
  std::shared_ptr<const Domain> domain_ptr() const { return domain_; }
  int dim() const { return domain_->dim(); }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  double cell_measure() const { return cell_measure_; }
  const Point& origin() const { return origin_; }
  Box box() const;

  std::size_t cell_count() const { return state_.size(); }
  std::size_t cell_index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ix);
  }
  Point center(int ix, int iy) const;
  CellState state(int ix, int iy) const { return state_[cell_index(ix, iy)]; }

  /// Inside cells in row-major order.
  std::size_t inside_count() const { return inside_.size(); }
  std::array<int, 2> inside_cell(std::size_t k) const { return inside_[k]; }
  Point inside_center(std::size_t k) const { return center(inside_[k][0], inside_[k][1]); }
  /// Inside-cell ordinal of (ix, iy), or -1.
  std::int64_t inside_ordinal(int ix, int iy) const { return ordinal_[cell_index(ix, iy)]; }
  /// Cell containing x (clamped to the grid), as (ix, iy).
  std::array<int, 2> locate(const Point& x) const;

 private:
  void classify();

  std::shared_ptr<const Domain> domain_;
  int nx_ = 0;
  int ny_ = 0;
  double h_ = 0.0;
  double cell_measure_ = 0.0;
  Point origin_{0.0, 0.0};
  std::vector<CellState> state_;
  std::vector<std::array<int, 2>> inside_;
  std::vector<std::int64_t> ordinal_;
};

/// h^n * #{inside cells whose center satisfies `region`}. Error O(h * perimeter).
double region_measure(const Grid& grid, const std::function<bool(const Point&)>& region);

/// |B(x, r) ∩ Ω_h| where Ω_h is the union of inside cells; cells cut by the
/// sphere are resolved on a 16^n sub-lattice. Continuous enough in r for
/// bisection, exact up to O(h^n / 256) per cut cell.
double ball_measure(const Grid& grid, const Point& x, double r);

/// Number of inside cells whose center lies in B(x, r).
std::size_t ball_cell_count(const Grid& grid, const Point& x, double r);

struct AhlforsRow {
  double r = 0.0;
  double min_ratio = 0.0;
  Point argmin{0.0, 0.0};
};

/// Empirical Ahlfors constant min_{x, r} |B(x,r) ∩ Ω| / r^n.
struct AhlforsReport {
  double theta_hat = 0.0;
  std::vector<AhlforsRow> rows;
  std::size_t sample_count = 0;
};

AhlforsReport ahlfors_theta(const Grid& grid, const std::vector<Point>& samples,
                            const std::vector<double>& radii);

/// Boundary-layer inside cells plus an every-k-th thinning of the rest.
std::vector<Point> default_ahlfors_samples(const Grid& grid, std::size_t interior_count = 64);
/// Log-spaced radii from 4h up to just below min(2 diam, 2 * bbox extent).
std::vector<double> default_ahlfors_radii(const Grid& grid, int count = 12);

/// Radii factors b_0 = 1 > b_1 > ... > b_jmax with
/// |B(x, b_j t) ∩ Ω| = 2^{-j} |B(x, t) ∩ Ω| to 1% relative. Throws
/// std::runtime_error when a target ball holds fewer than 32 cells.
std::vector<double> halving_radii(const Grid& grid, const Point& x, double t, int j_max);

void write_ahlfors_csv(const AhlforsReport& report, const std::string& path);
nlohmann::json to_json(const AhlforsReport& report);

}  // namespace fosl
