#pragma once

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fosl/geometry.hpp"
#include "fosl/norms.hpp"

namespace fosl {

struct WhitneyCube {
  int level = 0;
  std::array<int, 2> coords{0, 0};  // integer position at its level
  double side = 0.0;
  Point center{0.0, 0.0};
  double dist_to_boundary = 0.0;  // min of sdist over sampled cube boundary points
  std::vector<int> neighbors;     // touching cubes, excluding itself
};

/// Dyadic decomposition of (truncation box) \ closure(Omega).
struct WhitneyDecomposition {
  std::shared_ptr<const Domain> domain;
  int dim = 2;
  Box box;                // truncation box (a cube of side top_side)
  double top_side = 0.0;
  int max_level = 0;
  std::vector<WhitneyCube> cubes;
  std::size_t discarded = 0;  // unresolved cubes dropped at max_level
  std::size_t gamma0 = 0;     // max |N(Q)|, Q included

  /// Finest-level lattice: 2^max_level cells per axis; owner index or -1.
  int finest_count() const { return 1 << max_level; }
  double finest_side() const { return top_side / finest_count(); }
  std::vector<int> owner;
  int owner_at(int fx, int fy) const;
  /// Finest cell containing x (may be outside the lattice range).
  std::array<int, 2> finest_cell(const Point& x) const;
  /// Integer extent [lo, hi) of a cube in finest units, per axis.
  std::array<int, 4> finest_extent(const WhitneyCube& q) const;
};

/// Truncation box: a cube of side three times the longest bbox extent, centred
/// on the bbox and snapped to the grid lattice. For the half-plane (infinite
/// diam) it is the window's own extent, centred on the boundary.
Box truncation_box(const Grid& grid);

/// Top-down dyadic subdivision of the truncation box. A cube is accepted once
///   sdist(center) - sqrt(n) l / 2 >= sqrt(n) l,
/// dropped when it lies inside Omega, and discarded (counted) when still
/// unresolved at max_level. max_level keeps the smallest cube >= 2 grid cells.
WhitneyDecomposition whitney_decompose(const Grid& grid);

struct WhitneyValidation {
  std::size_t distance_violations = 0;
  std::size_t ratio_violations = 0;    // touching pairs with level gap > 2
  std::size_t overlapping_pairs = 0;   // interiors intersect
  std::size_t pairs_checked = 0;
  double min_dist_ratio = 0.0;         // min dist / (sqrt(n) l)
  double max_dist_ratio = 0.0;         // max dist / (sqrt(n) l)
  bool ok() const { return distance_violations == 0 && ratio_violations == 0 && overlapping_pairs == 0; }
};

/// Exhaustive checks: two-sided distance bound, neighbor level ratio and
/// pairwise interior disjointness.
WhitneyValidation validate(const WhitneyDecomposition& d);

/// Weighted set of inside cells: weight = fraction of the cell covered.
struct ReflectedCube {
  enum class Mode { small, large };
  Mode mode = Mode::small;
  Point anchor{0.0, 0.0};  // x*_Q
  Box region;              // the cube Q* before intersecting with Omega (small mode)
  std::vector<std::pair<std::size_t, double>> cells;  // (inside ordinal, weight)
  double measure = 0.0;    // sum of weights * h^n
  int enlargements = 0;
  bool snapped = false;
  bool inside_10Q = true;
};

struct Reflection {
  double epsilon0 = 0.0;
  double theta = 0.0;
  std::vector<ReflectedCube> table;  // one per cube
  double gamma1 = 0.0;               // max |Q| / |Q*|
  std::size_t gamma2 = 0;            // max_x sum_Q chi_{Q*}(x)
  std::array<std::size_t, 3> overlap_k{0, 0, 0};  // same, over W^(k), k = 0, 1, 2
  std::size_t small_count = 0;
  std::size_t enlarged = 0;
  std::size_t snapped = 0;
  std::size_t within_10Q = 0;
};

/// Reflected regions Q* = cube(x*_Q, eps0 l_Q) ∩ Omega_h for l_Q < diam/eps0,
/// Q* = Omega_h otherwise, with eps0 = (theta/(2 gamma0))^{1/n} / (30 sqrt n).
/// An empty Q* is enlarged by 2 up to twice, then re-anchored at the nearest
/// discrete boundary cell. Throws std::invalid_argument when theta <= 0.
Reflection reflect(const WhitneyDecomposition& d, const Grid& grid, double theta);

/// Smooth cutoff: 1 on [-1/2, 1/2], 0 outside [-17/32, 17/32].
double cutoff_rho(double s);

class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(const WhitneyDecomposition& d);

  /// Sum of all bumps b_Q(x).
  double bump_sum(const Point& x) const;
  /// (cube, phi_Q(x)) for every cube with phi_Q(x) > 0; empty when uncovered.
  std::vector<std::pair<int, double>> weights(const Point& x) const;
  double phi(int cube, const Point& x) const;

  /// max l_Q |grad phi_Q| by central differences on points across every
  /// transition layer.
  double measure_L() const;

  const WhitneyDecomposition& decomposition() const { return *d_; }

 private:
  double bump(int cube, const Point& x) const;
  std::vector<int> candidates(const Point& x) const;
  const WhitneyDecomposition* d_;
};

/// E u = u on Omega, sum_Q phi_Q u_{Q*} on covered complement cells, 0 on the
/// remaining cells, evaluated on the truncation-box grid.
class ExtensionOperator {
 public:
  ExtensionOperator(std::shared_ptr<const Grid> grid, double theta);
  ExtensionOperator(const ExtensionOperator&) = delete;
  ExtensionOperator& operator=(const ExtensionOperator&) = delete;

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> box_grid() const { return box_grid_; }
  const WhitneyDecomposition& decomposition() const { return decomp_; }
  const Reflection& reflection() const { return reflection_; }
  const PartitionOfUnity& partition() const { return *pou_; }

  /// u_{Q*} for every cube.
  std::vector<double> averages(const SampledFunction& u) const;
  SampledFunction extend(const SampledFunction& u) const;

  std::size_t covered_cells() const { return covered_; }
  std::size_t uncovered_cells() const { return uncovered_; }

 private:
  std::shared_ptr<const Grid> grid_;
  WhitneyDecomposition decomp_;
  Reflection reflection_;
  std::unique_ptr<PartitionOfUnity> pou_;
  std::shared_ptr<const Grid> box_grid_;
  // box cell -> inside ordinal of the domain grid, or -1
  std::vector<std::int64_t> source_;
  // CSR weights per box cell
  std::vector<std::size_t> row_start_;
  std::vector<std::pair<int, double>> entries_;
  std::size_t covered_ = 0;
  std::size_t uncovered_ = 0;
};

/// CSV columns: level,ix,iy,side,cx,cy,dist,neighbors.
void write_cubes_csv(const WhitneyDecomposition& d, const std::string& path);
/// SVG overlay of the cubes over the inside cells of `grid` (2-D only).
void write_cubes_svg(const WhitneyDecomposition& d, const Grid& grid, const std::string& path);
nlohmann::json to_json(const WhitneyDecomposition& d, const WhitneyValidation& v);
nlohmann::json to_json(const Reflection& r);

}  // namespace fosl
