#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fosl/geometry.hpp"
#include "fosl/root_finding.hpp"
#include "fosl/young.hpp"

namespace fosl {

/// Cell values of u on the inside cells of a grid (inside-ordinal order).
struct SampledFunction {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;
  std::string name;

  std::size_t size() const { return values.size(); }
};

/// Samples f at the inside cell centers. Throws if f returns a non-finite value.
SampledFunction sample(std::shared_ptr<const Grid> grid, const std::function<double(const Point&)>& f,
                       std::string name = "u");

/// Constant function on the inside cells.
SampledFunction constant(std::shared_ptr<const Grid> grid, double value, std::string name = "const");

/// a*u + b*v on a common grid.
SampledFunction combine(double a, const SampledFunction& u, double b, const SampledFunction& v);

/// CSV with header `cell,x,y,value`; cell is the row-major grid index.
void write_csv(const SampledFunction& u, const std::string& path);
/// Reads the format written by write_csv onto `grid`. Every inside cell must
/// appear exactly once; rows for non-inside cells are rejected.
SampledFunction read_csv(std::shared_ptr<const Grid> grid, const std::string& path);

/// Pair-sum engine for one (grid, beta): the kernel weights
///   w(dx, dy) = 2 h^{2n} / |x - y|^{n+beta}
/// are tabulated by integer cell offset, and inside cells are walked as
/// contiguous row runs. Summation is tiled over the first index with a fixed
/// tile size and combined pairwise, so results are independent of the thread
/// count.
class PairSum {
 public:
  PairSum(std::shared_ptr<const Grid> grid, double beta);

  /// sum_{i<j} w_ij phi(|u_i - u_j| / lambda).
  double modular(const std::vector<double>& u, const YoungFunction& phi, double lambda) const;
  /// sum_{i<j} w_ij |u_i - u_j|^p.
  double power_sum(const std::vector<double>& u, double p) const;

  const Grid& grid() const { return *grid_; }
  double beta() const { return beta_; }

 private:
  template <class Kernel>
  double reduce(const std::vector<double>& u, const Kernel& k) const;

  struct Run {
    int iy;
    int ix0;
    int ix1;  // inclusive
    std::size_t offset;
  };

  std::shared_ptr<const Grid> grid_;
  double beta_;
  int wx_ = 0;  // weights per row, 2 nx - 1
  std::vector<double> weights_;  // [dy][dx + nx - 1]
  std::vector<Run> runs_;
  std::vector<std::size_t> run_of_cell_;  // inside ordinal -> run index
};

/// Discrete modular sum_{i<j} 2 phi(|u_i - u_j|/lambda) h^{2n} / |x_i - x_j|^{n+beta}.
double seminorm_modular(const SampledFunction& u, const YoungFunction& phi, double beta,
                        double lambda);

struct NormResult {
  double value = 0.0;
  int evaluations = 0;
};

/// Luxemburg seminorm inf{lambda : modular(lambda) <= 1}, 1e-8 relative on
/// lambda. Returns 0 for constant u.
NormResult luxemburg_seminorm_detail(const SampledFunction& u, const YoungFunction& phi, double beta);
double luxemburg_seminorm(const SampledFunction& u, const YoungFunction& phi, double beta);
/// Same, reusing a prepared pair-sum engine.
double luxemburg_seminorm(const PairSum& engine, const std::vector<double>& u, const YoungFunction& phi);

/// Luxemburg norm of sum_i psi(|u_i|/lambda) h^n <= 1.
double orlicz_norm(const SampledFunction& u, const YoungFunction& psi);
double orlicz_norm(const Grid& grid, const std::vector<double>& u, const YoungFunction& psi);

struct CenteredNorm {
  double c = 0.0;
  double norm = 0.0;
};

/// min over c of orlicz_norm(u - c), golden section on [min u, max u] to
/// 1e-6 (max u - min u).
CenteredNorm inf_centered_norm(const SampledFunction& u, const YoungFunction& psi);

/// Sampled modular curve lambda -> modular(lambda).
struct ModularCurve {
  std::vector<double> lambda;
  std::vector<double> modular;
  bool nonincreasing = true;
};

/// Log-spaced lambdas in [lo, hi].
ModularCurve modular_curve(const SampledFunction& u, const YoungFunction& phi, double beta,
                           double lo, double hi, int points);
void write_csv(const ModularCurve& curve, const std::string& path);

using Region = std::function<bool(const Point&)>;

/// Cell mean over inside cells whose center satisfies region (all when empty).
double average(const SampledFunction& u, const Region& region = {});
/// inf{c : |{u > c}| <= |region|/2} in cell-counting measure. Throws on an
/// empty region.
double median(const SampledFunction& u, const Region& region = {});

/// Pointwise clamp to [-N, N]; N > 0.
SampledFunction truncate(const SampledFunction& u, double N);

}  // namespace fosl
