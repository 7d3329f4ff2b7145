#include "fosl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fosl/summation.hpp"

namespace fosl {

namespace {

constexpr std::size_t kTile = 64;

void require_same_grid(const SampledFunction& u, const SampledFunction& v) {
  if (u.grid != v.grid || u.values.size() != v.values.size()) {
    throw std::invalid_argument("functions live on different grids");
  }
}

std::pair<double, double> value_range(const std::vector<double>& u) {
  if (u.empty()) return {0.0, 0.0};
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  return {*lo, *hi};
}

}  // namespace

SampledFunction sample(std::shared_ptr<const Grid> grid, const std::function<double(const Point&)>& f,
                       std::string name) {
  SampledFunction u{grid, {}, std::move(name)};
  u.values.resize(grid->inside_count());
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    const double v = f(grid->inside_center(k));
    if (!std::isfinite(v)) throw std::invalid_argument("sample: non-finite value for " + u.name);
    u.values[k] = v;
  }
  return u;
}

SampledFunction constant(std::shared_ptr<const Grid> grid, double value, std::string name) {
  const std::size_t n = grid->inside_count();
  return {std::move(grid), std::vector<double>(n, value), std::move(name)};
}

SampledFunction combine(double a, const SampledFunction& u, double b, const SampledFunction& v) {
  require_same_grid(u, v);
  SampledFunction w{u.grid, u.values, u.name + "+" + v.name};
  for (std::size_t k = 0; k < w.values.size(); ++k) w.values[k] = a * u.values[k] + b * v.values[k];
  return w;
}

void write_csv(const SampledFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "cell,x,y,value\n";
  const Grid& g = *u.grid;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    const auto [ix, iy] = g.inside_cell(k);
    const Point c = g.center(ix, iy);
    out << g.cell_index(ix, iy) << ',' << c[0] << ',' << c[1] << ',' << u.values[k] << '\n';
  }
}

SampledFunction read_csv(std::shared_ptr<const Grid> grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  SampledFunction u{grid, std::vector<double>(grid->inside_count(), 0.0), path};
  std::vector<char> seen(u.values.size(), 0);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 4) {
      throw std::runtime_error(path + ":" + std::to_string(row) + ": expected 4 columns");
    }
    const long long cell = std::stoll(fields[0]);
    const double value = std::stod(fields[3]);
    if (cell < 0 || static_cast<std::size_t>(cell) >= grid->cell_count()) {
      throw std::runtime_error(path + ":" + std::to_string(row) + ": cell index out of range");
    }
    const int ix = static_cast<int>(cell % grid->nx());
    const int iy = static_cast<int>(cell / grid->nx());
    const std::int64_t k = grid->inside_ordinal(ix, iy);
    if (k < 0) throw std::runtime_error(path + ":" + std::to_string(row) + ": cell is not inside");
    if (seen[static_cast<std::size_t>(k)]) {
      throw std::runtime_error(path + ":" + std::to_string(row) + ": duplicate cell");
    }
    if (!std::isfinite(value)) throw std::runtime_error(path + ":" + std::to_string(row) + ": bad value");
    seen[static_cast<std::size_t>(k)] = 1;
    u.values[static_cast<std::size_t>(k)] = value;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw std::runtime_error(path + ": not every inside cell has a value");
  }
  return u;
}

// ---------------------------------------------------------------------------
// pair sums

PairSum::PairSum(std::shared_ptr<const Grid> grid, double beta) : grid_(std::move(grid)), beta_(beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("PairSum: beta must be > 0");
  const Grid& g = *grid_;
  const int nx = g.nx();
  const int ny = g.ny();
  const double n = g.dim();
  wx_ = 2 * nx - 1;
  weights_.assign(static_cast<std::size_t>(ny) * static_cast<std::size_t>(wx_), 0.0);
  const double scale = 2.0 * std::pow(g.h(), n - beta);
  const double e = -0.5 * (n + beta);
  for (int dy = 0; dy < ny; ++dy) {
    for (int dx = -(nx - 1); dx <= nx - 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const double r2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
      weights_[static_cast<std::size_t>(dy) * wx_ + static_cast<std::size_t>(dx + nx - 1)] =
          scale * std::pow(r2, e);
    }
  }
  run_of_cell_.resize(g.inside_count());
  for (std::size_t k = 0; k < g.inside_count(); ++k) {
    const auto [ix, iy] = g.inside_cell(k);
    if (!runs_.empty()) {
      Run& r = runs_.back();
      if (r.iy == iy && r.ix1 + 1 == ix) {
        r.ix1 = ix;
        run_of_cell_[k] = runs_.size() - 1;
        continue;
      }
    }
    runs_.push_back({iy, ix, ix, k});
    run_of_cell_[k] = runs_.size() - 1;
  }
}

template <class Kernel>
double PairSum::reduce(const std::vector<double>& u, const Kernel& kern) const {
  const std::size_t N = u.size();
  if (N != grid_->inside_count()) throw std::invalid_argument("PairSum: value count mismatch");
  if (N < 2) return 0.0;
  const int nx = grid_->nx();
  const std::size_t tiles = (N + kTile - 1) / kTile;
  const double* vals = u.data();
  return tiled_reduce(tiles, [&](std::size_t t) {
    CompensatedSum tile_sum;
    const std::size_t end = std::min(N, (t + 1) * kTile);
    for (std::size_t i = t * kTile; i < end; ++i) {
      const auto [xi, yi] = grid_->inside_cell(i);
      const double ui = vals[i];
      double acc[4] = {0.0, 0.0, 0.0, 0.0};
      const std::size_t first_run = run_of_cell_[i];
      for (std::size_t r = first_run; r < runs_.size(); ++r) {
        const Run& run = runs_[r];
        int ix0 = run.ix0;
        std::size_t off = run.offset;
        if (r == first_run) {
          ix0 = xi + 1;
          off = i + 1;
          if (ix0 > run.ix1) continue;
        }
        const double* w = weights_.data() + static_cast<std::size_t>(run.iy - yi) * wx_ +
                          static_cast<std::size_t>(ix0 - xi + nx - 1);
        const double* v = vals + off;
        const int len = run.ix1 - ix0 + 1;
        int k = 0;
        for (; k + 4 <= len; k += 4) {
          acc[0] += w[k] * kern(ui - v[k]);
          acc[1] += w[k + 1] * kern(ui - v[k + 1]);
          acc[2] += w[k + 2] * kern(ui - v[k + 2]);
          acc[3] += w[k + 3] * kern(ui - v[k + 3]);
        }
        for (; k < len; ++k) acc[0] += w[k] * kern(ui - v[k]);
      }
      tile_sum.add((acc[0] + acc[1]) + (acc[2] + acc[3]));
    }
    return tile_sum.value();
  });
}

double PairSum::power_sum(const std::vector<double>& u, double p) const {
  if (p == 1.0) return reduce(u, [](double d) { return std::abs(d); });
  if (p == 2.0) return reduce(u, [](double d) { return d * d; });
  if (p == 3.0) return reduce(u, [](double d) { const double a = std::abs(d); return a * a * a; });
  if (p == 4.0) return reduce(u, [](double d) { const double s = d * d; return s * s; });
  return reduce(u, [p](double d) { return std::pow(std::abs(d), p); });
}

double PairSum::modular(const std::vector<double>& u, const YoungFunction& phi, double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("modular: lambda must be > 0");
  if (const auto p = phi.pure_power()) return power_sum(u, *p) * std::pow(lambda, -*p);
  const double inv = 1.0 / lambda;
  return reduce(u, [&phi, inv](double d) { return phi.eval(std::abs(d) * inv); });
}

double seminorm_modular(const SampledFunction& u, const YoungFunction& phi, double beta, double lambda) {
  return PairSum(u.grid, beta).modular(u.values, phi, lambda);
}

namespace {

double slope_hint(const YoungFunction& phi) {
  if (const auto p = phi.pure_power()) return *p;
  return phi.log_slope_at_one();
}

}  // namespace

double luxemburg_seminorm(const PairSum& engine, const std::vector<double>& u, const YoungFunction& phi) {
  const auto [lo, hi] = value_range(u);
  if (!(hi > lo)) return 0.0;
  std::function<double(double)> m;
  if (const auto p = phi.pure_power()) {
    // homogeneous: one sweep, then M(lambda) = S lambda^{-p}
    const double s = engine.power_sum(u, *p);
    const double e = *p;
    m = [s, e](double lambda) { return s * std::pow(lambda, -e); };
  } else {
    m = [&](double lambda) { return engine.modular(u, phi, lambda); };
  }
  return luxemburg_root(m, hi - lo, slope_hint(phi)).lambda;
}

NormResult luxemburg_seminorm_detail(const SampledFunction& u, const YoungFunction& phi, double beta) {
  const auto [lo, hi] = value_range(u.values);
  if (!(hi > lo)) return {0.0, 0};
  const PairSum engine(u.grid, beta);
  const auto root = luxemburg_root(
      [&](double lambda) { return engine.modular(u.values, phi, lambda); }, hi - lo, slope_hint(phi));
  return {root.lambda, root.evaluations};
}

double luxemburg_seminorm(const SampledFunction& u, const YoungFunction& phi, double beta) {
  return luxemburg_seminorm(PairSum(u.grid, beta), u.values, phi);
}

double orlicz_norm(const Grid& grid, const std::vector<double>& u, const YoungFunction& psi) {
  double amax = 0.0;
  for (double v : u) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) return 0.0;
  const double hn = grid.cell_measure();
  const std::size_t tiles = (u.size() + kTile - 1) / kTile;
  auto raw = [&](auto&& kern) {
    return tiled_reduce(tiles, [&](std::size_t t) {
      CompensatedSum s;
      const std::size_t end = std::min(u.size(), (t + 1) * kTile);
      for (std::size_t i = t * kTile; i < end; ++i) s.add(kern(std::abs(u[i])));
      return s.value();
    });
  };
  std::function<double(double)> m;
  if (const auto p = psi.pure_power()) {
    const double e = *p;
    const double s = raw([e](double a) { return std::pow(a, e); }) * hn;
    m = [s, e](double lambda) { return s * std::pow(lambda, -e); };
  } else {
    m = [&](double lambda) {
      const double inv = 1.0 / lambda;
      return raw([&](double a) { return psi.eval(a * inv); }) * hn;
    };
  }
  return luxemburg_root(m, amax, slope_hint(psi)).lambda;
}

double orlicz_norm(const SampledFunction& u, const YoungFunction& psi) {
  return orlicz_norm(*u.grid, u.values, psi);
}

CenteredNorm inf_centered_norm(const SampledFunction& u, const YoungFunction& psi) {
  const auto [lo, hi] = value_range(u.values);
  if (!(hi > lo)) return {lo, 0.0};
  std::vector<double> shifted(u.values.size());
  auto f = [&](double c) {
    for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] = u.values[k] - c;
    return orlicz_norm(*u.grid, shifted, psi);
  };
  const double c = golden_minimize(f, lo, hi, 1e-6 * (hi - lo));
  return {c, f(c)};
}

ModularCurve modular_curve(const SampledFunction& u, const YoungFunction& phi, double beta, double lo,
                           double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) throw std::invalid_argument("modular_curve: bad range");
  const PairSum engine(u.grid, beta);
  ModularCurve c;
  for (int i = 0; i < points; ++i) {
    const double lambda = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    c.lambda.push_back(lambda);
    c.modular.push_back(engine.modular(u.values, phi, lambda));
    if (i > 0) {
      const double prev = c.modular[c.modular.size() - 2];
      const double cur = c.modular.back();
      if (cur > prev || (prev > 0.0 && !(cur < prev))) c.nonincreasing = false;
    }
  }
  return c;
}

void write_csv(const ModularCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "lambda,modular\n";
  for (std::size_t i = 0; i < curve.lambda.size(); ++i) {
    out << curve.lambda[i] << ',' << curve.modular[i] << '\n';
  }
}

namespace {

std::vector<double> region_values(const SampledFunction& u, const Region& region) {
  std::vector<double> out;
  out.reserve(u.values.size());
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    if (!region || region(u.grid->inside_center(k))) out.push_back(u.values[k]);
  }
  if (out.empty()) throw std::invalid_argument("region contains no inside cell");
  return out;
}

}  // namespace

double average(const SampledFunction& u, const Region& region) {
  const auto v = region_values(u, region);
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

double median(const SampledFunction& u, const Region& region) {
  auto v = region_values(u, region);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return v[n - 1 - n / 2];
}

SampledFunction truncate(const SampledFunction& u, double N) {
  if (!(N > 0.0)) throw std::invalid_argument("truncate: N must be > 0");
  SampledFunction out{u.grid, u.values, u.name + "_N"};
  for (double& v : out.values) v = std::clamp(v, -N, N);
  return out;
}

}  // namespace fosl
