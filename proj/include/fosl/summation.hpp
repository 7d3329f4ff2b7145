#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fosl {

/// Neumaier-compensated running sum. Order-dependent but reproducible for a
/// fixed order of additions.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Recursive pairwise summation; the split points depend only on the length.
double pairwise_sum(std::span<const double> xs) noexcept;

/// Number of worker threads used by the tiled reductions. 0 selects
/// std::thread::hardware_concurrency().
void set_thread_count(unsigned n);
unsigned thread_count();

/// Evaluates `tile(t)` for every t in [0, tiles) on the worker pool and returns
/// the pairwise sum of the per-tile results in tile order. The result does not
/// depend on the number of workers.
double tiled_reduce(std::size_t tiles, const std::function<double(std::size_t)>& tile);

/// 53-bit uniform double in [0, 1) from a raw 64-bit draw; portable across
/// standard libraries, unlike std::uniform_real_distribution.
inline double unit_uniform(std::uint64_t raw) noexcept {
  return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

}  // namespace fosl
