#include "fosl/summation.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace fosl {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double pairwise_sum(std::span<const double> xs) noexcept {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() {
  const unsigned n = g_threads.load();
  if (n != 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

double tiled_reduce(std::size_t tiles, const std::function<double(std::size_t)>& tile) {
  std::vector<double> partial(tiles, 0.0);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), tiles));
  if (workers <= 1) {
    for (std::size_t t = 0; t < tiles; ++t) partial[t] = tile(t);
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t t = next.fetch_add(1); t < tiles; t = next.fetch_add(1)) {
        partial[t] = tile(t);
      }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  return pairwise_sum(partial);
}

}  // namespace fosl
