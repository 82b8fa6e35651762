#pragma once

#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

namespace bsl {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Runs fn(begin, end) over [0, n) split into `threads` contiguous chunks.
/// Chunk boundaries depend only on (n, threads).
template <class F>
void parallel_chunks(std::size_t n, int threads, F&& fn) {
  if (threads <= 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t t = static_cast<std::size_t>(threads);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t b = n * k / t;
    const std::size_t e = n * (k + 1) / t;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace bsl
