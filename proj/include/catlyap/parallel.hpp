#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>

namespace catlyap {

/// Worker count used by parallel_for. Defaults to $CATLYAP_THREADS, else the
/// hardware concurrency.
int thread_count();
/// n <= 0 restores the default.
void set_thread_count(int n);
int default_thread_count();

/// Calls body(i) for i in [0, n) on the worker pool. Results must be written to
/// per-index slots; the first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Fixed-shape pairwise summation: the result depends only on the input order.
double pairwise_sum(std::span<const double> xs);

struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;     // sample standard deviation (n - 1)
  double std_error = 0.0;  // stddev / sqrt(n)
  std::size_t count = 0;
};

SampleStats sample_stats(std::span<const double> xs);

/// Independent generator for sample `index` of a run seeded with `seed`.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace catlyap
