#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace bt::intrinsic {

/// Exact count-weighted streaming mean and (population) variance.
class RunningStats {
 public:
  void push(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  /// Folds a whole batch in one step (Chan et al. parallel merge). The batch
  /// aggregates are computed over sorted values, so the result does not
  /// depend on the order of `xs`.
  void push_batch(std::span<const double> xs) {
    if (xs.empty()) return;
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double x : sorted) sum += x;
    const auto n = static_cast<double>(sorted.size());
    const double batch_mean = sum / n;
    double batch_m2 = 0.0;
    for (double x : sorted) batch_m2 += (x - batch_mean) * (x - batch_mean);

    const auto total = static_cast<double>(count_) + n;
    const double delta = batch_mean - mean_;
    mean_ += delta * n / total;
    m2_ += batch_m2 + delta * delta * static_cast<double>(count_) * n / total;
    count_ += sorted.size();
  }

  [[nodiscard]] std::uint64_t count() const { return count_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double variance() const {
    return count_ > 0 ? m2_ / static_cast<double>(count_) : 0.0;
  }
  [[nodiscard]] double stddev() const { return std::sqrt(variance()); }

  bool operator==(const RunningStats&) const = default;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace bt::intrinsic
