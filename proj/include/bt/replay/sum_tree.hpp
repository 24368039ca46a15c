#pragma once

#include <cstddef>
#include <vector>

namespace bt::replay {

/// Binary tree over a fixed number of non-negative leaf values, keeping both
/// subtree sums (for proportional sampling) and subtree maxima.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity = 1);

  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  void set(std::size_t i, double value, double max_key);
  [[nodiscard]] double get(std::size_t i) const { return sum_[base_ + i]; }
  [[nodiscard]] double total() const { return sum_[1]; }
  [[nodiscard]] double max_key() const { return max_[1]; }

  /// Leaf index i with prefix(i) <= mass < prefix(i + 1); mass is clamped
  /// into [0, total). Leaves with value 0 are never returned while the total
  /// is positive.
  [[nodiscard]] std::size_t find(double mass) const;

 private:
  std::size_t capacity_;
  std::size_t base_;
  std::vector<double> sum_;
  std::vector<double> max_;
};

}  // namespace bt::replay
