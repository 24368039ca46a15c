#include "bt/replay/sum_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace bt::replay {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity), base_(1) {
  if (capacity == 0) throw std::invalid_argument("SumTree capacity must be positive");
  while (base_ < capacity) base_ <<= 1;
  sum_.assign(2 * base_, 0.0);
  max_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t i, double value, double max_key) {
  std::size_t node = base_ + i;
  sum_[node] = value;
  max_[node] = max_key;
  for (node >>= 1; node >= 1; node >>= 1) {
    sum_[node] = sum_[2 * node] + sum_[2 * node + 1];
    max_[node] = std::max(max_[2 * node], max_[2 * node + 1]);
  }
}

std::size_t SumTree::find(double mass) const {
  mass = std::clamp(mass, 0.0, total());
  std::size_t node = 1;
  while (node < base_) {
    const std::size_t left = 2 * node;
    // Descend right when the left subtree cannot hold the mass or is empty.
    if (mass < sum_[left] || sum_[left + 1] <= 0.0) {
      node = left;
    } else {
      mass -= sum_[left];
      node = left + 1;
    }
  }
  std::size_t leaf = node - base_;
  // Guard against round-off landing on an empty leaf.
  if (sum_[node] <= 0.0 && total() > 0.0) {
    for (std::size_t j = 0; j < capacity_; ++j) {
      const std::size_t k = (leaf + capacity_ - 1 - j) % capacity_;
      if (sum_[base_ + k] > 0.0) return k;
    }
  }
  return std::min(leaf, capacity_ - 1);
}

}  // namespace bt::replay
