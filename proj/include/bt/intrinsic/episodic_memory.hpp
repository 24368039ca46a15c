#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bt/intrinsic/ngu.hpp"
#include "bt/intrinsic/running_stats.hpp"

namespace bt::intrinsic {

/// Per-episode store of embeddings plus the running mean of k-NN squared
/// distances. The embeddings are cleared at every episode start; the
/// running mean persists for the lifetime of the memory.
class EpisodicMemory {
 public:
  explicit EpisodicMemory(int dim = 0) : dim_(dim) {}

  void reset_episode() { data_.clear(); }
  void add(std::span<const double> embedding);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return dim_ > 0 ? data_.size() / dim_ : 0; }
  [[nodiscard]] bool empty() const { return data_.empty(); }
  [[nodiscard]] std::span<const double> entry(std::size_t i) const {
    return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  /// Squared Euclidean distances to the min(k, size) nearest entries,
  /// ascending.
  [[nodiscard]] std::vector<double> nearest_sq_distances(std::span<const double> query, int k) const;

  [[nodiscard]] double d2_running_mean() const { return d2_.mean(); }
  [[nodiscard]] std::uint64_t count_updates() const { return d2_.count(); }
  void fold_distances(std::span<const double> sq_distances) {
    for (double d : sq_distances) d2_.push(d);
  }

 private:
  int dim_;
  std::vector<double> data_;
  RunningStats d2_;
};

/// Episodic novelty of `embedding` against the memory (kernel pseudo-count
/// reward). Updates the running mean of neighbour distances but does not
/// append the query; the caller adds it afterwards.
///
///   d_k    <- squared distances of the k nearest neighbours
///   d2_m   <- running mean updated with d_k
///   d_n    <- d_k / d2_m           (all zero when d2_m < d2m_floor)
///   d_n    <- max(d_n - xi, 0)
///   K_v    <- eps / (d_n + eps)
///   s      <- sqrt(sum K_v) + c
///   reward <- 0 if s > s_m else 1 / s
///
/// With an empty memory the sum is zero, so the reward is 1 / c; when c is
/// also zero the reward is capped at 1 / eps_kernel.
double episodic_reward(EpisodicMemory& memory, std::span<const double> embedding,
                       const NGUConfig& cfg);

}  // namespace bt::intrinsic
