#include "bt/intrinsic/episodic_memory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bt/common.hpp"

namespace bt::intrinsic {

void EpisodicMemory::add(std::span<const double> embedding) {
  if (dim_ == 0) dim_ = static_cast<int>(embedding.size());
  if (static_cast<int>(embedding.size()) != dim_) {
    throw ValidationError("episodic memory: embedding has dimension " +
                          std::to_string(embedding.size()) + ", expected " + std::to_string(dim_));
  }
  data_.insert(data_.end(), embedding.begin(), embedding.end());
}

std::vector<double> EpisodicMemory::nearest_sq_distances(std::span<const double> query, int k) const {
  const std::size_t n = size();
  if (n > 0 && static_cast<int>(query.size()) != dim_) {
    throw ValidationError("episodic memory: query has dimension " + std::to_string(query.size()) +
                          ", expected " + std::to_string(dim_));
  }
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = data_.data() + i * dim_;
    double acc = 0.0;
    for (int j = 0; j < dim_; ++j) {
      const double diff = row[j] - query[j];
      acc += diff * diff;
    }
    dist[i] = acc;
  }
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), n);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  dist.resize(kk);
  return dist;
}

double episodic_reward(EpisodicMemory& memory, std::span<const double> embedding,
                       const NGUConfig& cfg) {
  std::vector<double> d = memory.nearest_sq_distances(embedding, cfg.k);
  if (d.empty()) {
    return cfg.c > 0.0 ? 1.0 / cfg.c : 1.0 / cfg.eps_kernel;
  }
  memory.fold_distances(d);
  const double d2m = memory.d2_running_mean();
  double kernel_sum = 0.0;
  for (double dk : d) {
    double dn = d2m < cfg.d2m_floor ? 0.0 : dk / d2m;
    dn = std::max(dn - cfg.xi, 0.0);
    kernel_sum += cfg.eps_kernel / (dn + cfg.eps_kernel);
  }
  const double s = std::sqrt(kernel_sum) + cfg.c;
  if (s > cfg.s_m) return 0.0;
  return 1.0 / s;
}

}  // namespace bt::intrinsic
