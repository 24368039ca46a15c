#include "bt/intrinsic/ngu.hpp"

#include <algorithm>

#include "bt/common.hpp"

namespace bt::intrinsic {

void NGUConfig::validate() const {
  if (k < 1) throw ConfigError("intrinsic.k must be >= 1");
  if (L < 1.0) throw ConfigError("intrinsic.L must be >= 1");
  if (!(eps_kernel > 0.0)) throw ConfigError("intrinsic.eps_kernel must be > 0");
  if (c < 0.0) throw ConfigError("intrinsic.c must be >= 0");
  if (xi < 0.0) throw ConfigError("intrinsic.xi must be >= 0");
  if (!(s_m > 0.0)) throw ConfigError("intrinsic.s_m must be > 0");
  if (!(d2m_floor > 0.0)) throw ConfigError("intrinsic.d2m_floor must be > 0");
}

double ngu_multiplier(double alpha, double L) { return std::min(std::max(alpha, 1.0), L); }

double ngu_reward(double r_episodic, double alpha, double L) {
  return r_episodic * ngu_multiplier(alpha, L);
}

}  // namespace bt::intrinsic
