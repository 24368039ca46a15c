#pragma once

namespace bt::intrinsic {

/// Constants of the episodic novelty reward and its life-long modulation.
struct NGUConfig {
  int k = 10;                // nearest neighbours
  double c = 0.001;          // pseudo-count constant
  double eps_kernel = 0.001; // kernel epsilon
  double xi = 0.008;         // cluster distance
  double s_m = 8.0;          // maximum similarity
  double L = 5.0;            // maximum reward scaling
  double d2m_floor = 1e-9;   // below this running mean, distances normalize to 0

  /// Throws ConfigError when k < 1, L < 1, eps_kernel <= 0, c < 0, xi < 0,
  /// s_m <= 0 or d2m_floor <= 0.
  void validate() const;
};

/// r_epi * min(max(alpha, 1), L).
double ngu_reward(double r_episodic, double alpha, double L);

/// The multiplier min(max(alpha, 1), L) alone.
double ngu_multiplier(double alpha, double L);

}  // namespace bt::intrinsic
