#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "bt/common.hpp"
#include "bt/explore/frozen_policy.hpp"

namespace bt::explore {

enum class ExploreMode { eps_greedy, ez_greedy_repeat, bt_flights, bt_action, bt_full };

std::string_view to_string(ExploreMode mode);
ExploreMode parse_explore_mode(std::string_view text);

/// True for the modes that act over A+ (the extra action).
bool uses_extra_action(ExploreMode mode);
/// True for the modes that need a pre-trained policy.
bool uses_pretrained(ExploreMode mode);

struct FlightConfig {
  ExploreMode mode = ExploreMode::eps_greedy;
  int n_actions = 0;  // |A|
  double eps = 0.01;
  double eps_levy_min = 1e-4;
  double eps_levy_max = 0.1;
  double zeta_mu = 2.0;  // +inf gives flights of length 1
  int zeta_cap = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ActionChoice {
  ActionId action = 0;     // learning action, in A+
  ActionId primitive = 0;  // executed action, in A
  bool from_pretrained = false;
  bool in_flight = false;
  double behavior_prob = 1.0;  // probability of `action` under the acting rule
};

/// Per-actor exploration state.
///
/// At each step with no flight running, a flight starts with probability
/// eps_levy and lasts n ~ Zeta(mu) steps (truncated to zeta_cap). Flight
/// steps are taken by pi_p (bt modes) or repeat one uniformly drawn action
/// (ez_greedy_repeat) and are stored under the primitive action. Outside
/// flights the controller is eps-greedy over A, or over A+ in the
/// extra-action modes, where a+ is resolved through pi_p.
class FlightController {
 public:
  FlightController() = default;
  explicit FlightController(const FlightConfig& config);

  [[nodiscard]] const FlightConfig& config() const { return config_; }
  [[nodiscard]] double eps_levy() const { return eps_levy_; }
  [[nodiscard]] int n_remaining() const { return n_remaining_; }
  [[nodiscard]] ActionId repeat_action() const { return repeat_action_; }
  /// Test hook.
  void set_n_remaining(int n) { n_remaining_ = n; }

  /// Clears the flight and draws eps_levy log-uniformly on
  /// [eps_levy_min, eps_levy_max).
  void begin_episode();
  [[nodiscard]] int sample_flight_length();
  ActionChoice select_action(const Eigen::Ref<const Eigen::VectorXd>& q, const FrozenPolicy* pi_p,
                             StateId s);

  /// Truncated Zeta pmf P(N = n), n = 1..cap, at index n - 1.
  [[nodiscard]] static std::vector<double> zeta_pmf(double mu, int cap);

 private:
  ActionChoice eps_greedy(const Eigen::Ref<const Eigen::VectorXd>& q, const FrozenPolicy* pi_p,
                          StateId s);

  FlightConfig config_;
  Rng rng_;
  std::vector<double> zeta_cdf_;
  double eps_levy_ = 0.0;
  int n_remaining_ = 0;
  ActionId repeat_action_ = kNoAction;
};

/// eps_i = eps_max^(1 + 7 i / (N - 1)); a single actor gets eps_max.
std::vector<double> epsilon_ladder(int n_actors, double eps_max = 0.4);

}  // namespace bt::explore
