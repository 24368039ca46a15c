#include "bt/explore/flight_controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bt/learner/q_function.hpp"

namespace bt::explore {

std::string_view to_string(ExploreMode mode) {
  switch (mode) {
    case ExploreMode::eps_greedy: return "eps_greedy";
    case ExploreMode::ez_greedy_repeat: return "ez_greedy_repeat";
    case ExploreMode::bt_flights: return "bt_flights";
    case ExploreMode::bt_action: return "bt_action";
    case ExploreMode::bt_full: return "bt_full";
  }
  return "?";
}

ExploreMode parse_explore_mode(std::string_view text) {
  if (text == "eps_greedy") return ExploreMode::eps_greedy;
  if (text == "ez_greedy_repeat") return ExploreMode::ez_greedy_repeat;
  if (text == "bt_flights") return ExploreMode::bt_flights;
  if (text == "bt_action") return ExploreMode::bt_action;
  if (text == "bt_full") return ExploreMode::bt_full;
  throw ConfigError("unknown explore.mode '" + std::string(text) + "'");
}

bool uses_extra_action(ExploreMode mode) {
  return mode == ExploreMode::bt_action || mode == ExploreMode::bt_full;
}

bool uses_pretrained(ExploreMode mode) {
  return mode == ExploreMode::bt_flights || mode == ExploreMode::bt_action ||
         mode == ExploreMode::bt_full;
}

void FlightConfig::validate() const {
  if (n_actions < 1) throw ConfigError("explore: the action set is empty");
  if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("explore.eps must be in [0, 1]");
  if (!(eps_levy_min > 0.0 && eps_levy_min <= eps_levy_max && eps_levy_max <= 1.0)) {
    throw ConfigError("explore.eps_levy_min/max must satisfy 0 < min <= max <= 1");
  }
  if (!(zeta_mu > 1.0)) throw ConfigError("explore.zeta_mu must be > 1");
  if (zeta_cap < 1) throw ConfigError("explore.zeta_cap must be >= 1");
}

std::vector<double> FlightController::zeta_pmf(double mu, int cap) {
  std::vector<double> pmf(static_cast<std::size_t>(cap));
  if (std::isinf(mu)) {
    pmf[0] = 1.0;
    return pmf;
  }
  double z = 0.0;
  // Sum smallest terms first for accuracy.
  for (int n = cap; n >= 1; --n) z += std::pow(static_cast<double>(n), -mu);
  for (int n = 1; n <= cap; ++n) pmf[static_cast<std::size_t>(n - 1)] = std::pow(static_cast<double>(n), -mu) / z;
  return pmf;
}

FlightController::FlightController(const FlightConfig& config) : config_(config), rng_(config.seed) {
  config_.validate();
  const auto pmf = zeta_pmf(config_.zeta_mu, config_.zeta_cap);
  zeta_cdf_.resize(pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    zeta_cdf_[i] = acc;
  }
  zeta_cdf_.back() = 1.0;
}

void FlightController::begin_episode() {
  n_remaining_ = 0;
  repeat_action_ = kNoAction;
  const double lo = std::log(config_.eps_levy_min);
  const double hi = std::log(config_.eps_levy_max);
  eps_levy_ = std::exp(lo + uniform01(rng_) * (hi - lo));
}

int FlightController::sample_flight_length() {
  const double u = uniform01(rng_);
  const auto it = std::upper_bound(zeta_cdf_.begin(), zeta_cdf_.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - zeta_cdf_.begin(),
                                            static_cast<std::ptrdiff_t>(zeta_cdf_.size()) - 1);
  return static_cast<int>(idx) + 1;
}

ActionChoice FlightController::eps_greedy(const Eigen::Ref<const Eigen::VectorXd>& q,
                                          const FrozenPolicy* pi_p, StateId s) {
  const auto n = static_cast<int>(q.size());
  const ActionId greedy = learner::argmax(q);
  ActionId a = greedy;
  if (config_.eps > 0.0 && uniform01(rng_) < config_.eps) {
    a = static_cast<ActionId>(uniform_index(rng_, n));
  }
  ActionChoice c;
  c.action = a;
  c.primitive = a;
  c.behavior_prob = config_.eps / n + (a == greedy ? 1.0 - config_.eps : 0.0);
  if (uses_extra_action(config_.mode) && a == config_.n_actions) {
    c.primitive = pi_p->act(s);
    c.from_pretrained = true;
  }
  return c;
}

ActionChoice FlightController::select_action(const Eigen::Ref<const Eigen::VectorXd>& q,
                                             const FrozenPolicy* pi_p, StateId s) {
  const int expected = config_.n_actions + (uses_extra_action(config_.mode) ? 1 : 0);
  if (q.size() != expected) {
    throw ValidationError("select_action: " + std::string(to_string(config_.mode)) + " expects " +
                          std::to_string(expected) + " action values, got " +
                          std::to_string(q.size()));
  }
  if (uses_pretrained(config_.mode) && pi_p == nullptr) {
    throw UsageError("select_action: mode needs a pre-trained policy");
  }

  const bool flights = config_.mode == ExploreMode::bt_flights ||
                       config_.mode == ExploreMode::bt_full ||
                       config_.mode == ExploreMode::ez_greedy_repeat;
  if (flights) {
    if (n_remaining_ == 0 && uniform01(rng_) < eps_levy_) {
      n_remaining_ = sample_flight_length();
      if (config_.mode == ExploreMode::ez_greedy_repeat) {
        repeat_action_ = static_cast<ActionId>(uniform_index(rng_, config_.n_actions));
      }
    }
    if (n_remaining_ > 0) {
      --n_remaining_;
      ActionChoice c;
      c.in_flight = true;
      if (config_.mode == ExploreMode::ez_greedy_repeat) {
        c.primitive = repeat_action_;
      } else {
        c.primitive = pi_p->act(s);
        c.from_pretrained = true;
      }
      c.action = c.primitive;
      return c;
    }
  }
  return eps_greedy(q, pi_p, s);
}

std::vector<double> epsilon_ladder(int n_actors, double eps_max) {
  if (n_actors < 1) throw ConfigError("run.n_actors must be >= 1");
  if (n_actors == 1) return {eps_max};
  std::vector<double> out(static_cast<std::size_t>(n_actors));
  for (int i = 0; i < n_actors; ++i) {
    out[static_cast<std::size_t>(i)] =
        std::pow(eps_max, 1.0 + 7.0 * i / static_cast<double>(n_actors - 1));
  }
  return out;
}

}  // namespace bt::explore
