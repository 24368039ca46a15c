#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bt/env/env_spec.hpp"
#include "bt/explore/flight_controller.hpp"
#include "bt/intrinsic/embedding.hpp"
#include "bt/intrinsic/ngu.hpp"
#include "bt/intrinsic/rnd.hpp"
#include "bt/learner/learner.hpp"
#include "bt/learner/q_function.hpp"
#include "bt/replay/sequence_buffer.hpp"

namespace bt::harness {

enum class Phase { pretrain_ngu, pretrain_rnd, transfer };

std::string_view to_string(Phase phase);
Phase parse_phase(std::string_view text);

struct RunSettings {
  Phase phase = Phase::transfer;
  std::uint64_t seed = 0;
  int n_actors = 4;
  int actor_refresh = 400;
  std::int64_t total_env_steps = 100000;
  std::int64_t eval_every = 5000;
  int eval_episodes = 5;
  learner::InitMode init_mode = learner::InitMode::scratch;
  std::string pretrained_checkpoint;
  bool deterministic = true;
};

struct ExploreSettings {
  explore::ExploreMode mode = explore::ExploreMode::eps_greedy;
  double eps = -1.0;  // < 0 selects the per-actor ladder
  double eps_max = 0.4;
  double eps_levy_min = 1e-4;
  double eps_levy_max = 0.1;
  double zeta_mu = 2.0;
  int zeta_cap = 0;  // 0 selects 10 * episode_limit
};

struct LearnerSettings {
  learner::LearnerConfig core;
  learner::ReprMode repr = learner::ReprMode::tabular;
  int feature_dim = 32;
  int batch_size = 32;
  int update_period = 4;  // env steps per learner update
  int min_replay = 64;    // records required before learning starts
};

struct IntrinsicSettings {
  intrinsic::NGUConfig ngu;
  intrinsic::EmbeddingMode embedding = intrinsic::EmbeddingMode::identity;
  int embed_dim = 0;  // 0 selects the observation dimension
  int hidden = 32;
  double embedding_step_size = 1e-3;
  int rnd_embed_dim = 16;
  intrinsic::PredictorKind rnd_predictor = intrinsic::PredictorKind::two_layer;
  double rnd_step_size = 1e-3;
  double sigma_floor = 1e-8;
  int train_suffix = 5;     // transitions per sampled sequence used for RND / embedding training
  int train_sequences = 8;  // sampled sequences per update whose suffix trains RND / embedding
  int stats_warmup = 256;   // random-policy steps that seed the RND error statistics
};

struct ExperimentConfig {
  RunSettings run;
  env::EnvSpec env;
  ExploreSettings explore;
  LearnerSettings learner;
  replay::ReplayConfig replay;
  IntrinsicSettings intrinsic;

  /// Applies one `section.key = value` assignment. Throws ConfigError for
  /// unknown keys and malformed values.
  void set(std::string_view key, std::string_view value);

  /// Checks cross-field invariants and normalizes the env spec. Throws
  /// ConfigError.
  void validate();

  /// Every key with its current value, in documentation order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Parses the flat key-value grammar:
///   # comment
///   section.key = value
/// Blank lines and comments are ignored; later assignments override earlier
/// ones. Throws ConfigError with the offending line number.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Writes every key as `section.key = value`.
void write_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace bt::harness
