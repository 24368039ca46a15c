#include "bt/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "bt/explore/flight_controller.hpp"
#include "bt/explore/relabel.hpp"
#include "bt/intrinsic/embedding.hpp"
#include "bt/intrinsic/episodic_memory.hpp"
#include "bt/intrinsic/ngu.hpp"
#include "bt/intrinsic/rnd.hpp"
#include "bt/learner/backups.hpp"
#include "bt/learner/learner.hpp"

namespace bt::harness {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ stream) ^ index);
}

EvalSummary evaluate(const learner::QFunction& q, const explore::FrozenPolicy* pi_p,
                     const env::ObservationTable& obs, env::Environment& env, int episodes) {
  if (episodes < 1) throw ValidationError("evaluate: episodes must be >= 1");
  if (q.has_extra_action() && pi_p == nullptr) {
    throw UsageError("evaluate: a+ needs a pre-trained policy");
  }
  EvalSummary out;
  std::set<StateId> all_visited;
  std::int64_t steps = 0;
  std::int64_t extra_steps = 0;
  double unique_sum = 0.0;
  for (int e = 0; e < episodes; ++e) {
    StateId s = env.reset();
    std::set<StateId> visited{s};
    double ret = 0.0;
    for (;;) {
      const ActionId a = learner::argmax(q.q_values({s, obs.row(s)}));
      ActionId primitive = a;
      if (q.has_extra_action() && a == q.extra_action()) {
        primitive = pi_p->act(s);
        ++extra_steps;
      }
      const auto res = env.step(primitive);
      ++steps;
      ret += res.reward;
      s = res.next_state;
      visited.insert(s);
      if (res.done()) break;
    }
    out.returns.push_back(ret);
    unique_sum += static_cast<double>(visited.size());
    all_visited.insert(visited.begin(), visited.end());
  }
  double sum = 0.0;
  for (double r : out.returns) sum += r;
  out.mean_return = sum / episodes;
  out.median_return = median(out.returns);
  out.extra_action_usage = steps > 0 ? static_cast<double>(extra_steps) / static_cast<double>(steps) : 0.0;
  out.mean_episode_length = static_cast<double>(steps) / episodes;
  out.unique_states = unique_sum / episodes;
  out.visited.assign(all_visited.begin(), all_visited.end());
  return out;
}

namespace {

enum SeedStream : std::uint64_t {
  kActorEnv = 1,
  kActorExplore,
  kEvalEnv,
  kLearnerSample,
  kInit,
  kRnd,
  kEmbedding,
  kWarmup,
};

class Run {
 public:
  Run(const ExperimentConfig& cfg, const Checkpoint* pretrained);
  RunResult execute();

 private:
  struct Snapshot {
    learner::QFunction q;
    std::optional<intrinsic::RndState> rnd;
    std::optional<intrinsic::EmbeddingFn> embed;
  };

  struct Actor {
    int index = 0;
    env::Environment env;
    explore::FlightController fc;
    intrinsic::EpisodicMemory memory;
    std::shared_ptr<const Snapshot> snap;
    int since_refresh = 0;
    EpisodeId episode = 0;
    StateId state = 0;
    bool need_reset = true;
  };

  [[nodiscard]] std::shared_ptr<const Snapshot> snapshot() const;
  void actor_step(Actor& actor, std::int64_t step_index);
  double intrinsic_reward(Actor& actor, const Snapshot& snap, StateId s, StateId next);
  void learner_update();
  void train_intrinsic(const std::vector<replay::Sample>& samples);
  void warm_up_statistics();
  EvalRow eval_row(std::int64_t env_steps);
  void run_deterministic(RunRecord& record);
  void run_threaded(RunRecord& record);

  ExperimentConfig cfg_;
  bool pretrain_;
  env::Environment proto_env_;
  env::ObservationTable obs_;
  int n_actions_;
  bool extra_;
  std::optional<explore::FrozenPolicy> pi_p_;
  std::string digest_before_;

  mutable std::mutex learner_mu_;
  learner::Learner learner_;
  std::optional<intrinsic::RndState> rnd_;
  std::optional<intrinsic::EmbeddingFn> embed_;
  Rng sample_rng_;

  replay::SequenceBuffer buffer_;
  std::vector<std::unique_ptr<Actor>> actors_;
  env::Environment eval_env_;

  std::atomic<std::int64_t> first_goal_{-1};
  std::atomic<std::int64_t> steps_since_eval_{0};
  std::atomic<std::int64_t> flight_steps_since_eval_{0};
  std::atomic<int> max_staleness_{0};
  std::chrono::steady_clock::time_point start_;
};

learner::QFunction fresh_q(const ExperimentConfig& cfg, const env::ObservationTable& obs,
                           int n_actions, bool extra) {
  if (cfg.learner.repr == learner::ReprMode::tabular) {
    return learner::QFunction::tabular(obs.n_states, n_actions, extra);
  }
  Rng rng(derive_seed(cfg.run.seed, kInit));
  return learner::QFunction::encoder_head(obs.dim, cfg.learner.feature_dim, n_actions, extra, rng);
}

void check_architecture(const learner::QFunction& q, const env::ObservationTable& obs,
                        int n_actions) {
  const int expected_input = q.mode() == learner::ReprMode::tabular ? obs.n_states : obs.dim;
  if (q.input_dim() != expected_input || q.n_actions_base() != n_actions) {
    throw ConfigError("checkpoint architecture (" + std::string(learner::to_string(q.mode())) +
                      ", input " + std::to_string(q.input_dim()) + ", " +
                      std::to_string(q.n_actions_base()) +
                      " actions) does not match the environment (input " +
                      std::to_string(expected_input) + ", " + std::to_string(n_actions) +
                      " actions)");
  }
}

env::EnvSpec with_seed(env::EnvSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  return spec;
}

Run::Run(const ExperimentConfig& cfg, const Checkpoint* pretrained)
    : cfg_(cfg),
      pretrain_(cfg.run.phase != Phase::transfer),
      proto_env_(cfg.env),
      obs_(env::ObservationTable::from(proto_env_)),
      n_actions_(proto_env_.num_actions()),
      extra_(!pretrain_ && explore::uses_extra_action(cfg.explore.mode)),
      sample_rng_(derive_seed(cfg.run.seed, kLearnerSample)),
      buffer_(cfg.replay),
      eval_env_(with_seed(cfg.env, derive_seed(cfg.run.seed ^ cfg.env.seed, kEvalEnv))) {
  std::optional<Checkpoint> loaded;
  const bool needs_ckpt = !pretrain_ && (explore::uses_pretrained(cfg_.explore.mode) ||
                                         cfg_.run.init_mode != learner::InitMode::scratch);
  if (needs_ckpt && pretrained == nullptr) {
    if (cfg_.run.pretrained_checkpoint.empty()) {
      throw ConfigError("run.pretrained_checkpoint is required for this transfer run");
    }
    loaded = read_checkpoint(cfg_.run.pretrained_checkpoint);
    pretrained = &*loaded;
  }
  if (needs_ckpt) check_architecture(pretrained->q, obs_, n_actions_);

  learner::QFunction q = fresh_q(cfg_, obs_, n_actions_, extra_);
  if (needs_ckpt) {
    if (pretrained->q.mode() != cfg_.learner.repr) {
      throw ConfigError("checkpoint representation " +
                        std::string(learner::to_string(pretrained->q.mode())) +
                        " does not match learner.repr " +
                        std::string(learner::to_string(cfg_.learner.repr)));
    }
    try {
      q = learner::init_from_checkpoint(std::move(q), pretrained->q, cfg_.run.init_mode);
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
    if (explore::uses_pretrained(cfg_.explore.mode)) {
      pi_p_ = explore::FrozenPolicy::greedy(pretrained->q, obs_);
      digest_before_ = pi_p_->digest();
    }
  }
  learner_ = learner::Learner(std::move(q), cfg_.learner.core, &obs_);

  if (pretrain_) {
    intrinsic::RndConfig rc;
    rc.input_dim = obs_.dim;
    rc.embed_dim = cfg_.intrinsic.rnd_embed_dim;
    rc.hidden = cfg_.intrinsic.hidden;
    rc.predictor = cfg_.intrinsic.rnd_predictor;
    rc.optimizer.step_size = cfg_.intrinsic.rnd_step_size;
    rc.sigma_floor = cfg_.intrinsic.sigma_floor;
    rc.seed = derive_seed(cfg_.run.seed, kRnd);
    rnd_.emplace(rc);
    if (cfg_.run.phase == Phase::pretrain_ngu) {
      intrinsic::EmbeddingConfig ec;
      ec.mode = cfg_.intrinsic.embedding;
      ec.input_dim = obs_.dim;
      ec.dim_out = cfg_.intrinsic.embed_dim;
      ec.hidden = cfg_.intrinsic.hidden;
      ec.n_actions = n_actions_;
      ec.optimizer.step_size = cfg_.intrinsic.embedding_step_size;
      ec.seed = derive_seed(cfg_.run.seed, kEmbedding);
      embed_.emplace(ec);
    }
  }

  const auto ladder = explore::epsilon_ladder(cfg_.run.n_actors, cfg_.explore.eps_max);
  for (int i = 0; i < cfg_.run.n_actors; ++i) {
    explore::FlightConfig fc;
    fc.mode = cfg_.explore.mode;
    fc.n_actions = n_actions_;
    fc.eps = cfg_.explore.eps >= 0.0 ? cfg_.explore.eps : ladder[static_cast<std::size_t>(i)];
    fc.eps_levy_min = cfg_.explore.eps_levy_min;
    fc.eps_levy_max = cfg_.explore.eps_levy_max;
    fc.zeta_mu = cfg_.explore.zeta_mu;
    fc.zeta_cap = cfg_.explore.zeta_cap > 0 ? cfg_.explore.zeta_cap : 10 * cfg_.env.episode_limit;
    fc.seed = derive_seed(cfg_.run.seed, kActorExplore, static_cast<std::uint64_t>(i));
    auto actor = std::make_unique<Actor>(Actor{
        i,
        env::Environment(
            with_seed(cfg_.env, derive_seed(cfg_.run.seed ^ cfg_.env.seed, kActorEnv,
                                            static_cast<std::uint64_t>(i)))),
        explore::FlightController(fc),
        intrinsic::EpisodicMemory(embed_ ? embed_->dim_out() : 0),
        nullptr,
        0,
        0,
        0,
        true});
    actors_.push_back(std::move(actor));
  }
}

std::shared_ptr<const Run::Snapshot> Run::snapshot() const {
  std::lock_guard lock(learner_mu_);
  return std::make_shared<const Snapshot>(Snapshot{learner_.online(), rnd_, embed_});
}

double Run::intrinsic_reward(Actor& actor, const Snapshot& snap, StateId s, StateId next) {
  const auto next_obs = obs_.row(next);
  const double err = intrinsic::rnd_error(*snap.rnd, next_obs);
  if (cfg_.run.phase == Phase::pretrain_rnd) return intrinsic::rnd_reward(*snap.rnd, err);

  const Eigen::VectorXd e_s = snap.embed->embed(obs_.row(s));
  actor.memory.add({e_s.data(), static_cast<std::size_t>(e_s.size())});
  const Eigen::VectorXd e_n = snap.embed->embed(next_obs);
  const double r_epi = intrinsic::episodic_reward(
      actor.memory, {e_n.data(), static_cast<std::size_t>(e_n.size())}, cfg_.intrinsic.ngu);
  const double alpha = intrinsic::lifelong_modulator(*snap.rnd, err);
  return intrinsic::ngu_reward(r_epi, alpha, cfg_.intrinsic.ngu.L);
}

void Run::actor_step(Actor& actor, std::int64_t step_index) {
  if (actor.need_reset) {
    actor.state = actor.env.reset();
    actor.fc.begin_episode();
    actor.memory.reset_episode();
    ++actor.episode;
    actor.need_reset = false;
  }
  const Snapshot& snap = *actor.snap;
  const StateId s = actor.state;
  const Eigen::VectorXd q = snap.q.q_values({s, obs_.row(s)});
  const auto choice = actor.fc.select_action(q, pi_p_ ? &*pi_p_ : nullptr, s);
  const auto res = actor.env.step(choice.primitive);

  env::Transition tr;
  tr.state = s;
  tr.action = choice.action;
  tr.primitive_action = choice.primitive;
  tr.reward_ext = res.reward;
  tr.next_state = res.next_state;
  tr.terminal = res.terminal;
  tr.truncated = res.truncated;
  tr.from_pretrained = choice.from_pretrained;
  tr.in_flight = choice.in_flight;
  tr.behavior_prob = choice.behavior_prob;
  if (pretrain_) tr.reward_int = intrinsic_reward(actor, snap, s, res.next_state);

  const EpisodeId eid = (static_cast<EpisodeId>(actor.index) << 40) | actor.episode;
  const ActionId extra = extra_ ? static_cast<ActionId>(n_actions_) : kNoAction;
  for (const auto& t : explore::relabel(tr, extra)) buffer_.append(t, eid, actor.index);
  if (res.done()) {
    buffer_.end_episode(actor.index);
    actor.need_reset = true;
  } else {
    actor.state = res.next_state;
  }

  steps_since_eval_.fetch_add(1, std::memory_order_relaxed);
  if (choice.in_flight) flight_steps_since_eval_.fetch_add(1, std::memory_order_relaxed);
  if (res.terminal) {
    std::int64_t cur = first_goal_.load();
    while ((cur < 0 || step_index < cur) && !first_goal_.compare_exchange_weak(cur, step_index)) {
    }
  }
  if (++actor.since_refresh >= cfg_.run.actor_refresh) {
    actor.snap = snapshot();
    actor.since_refresh = 0;
  }
  int seen = max_staleness_.load();
  while (actor.since_refresh > seen && !max_staleness_.compare_exchange_weak(seen, actor.since_refresh)) {
  }
}

void Run::train_intrinsic(const std::vector<replay::Sample>& samples) {
  std::vector<std::span<const double>> next_obs;
  std::vector<intrinsic::DynamicsSample> dynamics;
  const auto suffix = static_cast<std::size_t>(cfg_.intrinsic.train_suffix);
  const auto n_seq = std::min(samples.size(), static_cast<std::size_t>(cfg_.intrinsic.train_sequences));
  for (std::size_t k = 0; k < n_seq; ++k) {
    const auto& seq = samples[k].record->transitions;
    std::size_t taken = 0;
    for (std::size_t i = seq.size(); i-- > 0 && taken < suffix;) {
      if (seq[i].is_duplicate) continue;
      ++taken;
      next_obs.push_back(obs_.row(seq[i].next_state));
      dynamics.push_back({obs_.row(seq[i].state), seq[i].primitive_action, obs_.row(seq[i].next_state)});
    }
  }
  if (next_obs.empty()) return;
  intrinsic::rnd_train(*rnd_, next_obs);
  if (embed_ && embed_->trainable()) embed_->train_inverse_dynamics(dynamics);
}

void Run::learner_update() {
  const auto samples = buffer_.sample(static_cast<std::size_t>(cfg_.learner.batch_size), sample_rng_);
  if (samples.empty()) return;
  std::lock_guard lock(learner_mu_);
  const auto& target = learner_.target();
  const auto& core = cfg_.learner.core;
  std::vector<learner::TrainingSequence> batch;
  std::vector<std::uint64_t> ids;
  batch.reserve(samples.size());
  for (const auto& sm : samples) {
    const auto& seq = sm.record->transitions;
    std::vector<double> targets;
    if (pretrain_) {
      std::vector<double> mu(seq.size());
      for (std::size_t i = 0; i < seq.size(); ++i) mu[i] = seq[i].behavior_prob;
      targets = learner::retrace_targets(seq, target, obs_, learner::greedy_policy(target, obs_), mu,
                                         core.gamma, core.lambda_retrace,
                                         learner::RewardSource::intrinsic);
    } else {
      targets = learner::peng_targets(seq, target, obs_, core.gamma, core.lambda_q,
                                      learner::RewardSource::extrinsic);
    }
    learner::TrainingSequence items(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) items[i] = {seq[i].state, seq[i].action, targets[i]};
    batch.push_back(std::move(items));
    ids.push_back(sm.id);
  }
  const auto priorities = learner_.apply_update(batch);
  buffer_.update_priorities(ids, priorities);
  if (pretrain_) train_intrinsic(samples);
}

void Run::warm_up_statistics() {
  if (!rnd_ || cfg_.intrinsic.stats_warmup == 0) return;
  env::Environment env(with_seed(cfg_.env, derive_seed(cfg_.run.seed ^ cfg_.env.seed, kWarmup)));
  Rng rng(derive_seed(cfg_.run.seed, kWarmup));
  std::vector<double> errors;
  env.reset();
  for (int i = 0; i < cfg_.intrinsic.stats_warmup; ++i) {
    const auto res = env.step(static_cast<ActionId>(uniform_index(rng, n_actions_)));
    errors.push_back(intrinsic::rnd_error(*rnd_, obs_.row(res.next_state)));
    if (res.done()) env.reset();
  }
  rnd_->observe_errors(errors);
}

EvalRow Run::eval_row(std::int64_t env_steps) {
  EvalRow row;
  row.env_steps = env_steps;
  EvalSummary ev;
  double err = 0.0;
  {
    std::lock_guard lock(learner_mu_);
    ev = evaluate(learner_.online(), pi_p_ ? &*pi_p_ : nullptr, obs_, eval_env_, cfg_.run.eval_episodes);
    if (rnd_ && !ev.visited.empty()) {
      for (StateId s : ev.visited) err += intrinsic::rnd_error(*rnd_, obs_.row(s));
      err /= static_cast<double>(ev.visited.size());
    }
  }
  row.mean_return = ev.mean_return;
  row.median_return = ev.median_return;
  row.first_goal_step = first_goal_.load();
  row.extra_action_usage = ev.extra_action_usage;
  const auto steps = steps_since_eval_.exchange(0);
  const auto flights = flight_steps_since_eval_.exchange(0);
  row.flight_fraction = steps > 0 ? static_cast<double>(flights) / static_cast<double>(steps) : 0.0;
  row.unique_states = ev.unique_states;
  row.mean_episode_length = ev.mean_episode_length;
  row.intrinsic_error = err;
  row.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return row;
}

void Run::run_deterministic(RunRecord& record) {
  const std::int64_t total = cfg_.run.total_env_steps;
  const auto n = static_cast<std::int64_t>(actors_.size());
  for (std::int64_t g = 1; g <= total; ++g) {
    actor_step(*actors_[static_cast<std::size_t>((g - 1) % n)], g);
    if (g % cfg_.learner.update_period == 0 &&
        buffer_.size() >= static_cast<std::size_t>(cfg_.learner.min_replay)) {
      learner_update();
    }
    if (g % cfg_.run.eval_every == 0 || g == total) record.append(eval_row(g));
  }
}

void Run::run_threaded(RunRecord& record) {
  const std::int64_t total = cfg_.run.total_env_steps;
  std::atomic<std::int64_t> claimed{0};
  std::atomic<std::int64_t> done{0};
  std::atomic<std::uint64_t> updates{0};
  std::atomic<bool> stop{false};
  const auto slack = static_cast<std::int64_t>(cfg_.learner.update_period) * 64;
  {
    std::vector<std::jthread> workers;
    for (auto& actor : actors_) {
      workers.emplace_back([&, a = actor.get()] {
        for (;;) {
          // Keep the replay ratio close to the deterministic schedule.
          while (!stop.load() &&
                 buffer_.size() >= static_cast<std::size_t>(cfg_.learner.min_replay) &&
                 done.load() - static_cast<std::int64_t>(updates.load()) * cfg_.learner.update_period > slack) {
            std::this_thread::yield();
          }
          const std::int64_t g = claimed.fetch_add(1) + 1;
          if (g > total) break;
          actor_step(*a, g);
          done.fetch_add(1);
        }
      });
    }
    std::int64_t next_eval = cfg_.run.eval_every;
    while (done.load() < total) {
      const std::int64_t d = done.load();
      if (next_eval <= total && d >= next_eval) {
        if (next_eval < total) record.append(eval_row(next_eval));
        next_eval += cfg_.run.eval_every;
        continue;
      }
      const auto due = static_cast<std::uint64_t>(d / cfg_.learner.update_period);
      if (updates.load() < due && buffer_.size() >= static_cast<std::size_t>(cfg_.learner.min_replay)) {
        learner_update();
        updates.fetch_add(1);
      } else {
        std::this_thread::yield();
      }
    }
    stop.store(true);
  }
  record.append(eval_row(total));
}

RunResult Run::execute() {
  start_ = std::chrono::steady_clock::now();
  if (pretrain_) warm_up_statistics();
  for (auto& actor : actors_) actor->snap = snapshot();

  RunRecord record;
  record.append(eval_row(0));
  if (cfg_.run.deterministic) {
    run_deterministic(record);
  } else {
    run_threaded(record);
  }

  RunResult result;
  result.record = std::move(record);
  result.checkpoint.phase = cfg_.run.phase;
  result.checkpoint.env_steps = static_cast<std::uint64_t>(cfg_.run.total_env_steps);
  result.checkpoint.seed = cfg_.run.seed;
  result.checkpoint.q = learner_.online();
  result.replay = buffer_.stats();
  result.learner_updates = learner_.update_count();
  result.max_snapshot_staleness = max_staleness_.load();
  if (pi_p_) {
    result.policy_digest_before = digest_before_;
    result.policy_digest_after = pi_p_->digest();
    if (result.policy_digest_after != digest_before_) {
      throw IntegrityError("pre-trained policy digest changed during transfer");
    }
  }
  return result;
}

}  // namespace

RunResult pretrain_run(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.validate();
  if (c.run.phase == Phase::transfer) throw ConfigError("pretrain_run needs a pretrain phase");
  return Run(c, nullptr).execute();
}

RunResult transfer_run(const ExperimentConfig& cfg, const Checkpoint* pretrained) {
  ExperimentConfig c = cfg;
  if (pretrained != nullptr && c.run.pretrained_checkpoint.empty()) {
    c.run.pretrained_checkpoint = "<in-memory>";
  }
  c.validate();
  if (c.run.phase != Phase::transfer) throw ConfigError("transfer_run needs run.phase = transfer");
  return Run(c, pretrained).execute();
}

RunResult run_experiment(const ExperimentConfig& cfg, const Checkpoint* pretrained) {
  return cfg.run.phase == Phase::transfer ? transfer_run(cfg, pretrained) : pretrain_run(cfg);
}

}  // namespace bt::harness
