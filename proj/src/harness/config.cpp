#include "bt/harness/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace bt::harness {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::pretrain_ngu: return "pretrain_ngu";
    case Phase::pretrain_rnd: return "pretrain_rnd";
    case Phase::transfer: return "transfer";
  }
  return "?";
}

Phase parse_phase(std::string_view text) {
  if (text == "pretrain_ngu") return Phase::pretrain_ngu;
  if (text == "pretrain_rnd") return Phase::pretrain_rnd;
  if (text == "transfer") return Phase::transfer;
  throw ConfigError("unknown run.phase '" + std::string(text) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + s + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define BT_INT(KEY, MEMBER, TYPE)                                                        \
  Field {                                                                                \
    KEY, [](ExperimentConfig& c, std::string_view v) { c.MEMBER = parse_int<TYPE>(KEY, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }              \
  }
#define BT_DBL(KEY, MEMBER)                                                            \
  Field {                                                                              \
    KEY, [](ExperimentConfig& c, std::string_view v) { c.MEMBER = parse_double(KEY, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.MEMBER); }                        \
  }
#define BT_ENUM(KEY, MEMBER, PARSE)                                                \
  Field {                                                                          \
    KEY, [](ExperimentConfig& c, std::string_view v) { c.MEMBER = PARSE(v); },      \
        [](const ExperimentConfig& c) { return std::string(to_string(c.MEMBER)); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      BT_ENUM("run.phase", run.phase, parse_phase),
      BT_INT("run.seed", run.seed, std::uint64_t),
      BT_INT("run.n_actors", run.n_actors, int),
      BT_INT("run.actor_refresh", run.actor_refresh, int),
      BT_INT("run.total_env_steps", run.total_env_steps, std::int64_t),
      BT_INT("run.eval_every", run.eval_every, std::int64_t),
      BT_INT("run.eval_episodes", run.eval_episodes, int),
      BT_ENUM("run.init_mode", run.init_mode, learner::parse_init_mode),
      Field{"run.pretrained_checkpoint",
            [](ExperimentConfig& c, std::string_view v) { c.run.pretrained_checkpoint = v; },
            [](const ExperimentConfig& c) { return c.run.pretrained_checkpoint; }},
      Field{"run.deterministic",
            [](ExperimentConfig& c, std::string_view v) {
              c.run.deterministic = parse_bool("run.deterministic", v);
            },
            [](const ExperimentConfig& c) { return std::string(c.run.deterministic ? "true" : "false"); }},

      BT_ENUM("env.kind", env.kind, env::parse_env_kind),
      BT_INT("env.size", env.size, int),
      BT_ENUM("env.reward_variant", env.reward_variant, env::parse_reward_variant),
      Field{"env.distractor_reward",
            [](ExperimentConfig& c, std::string_view v) {
              if (v == "none") {
                c.env.distractor_reward.reset();
              } else {
                c.env.distractor_reward = parse_double("env.distractor_reward", v);
              }
            },
            [](const ExperimentConfig& c) {
              return c.env.distractor_reward ? fmt(*c.env.distractor_reward) : std::string("none");
            }},
      BT_DBL("env.goal_reward", env.goal_reward),
      BT_INT("env.episode_limit", env.episode_limit, int),
      BT_DBL("env.slip", env.slip),
      BT_INT("env.seed", env.seed, std::uint64_t),

      BT_ENUM("explore.mode", explore.mode, explore::parse_explore_mode),
      BT_DBL("explore.eps", explore.eps),
      BT_DBL("explore.eps_max", explore.eps_max),
      BT_DBL("explore.eps_levy_min", explore.eps_levy_min),
      BT_DBL("explore.eps_levy_max", explore.eps_levy_max),
      BT_DBL("explore.zeta_mu", explore.zeta_mu),
      BT_INT("explore.zeta_cap", explore.zeta_cap, int),

      BT_DBL("learner.gamma", learner.core.gamma),
      BT_DBL("learner.lambda_q", learner.core.lambda_q),
      BT_DBL("learner.lambda_retrace", learner.core.lambda_retrace),
      BT_INT("learner.target_period", learner.core.target_period, int),
      BT_DBL("learner.step_size", learner.core.adam.step_size),
      BT_DBL("learner.adam_beta1", learner.core.adam.beta1),
      BT_DBL("learner.adam_beta2", learner.core.adam.beta2),
      BT_DBL("learner.adam_epsilon", learner.core.adam.epsilon),
      BT_DBL("learner.tabular_step_size", learner.core.tabular_step_size),
      BT_DBL("learner.priority_eta", learner.core.priority_eta),
      BT_ENUM("learner.repr", learner.repr, learner::parse_repr_mode),
      BT_INT("learner.feature_dim", learner.feature_dim, int),
      BT_INT("learner.batch_size", learner.batch_size, int),
      BT_INT("learner.update_period", learner.update_period, int),
      BT_INT("learner.min_replay", learner.min_replay, int),

      BT_INT("replay.capacity", replay.capacity, int),
      BT_INT("replay.sequence_length", replay.sequence_length, int),
      BT_DBL("replay.overlap", replay.overlap),
      BT_DBL("replay.priority_exponent", replay.priority_exponent),
      BT_DBL("replay.is_exponent", replay.is_exponent),

      BT_INT("intrinsic.k", intrinsic.ngu.k, int),
      BT_DBL("intrinsic.c", intrinsic.ngu.c),
      BT_DBL("intrinsic.eps_kernel", intrinsic.ngu.eps_kernel),
      BT_DBL("intrinsic.xi", intrinsic.ngu.xi),
      BT_DBL("intrinsic.s_m", intrinsic.ngu.s_m),
      BT_DBL("intrinsic.L", intrinsic.ngu.L),
      BT_DBL("intrinsic.d2m_floor", intrinsic.ngu.d2m_floor),
      BT_ENUM("intrinsic.embedding", intrinsic.embedding, intrinsic::parse_embedding_mode),
      BT_INT("intrinsic.embed_dim", intrinsic.embed_dim, int),
      BT_INT("intrinsic.hidden", intrinsic.hidden, int),
      BT_DBL("intrinsic.embedding_step_size", intrinsic.embedding_step_size),
      BT_INT("intrinsic.rnd_embed_dim", intrinsic.rnd_embed_dim, int),
      BT_ENUM("intrinsic.rnd_predictor", intrinsic.rnd_predictor, intrinsic::parse_predictor_kind),
      BT_DBL("intrinsic.rnd_step_size", intrinsic.rnd_step_size),
      BT_DBL("intrinsic.sigma_floor", intrinsic.sigma_floor),
      BT_INT("intrinsic.train_suffix", intrinsic.train_suffix, int),
      BT_INT("intrinsic.train_sequences", intrinsic.train_sequences, int),
      BT_INT("intrinsic.stats_warmup", intrinsic.stats_warmup, int),
  };
  return table;
}

#undef BT_INT
#undef BT_DBL
#undef BT_ENUM

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

void ExperimentConfig::validate() {
  env = env::normalized(env);
  learner.core.validate();
  replay.validate();
  intrinsic.ngu.validate();
  if (run.n_actors < 1) throw ConfigError("run.n_actors must be >= 1");
  if (run.actor_refresh < 1) throw ConfigError("run.actor_refresh must be >= 1");
  if (run.total_env_steps < 1) throw ConfigError("run.total_env_steps must be >= 1");
  if (run.eval_every < 1) throw ConfigError("run.eval_every must be >= 1");
  if (run.eval_episodes < 1) throw ConfigError("run.eval_episodes must be >= 1");
  if (learner.batch_size < 1) throw ConfigError("learner.batch_size must be >= 1");
  if (learner.update_period < 1) throw ConfigError("learner.update_period must be >= 1");
  if (learner.min_replay < 1) throw ConfigError("learner.min_replay must be >= 1");
  if (learner.feature_dim < 1) throw ConfigError("learner.feature_dim must be >= 1");
  if (intrinsic.train_suffix < 1) throw ConfigError("intrinsic.train_suffix must be >= 1");
  if (intrinsic.train_sequences < 1) throw ConfigError("intrinsic.train_sequences must be >= 1");
  if (intrinsic.stats_warmup < 0) throw ConfigError("intrinsic.stats_warmup must be >= 0");
  if (explore.eps > 1.0) throw ConfigError("explore.eps must be <= 1 (negative selects the ladder)");
  if (!(explore.eps_max > 0.0 && explore.eps_max <= 1.0)) {
    throw ConfigError("explore.eps_max must be in (0, 1]");
  }
  if (explore.zeta_cap < 0) throw ConfigError("explore.zeta_cap must be >= 0");

  if (run.phase == Phase::transfer) {
    const bool needs_ckpt = explore::uses_pretrained(explore.mode) ||
                            run.init_mode != learner::InitMode::scratch;
    if (needs_ckpt && run.pretrained_checkpoint.empty()) {
      throw ConfigError("transfer with explore.mode=" + std::string(to_string(explore.mode)) +
                        " and run.init_mode=" + std::string(to_string(run.init_mode)) +
                        " requires run.pretrained_checkpoint");
    }
  } else {
    if (explore::uses_pretrained(explore.mode)) {
      throw ConfigError("pre-training explores over primitive actions only; explore.mode=" +
                        std::string(to_string(explore.mode)) + " is not allowed");
    }
    if (run.init_mode != learner::InitMode::scratch) {
      throw ConfigError("pre-training starts from scratch; run.init_mode must be scratch");
    }
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'section.key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    try {
      base.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return parse_config(in, std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  for (const auto& [k, v] : cfg.entries()) out << k << " = " << v << '\n';
}

}  // namespace bt::harness
