// Command-line front end: pretrain, transfer, eval, sweep, plot.
//
// Exit codes: 0 success, 1 other failure, 2 configuration error,
// 3 integrity error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "bt/env/environment.hpp"
#include "bt/env/observation_table.hpp"
#include "bt/harness/checkpoint.hpp"
#include "bt/harness/config.hpp"
#include "bt/harness/metrics.hpp"
#include "bt/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace bt;
using namespace bt::harness;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool deterministic = false;
  bool threaded = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Configuration file (section.key = value)");
  cmd->add_option("--seed", f.seed, "Override run.seed");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_flag("--deterministic", f.deterministic, "Single worker, fixed interleave (default)");
  cmd->add_flag("--threaded", f.threaded, "Concurrent actor threads");
  cmd->add_option("--set", f.sets, "Override one key, e.g. --set learner.gamma=0.9");
}

ExperimentConfig build_config(const CommonFlags& f, std::optional<Phase> phase) {
  ExperimentConfig cfg;
  if (phase) cfg.run.phase = *phase;
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) cfg.run.seed = *f.seed;
  if (f.deterministic) cfg.run.deterministic = true;
  if (f.threaded) cfg.run.deterministic = false;
  if (phase && cfg.run.phase != *phase) {
    if (*phase == Phase::transfer || cfg.run.phase == Phase::transfer) {
      throw ConfigError("run.phase = " + std::string(to_string(cfg.run.phase)) +
                        " does not match this command");
    }
  }
  cfg.validate();
  return cfg;
}

void write_outputs(const ExperimentConfig& cfg, const RunResult& result, const std::string& out) {
  emit_metrics(result.record, out);
  write_checkpoint((fs::path(out) / "checkpoint.bin").string(), result.checkpoint);
  std::ofstream c(fs::path(out) / "config.txt");
  write_config(c, cfg);
}

void print_summary(const RunResult& r) {
  const auto& last = r.record.rows.back();
  std::cout << "env_steps=" << last.env_steps << " mean_return=" << last.mean_return
            << " first_goal_step=" << last.first_goal_step
            << " extra_action_usage=" << last.extra_action_usage
            << " learner_updates=" << r.learner_updates << '\n';
  if (!r.policy_digest_before.empty()) {
    std::cout << "pretrained_policy_sha256=" << r.policy_digest_after << " (unchanged)\n";
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Behavior Transfer toolkit"};
  app.require_subcommand(1);

  CommonFlags pre_f, tr_f, sw_f;
  auto* pre = app.add_subcommand("pretrain", "Reward-free pre-training (NGU or RND)");
  add_common(pre, pre_f);

  auto* tr = app.add_subcommand("transfer", "Downstream learning with a frozen pre-trained policy");
  add_common(tr, tr_f);
  std::string tr_ckpt;
  tr->add_option("--checkpoint", tr_ckpt, "Override run.pretrained_checkpoint");

  auto* ev = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  CommonFlags ev_f;
  add_common(ev, ev_f);
  std::string ev_ckpt;
  int ev_episodes = 0;
  ev->add_option("--checkpoint", ev_ckpt, "Checkpoint to evaluate")->required();
  ev->add_option("--episodes", ev_episodes, "Episodes (default run.eval_episodes)");

  auto* sw = app.add_subcommand("sweep", "Run one configuration over a grid of seeds");
  add_common(sw, sw_f);
  std::vector<std::uint64_t> seeds;
  sw->add_option("--seeds", seeds, "Seeds to run")->required();
  std::string sw_ckpt;
  sw->add_option("--checkpoint", sw_ckpt, "Override run.pretrained_checkpoint");

  auto* pl = app.add_subcommand("plot", "Re-render SVG charts from a metrics.csv");
  std::string pl_in;
  std::string pl_out;
  pl->add_option("--metrics", pl_in, "metrics.csv to plot")->required();
  pl->add_option("--out", pl_out, "Output directory (default: alongside the csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*pre) {
    const auto cfg = build_config(pre_f, Phase::pretrain_ngu);
    const auto result = pretrain_run(cfg);
    write_outputs(cfg, result, pre_f.out);
    print_summary(result);
  } else if (*tr) {
    if (!tr_ckpt.empty()) tr_f.sets.push_back("run.pretrained_checkpoint=" + tr_ckpt);
    const auto cfg = build_config(tr_f, Phase::transfer);
    const auto result = transfer_run(cfg);
    write_outputs(cfg, result, tr_f.out);
    print_summary(result);
  } else if (*ev) {
    const auto cfg = build_config(ev_f, std::nullopt);
    const Checkpoint ckpt = read_checkpoint(ev_ckpt);
    env::Environment env(cfg.env);
    const auto obs = env::ObservationTable::from(env);
    if (ckpt.q.n_actions_base() != env.num_actions() ||
        (ckpt.q.mode() == learner::ReprMode::tabular ? obs.n_states : obs.dim) != ckpt.q.input_dim()) {
      throw ConfigError("checkpoint does not match the configured environment");
    }
    if (ckpt.q.has_extra_action()) {
      throw ConfigError("eval: checkpoints with the extra action need their pre-trained policy; "
                        "use the transfer run's metrics instead");
    }
    const auto summary =
        evaluate(ckpt.q, nullptr, obs, env, ev_episodes > 0 ? ev_episodes : cfg.run.eval_episodes);
    std::cout << "episodes=" << summary.returns.size() << " mean_return=" << summary.mean_return
              << " median_return=" << summary.median_return
              << " mean_episode_length=" << summary.mean_episode_length
              << " unique_states=" << summary.unique_states << '\n';
  } else if (*sw) {
    if (!sw_ckpt.empty()) sw_f.sets.push_back("run.pretrained_checkpoint=" + sw_ckpt);
    const auto base = build_config(sw_f, std::nullopt);
    fs::create_directories(sw_f.out);
    std::ofstream summary(fs::path(sw_f.out) / "sweep.csv");
    summary << "seed,final_mean_return,first_goal_step,final_extra_action_usage\n";
    for (auto seed : seeds) {
      auto cfg = base;
      cfg.run.seed = seed;
      const auto result = run_experiment(cfg);
      const auto dir = (fs::path(sw_f.out) / ("seed_" + std::to_string(seed))).string();
      write_outputs(cfg, result, dir);
      const auto& last = result.record.rows.back();
      summary << seed << ',' << last.mean_return << ',' << last.first_goal_step << ','
              << last.extra_action_usage << '\n';
      std::cout << "seed " << seed << ": ";
      print_summary(result);
    }
  } else if (*pl) {
    std::ifstream in(pl_in);
    if (!in) throw IoError("cannot read '" + pl_in + "'");
    const auto record = read_metrics_csv(in);
    emit_metrics(record, pl_out.empty() ? fs::path(pl_in).parent_path().string() : pl_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
