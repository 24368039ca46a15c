#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bt/env/environment.hpp"
#include "bt/env/observation_table.hpp"
#include "bt/explore/frozen_policy.hpp"
#include "bt/harness/checkpoint.hpp"
#include "bt/harness/config.hpp"
#include "bt/harness/metrics.hpp"
#include "bt/harness/run_record.hpp"
#include "bt/harness/runner.hpp"

using namespace bt;
using namespace bt::harness;
namespace fs = std::filesystem;

namespace {

ExperimentConfig from_text(const std::string& text, ExperimentConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

// A short pre-training run on a small chain.
ExperimentConfig small_pretrain(const std::string& phase = "pretrain_ngu") {
  return from_text("run.phase = " + phase + R"(
run.seed = 3
run.n_actors = 2
run.total_env_steps = 3000
run.eval_every = 1000
run.eval_episodes = 2
env.kind = chain
env.size = 8
learner.gamma = 0.7
learner.tabular_step_size = 0.1
learner.target_period = 50
learner.min_replay = 16
learner.batch_size = 8
intrinsic.stats_warmup = 64
)");
}

ExperimentConfig small_transfer(const std::string& mode) {
  return from_text(R"(
run.phase = transfer
run.seed = 4
run.n_actors = 2
run.total_env_steps = 3000
run.eval_every = 1000
run.eval_episodes = 2
env.kind = chain
env.size = 8
env.goal_reward = 5
learner.min_replay = 16
learner.batch_size = 8
explore.mode = )" + mode + "\n");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bt_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

RunRecord three_rows() {
  RunRecord r;
  for (int i = 0; i < 3; ++i) {
    EvalRow row;
    row.env_steps = 100 * i;
    row.mean_return = 0.5 * i;
    row.median_return = 0.25 * i;
    row.first_goal_step = i == 0 ? -1 : 42;
    row.extra_action_usage = 0.1 * i;
    row.flight_fraction = 0.01 * i;
    row.unique_states = 3 + i;
    row.mean_episode_length = 10.0 / (i + 1);
    row.intrinsic_error = 1.0 / 3.0;
    row.wall_time_s = 0.125 * i;
    r.append(row);
  }
  return r;
}

}  // namespace

// ------------------------------------------------------------------- config

TEST(ConfigTest, ParsesCommentsAndOverrides) {
  const auto cfg = from_text(R"(
# a comment
env.kind = four_rooms
env.size = 11   # trailing comment
learner.gamma = 0.9
learner.gamma = 0.95

explore.mode = eps_greedy
)");
  EXPECT_EQ(cfg.env.kind, env::EnvKind::four_rooms);
  EXPECT_EQ(cfg.env.size, 11);
  EXPECT_DOUBLE_EQ(cfg.learner.core.gamma, 0.95);
}

TEST(ConfigTest, DefaultsMatchReferenceHyperparameters) {
  const ExperimentConfig cfg;
  EXPECT_EQ(cfg.run.n_actors, 4);
  EXPECT_EQ(cfg.run.actor_refresh, 400);
  EXPECT_DOUBLE_EQ(cfg.learner.core.gamma, 0.99);
  EXPECT_DOUBLE_EQ(cfg.learner.core.lambda_q, 0.7);
  EXPECT_DOUBLE_EQ(cfg.learner.core.lambda_retrace, 0.95);
  EXPECT_EQ(cfg.learner.core.target_period, 1500);
  EXPECT_DOUBLE_EQ(cfg.learner.core.adam.epsilon, 1e-4);
  EXPECT_DOUBLE_EQ(cfg.replay.priority_exponent, 0.9);
  EXPECT_DOUBLE_EQ(cfg.replay.is_exponent, 0.0);
  EXPECT_DOUBLE_EQ(cfg.explore.zeta_mu, 2.0);
  EXPECT_DOUBLE_EQ(cfg.explore.eps_levy_max, 0.1);
  EXPECT_EQ(cfg.intrinsic.train_suffix, 5);
}

TEST(ConfigTest, ErrorsNameTheLine) {
  try {
    from_text("env.size = 10\nenv.colour = red\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(from_text("env.size = ten\n"), ConfigError);
  EXPECT_THROW(from_text("just words\n"), ConfigError);
  EXPECT_THROW(from_text("learner.gamma = 0.9x\n"), ConfigError);
  EXPECT_THROW(from_text("run.deterministic = maybe\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST(ConfigTest, CrossFieldRules) {
  auto bt = small_transfer("bt_full");
  EXPECT_THROW(bt.validate(), ConfigError);  // no checkpoint
  bt.set("run.pretrained_checkpoint", "x.bin");
  EXPECT_NO_THROW(bt.validate());

  auto pre = small_pretrain();
  pre.set("explore.mode", "bt_action");
  EXPECT_THROW(pre.validate(), ConfigError);
  pre = small_pretrain();
  pre.set("run.init_mode", "full");
  EXPECT_THROW(pre.validate(), ConfigError);

  auto zero = small_pretrain();
  zero.set("run.total_env_steps", "0");
  EXPECT_THROW(zero.validate(), ConfigError);
}

TEST(ConfigTest, WriteThenParseRoundTrips) {
  auto cfg = small_pretrain();
  cfg.set("intrinsic.k", "7");
  cfg.set("env.reward_variant", "deceptive_hard");
  cfg.set("env.distractor_reward", "0.25");
  std::ostringstream out;
  write_config(out, cfg);
  const auto again = from_text(out.str());
  EXPECT_EQ(again.entries(), cfg.entries());
}

// --------------------------------------------------------------- checkpoint

TEST(CheckpointTest, RoundTripIsBitExact) {
  Rng rng(1);
  Checkpoint ckpt;
  ckpt.phase = Phase::pretrain_rnd;
  ckpt.env_steps = 123456789012ull;
  ckpt.seed = 0xdeadbeefcafeull;
  ckpt.q = learner::QFunction::encoder_head(7, 5, 3, true, rng);
  ckpt.q.params().b1 = Eigen::VectorXd::Random(5);
  ckpt.q.params().b2[1] = -0.0;
  ckpt.q.params().w2(0, 0) = std::numeric_limits<double>::denorm_min();
  const std::string bytes = serialize_checkpoint(ckpt);
  const Checkpoint back = deserialize_checkpoint(bytes);
  EXPECT_TRUE(back == ckpt);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
  EXPECT_TRUE(std::signbit(back.q.params().b2[1]));

  const auto dir = temp_dir("ckpt");
  fs::create_directories(dir);
  write_checkpoint((dir / "c.bin").string(), ckpt);
  EXPECT_TRUE(read_checkpoint((dir / "c.bin").string()) == ckpt);
  EXPECT_THROW(read_checkpoint((dir / "missing.bin").string()), IoError);
  EXPECT_THROW(write_checkpoint((dir / "no" / "such" / "c.bin").string(), ckpt), IoError);
  fs::remove_all(dir);
}

TEST(CheckpointTest, CorruptionIsDetected) {
  Checkpoint ckpt;
  ckpt.q = learner::QFunction::tabular(4, 3, false);
  ckpt.q.set_q(2, 1, 0.5);
  const std::string bytes = serialize_checkpoint(ckpt);
  for (std::size_t i = 0; i < bytes.size(); i += 7) {
    std::string bad = bytes;
    bad[i] = static_cast<char>(bad[i] ^ 0x10);
    EXPECT_THROW(deserialize_checkpoint(bad), IntegrityError) << "byte " << i;
  }
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 1)), IntegrityError);
  EXPECT_THROW(deserialize_checkpoint("BTCKPT01"), IntegrityError);
  EXPECT_THROW(deserialize_checkpoint(""), IntegrityError);
}

// ------------------------------------------------------------------ metrics

TEST(MetricsTest, CsvHasHeaderAndOneLinePerRow) {
  std::ostringstream out;
  write_metrics_csv(out, three_rows());
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0],
            "env_steps,mean_return,median_return,first_goal_step,extra_action_usage,"
            "flight_fraction,unique_states,mean_episode_length,intrinsic_error,wall_time_s");
  EXPECT_EQ(lines[1].substr(0, 6), "0,0,0,");
  std::istringstream again(out.str());
  // Reals are written with ten significant digits.
  const auto back = read_metrics_csv(again);
  const auto want = three_rows();
  ASSERT_EQ(back.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.rows[i].env_steps, want.rows[i].env_steps);
    EXPECT_EQ(back.rows[i].first_goal_step, want.rows[i].first_goal_step);
    EXPECT_DOUBLE_EQ(back.rows[i].mean_return, want.rows[i].mean_return);
    EXPECT_NEAR(back.rows[i].intrinsic_error, want.rows[i].intrinsic_error, 1e-10);
    EXPECT_NEAR(back.rows[i].mean_episode_length, want.rows[i].mean_episode_length, 1e-9);
  }
}

TEST(MetricsTest, SvgIsWellFormedWithOnePolylinePerSeries) {
  const std::vector<double> x = {0, 1, 2};
  const std::vector<Series> series = {{"a<b", {1, 2, 3}}, {"c", {3, 2, 1}}, {"d", {0, 0, 0}}};
  std::istringstream in(render_svg("t & t", x, series));
  boost::property_tree::ptree tree;
  ASSERT_NO_THROW(boost::property_tree::read_xml(in, tree));
  int polylines = 0;
  std::set<std::string> names;
  for (const auto& [tag, node] : tree.get_child("svg")) {
    if (tag != "polyline") continue;
    ++polylines;
    names.insert(node.get<std::string>("<xmlattr>.data-series"));
    std::istringstream pts(node.get<std::string>("<xmlattr>.points"));
    int n = 0;
    for (std::string p; pts >> p;) ++n;
    EXPECT_EQ(n, 3);
  }
  EXPECT_EQ(polylines, 3);
  EXPECT_EQ(names, (std::set<std::string>{"a<b", "c", "d"}));
}

TEST(MetricsTest, EmitIsDeterministic) {
  const auto a = temp_dir("emit_a");
  const auto b = temp_dir("emit_b");
  emit_metrics(three_rows(), a.string());
  emit_metrics(three_rows(), b.string());
  const auto first = read_file(a / "metrics.csv");
  emit_metrics(three_rows(), a.string());
  EXPECT_EQ(read_file(a / "metrics.csv"), first);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(read_file(e.path()), read_file(b / e.path().filename())) << e.path();
  }
  EXPECT_EQ(static_cast<std::size_t>(files), metrics_columns().size());  // csv + one chart per metric
  boost::property_tree::ptree tree;
  std::ifstream usage(a / "extra_action_usage.svg");
  boost::property_tree::read_xml(usage, tree);
  int polylines = 0;
  for (const auto& [tag, node] : tree.get_child("svg")) polylines += tag == "polyline";
  EXPECT_EQ(polylines, 2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(MetricsTest, UnwritableDirectoryIsIoError) {
  const auto dir = temp_dir("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(emit_metrics(three_rows(), (dir / "file" / "sub").string()), IoError);
  fs::remove_all(dir);
}

TEST(RunRecordTest, RowsStrictlyIncrease) {
  RunRecord r = three_rows();
  EvalRow row;
  row.env_steps = 200;
  EXPECT_THROW(r.append(row), ValidationError);
  row.env_steps = 201;
  EXPECT_NO_THROW(r.append(row));
}

TEST(RunRecordTest, MovingAverageAndMedian) {
  const auto ma = moving_average({1, 2, 3, 4}, 2);
  EXPECT_EQ(ma, (std::vector<double>{1, 1.5, 2.5, 3.5}));
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
}

// ----------------------------------------------------------------- evaluate

TEST(EvaluateTest, DeterministicPolicyRepeatsItsReturn) {
  env::EnvSpec spec;
  spec.kind = env::EnvKind::chain;
  spec.size = 5;
  env::Environment e(spec);
  const auto obs = env::ObservationTable::from(e);
  auto q = learner::QFunction::tabular(5, 3, false);
  for (StateId s = 0; s < 5; ++s) q.set_q(s, 1, 1.0);  // always right
  const auto ev = evaluate(q, nullptr, obs, e, 4);
  ASSERT_EQ(ev.returns.size(), 4u);
  for (double r : ev.returns) EXPECT_DOUBLE_EQ(r, ev.returns[0]);
  EXPECT_DOUBLE_EQ(ev.mean_return, 1.0);
  EXPECT_DOUBLE_EQ(ev.mean_episode_length, 4.0);
  EXPECT_DOUBLE_EQ(ev.unique_states, 5.0);
  EXPECT_DOUBLE_EQ(ev.extra_action_usage, 0.0);
  EXPECT_THROW(evaluate(q, nullptr, obs, e, 0), ValidationError);
}

TEST(EvaluateTest, ExtraActionUsageWhenStrictlyMaximal) {
  env::EnvSpec spec;
  spec.size = 5;
  env::Environment e(spec);
  const auto obs = env::ObservationTable::from(e);
  auto q = learner::QFunction::tabular(5, 3, true);
  for (StateId s = 0; s < 5; ++s) q.set_q(s, q.extra_action(), 1.0);
  const auto pi_p = explore::FrozenPolicy::scripted({1, 1, 1, 1, 1}, 3);
  const auto ev = evaluate(q, &pi_p, obs, e, 2);
  EXPECT_DOUBLE_EQ(ev.extra_action_usage, 1.0);
  EXPECT_DOUBLE_EQ(ev.mean_return, 1.0);
  EXPECT_THROW(evaluate(q, nullptr, obs, e, 1), UsageError);
}

// --------------------------------------------------------------------- runs

TEST(RunTest, DeterministicRunsAreIdentical) {
  const auto cfg = small_pretrain();
  const auto a = pretrain_run(cfg);
  const auto b = pretrain_run(cfg);
  EXPECT_EQ(serialize_checkpoint(a.checkpoint), serialize_checkpoint(b.checkpoint));
  EXPECT_TRUE(a.record.same_results(b.record));
  EXPECT_GT(a.learner_updates, 0u);

  auto t = small_transfer("ez_greedy_repeat");
  const auto c = transfer_run(t);
  const auto d = transfer_run(t);
  EXPECT_TRUE(c.record.same_results(d.record));
  EXPECT_EQ(serialize_checkpoint(c.checkpoint), serialize_checkpoint(d.checkpoint));
}

TEST(RunTest, PretrainingIgnoresExtrinsicReward) {
  for (const std::string phase : {"pretrain_ngu", "pretrain_rnd"}) {
    auto with_reward = small_pretrain(phase);
    with_reward.set("env.reward_variant", "deceptive_hard");
    with_reward.set("env.goal_reward", "10");
    with_reward.set("env.distractor_reward", "0.5");
    auto without = with_reward;
    without.set("env.goal_reward", "0");
    without.set("env.distractor_reward", "0");
    EXPECT_EQ(serialize_checkpoint(pretrain_run(with_reward).checkpoint),
              serialize_checkpoint(pretrain_run(without).checkpoint))
        << phase;
  }
}

TEST(RunTest, RowCountAndStaleness) {
  auto cfg = small_transfer("eps_greedy");
  cfg.set("run.total_env_steps", "2500");
  cfg.set("run.eval_every", "1000");
  cfg.set("run.actor_refresh", "37");
  const auto r = transfer_run(cfg);
  // Row at step 0, one per multiple of eval_every, and the final step.
  ASSERT_EQ(r.record.rows.size(), 4u);
  EXPECT_EQ(r.record.rows.front().env_steps, 0);
  EXPECT_EQ(r.record.rows.back().env_steps, 2500);
  EXPECT_LE(r.max_snapshot_staleness, 37);
  EXPECT_GT(r.max_snapshot_staleness, 0);

  cfg.set("run.total_env_steps", "3000");
  EXPECT_EQ(transfer_run(cfg).record.rows.size(), 4u);
}

TEST(RunTest, ThreadedModeHonoursContracts) {
  auto cfg = small_transfer("eps_greedy");
  cfg.set("run.deterministic", "false");
  cfg.set("run.actor_refresh", "50");
  const auto r = transfer_run(cfg);
  EXPECT_EQ(r.record.rows.size(), 4u);
  EXPECT_EQ(r.record.rows.back().env_steps, 3000);
  EXPECT_LE(r.max_snapshot_staleness, 50);
  EXPECT_NEAR(static_cast<double>(r.learner_updates), 3000.0 / 4.0, 3000.0 / 4.0 * 0.1);
}

TEST(RunTest, FrozenPolicyDigestUnchangedAndFullInitCopiesPolicy) {
  const auto pre = pretrain_run(small_pretrain());
  const auto obs_env = env::Environment(small_transfer("eps_greedy").env);
  for (const std::string mode : {"bt_flights", "bt_action", "bt_full"}) {
    auto cfg = small_transfer(mode);
    cfg.set("run.init_mode", "full");
    const auto r = transfer_run(cfg, &pre.checkpoint);
    EXPECT_EQ(r.policy_digest_before, r.policy_digest_after) << mode;
    EXPECT_EQ(r.policy_digest_before.size(), 64u);
  }

  // Before any update, full init evaluates exactly like the checkpoint.
  auto cfg = small_transfer("eps_greedy");
  cfg.set("run.init_mode", "full");
  const auto r = transfer_run(cfg, &pre.checkpoint);
  env::Environment e(cfg.env);
  const auto obs = env::ObservationTable::from(e);
  const auto ev = evaluate(pre.checkpoint.q, nullptr, obs, e, cfg.run.eval_episodes);
  EXPECT_EQ(r.record.rows.front().mean_return, ev.mean_return);
  EXPECT_EQ(r.record.rows.front().mean_episode_length, ev.mean_episode_length);
}

TEST(RunTest, ArchitectureMismatchIsConfigError) {
  const auto pre = pretrain_run(small_pretrain());
  auto cfg = small_transfer("bt_full");
  cfg.set("env.size", "9");
  EXPECT_THROW(transfer_run(cfg, &pre.checkpoint), ConfigError);
}

TEST(RunTest, RndErrorFallsDuringPretraining) {
  auto cfg = small_pretrain("pretrain_rnd");
  cfg.set("run.total_env_steps", "20000");
  cfg.set("run.eval_every", "2000");
  cfg.set("env.size", "12");
  const auto r = pretrain_run(cfg);
  const double first = r.record.rows.front().intrinsic_error;
  const double last = r.record.rows.back().intrinsic_error;
  EXPECT_GT(first, 0.0);
  EXPECT_LT(last, first);
}

TEST(RunTest, NguPretrainingCoversMoreThanRandomWalk) {
  auto cfg = from_text(R"(
run.phase = pretrain_ngu
run.seed = 1
run.total_env_steps = 200000
run.eval_every = 50000
run.eval_episodes = 100
env.kind = four_rooms
env.size = 11
learner.gamma = 0.7
learner.tabular_step_size = 0.1
learner.target_period = 250
)");
  const auto r = pretrain_run(cfg);
  const double trained = r.record.rows.back().unique_states;

  // Uniform-random baseline over 100 episodes of the same environment.
  env::Environment e(cfg.env);
  Rng rng(99);
  double random_sum = 0.0;
  for (int ep = 0; ep < 100; ++ep) {
    std::set<StateId> seen{e.reset()};
    for (;;) {
      const auto res = e.step(static_cast<ActionId>(uniform_index(rng, e.num_actions())));
      seen.insert(res.next_state);
      if (res.done()) break;
    }
    random_sum += static_cast<double>(seen.size());
  }
  const double random = random_sum / 100.0;
  RecordProperty("trained_unique_states", std::to_string(trained));
  RecordProperty("random_unique_states", std::to_string(random));
  EXPECT_GE(trained, 2.0 * random) << "trained " << trained << " random " << random;
}
