#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bt/intrinsic/embedding.hpp"
#include "bt/intrinsic/episodic_memory.hpp"
#include "bt/intrinsic/ngu.hpp"
#include "bt/intrinsic/rnd.hpp"
#include "bt/intrinsic/running_stats.hpp"
#include "bt/intrinsic/two_layer_net.hpp"
#include "oracles.hpp"

using namespace bt;
using namespace bt::intrinsic;

namespace {

std::vector<double> random_vector(Rng& rng, int n, double scale = 1.0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

RunningStats stats_of(std::initializer_list<double> xs) {
  RunningStats s;
  for (double x : xs) s.push(x);
  return s;
}

RndConfig rnd_config(int input_dim, PredictorKind kind = PredictorKind::two_layer) {
  RndConfig c;
  c.input_dim = input_dim;
  c.embed_dim = 4;
  c.hidden = 8;
  c.predictor = kind;
  c.seed = 3;
  return c;
}

}  // namespace

// ---------------------------------------------------------------- statistics

TEST(RunningStatsTest, MatchesTwoPassComputation) {
  Rng rng(1);
  std::vector<double> xs = random_vector(rng, 1000, 5.0);
  RunningStats s;
  for (double x : xs) s.push(x);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / 1000.0;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= 1000.0;
  EXPECT_NEAR(s.mean(), mean, 1e-12);
  EXPECT_NEAR(s.variance(), var, 1e-10);
  EXPECT_EQ(s.count(), 1000u);
}

TEST(RunningStatsTest, BatchMergeIsOrderInvariant) {
  Rng rng(2);
  std::vector<double> xs = random_vector(rng, 64);
  std::vector<double> ys = xs;
  std::reverse(ys.begin(), ys.end());
  std::swap(ys[3], ys[40]);
  RunningStats a = stats_of({0.5, 1.5});
  RunningStats b = a;
  a.push_batch(xs);
  b.push_batch(ys);
  EXPECT_EQ(a, b);

  RunningStats c = stats_of({0.5, 1.5});
  for (double x : xs) c.push(x);
  EXPECT_NEAR(a.mean(), c.mean(), 1e-12);
  EXPECT_NEAR(a.variance(), c.variance(), 1e-12);
}

// ------------------------------------------------------------------ Eq. 1

TEST(NguRewardTest, HandEvaluatedCases) {
  EXPECT_NEAR(ngu_reward(0.7, 0.3, 5.0), 0.7, 1e-12);
  EXPECT_NEAR(ngu_reward(0.7, 2.0, 5.0), 1.4, 1e-12);
  EXPECT_NEAR(ngu_reward(0.7, 10.0, 5.0), 3.5, 1e-12);
  EXPECT_NEAR(ngu_reward(0.7, -4.0, 5.0), 0.7, 1e-12);
  EXPECT_NEAR(ngu_reward(0.0, 3.0, 5.0), 0.0, 1e-12);
}

TEST(NguRewardTest, MultiplierStaysInRange) {
  Rng rng(4);
  for (int i = 0; i < 100000; ++i) {
    const double alpha = 40.0 * uniform01(rng) - 20.0;
    const double L = 1.0 + 9.0 * uniform01(rng);
    const double m = ngu_multiplier(alpha, L);
    ASSERT_GE(m, 1.0);
    ASSERT_LE(m, L);
    const double r = 3.0 * uniform01(rng);
    const double reward = ngu_reward(r, alpha, L);
    ASSERT_GE(reward, r);
    ASSERT_LE(reward, L * r + 1e-15);
  }
}

TEST(NguConfigTest, ValidatesConstants) {
  NGUConfig c;
  EXPECT_NO_THROW(c.validate());
  c.k = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.L = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.eps_kernel = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(NguConfigTest, DefaultsMatchReferenceConstants) {
  const NGUConfig c;
  EXPECT_EQ(c.k, 10);
  EXPECT_DOUBLE_EQ(c.c, 0.001);
  EXPECT_DOUBLE_EQ(c.eps_kernel, 0.001);
  EXPECT_DOUBLE_EQ(c.xi, 0.008);
  EXPECT_DOUBLE_EQ(c.s_m, 8.0);
  EXPECT_DOUBLE_EQ(c.L, 5.0);
}

// ----------------------------------------------------------- episodic reward

TEST(EpisodicRewardTest, TwoZeroDistanceNeighbours) {
  NGUConfig cfg;
  cfg.k = 2;
  EpisodicMemory mem(3);
  const std::vector<double> x = {0.1, 0.2, 0.3};
  mem.add(x);
  mem.add(x);
  const double r = episodic_reward(mem, x, cfg);
  EXPECT_NEAR(r, 1.0 / (std::sqrt(2.0) + 0.001), 1e-12);
  EXPECT_NEAR(r, 0.70657, 5e-5);
}

TEST(EpisodicRewardTest, SimilarityAboveMaximumGivesZero) {
  NGUConfig cfg;
  cfg.k = 100;
  EpisodicMemory mem(2);
  const std::vector<double> x = {1.0, -1.0};
  for (int i = 0; i < 100; ++i) mem.add(x);
  EXPECT_DOUBLE_EQ(episodic_reward(mem, x, cfg), 0.0);
}

TEST(EpisodicRewardTest, EmptyMemoryIsMaximallyNovel) {
  NGUConfig cfg;
  EpisodicMemory mem(2);
  EXPECT_DOUBLE_EQ(episodic_reward(mem, std::vector<double>{0.0, 1.0}, cfg), 1.0 / cfg.c);
  cfg.c = 0.0;
  EXPECT_DOUBLE_EQ(episodic_reward(mem, std::vector<double>{0.0, 1.0}, cfg), 1.0 / cfg.eps_kernel);
}

TEST(EpisodicRewardTest, RepeatedQuerySeesKernelIdentity) {
  NGUConfig cfg;
  cfg.k = 1;
  EpisodicMemory mem(2);
  const std::vector<double> x = {0.4, 0.6};
  EXPECT_DOUBLE_EQ(episodic_reward(mem, x, cfg), 1.0 / cfg.c);
  mem.add(x);
  EXPECT_DOUBLE_EQ(episodic_reward(mem, x, cfg), 1.0 / (1.0 + cfg.c));
}

TEST(EpisodicRewardTest, ZeroDistanceKernelIsOneWithWarmMean) {
  // With a positive running mean, a zero-distance neighbour still has K = 1.
  NGUConfig cfg;
  cfg.k = 1;
  Rng rng(8);
  EpisodicMemory mem(3);
  for (int i = 0; i < 20; ++i) {
    mem.reset_episode();
    mem.add(random_vector(rng, 3));
    episodic_reward(mem, random_vector(rng, 3), cfg);
  }
  ASSERT_GT(mem.d2_running_mean(), cfg.d2m_floor);
  mem.reset_episode();
  const auto x = random_vector(rng, 3);
  mem.add(x);
  EXPECT_DOUBLE_EQ(episodic_reward(mem, x, cfg), 1.0 / (1.0 + cfg.c));
}

TEST(EpisodicRewardTest, MatchesBruteForceOracle) {
  Rng rng(12);
  int zero_branch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    NGUConfig cfg;
    cfg.k = 1 + static_cast<int>(uniform_index(rng, 12));
    cfg.s_m = trial % 3 == 0 ? 0.5 + uniform01(rng) : 8.0;
    const int dim = 1 + static_cast<int>(uniform_index(rng, 8));
    const int size = static_cast<int>(uniform_index(rng, 51));
    EpisodicMemory mem(dim);
    std::vector<std::vector<double>> ref;
    oracle::SumMean d2m;
    // A few earlier queries warm up the running mean on both sides.
    for (int w = 0; w < 3; ++w) {
      const auto q = random_vector(rng, dim);
      episodic_reward(mem, q, cfg);
      oracle::episodic_reward(ref, q, cfg, d2m);
      mem.add(q);
      ref.push_back(q);
    }
    for (int i = 0; i < size; ++i) {
      auto e = random_vector(rng, dim);
      if (i % 7 == 3) e = ref.back();
      mem.add(e);
      ref.push_back(e);
    }
    const auto query = uniform01(rng) < 0.2 ? ref[static_cast<std::size_t>(uniform_index(rng, static_cast<std::int64_t>(ref.size())))]
                                            : random_vector(rng, dim);
    const double got = episodic_reward(mem, query, cfg);
    const double want = oracle::episodic_reward(ref, query, cfg, d2m);
    ASSERT_NEAR(got, want, 1e-9) << "trial " << trial;
    ASSERT_NEAR(mem.d2_running_mean(), d2m.mean(), 1e-9);
    if (want == 0.0) ++zero_branch;
  }
  EXPECT_GT(zero_branch, 0);
}

TEST(EpisodicRewardTest, RewardBoundedByInverseC) {
  Rng rng(13);
  NGUConfig cfg;
  EpisodicMemory mem(4);
  for (int t = 0; t < 2000; ++t) {
    if (t % 50 == 0) mem.reset_episode();
    const auto e = random_vector(rng, 4, 0.1);
    const double r = episodic_reward(mem, e, cfg);
    ASSERT_GE(r, 0.0);
    ASSERT_LE(r, 1.0 / cfg.c);
    mem.add(e);
  }
}

TEST(EpisodicMemoryTest, LengthTracksEpisodeSteps) {
  EpisodicMemory mem;
  EXPECT_EQ(mem.size(), 0u);
  for (int t = 1; t <= 5; ++t) {
    mem.add(std::vector<double>{double(t), 0.0});
    EXPECT_EQ(mem.size(), static_cast<std::size_t>(t));
  }
  const double d2 = mem.d2_running_mean();
  mem.reset_episode();
  EXPECT_EQ(mem.size(), 0u);
  EXPECT_TRUE(mem.empty());
  EXPECT_DOUBLE_EQ(mem.d2_running_mean(), d2);
  EXPECT_THROW(mem.add(std::vector<double>{1.0}), ValidationError);
}

TEST(EpisodicMemoryTest, RunningMeanReachesConstantInput) {
  EpisodicMemory mem(1);
  NGUConfig cfg;
  cfg.k = 1;
  mem.add(std::vector<double>{0.0});
  for (int i = 0; i < 10000; ++i) episodic_reward(mem, std::vector<double>{0.5}, cfg);
  EXPECT_NEAR(mem.d2_running_mean(), 0.25, 1e-6);
  EXPECT_EQ(mem.count_updates(), 10000u);
}

TEST(EpisodicMemoryTest, NearestDistancesAscending) {
  EpisodicMemory mem(1);
  for (double v : {5.0, 1.0, 3.0, 2.0}) mem.add(std::vector<double>{v});
  const auto d = mem.nearest_sq_distances(std::vector<double>{0.0}, 3);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_DOUBLE_EQ(d[0], 1.0);
  EXPECT_DOUBLE_EQ(d[1], 4.0);
  EXPECT_DOUBLE_EQ(d[2], 9.0);
}

// ---------------------------------------------------------------- embedding

TEST(EmbeddingTest, IdentityReturnsInput) {
  EmbeddingConfig c;
  c.input_dim = 2;
  EmbeddingFn f(c);
  const auto e = f.embed(std::vector<double>{0.5, -1.0});
  EXPECT_DOUBLE_EQ(e[0], 0.5);
  EXPECT_DOUBLE_EQ(e[1], -1.0);
  EXPECT_THROW(f.embed(std::vector<double>{1.0}), ValidationError);
  c.dim_out = 3;
  EXPECT_THROW(EmbeddingFn{c}, ConfigError);
}

TEST(EmbeddingTest, RandomProjectionIsMatrixProduct) {
  EmbeddingConfig c;
  c.mode = EmbeddingMode::random_projection;
  c.input_dim = 5;
  c.dim_out = 3;
  c.seed = 9;
  EmbeddingFn f(c);
  Rng rng(1);
  const auto x = random_vector(rng, 5);
  const auto e = f.embed(x);
  const auto& W = f.projection();
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 5; ++j) acc += W(i, j) * x[static_cast<std::size_t>(j)];
    EXPECT_NEAR(e[i], acc, 1e-14);
  }
  const auto again = f.embed(x);
  EXPECT_TRUE((again.array() == e.array()).all());
  EXPECT_THROW(f.train_inverse_dynamics({}), UsageError);
}

TEST(EmbeddingTest, InverseDynamicsStartsUniform) {
  EmbeddingConfig c;
  c.mode = EmbeddingMode::inverse_dynamics;
  c.input_dim = 6;
  c.dim_out = 4;
  c.n_actions = 4;
  EmbeddingFn f(c);
  Rng rng(2);
  std::vector<std::vector<double>> obs;
  for (int i = 0; i < 8; ++i) obs.push_back(random_vector(rng, 6));
  std::vector<DynamicsSample> batch;
  for (int i = 0; i < 7; ++i) batch.push_back({obs[i], static_cast<ActionId>(i % 4), obs[i + 1]});
  EXPECT_NEAR(f.train_inverse_dynamics(batch), std::log(4.0), 1e-12);
}

TEST(EmbeddingTest, InverseDynamicsLearnsLearnableToy) {
  // Two states, two actions; action a moves to state a, so the action is a
  // function of (s_t, s_{t+1}).
  const std::vector<std::vector<double>> s = {{1.0, 0.0}, {0.0, 1.0}};
  std::vector<DynamicsSample> batch;
  for (int from = 0; from < 2; ++from) {
    for (int a = 0; a < 2; ++a) batch.push_back({s[from], a, s[a]});
  }

  // Oracle: an independent logistic model on [s_t, s_{t+1}] reaches a low
  // loss on the same data, so the mapping is learnable.
  double w[4] = {0, 0, 0, 0};
  double b = 0.0;
  double logistic_loss = 0.0;
  for (int it = 0; it < 5000; ++it) {
    double gw[4] = {0, 0, 0, 0};
    double gb = 0.0;
    logistic_loss = 0.0;
    for (const auto& smp : batch) {
      const double x[4] = {smp.obs[0], smp.obs[1], smp.next_obs[0], smp.next_obs[1]};
      double z = b;
      for (int i = 0; i < 4; ++i) z += w[i] * x[i];
      const double p = 1.0 / (1.0 + std::exp(-z));
      logistic_loss -= smp.action == 1 ? std::log(p) : std::log(1.0 - p);
      for (int i = 0; i < 4; ++i) gw[i] += (p - smp.action) * x[i];
      gb += p - smp.action;
    }
    logistic_loss /= 4.0;
    for (int i = 0; i < 4; ++i) w[i] -= 0.5 * gw[i];
    b -= 0.5 * gb;
  }
  ASSERT_LT(logistic_loss, 0.05);

  EmbeddingConfig c;
  c.mode = EmbeddingMode::inverse_dynamics;
  c.input_dim = 2;
  c.dim_out = 4;
  c.hidden = 16;
  c.n_actions = 2;
  c.optimizer.step_size = 1e-2;
  c.seed = 4;
  EmbeddingFn f(c);
  for (int i = 0; i < 2000; ++i) f.train_inverse_dynamics(batch);
  EXPECT_LT(f.inverse_dynamics_loss(batch), 0.05);
}

TEST(EmbeddingTest, SingleSampleLossNonIncreasing) {
  EmbeddingConfig c;
  c.mode = EmbeddingMode::inverse_dynamics;
  c.input_dim = 3;
  c.dim_out = 3;
  c.n_actions = 3;
  c.seed = 5;
  EmbeddingFn f(c);
  const std::vector<double> a = {0.2, -0.4, 1.0};
  const std::vector<double> b = {0.9, 0.1, -0.3};
  const std::vector<DynamicsSample> batch = {{a, 2, b}};
  double prev = f.train_inverse_dynamics(batch);
  for (int i = 0; i < 100; ++i) {
    const double cur = f.train_inverse_dynamics(batch);
    ASSERT_LE(cur, prev + 1e-12) << "step " << i;
    prev = cur;
  }
}

TEST(EmbeddingTest, InverseDynamicsGradientMatchesFiniteDifferences) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    EmbeddingConfig c;
    c.mode = EmbeddingMode::inverse_dynamics;
    c.input_dim = 4;
    c.dim_out = 3;
    c.hidden = 5;
    c.n_actions = 3;
    c.seed = static_cast<std::uint64_t>(trial);
    EmbeddingFn f(c);
    // Give the classifier non-zero output weights so every path carries gradient.
    f.classifier().params().w2 = Eigen::MatrixXd::Random(3, 5) * 0.5;
    const auto x0 = random_vector(rng, 4);
    const auto x1 = random_vector(rng, 4);
    const auto x2 = random_vector(rng, 4);
    const std::vector<DynamicsSample> batch = {{x0, static_cast<ActionId>(trial % 3), x1},
                                               {x1, static_cast<ActionId>((trial + 1) % 3), x2}};
    LayerParams ge = f.encoder().params().zeros_like();
    LayerParams gc = f.classifier().params().zeros_like();
    f.inverse_dynamics_loss(batch, &ge, &gc);
    const auto loss = [&] { return f.inverse_dynamics_loss(batch); };
    const auto ne = oracle::numeric_gradient(f.encoder().params(), loss);
    const auto nc = oracle::numeric_gradient(f.classifier().params(), loss);
    ASSERT_LT(oracle::max_relative_error(oracle::flatten(ge), ne), 1e-4) << "trial " << trial;
    ASSERT_LT(oracle::max_relative_error(oracle::flatten(gc), nc), 1e-4) << "trial " << trial;
  }
}

// ----------------------------------------------------------------- networks

TEST(TwoLayerNetTest, BackwardMatchesFiniteDifferences) {
  Rng rng(30);
  TwoLayerNet net(5, 7, 3, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const auto xv = random_vector(rng, 5);
    const auto gv = random_vector(rng, 3);
    const Eigen::Map<const Eigen::VectorXd> x(xv.data(), 5);
    const Eigen::Map<const Eigen::VectorXd> gout(gv.data(), 3);
    TwoLayerNet::Trace tr;
    net.forward(x, tr);
    LayerParams g = net.params().zeros_like();
    Eigen::VectorXd gin;
    net.backward(x, tr, gout, g, &gin);
    const auto loss = [&] { return gout.dot(net.forward(x)); };
    ASSERT_LT(oracle::max_relative_error(oracle::flatten(g), oracle::numeric_gradient(net.params(), loss)), 1e-6);
    for (int i = 0; i < 5; ++i) {
      Eigen::VectorXd xp = x;
      Eigen::VectorXd xm = x;
      xp[i] += 1e-6;
      xm[i] -= 1e-6;
      EXPECT_NEAR(gin[i], (gout.dot(net.forward(xp)) - gout.dot(net.forward(xm))) / 2e-6, 1e-6);
    }
  }
}

TEST(TwoLayerNetTest, ZeroOutputScaleGivesZeroOutput) {
  Rng rng(1);
  TwoLayerNet net(3, 4, 2, rng, 0.0);
  EXPECT_TRUE(net.forward(Eigen::Vector3d(1.0, 2.0, 3.0)).isZero());
}

// ---------------------------------------------------------------------- RND

TEST(RndTest, IdenticalNetworksGiveZeroError) {
  RndState rnd(rnd_config(6));
  rnd.copy_target_into_predictor();
  Rng rng(1);
  EXPECT_DOUBLE_EQ(rnd_error(rnd, random_vector(rng, 6)), 0.0);

  RndState linear(rnd_config(6, PredictorKind::linear));
  EXPECT_THROW(linear.copy_target_into_predictor(), UsageError);
}

TEST(RndTest, ErrorIsSquaredDistanceOfOutputs) {
  RndConfig c = rnd_config(3, PredictorKind::linear);
  c.embed_dim = 1;
  RndState rnd(c);
  const std::vector<double> s = {0.3, -0.2, 0.7};
  const double g = rnd.target().forward(as_vector(s))[0];
  rnd.predictor().params().w2.setZero();
  rnd.predictor().params().b2[0] = g - 0.2;  // prediction 0.3 against target 0.5 after shifting
  EXPECT_NEAR(rnd_error(rnd, s), 0.04, 1e-12);
  EXPECT_DOUBLE_EQ(rnd_error(rnd, s), rnd_error(rnd, s));
  EXPECT_THROW(rnd_error(rnd, std::vector<double>{1.0}), ValidationError);
}

TEST(RndTest, TrainingShrinksErrorOnFixedObservation) {
  for (auto kind : {PredictorKind::two_layer, PredictorKind::linear}) {
    RndConfig c = rnd_config(5, kind);
    c.optimizer.step_size = 1e-2;
    RndState rnd(c);
    Rng rng(6);
    const auto s = random_vector(rng, 5);
    const std::vector<std::span<const double>> batch = {s};
    const auto target_before = rnd.target().params();
    const double initial = rnd_error(rnd, s);
    ASSERT_GT(initial, 0.0);
    for (int i = 0; i < 1000; ++i) rnd_train(rnd, batch);
    EXPECT_LT(rnd_error(rnd, s), 0.1 * initial) << to_string(kind);
    EXPECT_TRUE(rnd.target().params() == target_before);
  }
}

TEST(RndTest, LinearPredictorApproachesLeastSquaresOptimum) {
  // With fewer observations than input dimensions, the linear least-squares
  // fit interpolates the targets exactly, so the optimum error is zero.
  RndConfig c = rnd_config(6, PredictorKind::linear);
  c.optimizer.step_size = 1e-2;
  RndState rnd(c);
  Rng rng(7);
  std::vector<std::vector<double>> obs;
  for (int i = 0; i < 3; ++i) obs.push_back(random_vector(rng, 6));
  Eigen::MatrixXd X(7, 3);
  Eigen::MatrixXd Y(3, c.embed_dim);
  for (int i = 0; i < 3; ++i) {
    X.col(i) << as_vector(obs[i]), 1.0;
    Y.row(i) = rnd.target().forward(as_vector(obs[i])).transpose();
  }
  const Eigen::MatrixXd W = X.transpose().completeOrthogonalDecomposition().solve(Y);
  EXPECT_LT((X.transpose() * W - Y).norm(), 1e-10);

  std::vector<std::span<const double>> batch(obs.begin(), obs.end());
  for (int i = 0; i < 3000; ++i) rnd_train(rnd, batch);
  double total = 0.0;
  for (const auto& o : obs) total += rnd_error(rnd, o);
  EXPECT_LT(total, 1e-3);
}

TEST(RndTest, FirstBatchSetsMeanError) {
  RndState rnd(rnd_config(4));
  Rng rng(8);
  std::vector<std::vector<double>> obs;
  for (int i = 0; i < 6; ++i) obs.push_back(random_vector(rng, 4));
  double mean = 0.0;
  for (const auto& o : obs) mean += rnd_error(rnd, o);
  mean /= 6.0;
  std::vector<std::span<const double>> batch(obs.begin(), obs.end());
  const double reported = rnd_train(rnd, batch);
  EXPECT_NEAR(rnd.mu_e(), mean, 1e-12);
  EXPECT_NEAR(reported, mean, 1e-12);
}

TEST(RndTest, StatisticsIgnoreBatchOrder) {
  RndState a(rnd_config(4));
  RndState b(rnd_config(4));
  Rng rng(9);
  std::vector<std::vector<double>> obs;
  for (int i = 0; i < 9; ++i) obs.push_back(random_vector(rng, 4));
  std::vector<std::span<const double>> fwd(obs.begin(), obs.end());
  std::vector<std::span<const double>> rev(obs.rbegin(), obs.rend());
  rnd_train(a, fwd);
  rnd_train(b, rev);
  EXPECT_EQ(a.stats(), b.stats());
  EXPECT_LT((a.predictor().params().w1 - b.predictor().params().w1).cwiseAbs().maxCoeff(), 1e-12);
  for (const auto& o : obs) EXPECT_NEAR(rnd_error(a, o), rnd_error(b, o), 1e-12);
}

TEST(RndTest, ModulatorExamples) {
  RndState rnd(rnd_config(2));
  rnd.set_stats(stats_of({0.5, 1.5}));  // mean 1, sd 0.5
  EXPECT_DOUBLE_EQ(lifelong_modulator(rnd, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(lifelong_modulator(rnd, 2.0), 2.0);
  rnd.set_stats(stats_of({3.0, 3.0, 3.0}));  // sd 0 -> floor
  EXPECT_DOUBLE_EQ(rnd.sigma_e(), 1e-8);
  const double a = lifelong_modulator(rnd, 3.5);
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_NEAR(a, 0.5 / 1e-8, 1e-3);
}

TEST(RndTest, RewardExamples) {
  RndState rnd(rnd_config(2));
  rnd.set_stats(stats_of({-3.0, 5.0}));  // sd 4
  EXPECT_DOUBLE_EQ(rnd_reward(rnd, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(rnd_reward(rnd, 0.0), 0.0);
}

TEST(RndTest, RewardIsScaleInvariant) {
  Rng rng(10);
  std::vector<double> errs = random_vector(rng, 200, 3.0);
  for (auto& e : errs) e = std::abs(e);
  std::vector<double> scaled = errs;
  for (auto& e : scaled) e *= 10.0;
  RndState a(rnd_config(2));
  RndState b(rnd_config(2));
  a.observe_errors(errs);
  b.observe_errors(scaled);
  for (std::size_t i = 0; i < errs.size(); i += 17) {
    EXPECT_NEAR(rnd_reward(a, errs[i]), rnd_reward(b, scaled[i]), 1e-12 * (1.0 + rnd_reward(a, errs[i])));
  }
}

TEST(RndTest, PredictorGradientMatchesFiniteDifferences) {
  Rng rng(40);
  for (int trial = 0; trial < 50; ++trial) {
    RndConfig c = rnd_config(5, trial % 2 ? PredictorKind::linear : PredictorKind::two_layer);
    c.seed = static_cast<std::uint64_t>(trial);
    RndState rnd(c);
    std::vector<std::vector<double>> obs;
    for (int i = 0; i < 3; ++i) obs.push_back(random_vector(rng, 5));
    std::vector<std::span<const double>> batch(obs.begin(), obs.end());
    LayerParams g = rnd.predictor().params().zeros_like();
    rnd.loss_and_gradient(batch, &g);
    const auto numeric = oracle::numeric_gradient(rnd.predictor().params(),
                                                  [&] { return rnd.loss_and_gradient(batch, nullptr); });
    ASSERT_LT(oracle::max_relative_error(oracle::flatten(g), numeric), 1e-4) << "trial " << trial;
  }
}

TEST(RndTest, ConfigValidation) {
  RndConfig c = rnd_config(0);
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_predictor_kind("linear"), PredictorKind::linear);
  EXPECT_THROW(parse_predictor_kind("mlp"), ConfigError);
}
