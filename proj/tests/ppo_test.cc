#include "marlte/ppo.h"

#include <cmath>
#include <gtest/gtest.h>

#include "fixtures.h"
#include "gradcheck.h"

namespace marlte {
namespace {

using testing_util::LoadData;

// Direct double-loop GAE: A_t = sum_{l>=0} (gamma lambda)^l delta_{t+l}.
std::vector<double> DoubleLoopGae(const std::vector<double>& r,
                                  const std::vector<double>& v, double gamma,
                                  double lambda) {
  size_t n = r.size();
  std::vector<double> a(n, 0.0);
  for (size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (size_t k = t; k < n; ++k) {
      double next = k + 1 < n ? v[k + 1] : 0.0;
      a[t] += weight * (r[k] + gamma * next - v[k]);
      weight *= gamma * lambda;
    }
  }
  return a;
}

std::vector<double> RandomVector(size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

TEST(Gae, MatchesDoubleLoop) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 1 + trial % 12;
    std::vector<double> r = RandomVector(n, rng);
    std::vector<double> v = RandomVector(n, rng);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    double gamma = u(rng);
    double lambda = u(rng);
    AdvantageSet adv = Gae(r, v, gamma, lambda);
    std::vector<double> expected = DoubleLoopGae(r, v, gamma, lambda);
    for (size_t t = 0; t < n; ++t) {
      EXPECT_NEAR(adv.advantages[t], expected[t], 1e-12);
      EXPECT_EQ(adv.returns[t], adv.advantages[t] + v[t]);
    }
  }
}

TEST(Gae, MonteCarloLimit) {
  std::vector<double> r = {0.5, -0.25, 1.0, 0.125, -0.5};
  std::vector<double> v = {0.25, 0.5, -0.75, 1.0, 0.0625};
  AdvantageSet adv = Gae(r, v, 1.0, 1.0);
  for (size_t t = 0; t < r.size(); ++t) {
    double tail = 0.0;
    for (size_t k = t; k < r.size(); ++k) tail += r[k];
    EXPECT_EQ(adv.advantages[t], tail - v[t]);
  }
}

TEST(Gae, OneStepLimit) {
  std::vector<double> r = {0.5, -0.25, 1.0, 0.125};
  std::vector<double> v = {0.25, 0.5, -0.75, 1.0};
  AdvantageSet adv = Gae(r, v, 0.97, 0.0);
  for (size_t t = 0; t < r.size(); ++t) {
    double next = t + 1 < r.size() ? v[t + 1] : 0.0;
    EXPECT_EQ(adv.advantages[t], r[t] + 0.97 * next - v[t]);
  }
}

TEST(Gae, Errors) {
  EXPECT_THROW(Gae(std::vector<double>{}, std::vector<double>{}, 0.9, 0.9),
               std::invalid_argument);
  EXPECT_THROW(Gae(std::vector<double>{1.0}, std::vector<double>{}, 0.9, 0.9),
               std::invalid_argument);
}

TEST(PpoConfig, Validation) {
  PpoConfig ok;
  EXPECT_NO_THROW(ok.Validate());
  for (auto mutate : std::vector<std::function<void(PpoConfig&)>>{
           [](PpoConfig& c) { c.gamma = 0.0; }, [](PpoConfig& c) { c.gamma = 1.5; },
           [](PpoConfig& c) { c.lambda = -0.1; }, [](PpoConfig& c) { c.clip = 0.0; },
           [](PpoConfig& c) { c.epochs = 0; }, [](PpoConfig& c) { c.minibatch = 0; },
           [](PpoConfig& c) { c.tm_period = 0; },
           [](PpoConfig& c) { c.adam_preset = "mystery"; }}) {
    PpoConfig c;
    mutate(c);
    EXPECT_THROW(c.Validate(), std::invalid_argument);
  }
}

// Samples from a few states of a small topology, with old log-probs taken
// from the current policy (fresh ratios) plus optional offsets.
struct Fixture {
  Topology topo;
  LinkNeighborhood nbr;
  PolicyModel model;
  PpoSamples samples;
};

Fixture MakeFixture(const Topology& topo, int n, uint64_t seed,
                    const std::vector<double>& log_ratio_offsets = {}) {
  Fixture f{topo, LinkNeighborhoods(topo), PolicyModel(), {}};
  f.model.Initialize(seed);
  Rng rng(seed + 1000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int links = topo.link_count();
  f.samples.features.resize(n * links, 2);
  for (int i = 0; i < n; ++i) {
    RowMatrix x(links, 2);
    for (int e = 0; e < links; ++e) x.row(e) << u(rng), 1.5 * u(rng);
    f.samples.features.middleRows(i * links, links) = x;
    GlobalPolicy p = ActorForward(f.model, x, f.nbr);
    int a = static_cast<int>(u(rng) * links);
    f.samples.actions.push_back(a);
    double offset = i < static_cast<int>(log_ratio_offsets.size()) ? log_ratio_offsets[i] : 0.0;
    f.samples.old_log_probs.push_back(p.log_probs[a] - offset);
    f.samples.advantages.push_back(2.0 * u(rng) - 1.0);
    f.samples.returns.push_back(2.0 * u(rng) - 1.0);
  }
  return f;
}

TEST(PpoLoss, FreshRatiosAreOneAndUnclipped) {
  Fixture f = MakeFixture(LoadData("toy5.topo"), 6, 3);
  PpoConfig c;
  Tape tape(&f.model.params());
  PpoLossTerms terms;
  PpoLoss(tape, f.model, f.nbr, f.samples, c, &terms);
  // With rho = 1 the clipped and unclipped objectives coincide: -mean(A).
  double mean_adv = 0.0;
  for (double a : f.samples.advantages) mean_adv += a;
  mean_adv /= f.samples.size();
  EXPECT_NEAR(terms.actor, -mean_adv, 1e-12);
  EXPECT_NEAR(terms.total, terms.actor + 0.5 * terms.value - 0.001 * terms.entropy,
              1e-15);
  EXPECT_GT(terms.entropy, 0.0);
  EXPECT_LE(terms.entropy, std::log(16.0) + 1e-12);
}

TEST(PpoLoss, ZeroAdvantageGivesZeroActorLoss) {
  Fixture f = MakeFixture(LoadData("toy5.topo"), 4, 5);
  std::fill(f.samples.advantages.begin(), f.samples.advantages.end(), 0.0);
  Tape tape(&f.model.params());
  PpoLossTerms terms;
  Var loss = PpoLoss(tape, f.model, f.nbr, f.samples, PpoConfig{}, &terms);
  EXPECT_EQ(terms.actor, 0.0);
  // Gradients still flow through the value and entropy terms.
  std::vector<double> grads(f.model.params().size(), 0.0);
  tape.Backward(loss, grads);
  double norm = 0.0;
  for (double g : grads) norm += g * g;
  EXPECT_GT(norm, 0.0);
}

TEST(PpoLoss, ClipSelectsSmallerTerm) {
  // rho = 1.5, A = 1, clip 0.25: min(1.5, 1.25) = 1.25.
  Fixture f = MakeFixture(testing_util::Pair(), 1, 7, {std::log(1.5)});
  f.samples.advantages = {1.0};
  Tape tape(&f.model.params());
  PpoLossTerms terms;
  PpoLoss(tape, f.model, f.nbr, f.samples, PpoConfig{}, &terms);
  EXPECT_NEAR(terms.actor, -1.25, 1e-12);

  // Negative advantage: min(-1.5, -1.25) = -1.5, the unclipped term.
  f.samples.advantages = {-1.0};
  Tape tape2(&f.model.params());
  PpoLoss(tape2, f.model, f.nbr, f.samples, PpoConfig{}, &terms);
  EXPECT_NEAR(terms.actor, 1.5, 1e-12);
}

TEST(PpoLoss, InconsistentBatchRejected) {
  Fixture f = MakeFixture(testing_util::Pair(), 2, 1);
  f.samples.returns.pop_back();
  Tape tape(&f.model.params());
  EXPECT_THROW(PpoLoss(tape, f.model, f.nbr, f.samples, PpoConfig{}),
               std::invalid_argument);
}

TEST(PpoLoss, GradientMatchesFiniteDifferences) {
  // Two nodes, two links. Ratios both inside and outside the clip range.
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Fixture f = MakeFixture(testing_util::Pair(), 4, seed, {0.05, -0.5, 0.6, -0.1});
    auto loss = [&](Tape& t) {
      return PpoLoss(t, f.model, f.nbr, f.samples, PpoConfig{});
    };
    testing_util::GradCheckResult r = testing_util::GradCheck(f.model.params(), loss);
    EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed;
    EXPECT_GT(r.checked, static_cast<int>(f.model.params().size()) * 9 / 10);
  }
}

TEST(PpoUpdate, ZeroLearningRateLeavesParameters) {
  Topology topo = LoadData("toy5.topo");
  LinkNeighborhood nbr = LinkNeighborhoods(topo);
  PolicyModel model;
  model.Initialize(4);
  std::vector<double> before(model.params().flat().begin(), model.params().flat().end());
  PpoConfig c;
  c.learning_rate = 0.0;
  AdamState adam = MakeAdam(c, model);
  TrafficMatrix tm = GenerateTm(TrafficProfile{}, topo, 1);
  EpisodeOptions o;
  o.horizon = 40;
  Rng rng(2);
  Trajectory traj = RunEpisode(topo, nbr, tm, model, o, rng);
  PpoUpdateStats stats =
      PpoUpdate(model, adam, traj, Gae(traj, c.gamma, c.lambda), nbr, c, rng);
  EXPECT_EQ(stats.minibatches, 3 * 2);  // 40 steps in minibatches of 25
  EXPECT_EQ(std::vector<double>(model.params().flat().begin(),
                                model.params().flat().end()),
            before);
  EXPECT_EQ(adam.step(), 6u);
}

TEST(PpoUpdate, NonFiniteLossAborts) {
  Topology topo = LoadData("toy5.topo");
  LinkNeighborhood nbr = LinkNeighborhoods(topo);
  PolicyModel model;
  model.Initialize(4);
  PpoConfig c;
  AdamState adam = MakeAdam(c, model);
  TrafficMatrix tm = GenerateTm(TrafficProfile{}, topo, 1);
  EpisodeOptions o;
  o.horizon = 5;
  Rng rng(2);
  Trajectory traj = RunEpisode(topo, nbr, tm, model, o, rng);
  AdvantageSet adv = Gae(traj, c.gamma, c.lambda);
  adv.advantages[2] = std::nan("");
  EXPECT_THROW(PpoUpdate(model, adam, traj, adv, nbr, c, rng), std::runtime_error);
}

TEST(PpoUpdate, StepsTowardHigherAdvantageActions) {
  // Repeated updates on one trajectory with positive advantage on one
  // action must raise that action's probability.
  Topology topo = testing_util::Diamond();
  LinkNeighborhood nbr = LinkNeighborhoods(topo);
  PolicyModel model;
  model.Initialize(10);
  PpoConfig c;
  c.learning_rate = 1e-2;
  c.normalize_advantages = false;
  c.entropy_coef = 0.0;
  AdamState adam = MakeAdam(c, model);
  TrafficMatrix tm(4);
  tm.set_demand(0, 3, 8.0);
  TeEnvironment env(topo, tm, 1);
  env.Reset(WeightVector(8, 1));
  RowMatrix x = env.Features();
  GlobalPolicy p0 = ActorForward(model, x, nbr);
  Trajectory traj;
  Transition s;
  s.features = x;
  s.action = 4;
  s.log_prob = p0.log_probs[4];
  traj.steps.push_back(s);
  AdvantageSet adv{{1.0}, {0.0}};
  Rng rng(1);
  PpoUpdate(model, adam, traj, adv, nbr, c, rng);
  EXPECT_GT(ActorForward(model, x, nbr).probabilities[4], p0.probabilities[4]);
}

TrainConfig SmallTrainConfig() {
  TrainConfig c;
  c.episodes = 8;
  c.horizon = 6;
  c.ppo.tm_period = 2;
  c.seed = 5;
  return c;
}

TEST(Train, ScheduleAlternatesTopologiesAndRotatesTms) {
  std::vector<Topology> topos = {LoadData("toy5.topo"), testing_util::Diamond()};
  PolicyModel model;
  model.Initialize(1);
  TrainConfig c = SmallTrainConfig();
  AdamState adam = MakeAdam(c.ppo, model);
  int callbacks = 0;
  std::vector<TrainLogRow> log =
      Train(topos, c, model, adam,
            [&](const TrainLogRow&, const PolicyModel&, const AdamState&) { ++callbacks; });
  ASSERT_EQ(log.size(), 8u);
  EXPECT_EQ(callbacks, 8);
  std::vector<int> topo_ids;
  std::vector<int> tm_ids;
  for (const TrainLogRow& r : log) {
    topo_ids.push_back(r.topo_id);
    tm_ids.push_back(r.tm_id);
    EXPECT_GE(r.entropy, 0.0);
    EXPECT_LE(r.entropy, std::log(16.0) + 1e-12);
    EXPECT_TRUE(std::isfinite(r.actor_loss));
  }
  EXPECT_EQ(topo_ids, (std::vector<int>{0, 0, 1, 1, 0, 0, 1, 1}));
  EXPECT_EQ(tm_ids, (std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));
}

TEST(Train, TmPoolCycles) {
  std::vector<Topology> topos = {testing_util::Diamond()};
  PolicyModel model;
  model.Initialize(1);
  TrainConfig c = SmallTrainConfig();
  c.horizon = 2;
  c.ppo.tm_period = 1;
  c.tm_pool = 3;
  AdamState adam = MakeAdam(c.ppo, model);
  std::vector<TrainLogRow> log = Train(topos, c, model, adam);
  std::vector<int> tm_ids;
  for (const TrainLogRow& r : log) tm_ids.push_back(r.tm_id);
  EXPECT_EQ(tm_ids, (std::vector<int>{0, 1, 2, 0, 1, 2, 0, 1}));
}

TEST(Train, DeterministicLog) {
  auto run = [] {
    std::vector<Topology> topos = {LoadData("toy5.topo")};
    PolicyModel model;
    model.Initialize(2);
    TrainConfig c = SmallTrainConfig();
    AdamState adam = MakeAdam(c.ppo, model);
    std::string out;
    for (const TrainLogRow& r : Train(topos, c, model, adam)) {
      out += FormatTrainLogRow(r) + "\n";
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Train, Errors) {
  PolicyModel model;
  TrainConfig c = SmallTrainConfig();
  AdamState adam = MakeAdam(c.ppo, model);
  EXPECT_THROW(Train({}, c, model, adam), std::invalid_argument);
  EXPECT_EQ(TrainLogHeader(),
            "episode,tm_id,topo_id,minmax_load,actor_loss,value_loss,entropy");
}

}  // namespace
}  // namespace marlte
