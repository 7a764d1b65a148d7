#include "marlte/env.h"

#include <gtest/gtest.h>

#include "fixtures.h"

namespace marlte {
namespace {

using testing_util::Diamond;
using testing_util::LoadData;

TrafficMatrix DiamondDemand() {
  TrafficMatrix tm(4);
  tm.set_demand(0, 3, 8.0);
  return tm;
}

TEST(DefaultEpisodeLength, ReferenceTopologies) {
  EXPECT_EQ(DefaultEpisodeLength(42), 100);
  EXPECT_EQ(DefaultEpisodeLength(54), 150);
  EXPECT_EQ(DefaultEpisodeLength(72), 200);
  EXPECT_EQ(DefaultEpisodeLength(16), 40);
}

TEST(TeEnvironment, SeededResetInRange) {
  Topology t = LoadData("geant2.topo");
  TrafficMatrix tm = GenerateTm(TrafficProfile{}, t, 1);
  TeEnvironment a(t, tm, 10);
  TeEnvironment b(t, tm, 10);
  Rng ra(99);
  Rng rb(99);
  a.Reset(ra);
  b.Reset(rb);
  EXPECT_EQ(a.weights(), b.weights());
  std::vector<int> seen(5, 0);
  for (int w : a.weights()) {
    ASSERT_GE(w, 1);
    ASSERT_LE(w, 4);
    ++seen[w];
  }
  for (int w = 1; w <= 4; ++w) EXPECT_GT(seen[w], 0);
  EXPECT_EQ(a.t(), 0);
  EXPECT_EQ(a.routing().loads, EcmpLoads(t, a.weights(), tm).loads);
}

TEST(TeEnvironment, DiamondIncrementShiftsTraffic) {
  Topology t = Diamond();
  TrafficMatrix tm = DiamondDemand();
  TeEnvironment env(t, tm, 5);
  env.Reset(WeightVector(8, 1));
  EXPECT_DOUBLE_EQ(env.max_utilization(), 0.4);
  double r = env.Step(0);  // A->B
  EXPECT_DOUBLE_EQ(env.max_utilization(), 0.8);
  EXPECT_DOUBLE_EQ(r, -0.4);
  EXPECT_EQ(env.routing().loads[4], 8.0);  // A->C
  EXPECT_EQ(env.routing().loads[0], 0.0);
  EXPECT_EQ(env.weights()[0], 2);
  EXPECT_EQ(env.t(), 1);
}

TEST(TeEnvironment, IdleLinkIncrementIsFree) {
  Topology t = Diamond();
  TrafficMatrix tm = DiamondDemand();
  TeEnvironment env(t, tm, 5);
  env.Reset(WeightVector(8, 1));
  // D->B carries nothing, and only D-originated traffic could use it.
  EXPECT_EQ(env.Step(3), 0.0);
  EXPECT_DOUBLE_EQ(env.max_utilization(), 0.4);
}

TEST(TeEnvironment, Errors) {
  Topology t = Diamond();
  TrafficMatrix tm = DiamondDemand();
  TeEnvironment env(t, tm, 1);
  EXPECT_THROW(env.Step(0), std::logic_error);
  env.Reset(WeightVector(8, 1));
  EXPECT_THROW(env.Step(8), std::out_of_range);
  EXPECT_THROW(env.Step(-1), std::out_of_range);
  env.Step(1);
  EXPECT_TRUE(env.done());
  EXPECT_THROW(env.Step(1), std::logic_error);
  EXPECT_THROW(TeEnvironment(t, tm, -1), std::invalid_argument);
  TrafficMatrix wrong(3);
  EXPECT_THROW(TeEnvironment(t, wrong, 1), std::invalid_argument);
  EXPECT_THROW(env.Reset(WeightVector(8, 0)), std::invalid_argument);
}

TEST(TeEnvironment, FeaturesUseEpisodeWeightScale) {
  Topology t = Diamond();
  TrafficMatrix tm = DiamondDemand();
  TeEnvironment env(t, tm, 12);
  env.Reset(WeightVector{1, 2, 3, 4, 1, 2, 3, 4});
  EXPECT_EQ(env.weight_scale(), 16.0);
  RowMatrix x = env.Features();
  EXPECT_EQ(x(3, 0), 4.0 / 16.0);
  EXPECT_EQ(x(0, 1), env.routing().utilizations[0]);
}

class EpisodeTest : public ::testing::Test {
 protected:
  EpisodeTest() : topo_(LoadData("nsfnet.topo")), nbr_(LinkNeighborhoods(topo_)),
                  tm_(GenerateTm(TrafficProfile{}, topo_, 4)) {
    model_.Initialize(77);
  }

  Trajectory Run(int horizon, uint64_t seed) {
    EpisodeOptions o;
    o.horizon = horizon;
    Rng rng(seed);
    return RunEpisode(topo_, nbr_, tm_, model_, o, rng);
  }

  Topology topo_;
  LinkNeighborhood nbr_;
  TrafficMatrix tm_;
  PolicyModel model_;
};

TEST_F(EpisodeTest, ZeroLength) {
  Trajectory t = Run(0, 1);
  EXPECT_TRUE(t.steps.empty());
  EXPECT_EQ(t.best_max_utilization, t.initial_max_utilization);
  EXPECT_EQ(t.best_so_far.size(), 1u);
  EXPECT_EQ(t.final_weights, t.initial_weights);
}

TEST_F(EpisodeTest, Deterministic) {
  Trajectory a = Run(30, 5);
  Trajectory b = Run(30, 5);
  EXPECT_EQ(a.ToCsv(), b.ToCsv());
  EXPECT_EQ(a.best_weights, b.best_weights);
  for (size_t t = 0; t < a.steps.size(); ++t) {
    EXPECT_EQ(a.steps[t].log_prob, b.steps[t].log_prob);
    EXPECT_EQ(a.steps[t].value, b.steps[t].value);
  }
}

TEST_F(EpisodeTest, TelescopingBookkeepingAndBestSoFar) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Trajectory t = Run(100, seed);
    ASSERT_EQ(t.steps.size(), 100u);
    EXPECT_NEAR(t.RewardSum(), t.initial_max_utilization - t.final_max_utilization,
                1e-12);

    WeightVector counted = t.initial_weights;
    for (const Transition& s : t.steps) ++counted[s.action];
    EXPECT_EQ(counted, t.final_weights);

    ASSERT_EQ(t.best_so_far.size(), 101u);
    double running = t.initial_max_utilization;
    for (size_t k = 0; k < t.steps.size(); ++k) {
      running = std::min(running, t.steps[k].max_utilization_after);
      EXPECT_EQ(t.best_so_far[k + 1], running);
      EXPECT_LE(t.best_so_far[k + 1], t.best_so_far[k]);
    }
    EXPECT_EQ(t.best_max_utilization, t.best_so_far.back());
    EXPECT_EQ(MaxUtilization(topo_, t.best_weights, tm_), t.best_max_utilization);
  }
}

TEST_F(EpisodeTest, RecordsPolicyAndValue) {
  Trajectory t = Run(5, 3);
  for (const Transition& s : t.steps) {
    EXPECT_EQ(s.features.rows(), 42);
    EXPECT_LT(s.log_prob, 0.0);
    EXPECT_NE(s.value, 0.0);
  }
  GlobalPolicy p = ActorForward(model_, t.steps[2].features, nbr_);
  EXPECT_NEAR(p.log_probs[t.steps[2].action], t.steps[2].log_prob, 1e-12);
  EXPECT_NEAR(CriticForward(model_, t.steps[2].features, nbr_), t.steps[2].value, 1e-12);
}

TEST_F(EpisodeTest, CsvDump) {
  Trajectory t = Run(2, 3);
  std::string csv = t.ToCsv();
  EXPECT_EQ(csv.rfind("t,action,reward,max_utilization\n0,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
}  // namespace marlte
