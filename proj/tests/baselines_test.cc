#include "marlte/baselines.h"

#include <algorithm>
#include <gtest/gtest.h>

#include "fixtures.h"
#include "routing_oracle.h"

namespace marlte {
namespace {

using testing_util::Diamond;
using testing_util::EnumerateEcmpPaths;

double OracleMaxU(const Topology& topo, const WeightVector& w, const TrafficMatrix& tm) {
  std::vector<double> loads = EnumerateEcmpPaths(topo, w, tm).loads;
  double m = 0.0;
  for (const Link& l : topo.links()) m = std::max(m, loads[l.id] / l.capacity);
  return m;
}

// Odometer over range^|E| without any deduplication.
double ExhaustiveMin(const Topology& topo, const TrafficMatrix& tm, WeightRange r) {
  WeightVector w(topo.link_count(), r.min);
  double best = OracleMaxU(topo, w, tm);
  while (true) {
    size_t i = 0;
    while (i < w.size() && w[i] == r.max) w[i++] = r.min;
    if (i == w.size()) break;
    ++w[i];
    best = std::min(best, OracleMaxU(topo, w, tm));
  }
  return best;
}

TrafficMatrix DiamondTm() {
  TrafficMatrix tm(4);
  tm.set_demand(0, 3, 8.0);
  return tm;
}

TEST(BruteForce, DiamondSplitsEvenly) {
  Topology topo = Diamond();
  OracleResult r = BruteForceWeights(topo, DiamondTm(), {1, 4});
  EXPECT_DOUBLE_EQ(r.max_utilization, 0.4);
  // Both A->D paths must cost the same.
  EXPECT_EQ(r.weights[0] + r.weights[2], r.weights[4] + r.weights[6]);
}

TEST(BruteForce, PathGraphHasNothingToOptimize) {
  Topology topo = testing_util::Path3();
  TrafficMatrix tm(3);
  tm.set_demand(0, 2, 5.0);
  tm.set_demand(2, 0, 3.0);
  OracleResult r = BruteForceWeights(topo, tm, {1, 3});
  EXPECT_DOUBLE_EQ(r.max_utilization, 0.5);
}

TEST(BruteForce, MatchesExhaustiveOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    Topology topo = trial % 2 ? testing_util::Triangle() : Diamond();
    TrafficMatrix tm = GenerateTm(TrafficProfile{}, topo, 100 + trial);
    WeightRange range{1, 3};
    OracleResult r = BruteForceWeights(topo, tm, range);
    EXPECT_NEAR(r.max_utilization, ExhaustiveMin(topo, tm, range), 1e-12);
    EXPECT_NEAR(r.max_utilization, OracleMaxU(topo, r.weights, tm), 1e-12);
  }
}

TEST(BruteForce, NeverWorseThanDefaultOspf) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Topology topo = RandomTopology(4, 4, {10.0, 40.0}, rng);
    TrafficMatrix tm = GenerateTm(TrafficProfile{}, topo, trial);
    BruteForceOracle oracle(topo, {1, 4});
    OracleResult r = oracle.Solve(tm);
    double ospf = EcmpLoads(topo, DefaultOspfWeights(topo), tm).max_utilization;
    EXPECT_LE(r.max_utilization, ospf + 1e-12);
    for (int w : r.weights) {
      EXPECT_GE(w, 1);
      EXPECT_LE(w, 4);
    }
    EXPECT_LE(oracle.distinct_routings(), oracle.combinations());
  }
}

TEST(BruteForce, GuardRejectsLargeSpaces) {
  Topology topo = testing_util::LoadData("nsfnet.topo");
  EXPECT_THROW(BruteForceOracle(topo, {1, 4}), std::invalid_argument);
  EXPECT_THROW(BruteForceOracle(Diamond(), {1, 4}, 100), std::invalid_argument);
  EXPECT_THROW(BruteForceOracle(Diamond(), {3, 2}), std::invalid_argument);
}

TEST(LocalSearch, ZeroIterationsReturnsStart) {
  Topology topo = Diamond();
  TrafficMatrix tm = DiamondTm();
  Rng rng(1);
  OracleResult r = LocalSearchWeights(topo, tm, 0, rng);
  EXPECT_EQ(r.weights, DefaultOspfWeights(topo));
  EXPECT_DOUBLE_EQ(r.max_utilization, OracleMaxU(topo, r.weights, tm));
}

TEST(LocalSearch, ImprovesOnStartAndStaysInRange) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Topology topo = RandomTopology(5, 6, {10.0, 40.0}, rng);
    TrafficMatrix tm = GenerateTm(TrafficProfile{}, topo, 50 + trial);
    double ospf = EcmpLoads(topo, DefaultOspfWeights(topo), tm).max_utilization;
    Rng search(trial);
    WeightRange range{1, 10};
    OracleResult r = LocalSearchWeights(topo, tm, 30, search, range);
    EXPECT_LE(r.max_utilization, ospf);
    EXPECT_NEAR(r.max_utilization, OracleMaxU(topo, r.weights, tm), 1e-12);
    for (int w : r.weights) {
      EXPECT_GE(w, range.min);
      EXPECT_LE(w, range.max);
    }
  }
}

TEST(LocalSearch, CloseToBruteForceOnSmallInstances) {
  Rng rng(9);
  int close = 0;
  const int kInstances = 50;
  for (int trial = 0; trial < kInstances; ++trial) {
    Topology topo = RandomTopology(4, 4, {10.0, 40.0}, rng);
    TrafficMatrix tm = GenerateTm(TrafficProfile{}, topo, 200 + trial);
    WeightRange range{1, 4};
    double exact = BruteForceWeights(topo, tm, range).max_utilization;
    Rng search(trial);
    double local = LocalSearchWeights(topo, tm, 100, search, range).max_utilization;
    EXPECT_GE(local, exact - 1e-12);
    if (local <= 1.05 * exact) ++close;
  }
  EXPECT_GE(close, kInstances * 9 / 10);
}

TEST(LocalSearch, Deterministic) {
  Topology topo = testing_util::LoadData("toy5.topo");
  TrafficMatrix tm = GenerateTm(TrafficProfile{}, topo, 4);
  Rng a(7);
  Rng b(7);
  EXPECT_EQ(LocalSearchWeights(topo, tm, 40, a).weights,
            LocalSearchWeights(topo, tm, 40, b).weights);
}

}  // namespace
}  // namespace marlte
