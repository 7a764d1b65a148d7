#ifndef MARLTE_BASELINES_H_
#define MARLTE_BASELINES_H_

#include <cstdint>
#include <vector>

#include "marlte/routing.h"
#include "marlte/topology.h"
#include "marlte/traffic_matrix.h"

namespace marlte {

struct WeightRange {
  int min = 1;
  int max = 4;
  int size() const { return max - min + 1; }
};

struct OracleResult {
  WeightVector weights;
  double max_utilization = 0.0;
};

inline constexpr uint64_t kDefaultBruteForceGuard = 20'000'000;

// Exact minimizer of the max utilization over all integer weight vectors in
// range^|E|. Construction enumerates the whole space once and keeps one
// representative weight vector (the first in enumeration order) per distinct
// set of shortest-path DAGs; Solve() then only evaluates those. Throws
// std::invalid_argument when range^|E| exceeds max_combinations.
class BruteForceOracle {
 public:
  BruteForceOracle(const Topology& topo, WeightRange range,
                   uint64_t max_combinations = kDefaultBruteForceGuard);

  OracleResult Solve(const TrafficMatrix& tm) const;
  size_t distinct_routings() const { return representatives_.size(); }
  uint64_t combinations() const { return combinations_; }

 private:
  Topology topo_;
  uint64_t combinations_;
  std::vector<WeightVector> representatives_;
};

OracleResult BruteForceWeights(const Topology& topo, const TrafficMatrix& tm,
                               WeightRange range,
                               uint64_t max_combinations = kDefaultBruteForceGuard);

// Best-improvement descent over single-link +/-1 weight moves, starting from
// the default OSPF weights (clamped into range). Moves are ranked by max
// utilization, then by the sum of squared utilizations. When a local optimum
// is reached and rounds remain, it restarts from uniform random weights.
// `iterations` bounds the number of move rounds; each round evaluates all
// 2|E| neighbors.
OracleResult LocalSearchWeights(const Topology& topo, const TrafficMatrix& tm,
                                int iterations, Rng& rng,
                                WeightRange range = {1, 20});

}  // namespace marlte

#endif  // MARLTE_BASELINES_H_
