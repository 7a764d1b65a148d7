#ifndef MARLTE_ENV_H_
#define MARLTE_ENV_H_

#include <string>
#include <vector>

#include "marlte/mpnn.h"
#include "marlte/routing.h"
#include "marlte/topology.h"
#include "marlte/traffic_matrix.h"

namespace marlte {

// Initial weights are drawn uniformly from [kInitWeightMin, kInitWeightMax].
inline constexpr int kInitWeightMin = 1;
inline constexpr int kInitWeightMax = 4;

// Episode lengths used for the three reference topologies (by directed link
// count); everything else gets 2.5 x |E|.
int DefaultEpisodeLength(int link_count);

// Episodic weight-tuning MDP. Each step increments one link weight by one,
// recomputes ECMP routing and pays reward maxU(before) - maxU(after).
// Holds references; topology and traffic matrix must outlive it.
class TeEnvironment {
 public:
  TeEnvironment(const Topology& topo, const TrafficMatrix& tm, int horizon);

  // Uniform integer weights in [1,4], t = 0.
  void Reset(Rng& rng);
  void Reset(WeightVector initial);

  // Returns the reward. Throws std::logic_error once the episode is done and
  // std::out_of_range for an invalid link id.
  double Step(LinkId action);

  const Topology& topology() const { return topo_; }
  const TrafficMatrix& traffic() const { return tm_; }
  const WeightVector& weights() const { return weights_; }
  const WeightVector& initial_weights() const { return initial_; }
  const RoutingState& routing() const { return routing_; }
  double max_utilization() const { return routing_.max_utilization; }
  int t() const { return t_; }
  int horizon() const { return horizon_; }
  bool done() const { return t_ >= horizon_; }

  // Weights are scaled by the largest weight reachable in an episode, 4 + T.
  double weight_scale() const { return kInitWeightMax + horizon_; }
  RowMatrix Features() const;

 private:
  const Topology& topo_;
  const TrafficMatrix& tm_;
  int horizon_;
  int t_ = 0;
  WeightVector initial_;
  WeightVector weights_;
  RoutingState routing_;
};

struct Transition {
  RowMatrix features;  // s_t, one row per link
  LinkId action = -1;
  double reward = 0.0;
  double log_prob = 0.0;  // log pi(a_t | s_t) at collection time
  double value = 0.0;     // V(s_t)
  double max_utilization_after = 0.0;
};

struct Trajectory {
  std::vector<Transition> steps;
  WeightVector initial_weights;
  WeightVector final_weights;
  double initial_max_utilization = 0.0;
  double final_max_utilization = 0.0;
  // best_so_far[t] = min maxU over states s_0..s_t; size T + 1.
  std::vector<double> best_so_far;
  // Lowest maxU visited and the weights that produced it (first visit wins).
  double best_max_utilization = 0.0;
  WeightVector best_weights;

  double RewardSum() const;
  // One line per step: t,action,reward,max_utilization.
  std::string ToCsv() const;
};

struct EpisodeOptions {
  int horizon = 0;
  bool record_values = true;
  bool record_features = true;
};

// Resets the environment from rng and plays one episode with the actor,
// recording critic values when asked.
Trajectory RunEpisode(const Topology& topo, const LinkNeighborhood& nbr,
                      const TrafficMatrix& tm, const PolicyModel& model,
                      const EpisodeOptions& options, Rng& rng);

}  // namespace marlte

#endif  // MARLTE_ENV_H_
