#ifndef MARLTE_PPO_H_
#define MARLTE_PPO_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "marlte/adam.h"
#include "marlte/env.h"
#include "marlte/mpnn.h"
#include "marlte/traffic_matrix.h"

namespace marlte {

struct PpoConfig {
  double clip = 0.25;
  double gamma = 0.97;
  double lambda = 0.9;
  int epochs = 3;
  int minibatch = 25;  // timesteps per minibatch
  double value_coef = 0.5;
  double entropy_coef = 0.001;
  double learning_rate = 3e-4;
  std::string adam_preset = "default";
  bool normalize_advantages = true;
  double max_grad_norm = 0.5;  // <= 0 disables clipping
  int tm_period = 50;          // episodes between TM (and topology) rotation

  void Validate() const;
};

struct AdvantageSet {
  std::vector<double> advantages;
  std::vector<double> returns;  // critic targets: advantage + value
};

// delta_t = r_t + gamma V_{t+1} - V_t with V_T = 0,
// A_t = sum_l (gamma lambda)^l delta_{t+l}.
AdvantageSet Gae(std::span<const double> rewards, std::span<const double> values,
                 double gamma, double lambda);
AdvantageSet Gae(const Trajectory& traj, double gamma, double lambda);

// A minibatch of timesteps from one topology, stacked for GraphBatch.
struct PpoSamples {
  RowMatrix features;  // samples * |E| rows
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;

  int size() const { return static_cast<int>(actions.size()); }
};

struct PpoLossTerms {
  double actor = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double total = 0.0;
};

// Records  -mean(min(rho A, clip(rho, 1-eps, 1+eps) A))
//          + value_coef * mean((V - G)^2) - entropy_coef * mean(H)
// on the tape and returns the scalar.
Var PpoLoss(Tape& tape, const PolicyModel& model, const LinkNeighborhood& nbr,
            const PpoSamples& samples, const PpoConfig& config,
            PpoLossTerms* terms = nullptr);

struct PpoUpdateStats {
  double actor_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  int minibatches = 0;
};

// Epochs of shuffled minibatch Adam steps over one trajectory.
PpoUpdateStats PpoUpdate(PolicyModel& model, AdamState& adam,
                         const Trajectory& traj, const AdvantageSet& adv,
                         const LinkNeighborhood& nbr, const PpoConfig& config,
                         Rng& rng);

AdamState MakeAdam(const PpoConfig& config, const PolicyModel& model);

struct TrainConfig {
  MpnnConfig mpnn;
  PpoConfig ppo;
  TrafficProfile traffic;
  int episodes = 1000;
  int horizon = 0;  // 0: DefaultEpisodeLength per topology
  uint64_t seed = 1;
  int tm_pool = 0;  // distinct training TMs per topology; 0 = fresh every rotation
};

struct TrainLogRow {
  int episode;
  int tm_id;
  int topo_id;
  double minmax_load;
  double actor_loss;
  double value_loss;
  double entropy;
};

std::string TrainLogHeader();
std::string FormatTrainLogRow(const TrainLogRow& row);

// Seed of training TM `tm_id` on topology `topo_id`.
uint64_t TrainTmSeed(uint64_t seed, int topo_id, int tm_id);

using EpisodeCallback = std::function<void(const TrainLogRow&,
                                           const PolicyModel&, const AdamState&)>;

// Rotates topology and TM every tm_period episodes (topologies alternate
// block by block), then run_episode -> gae -> ppo_update.
std::vector<TrainLogRow> Train(const std::vector<Topology>& topologies,
                               const TrainConfig& config, PolicyModel& model,
                               AdamState& adam,
                               const EpisodeCallback& on_episode = nullptr);

}  // namespace marlte

#endif  // MARLTE_PPO_H_
