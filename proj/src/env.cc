#include "marlte/env.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace marlte {

int DefaultEpisodeLength(int link_count) {
  switch (link_count) {
    case 42:
      return 100;
    case 54:
      return 150;
    case 72:
      return 200;
    default:
      return static_cast<int>(2.5 * link_count + 0.5);
  }
}

TeEnvironment::TeEnvironment(const Topology& topo, const TrafficMatrix& tm,
                             int horizon)
    : topo_(topo), tm_(tm), horizon_(horizon) {
  if (horizon < 0) throw std::invalid_argument("episode length must be >= 0");
  if (tm.node_count() != topo.node_count()) {
    throw std::invalid_argument("traffic matrix size does not match topology");
  }
}

void TeEnvironment::Reset(Rng& rng) {
  std::uniform_int_distribution<int> dist(kInitWeightMin, kInitWeightMax);
  WeightVector w(topo_.link_count());
  for (int& v : w) v = dist(rng);
  Reset(std::move(w));
}

void TeEnvironment::Reset(WeightVector initial) {
  ValidateWeights(topo_, initial);
  initial_ = std::move(initial);
  weights_ = initial_;
  routing_ = EcmpLoads(topo_, weights_, tm_);
  t_ = 0;
}

double TeEnvironment::Step(LinkId action) {
  if (weights_.empty()) throw std::logic_error("Step before Reset");
  if (done()) throw std::logic_error("Step on a finished episode");
  if (action < 0 || action >= topo_.link_count()) {
    throw std::out_of_range("invalid link id " + std::to_string(action));
  }
  double before = routing_.max_utilization;
  ++weights_[action];
  routing_ = EcmpLoads(topo_, weights_, tm_);
  ++t_;
  return before - routing_.max_utilization;
}

RowMatrix TeEnvironment::Features() const {
  return LinkFeatures(weights_, routing_.utilizations, weight_scale());
}

double Trajectory::RewardSum() const {
  double sum = 0.0;
  for (const Transition& s : steps) sum += s.reward;
  return sum;
}

std::string Trajectory::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,action,reward,max_utilization\n";
  for (size_t t = 0; t < steps.size(); ++t) {
    out << t << "," << steps[t].action << "," << steps[t].reward << ","
        << steps[t].max_utilization_after << "\n";
  }
  return out.str();
}

Trajectory RunEpisode(const Topology& topo, const LinkNeighborhood& nbr,
                      const TrafficMatrix& tm, const PolicyModel& model,
                      const EpisodeOptions& options, Rng& rng) {
  TeEnvironment env(topo, tm, options.horizon);
  env.Reset(rng);

  Trajectory traj;
  traj.initial_weights = env.weights();
  traj.initial_max_utilization = env.max_utilization();
  traj.best_max_utilization = env.max_utilization();
  traj.best_weights = env.weights();
  traj.best_so_far.push_back(env.max_utilization());
  traj.steps.reserve(options.horizon);

  GraphBatch batch = GraphBatch::Replicate(nbr, 1);
  while (!env.done()) {
    Transition step;
    RowMatrix features = env.Features();
    Tape tape(&model.params());
    Var h0 = tape.Constant(InitHidden(features, model.config().hidden));
    const RowMatrix& logits = tape.value(ActorLogits(tape, model, batch, h0));
    GlobalPolicy policy = PolicyFromLogits(
        std::vector<double>(logits.data(), logits.data() + logits.size()));
    if (options.record_values) {
      step.value = tape.scalar(CriticValues(tape, model, batch, h0));
    }
    SampledAction a = SampleAction(policy, rng);
    step.action = a.link;
    step.log_prob = a.log_prob;
    step.reward = env.Step(a.link);
    step.max_utilization_after = env.max_utilization();
    if (options.record_features) step.features = std::move(features);

    if (env.max_utilization() < traj.best_max_utilization) {
      traj.best_max_utilization = env.max_utilization();
      traj.best_weights = env.weights();
    }
    traj.best_so_far.push_back(traj.best_max_utilization);
    traj.steps.push_back(std::move(step));
  }
  traj.final_weights = env.weights();
  traj.final_max_utilization = env.max_utilization();
  return traj;
}

}  // namespace marlte
