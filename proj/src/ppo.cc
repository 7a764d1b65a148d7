#include "marlte/ppo.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "marlte/seed.h"

namespace marlte {
namespace {

constexpr uint64_t kTrainTmStream = 0x7472;
constexpr uint64_t kEpisodeStream = 0x6570;
constexpr uint64_t kUpdateStream = 0x7570;

RowMatrix Column(const std::vector<double>& v) {
  RowMatrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

}  // namespace

void PpoConfig::Validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0) || !(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("PPO: gamma must be in (0,1], lambda in [0,1]");
  }
  if (!(clip > 0.0) || epochs < 1 || minibatch < 1 || tm_period < 1 ||
      value_coef < 0.0 || entropy_coef < 0.0 || learning_rate < 0.0) {
    throw std::invalid_argument("PPO: invalid hyperparameters");
  }
  AdamConfig::Preset(adam_preset);  // throws on unknown names
}

AdvantageSet Gae(std::span<const double> rewards, std::span<const double> values,
                 double gamma, double lambda) {
  if (rewards.empty()) throw std::invalid_argument("GAE on an empty trajectory");
  if (rewards.size() != values.size()) {
    throw std::invalid_argument("GAE: rewards/values length mismatch");
  }
  size_t n = rewards.size();
  AdvantageSet out{std::vector<double>(n), std::vector<double>(n)};
  double running = 0.0;
  for (size_t i = n; i-- > 0;) {
    double next_value = i + 1 < n ? values[i + 1] : 0.0;
    double delta = rewards[i] + gamma * next_value - values[i];
    running = delta + gamma * lambda * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

AdvantageSet Gae(const Trajectory& traj, double gamma, double lambda) {
  std::vector<double> rewards;
  std::vector<double> values;
  for (const Transition& s : traj.steps) {
    rewards.push_back(s.reward);
    values.push_back(s.value);
  }
  return Gae(rewards, values, gamma, lambda);
}

Var PpoLoss(Tape& tape, const PolicyModel& model, const LinkNeighborhood& nbr,
            const PpoSamples& samples, const PpoConfig& config,
            PpoLossTerms* terms) {
  int n = samples.size();
  int links = static_cast<int>(nbr.size());
  if (n == 0 || samples.features.rows() != static_cast<Eigen::Index>(n) * links ||
      samples.old_log_probs.size() != static_cast<size_t>(n) ||
      samples.advantages.size() != static_cast<size_t>(n) ||
      samples.returns.size() != static_cast<size_t>(n)) {
    throw std::invalid_argument("PpoLoss: inconsistent minibatch");
  }
  GraphBatch batch = GraphBatch::Replicate(nbr, n);
  Var h0 = tape.Constant(InitHidden(samples.features, model.config().hidden));

  Var log_pi = tape.SegmentLogSoftmax(ActorLogits(tape, model, batch, h0),
                                      batch.offsets);
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i * links + samples.actions[i];
  Var log_p = tape.GatherRows(log_pi, MakeIndexList(std::move(rows)));
  Var ratio = tape.Exp(tape.Sub(log_p, tape.Constant(Column(samples.old_log_probs))));
  Var adv = tape.Constant(Column(samples.advantages));
  Var unclipped = tape.Mul(ratio, adv);
  Var clipped =
      tape.Mul(tape.Clamp(ratio, 1.0 - config.clip, 1.0 + config.clip), adv);
  Var actor = tape.Scale(tape.Mean(tape.Min(unclipped, clipped)), -1.0);

  Var entropy = tape.Scale(
      tape.Mean(tape.SegmentSum(tape.Mul(tape.Exp(log_pi), log_pi), batch.offsets)),
      -1.0);

  Var values = CriticValues(tape, model, batch, h0);
  Var value_loss = tape.Mean(
      tape.Square(tape.Sub(values, tape.Constant(Column(samples.returns)))));

  Var total = tape.Add(tape.Add(actor, tape.Scale(value_loss, config.value_coef)),
                       tape.Scale(entropy, -config.entropy_coef));
  if (terms != nullptr) {
    terms->actor = tape.scalar(actor);
    terms->value = tape.scalar(value_loss);
    terms->entropy = tape.scalar(entropy);
    terms->total = tape.scalar(total);
  }
  return total;
}

AdamState MakeAdam(const PpoConfig& config, const PolicyModel& model) {
  AdamConfig adam = AdamConfig::Preset(config.adam_preset);
  adam.learning_rate = config.learning_rate;
  return AdamState(adam, model.params().size());
}

PpoUpdateStats PpoUpdate(PolicyModel& model, AdamState& adam,
                         const Trajectory& traj, const AdvantageSet& adv,
                         const LinkNeighborhood& nbr, const PpoConfig& config,
                         Rng& rng) {
  PpoUpdateStats stats;
  int steps = static_cast<int>(traj.steps.size());
  if (steps == 0) return stats;
  if (adv.advantages.size() != static_cast<size_t>(steps)) {
    throw std::invalid_argument("PpoUpdate: advantages not aligned with trajectory");
  }
  int links = static_cast<int>(nbr.size());

  std::vector<double> advantages = adv.advantages;
  if (config.normalize_advantages) {
    double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) / steps;
    double var = 0.0;
    for (double a : advantages) var += (a - mean) * (a - mean);
    double stddev = std::sqrt(var / steps);
    for (double& a : advantages) a = (a - mean) / (stddev + 1e-8);
  }

  std::vector<int> order(steps);
  AlignedDoubles grads(model.params().size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int begin = 0; begin < steps; begin += config.minibatch) {
      int n = std::min(config.minibatch, steps - begin);
      PpoSamples samples;
      samples.features.resize(static_cast<Eigen::Index>(n) * links, 2);
      for (int i = 0; i < n; ++i) {
        int t = order[begin + i];
        const Transition& s = traj.steps[t];
        samples.features.middleRows(static_cast<Eigen::Index>(i) * links, links) =
            s.features;
        samples.actions.push_back(s.action);
        samples.old_log_probs.push_back(s.log_prob);
        samples.advantages.push_back(advantages[t]);
        samples.returns.push_back(adv.returns[t]);
      }

      Tape tape(&model.params());
      PpoLossTerms terms;
      Var loss = PpoLoss(tape, model, nbr, samples, config, &terms);
      if (!std::isfinite(terms.total)) {
        std::ostringstream msg;
        msg << "non-finite PPO loss at epoch " << epoch << ": actor=" << terms.actor
            << " value=" << terms.value << " entropy=" << terms.entropy;
        throw std::runtime_error(msg.str());
      }
      std::fill(grads.begin(), grads.end(), 0.0);
      tape.Backward(loss, grads);
      if (config.max_grad_norm > 0.0) {
        double norm = 0.0;
        for (double g : grads) norm += g * g;
        norm = std::sqrt(norm);
        if (norm > config.max_grad_norm) {
          double scale = config.max_grad_norm / norm;
          for (double& g : grads) g *= scale;
        }
      }
      adam.Step(model.params(), grads);

      stats.actor_loss += terms.actor;
      stats.value_loss += terms.value;
      stats.entropy += terms.entropy;
      ++stats.minibatches;
    }
  }
  stats.actor_loss /= stats.minibatches;
  stats.value_loss /= stats.minibatches;
  stats.entropy /= stats.minibatches;
  return stats;
}

std::string TrainLogHeader() {
  return "episode,tm_id,topo_id,minmax_load,actor_loss,value_loss,entropy";
}

std::string FormatTrainLogRow(const TrainLogRow& row) {
  std::ostringstream out;
  out.precision(17);
  out << row.episode << "," << row.tm_id << "," << row.topo_id << ","
      << row.minmax_load << "," << row.actor_loss << "," << row.value_loss << ","
      << row.entropy;
  return out.str();
}

uint64_t TrainTmSeed(uint64_t seed, int topo_id, int tm_id) {
  return DeriveSeed(seed, {kTrainTmStream, static_cast<uint64_t>(topo_id),
                           static_cast<uint64_t>(tm_id)});
}

std::vector<TrainLogRow> Train(const std::vector<Topology>& topologies,
                               const TrainConfig& config, PolicyModel& model,
                               AdamState& adam, const EpisodeCallback& on_episode) {
  if (topologies.empty()) throw std::invalid_argument("Train: no topologies");
  config.ppo.Validate();
  int n_topos = static_cast<int>(topologies.size());
  std::vector<LinkNeighborhood> neighborhoods;
  for (const Topology& t : topologies) neighborhoods.push_back(LinkNeighborhoods(t));

  std::vector<TrainLogRow> log;
  int cached_topo = -1;
  int cached_tm = -1;
  TrafficMatrix tm(1);
  for (int episode = 0; episode < config.episodes; ++episode) {
    int block = episode / config.ppo.tm_period;
    int topo_id = block % n_topos;
    int tm_id = block / n_topos;
    if (config.tm_pool > 0) tm_id %= config.tm_pool;
    const Topology& topo = topologies[topo_id];
    if (topo_id != cached_topo || tm_id != cached_tm) {
      tm = GenerateTm(config.traffic, topo, TrainTmSeed(config.seed, topo_id, tm_id));
      cached_topo = topo_id;
      cached_tm = tm_id;
    }

    EpisodeOptions options;
    options.horizon =
        config.horizon > 0 ? config.horizon : DefaultEpisodeLength(topo.link_count());
    Rng episode_rng(DeriveSeed(config.seed, {kEpisodeStream,
                                             static_cast<uint64_t>(episode)}));
    Trajectory traj = RunEpisode(topo, neighborhoods[topo_id], tm, model, options,
                                 episode_rng);

    TrainLogRow row{episode, tm_id, topo_id, traj.best_max_utilization, 0, 0, 0};
    if (!traj.steps.empty()) {
      AdvantageSet adv = Gae(traj, config.ppo.gamma, config.ppo.lambda);
      Rng update_rng(DeriveSeed(config.seed, {kUpdateStream,
                                              static_cast<uint64_t>(episode)}));
      PpoUpdateStats stats = PpoUpdate(model, adam, traj, adv, neighborhoods[topo_id],
                                       config.ppo, update_rng);
      row.actor_loss = stats.actor_loss;
      row.value_loss = stats.value_loss;
      row.entropy = stats.entropy;
    }
    log.push_back(row);
    if (on_episode) on_episode(row, model, adam);
  }
  return log;
}

}  // namespace marlte
