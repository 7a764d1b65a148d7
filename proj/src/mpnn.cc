#include "marlte/mpnn.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace marlte {
namespace {

MpnnLayers AddMpnn(ParamSet& params, const std::string& prefix,
                   const MpnnConfig& c) {
  MpnnLayers l;
  l.message0 = params.AddDense(prefix + "/message/0", c.mlp_width, 2 * c.hidden);
  l.message1 = params.AddDense(prefix + "/message/1", c.hidden, c.mlp_width);
  l.update0 = params.AddDense(prefix + "/update/0", c.mlp_width, 2 * c.hidden);
  l.update1 = params.AddDense(prefix + "/update/1", c.hidden, c.mlp_width);
  l.readout0 = params.AddDense(prefix + "/readout/0", c.mlp_width, c.hidden);
  l.readout1 = params.AddDense(prefix + "/readout/1", 1, c.mlp_width);
  return l;
}

Var RunSteps(Tape& tape, Var h, const GraphBatch& batch,
             const MpnnLayers& layers, int steps) {
  for (int k = 0; k < steps; ++k) h = MessagePass(tape, h, batch, layers);
  return h;
}

}  // namespace

PolicyModel::PolicyModel(MpnnConfig config) : config_(config) {
  if (config.hidden < 2 || config.steps < 1 || config.mlp_width < 1) {
    throw std::invalid_argument("MpnnConfig: hidden >= 2, steps >= 1 required");
  }
  actor_ = AddMpnn(params_, "actor", config_);
  critic_ = AddMpnn(params_, "critic", config_);
}

std::pair<size_t, size_t> PolicyModel::actor_range() const {
  return {params_.layer(actor_.message0).weight_offset,
          params_.layer(critic_.message0).weight_offset};
}

std::pair<size_t, size_t> PolicyModel::critic_range() const {
  return {params_.layer(critic_.message0).weight_offset, params_.size()};
}

void PolicyModel::Initialize(uint64_t seed) {
  Rng rng(seed);
  params_.GlorotInit(rng);
}

GraphBatch GraphBatch::Replicate(const LinkNeighborhood& nbr, int copies) {
  if (copies < 1) throw std::invalid_argument("GraphBatch needs >= 1 copy");
  int links = static_cast<int>(nbr.size());
  std::vector<int> self;
  std::vector<int> other;
  std::vector<int> offsets = {0};
  for (int c = 0; c < copies; ++c) {
    int base = c * links;
    for (int e = 0; e < links; ++e) {
      for (LinkId i : nbr[e]) {
        self.push_back(base + e);
        other.push_back(base + i);
      }
    }
    offsets.push_back(base + links);
  }
  GraphBatch batch;
  batch.link_count = links * copies;
  batch.pair_self = MakeIndexList(std::move(self));
  batch.pair_nbr = MakeIndexList(std::move(other));
  batch.offsets = MakeIndexList(std::move(offsets));
  return batch;
}

RowMatrix LinkFeatures(const WeightVector& weights,
                       const std::vector<double>& utilizations,
                       double weight_scale) {
  if (weights.size() != utilizations.size()) {
    throw std::invalid_argument("LinkFeatures: size mismatch");
  }
  RowMatrix x(static_cast<Eigen::Index>(weights.size()), 2);
  for (size_t e = 0; e < weights.size(); ++e) {
    x(static_cast<Eigen::Index>(e), 0) = weights[e] / weight_scale;
    x(static_cast<Eigen::Index>(e), 1) = utilizations[e];
  }
  return x;
}

RowMatrix InitHidden(const RowMatrix& features, int hidden) {
  if (features.cols() > hidden) {
    throw std::invalid_argument("InitHidden: more features than hidden units");
  }
  RowMatrix h = RowMatrix::Zero(features.rows(), hidden);
  h.leftCols(features.cols()) = features;
  return h;
}

Var MessagePass(Tape& tape, Var h, const GraphBatch& batch,
                const MpnnLayers& layers) {
  // The first message layer acts on (h_e || h_i); apply its two column
  // blocks per link and gather, instead of per neighbor pair.
  int hidden = static_cast<int>(tape.value(h).cols());
  Var self_part = tape.DensePart(h, layers.message0, 0, true);
  Var nbr_part = tape.DensePart(h, layers.message0, hidden, false);
  Var pre = tape.Add(tape.GatherRows(self_part, batch.pair_self),
                     tape.GatherRows(nbr_part, batch.pair_nbr));
  Var messages =
      tape.Relu(tape.Dense(tape.Relu(pre), layers.message1));
  Var aggregated = tape.ScatterAddRows(messages, batch.pair_self, batch.link_count);
  Var joined = tape.ConcatCols(h, aggregated);
  return tape.Tanh(
      tape.Dense(tape.Relu(tape.Dense(joined, layers.update0)), layers.update1));
}

Var ActorLogits(Tape& tape, const PolicyModel& model, const GraphBatch& batch,
                Var h0) {
  const MpnnLayers& layers = model.actor();
  Var h = RunSteps(tape, h0, batch, layers, model.config().steps);
  return tape.Dense(tape.Relu(tape.Dense(h, layers.readout0)), layers.readout1);
}

Var CriticValues(Tape& tape, const PolicyModel& model, const GraphBatch& batch,
                 Var h0) {
  const MpnnLayers& layers = model.critic();
  Var h = RunSteps(tape, h0, batch, layers, model.config().steps);
  Var pooled = tape.SegmentMean(h, batch.offsets);
  return tape.Dense(tape.Relu(tape.Dense(pooled, layers.readout0)),
                    layers.readout1);
}

GlobalPolicy PolicyFromLogits(std::vector<double> logits) {
  if (logits.empty()) throw std::invalid_argument("policy over zero links");
  GlobalPolicy p;
  double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - max);
  double lse = max + std::log(sum);
  p.log_probs.reserve(logits.size());
  p.probabilities.reserve(logits.size());
  for (double l : logits) {
    p.log_probs.push_back(l - lse);
    p.probabilities.push_back(std::exp(l - lse));
  }
  p.logits = std::move(logits);
  return p;
}

GlobalPolicy ActorForward(const PolicyModel& model, const RowMatrix& features,
                          const LinkNeighborhood& nbr) {
  Tape tape(&model.params());
  GraphBatch batch = GraphBatch::Replicate(nbr, 1);
  Var h0 = tape.Constant(InitHidden(features, model.config().hidden));
  const RowMatrix& logits = tape.value(ActorLogits(tape, model, batch, h0));
  return PolicyFromLogits(std::vector<double>(logits.data(),
                                              logits.data() + logits.size()));
}

double CriticForward(const PolicyModel& model, const RowMatrix& features,
                     const LinkNeighborhood& nbr) {
  Tape tape(&model.params());
  GraphBatch batch = GraphBatch::Replicate(nbr, 1);
  Var h0 = tape.Constant(InitHidden(features, model.config().hidden));
  return tape.scalar(CriticValues(tape, model, batch, h0));
}

SampledAction SampleAction(const GlobalPolicy& policy, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  double cumulative = 0.0;
  size_t chosen = policy.probabilities.size() - 1;
  for (size_t i = 0; i < policy.probabilities.size(); ++i) {
    cumulative += policy.probabilities[i];
    if (u < cumulative) {
      chosen = i;
      break;
    }
  }
  // Rounding can leave the tail short of 1; never land on a zero-mass entry.
  while (chosen > 0 && policy.probabilities[chosen] == 0.0) --chosen;
  return {static_cast<LinkId>(chosen), policy.log_probs[chosen]};
}

double PolicyEntropy(const GlobalPolicy& policy) {
  double h = 0.0;
  for (size_t i = 0; i < policy.probabilities.size(); ++i) {
    h -= policy.probabilities[i] * policy.log_probs[i];
  }
  return h;
}

}  // namespace marlte
