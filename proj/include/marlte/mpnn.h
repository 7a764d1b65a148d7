#ifndef MARLTE_MPNN_H_
#define MARLTE_MPNN_H_

#include <cstdint>
#include <vector>

#include "marlte/autodiff.h"
#include "marlte/param_set.h"
#include "marlte/routing.h"
#include "marlte/topology.h"

namespace marlte {

struct MpnnConfig {
  int hidden = 16;     // link hidden-state size
  int steps = 8;       // message-passing iterations per forward pass
  int mlp_width = 32;  // hidden width of message/update/readout nets
};

// Layers of one link-based MPNN.
struct MpnnLayers {
  LayerId message0, message1;  // (h_e || h_i) -> width -> hidden
  LayerId update0, update1;    // (h_e || M_e) -> width -> hidden
  LayerId readout0, readout1;  // hidden -> width -> 1
};

// Actor and critic parameters. Both MPNNs live in one ParamSet ("actor/..."
// layers first, then "critic/..."), and every link runs the same functions
// with the same parameters, so the parameter count does not depend on the
// topology.
class PolicyModel {
 public:
  explicit PolicyModel(MpnnConfig config = {});

  const MpnnConfig& config() const { return config_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  const MpnnLayers& actor() const { return actor_; }
  const MpnnLayers& critic() const { return critic_; }

  // [begin, end) of the actor / critic parameters in the flat vector.
  std::pair<size_t, size_t> actor_range() const;
  std::pair<size_t, size_t> critic_range() const;

  void Initialize(uint64_t seed);

 private:
  MpnnConfig config_;
  ParamSet params_;
  MpnnLayers actor_;
  MpnnLayers critic_;
};

// Several link graphs stacked as one disjoint union. Rows of a batch are the
// links of copy 0, then copy 1, ...; offsets delimit the copies.
struct GraphBatch {
  int link_count = 0;
  IndexList pair_self;  // receiving link of each message
  IndexList pair_nbr;   // sending neighbor of each message
  IndexList offsets;

  int copies() const { return static_cast<int>(offsets->size()) - 1; }
  static GraphBatch Replicate(const LinkNeighborhood& nbr, int copies);
};

// Per-link input features (normalized weight, utilization), one row per link.
RowMatrix LinkFeatures(const WeightVector& weights,
                       const std::vector<double>& utilizations,
                       double weight_scale);

// h^0 = (features, 0, ..., 0) of width hidden.
RowMatrix InitHidden(const RowMatrix& features, int hidden);

// One message-passing step:
//   M_e = sum_{i in B(e)} m(h_e || h_i),   h_e' = u(h_e || M_e).
Var MessagePass(Tape& tape, Var h, const GraphBatch& batch,
                const MpnnLayers& layers);

// Per-link logits (link_count x 1) after `steps` message-passing rounds.
Var ActorLogits(Tape& tape, const PolicyModel& model, const GraphBatch& batch,
                Var h0);

// One value per batch copy (copies x 1); readout of the mean link state.
Var CriticValues(Tape& tape, const PolicyModel& model, const GraphBatch& batch,
                 Var h0);

struct GlobalPolicy {
  std::vector<double> logits;
  std::vector<double> log_probs;
  std::vector<double> probabilities;
};

GlobalPolicy PolicyFromLogits(std::vector<double> logits);

GlobalPolicy ActorForward(const PolicyModel& model, const RowMatrix& features,
                          const LinkNeighborhood& nbr);
double CriticForward(const PolicyModel& model, const RowMatrix& features,
                     const LinkNeighborhood& nbr);

struct SampledAction {
  LinkId link;
  double log_prob;
};

// Inverse-CDF draw of one link from the global categorical policy.
SampledAction SampleAction(const GlobalPolicy& policy, Rng& rng);

double PolicyEntropy(const GlobalPolicy& policy);

}  // namespace marlte

#endif  // MARLTE_MPNN_H_
