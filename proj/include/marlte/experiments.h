#ifndef MARLTE_EXPERIMENTS_H_
#define MARLTE_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "marlte/baselines.h"
#include "marlte/checkpoint.h"
#include "marlte/overhead.h"
#include "marlte/ppo.h"

namespace marlte {

// Everything an experiment run depends on. Serialized into the run manifest;
// its hash identifies the run.
struct ExperimentConfig {
  TrainConfig train;
  int checkpoint_every = 0;  // 0: only the final checkpoint

  uint64_t eval_seed = 0;  // 0: derived from train.seed
  int eval_tms = 100;
  int eval_horizon = 0;    // 0: DefaultEpisodeLength
  std::string oracle = "local";  // local | brute | none
  int oracle_iterations = 100;
  WeightRange oracle_range{1, 20};
  uint64_t brute_force_guard = kDefaultBruteForceGuard;

  int failure_max = 9;
  int failure_scenarios = 10;
  int failure_tms = 5;
  int curve_tms = 5;

  uint64_t ResolvedEvalSeed() const;
};

std::string ConfigToJson(const ExperimentConfig& config);
// Applies the keys present in `json` on top of `base`.
ExperimentConfig ConfigFromJson(const std::string& json,
                                const ExperimentConfig& base = {});
uint64_t ConfigHash(const ExperimentConfig& config);

// Empirical CDF: one (value, fraction <= value) pair per distinct value,
// ascending. Throws on empty input.
std::vector<std::pair<double, double>> EmpiricalCdf(std::vector<double> values);

uint64_t EvalTmSeed(uint64_t eval_seed, int tm_id);
uint64_t EvalEpisodeSeed(uint64_t eval_seed, int tm_id);

struct EvalTmRow {
  int tm_id;
  uint64_t episode_seed;
  double marl;
  double default_ospf;
  double oracle;  // NaN when the oracle is disabled
};

// MARL MinMaxLoad (best state over one sampled episode), default OSPF and the
// oracle for eval TMs [0, tm_count).
std::vector<EvalTmRow> EvaluateTms(const Topology& topo, const PolicyModel& model,
                                   const ExperimentConfig& config, int tm_count);

// Re-runs the episode behind one EvalTmRow.
double ReplayEvalEpisode(const Topology& topo, const PolicyModel& model,
                         const ExperimentConfig& config, int tm_id);

struct FailureRow {
  int n_failures;
  double marl_mean;
  double marl_std;
  double oracle_mean;
  double oracle_std;
};

// Relative MinMaxLoad degradation vs the intact topology, averaged over the
// failure scenarios of each TM, then mean/std across TMs.
std::vector<FailureRow> EvaluateFailures(const Topology& topo,
                                         const PolicyModel& model,
                                         const ExperimentConfig& config);

struct CurvePoint {
  int step;
  double mean;
  double stddev;
};

// Best-so-far max utilization per step, mean/std over curve_tms TMs.
std::vector<CurvePoint> EpisodeCurve(const Topology& topo, const PolicyModel& model,
                                     const ExperimentConfig& config);

// Subcommand runners. Each writes CSVs plus manifest.json into out_dir and
// returns a short human-readable summary.
struct TrainOutcome {
  PolicyModel model;
  std::vector<TrainLogRow> log;
  std::string checkpoint_path;
};

TrainOutcome RunTrain(const std::vector<Topology>& topologies,
                      const ExperimentConfig& config, const std::string& out_dir,
                      const std::optional<std::string>& resume_checkpoint = {});

std::string RunEvalTm(const Topology& topo, const std::string& checkpoint_path,
                      const ExperimentConfig& config, const std::string& out_dir);

// Trains on `train_topologies` (unless a checkpoint is given) and evaluates on
// `eval_topology`.
std::string RunEvalTopo(const std::vector<Topology>& train_topologies,
                        const Topology& eval_topology,
                        const std::optional<std::string>& checkpoint_path,
                        const ExperimentConfig& config, const std::string& out_dir);

std::string RunEvalFailures(const Topology& topo, const std::string& checkpoint_path,
                            const ExperimentConfig& config,
                            const std::string& out_dir);

std::string RunEvalEpisodeCurve(const Topology& topo,
                                const std::string& checkpoint_path,
                                const ExperimentConfig& config,
                                const std::string& out_dir);

// `checkpoint_path` is only recorded in the manifest (set when the rate
// was measured from a model).
std::string RunOverhead(const Topology& topo, const OverheadParams& params,
                        const ExperimentConfig& config,
                        const std::optional<std::string>& checkpoint_path,
                        const std::string& out_dir);

// Wall-clock seconds of one inference episode of the given length.
double MeasureEpisodeSeconds(const Topology& topo, const PolicyModel& model,
                             int horizon);

// Default OSPF, local search and (when feasible) brute force on one TM.
std::string RunOracle(const Topology& topo, const TrafficMatrix& tm,
                      const ExperimentConfig& config, const std::string& out_dir);

}  // namespace marlte

#endif  // MARLTE_EXPERIMENTS_H_
