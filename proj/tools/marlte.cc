// Command-line driver: training, evaluation protocols, overhead model and
// baseline oracles. Every subcommand writes CSVs and manifest.json to --out.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "marlte/experiments.h"
#include "marlte/seed.h"

namespace {

using namespace marlte;

struct CommonFlags {
  std::string config_file;
  std::string tm_profile;
  uint64_t seed = 0;
  uint64_t eval_seed = 0;
  int episodes = 0;
  int horizon = 0;
  int tms = 0;
  std::string oracle;
  int oracle_iterations = 0;
  std::string checkpoint;
  std::string out = "out";
};

struct Flags {
  CommonFlags common;
  std::vector<std::string> topologies;
  std::vector<std::string> train_topologies;
  int tm_pool = 0;
  int checkpoint_every = 0;
  int failure_max = 0;
  int failure_scenarios = 0;

  // overhead
  double exec_time = 0.0;
  int episode_length = 0;
  double steps_per_second = 0.0;
  std::string accounting = "router";
  int synth_nodes = 0;
  int synth_links = 0;
  bool measure = false;

  // oracle
  std::string tm_file;
  int tm_id = 0;
  int range_min = 0;
  int range_max = 0;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void AddCommon(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_file, "JSON experiment config");
  sub->add_option("--tm-profile", f.tm_profile, "uniform | gravity");
  sub->add_option("--seed", f.seed, "training seed");
  sub->add_option("--eval-seed", f.eval_seed, "evaluation seed (default: derived)");
  sub->add_option("--episodes", f.episodes, "training episodes");
  sub->add_option("--horizon", f.horizon, "episode length (default per topology)");
  sub->add_option("--tms", f.tms, "number of evaluation TMs");
  sub->add_option("--oracle", f.oracle, "local | brute | none");
  sub->add_option("--oracle-iterations", f.oracle_iterations, "local search rounds");
  sub->add_option("--checkpoint", f.checkpoint, "checkpoint path");
  sub->add_option("--out", f.out, "output directory");
}

// Defaults, then --config, then explicit flags.
ExperimentConfig BuildConfig(const CLI::App* sub, const Flags& flags) {
  const CommonFlags& f = flags.common;
  ExperimentConfig c;
  if (!f.config_file.empty()) c = ConfigFromJson(ReadFile(f.config_file), c);
  auto given = [sub](const char* name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--tm-profile")) c.train.traffic.kind = ParseTrafficKind(f.tm_profile);
  if (given("--seed")) c.train.seed = f.seed;
  if (given("--eval-seed")) c.eval_seed = f.eval_seed;
  if (given("--episodes")) c.train.episodes = f.episodes;
  if (given("--horizon")) {
    c.train.horizon = f.horizon;
    c.eval_horizon = f.horizon;
  }
  if (given("--tms")) {
    c.eval_tms = f.tms;
    c.failure_tms = f.tms;
    c.curve_tms = f.tms;
  }
  if (given("--oracle")) c.oracle = f.oracle;
  if (given("--oracle-iterations")) c.oracle_iterations = f.oracle_iterations;
  if (given("--tm-pool")) c.train.tm_pool = flags.tm_pool;
  if (given("--checkpoint-every")) c.checkpoint_every = flags.checkpoint_every;
  if (given("--failure-max")) c.failure_max = flags.failure_max;
  if (given("--failure-scenarios")) c.failure_scenarios = flags.failure_scenarios;
  if (given("--range-min")) c.oracle_range.min = flags.range_min;
  if (given("--range-max")) c.oracle_range.max = flags.range_max;
  return c;
}

std::vector<Topology> LoadAll(const std::vector<std::string>& paths) {
  std::vector<Topology> out;
  for (const std::string& p : paths) out.push_back(LoadTopologyFile(p));
  return out;
}

const std::string& RequireCheckpoint(const CommonFlags& f) {
  if (f.checkpoint.empty()) throw std::invalid_argument("--checkpoint is required");
  return f.checkpoint;
}

int Run(int argc, char** argv) {
  CLI::App app{"Multi-agent link-weight traffic engineering"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* train = app.add_subcommand("train", "train a policy");
  AddCommon(train, flags.common);
  train->add_option("--topology", flags.topologies, "topology file (repeatable)")
      ->required();
  train->add_option("--tm-pool", flags.tm_pool, "distinct training TMs per topology");
  train->add_option("--checkpoint-every", flags.checkpoint_every,
                    "write a checkpoint every N episodes");
  train->footer("--checkpoint resumes from an existing checkpoint.");

  CLI::App* eval_tm = app.add_subcommand("eval-tm", "evaluate on unseen TMs");
  AddCommon(eval_tm, flags.common);
  eval_tm->add_option("--topology", flags.topologies, "topology file")->required();

  CLI::App* eval_topo =
      app.add_subcommand("eval-topo", "train on some topologies, evaluate on another");
  AddCommon(eval_topo, flags.common);
  eval_topo->add_option("--train-topology", flags.train_topologies,
                        "training topology (repeatable)");
  eval_topo->add_option("--topology", flags.topologies, "evaluation topology")
      ->required();
  eval_topo->add_option("--tm-pool", flags.tm_pool, "distinct training TMs");

  CLI::App* eval_failures =
      app.add_subcommand("eval-failures", "degradation under random link failures");
  AddCommon(eval_failures, flags.common);
  eval_failures->add_option("--topology", flags.topologies, "topology file")->required();
  eval_failures->add_option("--failure-max", flags.failure_max, "largest n");
  eval_failures->add_option("--failure-scenarios", flags.failure_scenarios,
                            "failure draws per n");

  CLI::App* curve = app.add_subcommand("eval-episode-curve",
                                       "best-so-far max utilization per step");
  AddCommon(curve, flags.common);
  curve->add_option("--topology", flags.topologies, "topology file")->required();

  CLI::App* overhead = app.add_subcommand("overhead", "analytic message overhead");
  AddCommon(overhead, flags.common);
  overhead->add_option("--topology", flags.topologies, "topology file");
  overhead->add_option("--synth-nodes", flags.synth_nodes, "random topology nodes");
  overhead->add_option("--synth-links", flags.synth_links,
                       "random topology directed links");
  overhead->add_option("--exec-time", flags.exec_time,
                       "seconds per episode (steps/s = length / time)");
  overhead->add_option("--episode-length", flags.episode_length,
                       "steps per episode (default per topology)");
  overhead->add_option("--steps-per-second", flags.steps_per_second,
                       "time-steps per second (overrides --exec-time)");
  overhead->add_option("--accounting", flags.accounting, "router | link");
  overhead->add_flag("--measure", flags.measure,
                     "time one episode of --checkpoint to get steps/s");

  CLI::App* oracle = app.add_subcommand("oracle", "baseline optimizers on one TM");
  AddCommon(oracle, flags.common);
  oracle->add_option("--topology", flags.topologies, "topology file")->required();
  oracle->add_option("--tm-file", flags.tm_file, "TM CSV (default: generated)");
  oracle->add_option("--tm-id", flags.tm_id, "generated eval TM id");
  oracle->add_option("--range-min", flags.range_min, "smallest weight");
  oracle->add_option("--range-max", flags.range_max, "largest weight");

  CLI11_PARSE(app, argc, argv);
  const CommonFlags& f = flags.common;

  if (*train) {
    ExperimentConfig c = BuildConfig(train, flags);
    std::optional<std::string> resume;
    if (!f.checkpoint.empty()) resume = f.checkpoint;
    TrainOutcome outcome = RunTrain(LoadAll(flags.topologies), c, f.out, resume);
    double tail = 0.0;
    size_t n = std::min<size_t>(50, outcome.log.size());
    for (size_t i = outcome.log.size() - n; i < outcome.log.size(); ++i) {
      tail += outcome.log[i].minmax_load;
    }
    std::cout << "episodes: " << outcome.log.size() << "\n";
    if (n > 0) std::cout << "mean MinMaxLoad (last " << n << "): " << tail / n << "\n";
    std::cout << "checkpoint: " << outcome.checkpoint_path << "\n";
  } else if (*eval_tm) {
    ExperimentConfig c = BuildConfig(eval_tm, flags);
    std::cout << RunEvalTm(LoadTopologyFile(flags.topologies.at(0)),
                           RequireCheckpoint(f), c, f.out);
  } else if (*eval_topo) {
    ExperimentConfig c = BuildConfig(eval_topo, flags);
    std::optional<std::string> ckpt;
    if (!f.checkpoint.empty()) {
      ckpt = f.checkpoint;
    } else if (flags.train_topologies.empty()) {
      throw std::invalid_argument("need --train-topology or --checkpoint");
    }
    std::cout << RunEvalTopo(LoadAll(flags.train_topologies),
                             LoadTopologyFile(flags.topologies.at(0)), ckpt, c, f.out);
  } else if (*eval_failures) {
    ExperimentConfig c = BuildConfig(eval_failures, flags);
    std::cout << RunEvalFailures(LoadTopologyFile(flags.topologies.at(0)),
                                 RequireCheckpoint(f), c, f.out);
  } else if (*curve) {
    ExperimentConfig c = BuildConfig(curve, flags);
    std::cout << RunEvalEpisodeCurve(LoadTopologyFile(flags.topologies.at(0)),
                                     RequireCheckpoint(f), c, f.out);
  } else if (*overhead) {
    ExperimentConfig c = BuildConfig(overhead, flags);
    std::optional<Topology> topo;
    if (!flags.topologies.empty()) {
      topo = LoadTopologyFile(flags.topologies.at(0));
    } else if (flags.synth_nodes > 0 && flags.synth_links > 0) {
      Rng rng(DeriveSeed(c.train.seed, {0x7379}));
      topo = RandomTopology(flags.synth_nodes, flags.synth_links / 2, {10.0, 40.0}, rng);
    } else {
      throw std::invalid_argument("need --topology or --synth-nodes/--synth-links");
    }
    int length = flags.episode_length > 0 ? flags.episode_length
                                          : DefaultEpisodeLength(topo->link_count());
    std::optional<std::string> measured_with;
    OverheadParams params;
    params.hidden = c.train.mpnn.hidden;
    params.steps = c.train.mpnn.steps;
    params.accounting = ParseAccounting(flags.accounting);
    if (flags.steps_per_second > 0) {
      params.steps_per_second = flags.steps_per_second;
    } else if (flags.exec_time > 0) {
      params.steps_per_second = length / flags.exec_time;
    } else if (flags.measure) {
      measured_with = RequireCheckpoint(f);
      PolicyModel model = LoadCheckpoint(*measured_with).model;
      double seconds = MeasureEpisodeSeconds(*topo, model, length);
      std::cout << "measured episode time: " << seconds << " s for " << length
                << " steps\n";
      params.steps_per_second = length / seconds;
    } else {
      throw std::invalid_argument(
          "need --steps-per-second, --exec-time or --measure");
    }
    std::cout << RunOverhead(*topo, params, c, measured_with, f.out);
  } else if (*oracle) {
    ExperimentConfig c = BuildConfig(oracle, flags);
    Topology topo = LoadTopologyFile(flags.topologies.at(0));
    TrafficMatrix tm =
        flags.tm_file.empty()
            ? GenerateTm(c.train.traffic, topo,
                         EvalTmSeed(c.ResolvedEvalSeed(), flags.tm_id))
            : LoadTrafficMatrixFile(flags.tm_file);
    std::cout << RunOracle(topo, tm, c, f.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
