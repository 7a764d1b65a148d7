#include "marlte/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "marlte/seed.h"

namespace marlte {
namespace {

using json = nlohmann::json;

constexpr uint64_t kEvalSeedStream = 0x6576;
constexpr uint64_t kEvalTmStream = 0x746d;
constexpr uint64_t kEvalEpisodeStream = 0x6570;
constexpr uint64_t kOracleStream = 0x6f72;
constexpr uint64_t kFailureStream = 0x6661;
constexpr uint64_t kInitStream = 0x696e;

template <typename T>
void Read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

// Typos in a config file would otherwise be silently ignored.
void RejectUnknownKeys(const json& given, const json& known, const std::string& path) {
  if (!given.is_object()) {
    throw std::invalid_argument("config" + (path.empty() ? "" : " at " + path) +
                                ": expected an object");
  }
  for (const auto& [key, value] : given.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + path + key + "'");
    }
    if (known.at(key).is_object()) RejectUnknownKeys(value, known.at(key), path + key + ".");
  }
}

json ToJson(const ExperimentConfig& c) {
  const TrainConfig& t = c.train;
  const PpoConfig& p = t.ppo;
  return json{
      {"train",
       {{"episodes", t.episodes},
        {"horizon", t.horizon},
        {"seed", t.seed},
        {"tm_pool", t.tm_pool},
        {"mpnn",
         {{"hidden", t.mpnn.hidden},
          {"steps", t.mpnn.steps},
          {"mlp_width", t.mpnn.mlp_width}}},
        {"ppo",
         {{"clip", p.clip},
          {"gamma", p.gamma},
          {"lambda", p.lambda},
          {"epochs", p.epochs},
          {"minibatch", p.minibatch},
          {"value_coef", p.value_coef},
          {"entropy_coef", p.entropy_coef},
          {"learning_rate", p.learning_rate},
          {"adam_preset", p.adam_preset},
          {"normalize_advantages", p.normalize_advantages},
          {"max_grad_norm", p.max_grad_norm},
          {"tm_period", p.tm_period}}},
        {"traffic",
         {{"profile", TrafficKindName(t.traffic.kind)},
          {"low", t.traffic.low},
          {"high", t.traffic.high},
          {"total", t.traffic.total}}}}},
      {"checkpoint_every", c.checkpoint_every},
      {"eval_seed", c.eval_seed},
      {"eval_tms", c.eval_tms},
      {"eval_horizon", c.eval_horizon},
      {"oracle", c.oracle},
      {"oracle_iterations", c.oracle_iterations},
      {"oracle_range", {c.oracle_range.min, c.oracle_range.max}},
      {"brute_force_guard", c.brute_force_guard},
      {"failure_max", c.failure_max},
      {"failure_scenarios", c.failure_scenarios},
      {"failure_tms", c.failure_tms},
      {"curve_tms", c.curve_tms},
  };
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void EnsureDir(const std::string& dir) { std::filesystem::create_directories(dir); }

void WriteManifest(const std::string& out_dir, const std::string& command,
                   const ExperimentConfig& config,
                   const std::optional<std::string>& checkpoint_path,
                   const std::vector<std::string>& outputs) {
  json m{{"command", command},
         {"config_hash", HexHash(ConfigHash(config))},
         {"seed", config.train.seed},
         {"eval_seed", config.ResolvedEvalSeed()},
         {"checkpoint_hash", nullptr},
         {"outputs", outputs},
         {"config", ToJson(config)}};
  if (checkpoint_path) {
    m["checkpoint"] = std::filesystem::path(*checkpoint_path).filename().string();
    m["checkpoint_hash"] = HexHash(HashFile(*checkpoint_path));
  }
  WriteFile(JoinPath(out_dir, "manifest.json"), m.dump(2) + "\n");
}

std::pair<double, double> MeanStd(const std::vector<double>& v) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

int EvalHorizon(const ExperimentConfig& config, const Topology& topo) {
  return config.eval_horizon > 0 ? config.eval_horizon
                                 : DefaultEpisodeLength(topo.link_count());
}

double MarlMinMaxLoad(const Topology& topo, const LinkNeighborhood& nbr,
                      const TrafficMatrix& tm, const PolicyModel& model,
                      int horizon, uint64_t episode_seed) {
  EpisodeOptions options;
  options.horizon = horizon;
  options.record_values = false;
  options.record_features = false;
  Rng rng(episode_seed);
  return RunEpisode(topo, nbr, tm, model, options, rng).best_max_utilization;
}

double OracleMaxUtilization(const Topology& topo, const TrafficMatrix& tm,
                            const ExperimentConfig& config, int tm_id) {
  if (config.oracle == "none") return std::nan("");
  if (config.oracle == "brute") {
    return BruteForceWeights(topo, tm, config.oracle_range, config.brute_force_guard)
        .max_utilization;
  }
  if (config.oracle != "local") {
    throw std::invalid_argument("unknown oracle '" + config.oracle + "'");
  }
  Rng rng(DeriveSeed(config.ResolvedEvalSeed(),
                     {kOracleStream, static_cast<uint64_t>(tm_id)}));
  return LocalSearchWeights(topo, tm, config.oracle_iterations, rng,
                            config.oracle_range)
      .max_utilization;
}

std::string Fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

PolicyModel LoadModel(const std::string& checkpoint_path) {
  return LoadCheckpoint(checkpoint_path).model;
}

}  // namespace

uint64_t ExperimentConfig::ResolvedEvalSeed() const {
  return eval_seed != 0 ? eval_seed : DeriveSeed(train.seed, {kEvalSeedStream});
}

std::string ConfigToJson(const ExperimentConfig& config) {
  return ToJson(config).dump();
}

ExperimentConfig ConfigFromJson(const std::string& text,
                                const ExperimentConfig& base) {
  ExperimentConfig c = base;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  RejectUnknownKeys(j, ToJson(c), "");
  try {
    if (j.contains("train")) {
      const json& t = j.at("train");
      Read(t, "episodes", c.train.episodes);
      Read(t, "horizon", c.train.horizon);
      Read(t, "seed", c.train.seed);
      Read(t, "tm_pool", c.train.tm_pool);
      if (t.contains("mpnn")) {
        const json& m = t.at("mpnn");
        Read(m, "hidden", c.train.mpnn.hidden);
        Read(m, "steps", c.train.mpnn.steps);
        Read(m, "mlp_width", c.train.mpnn.mlp_width);
      }
      if (t.contains("ppo")) {
        const json& p = t.at("ppo");
        PpoConfig& q = c.train.ppo;
        Read(p, "clip", q.clip);
        Read(p, "gamma", q.gamma);
        Read(p, "lambda", q.lambda);
        Read(p, "epochs", q.epochs);
        Read(p, "minibatch", q.minibatch);
        Read(p, "value_coef", q.value_coef);
        Read(p, "entropy_coef", q.entropy_coef);
        Read(p, "learning_rate", q.learning_rate);
        Read(p, "adam_preset", q.adam_preset);
        Read(p, "normalize_advantages", q.normalize_advantages);
        Read(p, "max_grad_norm", q.max_grad_norm);
        Read(p, "tm_period", q.tm_period);
      }
      if (t.contains("traffic")) {
        const json& tr = t.at("traffic");
        if (tr.contains("profile")) {
          c.train.traffic.kind = ParseTrafficKind(tr.at("profile").get<std::string>());
        }
        Read(tr, "low", c.train.traffic.low);
        Read(tr, "high", c.train.traffic.high);
        Read(tr, "total", c.train.traffic.total);
      }
    }
    Read(j, "checkpoint_every", c.checkpoint_every);
    Read(j, "eval_seed", c.eval_seed);
    Read(j, "eval_tms", c.eval_tms);
    Read(j, "eval_horizon", c.eval_horizon);
    Read(j, "oracle", c.oracle);
    Read(j, "oracle_iterations", c.oracle_iterations);
    if (j.contains("oracle_range")) {
      c.oracle_range.min = j.at("oracle_range").at(0).get<int>();
      c.oracle_range.max = j.at("oracle_range").at(1).get<int>();
    }
    Read(j, "brute_force_guard", c.brute_force_guard);
    Read(j, "failure_max", c.failure_max);
    Read(j, "failure_scenarios", c.failure_scenarios);
    Read(j, "failure_tms", c.failure_tms);
    Read(j, "curve_tms", c.curve_tms);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
  }
  c.train.ppo.Validate();
  if (c.oracle != "local" && c.oracle != "brute" && c.oracle != "none") {
    throw std::invalid_argument("config: oracle must be local, brute or none");
  }
  return c;
}

uint64_t ConfigHash(const ExperimentConfig& config) {
  std::string s = ConfigToJson(config);
  return Fnv1a(s.data(), s.size());
}

std::vector<std::pair<double, double>> EmpiricalCdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("CDF of an empty table");
  std::stable_sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> cdf;
  double n = static_cast<double>(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    cdf.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

uint64_t EvalTmSeed(uint64_t eval_seed, int tm_id) {
  return DeriveSeed(eval_seed, {kEvalTmStream, static_cast<uint64_t>(tm_id)});
}

uint64_t EvalEpisodeSeed(uint64_t eval_seed, int tm_id) {
  return DeriveSeed(eval_seed, {kEvalEpisodeStream, static_cast<uint64_t>(tm_id)});
}

std::vector<EvalTmRow> EvaluateTms(const Topology& topo, const PolicyModel& model,
                                   const ExperimentConfig& config, int tm_count) {
  uint64_t eval_seed = config.ResolvedEvalSeed();
  LinkNeighborhood nbr = LinkNeighborhoods(topo);
  WeightVector ospf = DefaultOspfWeights(topo);
  int horizon = EvalHorizon(config, topo);
  std::optional<BruteForceOracle> brute;
  if (config.oracle == "brute") {
    brute.emplace(topo, config.oracle_range, config.brute_force_guard);
  }

  std::vector<EvalTmRow> rows;
  for (int id = 0; id < tm_count; ++id) {
    TrafficMatrix tm = GenerateTm(config.train.traffic, topo, EvalTmSeed(eval_seed, id));
    EvalTmRow row;
    row.tm_id = id;
    row.episode_seed = EvalEpisodeSeed(eval_seed, id);
    row.marl = MarlMinMaxLoad(topo, nbr, tm, model, horizon, row.episode_seed);
    row.default_ospf = MaxUtilization(topo, ospf, tm);
    row.oracle = brute ? brute->Solve(tm).max_utilization
                       : OracleMaxUtilization(topo, tm, config, id);
    rows.push_back(row);
  }
  return rows;
}

double ReplayEvalEpisode(const Topology& topo, const PolicyModel& model,
                         const ExperimentConfig& config, int tm_id) {
  uint64_t eval_seed = config.ResolvedEvalSeed();
  TrafficMatrix tm =
      GenerateTm(config.train.traffic, topo, EvalTmSeed(eval_seed, tm_id));
  return MarlMinMaxLoad(topo, LinkNeighborhoods(topo), tm, model,
                        EvalHorizon(config, topo), EvalEpisodeSeed(eval_seed, tm_id));
}

std::vector<FailureRow> EvaluateFailures(const Topology& topo,
                                         const PolicyModel& model,
                                         const ExperimentConfig& config) {
  uint64_t eval_seed = config.ResolvedEvalSeed();
  int horizon = EvalHorizon(config, topo);
  LinkNeighborhood nbr = LinkNeighborhoods(topo);
  bool with_oracle = config.oracle != "none";

  // Failure scenarios are shared by all TMs.
  std::vector<std::vector<Topology>> scenarios(config.failure_max + 1);
  std::vector<std::vector<LinkNeighborhood>> scenario_nbrs(config.failure_max + 1);
  for (int n = 0; n <= config.failure_max; ++n) {
    for (int k = 0; k < config.failure_scenarios; ++k) {
      Rng rng(DeriveSeed(eval_seed, {kFailureStream, static_cast<uint64_t>(n),
                                     static_cast<uint64_t>(k)}));
      scenarios[n].push_back(FailLinks(topo, n, rng));
      scenario_nbrs[n].push_back(LinkNeighborhoods(scenarios[n].back()));
    }
  }

  // per_tm[n] holds one averaged degradation per TM.
  std::vector<std::vector<double>> marl_per_tm(config.failure_max + 1);
  std::vector<std::vector<double>> oracle_per_tm(config.failure_max + 1);
  for (int id = 0; id < config.failure_tms; ++id) {
    TrafficMatrix tm = GenerateTm(config.train.traffic, topo, EvalTmSeed(eval_seed, id));
    uint64_t episode_seed = EvalEpisodeSeed(eval_seed, id);
    double marl_base = MarlMinMaxLoad(topo, nbr, tm, model, horizon, episode_seed);
    double oracle_base =
        with_oracle ? OracleMaxUtilization(topo, tm, config, id) : std::nan("");
    for (int n = 0; n <= config.failure_max; ++n) {
      double marl_sum = 0.0;
      double oracle_sum = 0.0;
      for (int k = 0; k < config.failure_scenarios; ++k) {
        const Topology& failed = scenarios[n][k];
        double marl = MarlMinMaxLoad(failed, scenario_nbrs[n][k], tm, model, horizon,
                                     episode_seed);
        marl_sum += (marl - marl_base) / marl_base;
        if (with_oracle) {
          double oracle = OracleMaxUtilization(failed, tm, config, id);
          oracle_sum += (oracle - oracle_base) / oracle_base;
        }
      }
      marl_per_tm[n].push_back(marl_sum / config.failure_scenarios);
      oracle_per_tm[n].push_back(with_oracle ? oracle_sum / config.failure_scenarios
                                             : std::nan(""));
    }
  }

  std::vector<FailureRow> rows;
  for (int n = 0; n <= config.failure_max; ++n) {
    auto [mm, ms] = MeanStd(marl_per_tm[n]);
    auto [om, os] = MeanStd(oracle_per_tm[n]);
    rows.push_back({n, mm, ms, om, os});
  }
  return rows;
}

std::vector<CurvePoint> EpisodeCurve(const Topology& topo, const PolicyModel& model,
                                     const ExperimentConfig& config) {
  uint64_t eval_seed = config.ResolvedEvalSeed();
  int horizon = EvalHorizon(config, topo);
  LinkNeighborhood nbr = LinkNeighborhoods(topo);
  std::vector<std::vector<double>> per_step(horizon + 1);
  for (int id = 0; id < config.curve_tms; ++id) {
    TrafficMatrix tm = GenerateTm(config.train.traffic, topo, EvalTmSeed(eval_seed, id));
    EpisodeOptions options;
    options.horizon = horizon;
    options.record_values = false;
    options.record_features = false;
    Rng rng(EvalEpisodeSeed(eval_seed, id));
    Trajectory traj = RunEpisode(topo, nbr, tm, model, options, rng);
    for (int t = 0; t <= horizon; ++t) per_step[t].push_back(traj.best_so_far[t]);
  }
  std::vector<CurvePoint> curve;
  for (int t = 0; t <= horizon; ++t) {
    auto [mean, stddev] = MeanStd(per_step[t]);
    curve.push_back({t, mean, stddev});
  }
  return curve;
}

TrainOutcome RunTrain(const std::vector<Topology>& topologies,
                      const ExperimentConfig& config, const std::string& out_dir,
                      const std::optional<std::string>& resume_checkpoint) {
  EnsureDir(out_dir);
  uint64_t hash = ConfigHash(config);
  std::optional<Checkpoint> resumed;
  if (resume_checkpoint) resumed = LoadCheckpoint(*resume_checkpoint);

  PolicyModel model = resumed ? resumed->model : PolicyModel(config.train.mpnn);
  if (!resumed) model.Initialize(DeriveSeed(config.train.seed, {kInitStream}));
  AdamState adam = resumed ? resumed->adam : MakeAdam(config.train.ppo, model);
  adam.set_learning_rate(config.train.ppo.learning_rate);

  std::vector<std::string> outputs = {"train_log.csv", "checkpoint.ckpt"};
  // Streamed so long runs can be watched.
  std::string log_path = JoinPath(out_dir, "train_log.csv");
  std::ofstream log_csv(log_path, std::ios::binary);
  if (!log_csv) throw std::runtime_error("cannot write " + log_path);
  log_csv << TrainLogHeader() << "\n";
  auto on_episode = [&](const TrainLogRow& row, const PolicyModel& m,
                        const AdamState& a) {
    log_csv << FormatTrainLogRow(row) << "\n";
    log_csv.flush();
    if (config.checkpoint_every > 0 && (row.episode + 1) % config.checkpoint_every == 0) {
      std::string name = "checkpoint_ep" + std::to_string(row.episode + 1) + ".ckpt";
      SaveCheckpoint(JoinPath(out_dir, name), m, a, hash, row.episode + 1);
      outputs.push_back(name);
    }
  };
  std::vector<TrainLogRow> log = Train(topologies, config.train, model, adam, on_episode);

  std::string ckpt = JoinPath(out_dir, "checkpoint.ckpt");
  SaveCheckpoint(ckpt, model, adam, hash, config.train.episodes);
  log_csv.close();
  WriteManifest(out_dir, "train", config, ckpt, outputs);
  return TrainOutcome{std::move(model), std::move(log), ckpt};
}

namespace {

std::string WriteEvalTm(const std::vector<EvalTmRow>& rows, const std::string& out_dir) {
  std::ostringstream csv;
  csv << "tm_id,episode_seed,marl,default_ospf,oracle,improvement_vs_ospf\n";
  std::vector<double> marl;
  std::vector<double> ospf;
  std::vector<double> oracle;
  std::vector<double> improvement;
  for (const EvalTmRow& r : rows) {
    double imp = (r.default_ospf - r.marl) / r.default_ospf;
    csv << r.tm_id << "," << r.episode_seed << "," << Fmt(r.marl) << ","
        << Fmt(r.default_ospf) << "," << Fmt(r.oracle) << "," << Fmt(imp) << "\n";
    marl.push_back(r.marl);
    ospf.push_back(r.default_ospf);
    oracle.push_back(r.oracle);
    improvement.push_back(imp);
  }
  WriteFile(JoinPath(out_dir, "eval_tm.csv"), csv.str());

  std::ostringstream cdf;
  cdf << "series,value,cdf\n";
  for (const auto& [name, series] :
       std::vector<std::pair<std::string, std::vector<double>*>>{
           {"marl", &marl}, {"default_ospf", &ospf}, {"oracle", &oracle}}) {
    if (series->empty() || std::isnan(series->front())) continue;
    for (const auto& [v, f] : EmpiricalCdf(*series)) {
      cdf << name << "," << Fmt(v) << "," << Fmt(f) << "\n";
    }
  }
  WriteFile(JoinPath(out_dir, "eval_tm_cdf.csv"), cdf.str());

  std::ostringstream summary;
  summary << "TMs: " << rows.size() << "\n"
          << "mean MinMaxLoad  marl=" << MeanStd(marl).first
          << "  default_ospf=" << MeanStd(ospf).first
          << "  oracle=" << MeanStd(oracle).first << "\n"
          << "mean improvement vs default OSPF: "
          << 100.0 * (MeanStd(ospf).first - MeanStd(marl).first) / MeanStd(ospf).first
          << "%\n";
  return summary.str();
}

}  // namespace

std::string RunEvalTm(const Topology& topo, const std::string& checkpoint_path,
                      const ExperimentConfig& config, const std::string& out_dir) {
  EnsureDir(out_dir);
  PolicyModel model = LoadModel(checkpoint_path);
  std::string summary =
      WriteEvalTm(EvaluateTms(topo, model, config, config.eval_tms), out_dir);
  WriteManifest(out_dir, "eval-tm", config, checkpoint_path,
                {"eval_tm.csv", "eval_tm_cdf.csv"});
  return summary;
}

std::string RunEvalTopo(const std::vector<Topology>& train_topologies,
                        const Topology& eval_topology,
                        const std::optional<std::string>& checkpoint_path,
                        const ExperimentConfig& config, const std::string& out_dir) {
  EnsureDir(out_dir);
  std::string ckpt;
  std::vector<std::string> outputs = {"eval_tm.csv", "eval_tm_cdf.csv"};
  if (checkpoint_path) {
    ckpt = *checkpoint_path;
  } else {
    std::string train_dir = JoinPath(out_dir, "train");
    ckpt = RunTrain(train_topologies, config, train_dir).checkpoint_path;
    outputs.push_back("train/");
  }
  PolicyModel model = LoadModel(ckpt);
  std::string summary =
      WriteEvalTm(EvaluateTms(eval_topology, model, config, config.eval_tms), out_dir);
  WriteManifest(out_dir, "eval-topo", config, ckpt, outputs);
  return summary;
}

std::string RunEvalFailures(const Topology& topo, const std::string& checkpoint_path,
                            const ExperimentConfig& config,
                            const std::string& out_dir) {
  EnsureDir(out_dir);
  PolicyModel model = LoadModel(checkpoint_path);
  std::vector<FailureRow> rows = EvaluateFailures(topo, model, config);
  std::ostringstream csv;
  std::ostringstream summary;
  csv << "n_failures,marl_mean,marl_std,oracle_mean,oracle_std\n";
  summary << "n  marl_mean  marl_std  oracle_mean  oracle_std\n";
  for (const FailureRow& r : rows) {
    csv << r.n_failures << "," << Fmt(r.marl_mean) << "," << Fmt(r.marl_std) << ","
        << Fmt(r.oracle_mean) << "," << Fmt(r.oracle_std) << "\n";
    summary << r.n_failures << "  " << r.marl_mean << "  " << r.marl_std << "  "
            << r.oracle_mean << "  " << r.oracle_std << "\n";
  }
  WriteFile(JoinPath(out_dir, "failures.csv"), csv.str());
  WriteManifest(out_dir, "eval-failures", config, checkpoint_path, {"failures.csv"});
  return summary.str();
}

std::string RunEvalEpisodeCurve(const Topology& topo,
                                const std::string& checkpoint_path,
                                const ExperimentConfig& config,
                                const std::string& out_dir) {
  EnsureDir(out_dir);
  PolicyModel model = LoadModel(checkpoint_path);
  std::vector<CurvePoint> curve = EpisodeCurve(topo, model, config);
  std::ostringstream csv;
  csv << "step,mean_best_max_utilization,std_best_max_utilization\n";
  for (const CurvePoint& p : curve) {
    csv << p.step << "," << Fmt(p.mean) << "," << Fmt(p.stddev) << "\n";
  }
  WriteFile(JoinPath(out_dir, "episode_curve.csv"), csv.str());
  WriteManifest(out_dir, "eval-episode-curve", config, checkpoint_path,
                {"episode_curve.csv"});
  std::ostringstream summary;
  summary << "step 0: " << curve.front().mean << "  step " << curve.back().step
          << ": " << curve.back().mean << "\n";
  return summary.str();
}

double MeasureEpisodeSeconds(const Topology& topo, const PolicyModel& model,
                             int horizon) {
  LinkNeighborhood nbr = LinkNeighborhoods(topo);
  Rng tm_rng(1);
  TrafficMatrix tm = UniformTm(topo, 1.0, 1.0, tm_rng);
  EpisodeOptions options;
  options.horizon = horizon;
  options.record_values = false;
  options.record_features = false;
  Rng rng(1);
  auto start = std::chrono::steady_clock::now();
  RunEpisode(topo, nbr, tm, model, options, rng);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string RunOverhead(const Topology& topo, const OverheadParams& params,
                        const ExperimentConfig& config,
                        const std::optional<std::string>& checkpoint_path,
                        const std::string& out_dir) {
  EnsureDir(out_dir);
  OverheadReport r = OverheadModel(topo, params);
  json j{{"nodes", topo.node_count()},
         {"links", topo.link_count()},
         {"hidden", params.hidden},
         {"message_passing_steps", params.steps},
         {"steps_per_second", params.steps_per_second},
         {"bytes_per_element", params.bytes_per_element},
         {"header_factor", params.header_factor},
         {"accounting", AccountingName(params.accounting)},
         {"bytes_per_message", r.bytes_per_message},
         {"messages_per_link_round", r.messages_per_link_round},
         {"bytes_per_timestep", r.bytes_per_timestep},
         {"per_link_mb_per_second", r.per_link_mb_per_second},
         {"assumptions", r.assumptions}};
  WriteFile(JoinPath(out_dir, "overhead.json"), j.dump(2) + "\n");
  WriteManifest(out_dir, "overhead", config, checkpoint_path, {"overhead.json"});
  std::ostringstream summary;
  summary << "average per-link overhead: " << r.per_link_mb_per_second << " MB/s\n"
          << "assumptions:\n";
  for (const std::string& a : r.assumptions) summary << "  - " << a << "\n";
  return summary.str();
}

std::string RunOracle(const Topology& topo, const TrafficMatrix& tm,
                      const ExperimentConfig& config, const std::string& out_dir) {
  EnsureDir(out_dir);
  auto weights_str = [](const WeightVector& w) {
    std::ostringstream s;
    for (size_t i = 0; i < w.size(); ++i) s << (i ? " " : "") << w[i];
    return s.str();
  };
  std::ostringstream csv;
  csv << "method,max_utilization,weights\n";
  WeightVector ospf = DefaultOspfWeights(topo);
  csv << "default_ospf," << Fmt(MaxUtilization(topo, ospf, tm)) << ","
      << weights_str(ospf) << "\n";
  Rng rng(DeriveSeed(config.ResolvedEvalSeed(), {kOracleStream}));
  OracleResult local =
      LocalSearchWeights(topo, tm, config.oracle_iterations, rng, config.oracle_range);
  csv << "local_search," << Fmt(local.max_utilization) << ","
      << weights_str(local.weights) << "\n";
  std::string note;
  try {
    OracleResult brute =
        BruteForceWeights(topo, tm, config.oracle_range, config.brute_force_guard);
    csv << "brute_force," << Fmt(brute.max_utilization) << ","
        << weights_str(brute.weights) << "\n";
  } catch (const std::invalid_argument& e) {
    note = std::string("brute force skipped: ") + e.what() + "\n";
  }
  WriteFile(JoinPath(out_dir, "oracle.csv"), csv.str());
  WriteManifest(out_dir, "oracle", config, std::nullopt, {"oracle.csv"});
  return csv.str() + note;
}

}  // namespace marlte
