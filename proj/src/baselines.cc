#include "marlte/baselines.h"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace marlte {
namespace {

// Bitmask over (destination, link): bit set when the link is on a shortest
// path towards that destination.
class RoutingSignature {
 public:
  RoutingSignature(const Topology& topo)
      : topo_(topo),
        n_(topo.node_count()),
        dist_(static_cast<size_t>(n_) * n_),
        bits_((static_cast<size_t>(n_) * topo.link_count() + 63) / 64) {}

  const std::string& Compute(const WeightVector& w) {
    constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;
    std::fill(dist_.begin(), dist_.end(), kInf);
    for (int v = 0; v < n_; ++v) dist_[v * n_ + v] = 0;
    for (const Link& l : topo_.links()) {
      int64_t& d = dist_[l.src * n_ + l.dst];
      d = std::min<int64_t>(d, w[l.id]);
    }
    for (int k = 0; k < n_; ++k) {
      for (int i = 0; i < n_; ++i) {
        int64_t dik = dist_[i * n_ + k];
        for (int j = 0; j < n_; ++j) {
          int64_t via = dik + dist_[k * n_ + j];
          if (via < dist_[i * n_ + j]) dist_[i * n_ + j] = via;
        }
      }
    }
    std::fill(bits_.begin(), bits_.end(), 0);
    size_t bit = 0;
    for (int d = 0; d < n_; ++d) {
      for (const Link& l : topo_.links()) {
        if (l.src != d && w[l.id] + dist_[l.dst * n_ + d] == dist_[l.src * n_ + d]) {
          bits_[bit / 64] |= uint64_t{1} << (bit % 64);
        }
        ++bit;
      }
    }
    key_.assign(reinterpret_cast<const char*>(bits_.data()),
                bits_.size() * sizeof(uint64_t));
    return key_;
  }

 private:
  const Topology& topo_;
  int n_;
  std::vector<int64_t> dist_;
  std::vector<uint64_t> bits_;
  std::string key_;
};

struct Score {
  double max_util;
  double sum_sq;
  bool operator<(const Score& o) const {
    return max_util < o.max_util || (max_util == o.max_util && sum_sq < o.sum_sq);
  }
};

Score Evaluate(const Topology& topo, const WeightVector& w, const TrafficMatrix& tm) {
  RoutingState s = EcmpLoads(topo, w, tm);
  Score score{s.max_utilization, 0.0};
  for (double u : s.utilizations) score.sum_sq += u * u;
  return score;
}

}  // namespace

BruteForceOracle::BruteForceOracle(const Topology& topo, WeightRange range,
                                   uint64_t max_combinations)
    : topo_(topo), combinations_(1) {
  if (range.min < 1 || range.max < range.min) {
    throw std::invalid_argument("weight range must satisfy 1 <= min <= max");
  }
  for (int i = 0; i < topo.link_count(); ++i) {
    if (combinations_ > max_combinations / static_cast<uint64_t>(range.size())) {
      throw std::invalid_argument(
          "brute-force search space " + std::to_string(range.size()) + "^" +
          std::to_string(topo.link_count()) + " exceeds the guard of " +
          std::to_string(max_combinations) + " combinations");
    }
    combinations_ *= static_cast<uint64_t>(range.size());
  }

  RoutingSignature signature(topo);
  std::unordered_map<std::string, size_t> seen;
  std::string previous;
  WeightVector w(topo.link_count(), range.min);
  while (true) {
    const std::string& key = signature.Compute(w);
    if (key != previous) {
      if (seen.emplace(key, representatives_.size()).second) {
        representatives_.push_back(w);
      }
      previous = key;
    }
    // Odometer increment, last link fastest.
    int pos = topo.link_count() - 1;
    while (pos >= 0 && w[pos] == range.max) {
      w[pos] = range.min;
      --pos;
    }
    if (pos < 0) break;
    ++w[pos];
  }
}

OracleResult BruteForceOracle::Solve(const TrafficMatrix& tm) const {
  OracleResult best;
  best.max_utilization = std::numeric_limits<double>::infinity();
  for (const WeightVector& w : representatives_) {
    double u = MaxUtilization(topo_, w, tm);
    if (u < best.max_utilization) {
      best.max_utilization = u;
      best.weights = w;
    }
  }
  return best;
}

OracleResult BruteForceWeights(const Topology& topo, const TrafficMatrix& tm,
                               WeightRange range, uint64_t max_combinations) {
  return BruteForceOracle(topo, range, max_combinations).Solve(tm);
}

OracleResult LocalSearchWeights(const Topology& topo, const TrafficMatrix& tm,
                                int iterations, Rng& rng, WeightRange range) {
  if (range.min < 1 || range.max < range.min) {
    throw std::invalid_argument("weight range must satisfy 1 <= min <= max");
  }
  WeightVector current = DefaultOspfWeights(topo);
  for (int& v : current) v = std::clamp(v, range.min, range.max);
  Score current_score = Evaluate(topo, current, tm);
  WeightVector best = current;
  Score best_score = current_score;

  std::uniform_int_distribution<int> random_weight(range.min, range.max);
  for (int round = 0; round < iterations; ++round) {
    WeightVector move_best;
    Score move_score = current_score;
    for (LinkId l = 0; l < topo.link_count(); ++l) {
      for (int delta : {-1, +1}) {
        int next = current[l] + delta;
        if (next < range.min || next > range.max) continue;
        WeightVector candidate = current;
        candidate[l] = next;
        Score s = Evaluate(topo, candidate, tm);
        if (s < move_score) {
          move_score = s;
          move_best = std::move(candidate);
        }
      }
    }
    if (!move_best.empty()) {
      current = std::move(move_best);
      current_score = move_score;
      if (current_score < best_score) {
        best = current;
        best_score = current_score;
      }
    } else {
      for (int& v : current) v = random_weight(rng);
      current_score = Evaluate(topo, current, tm);
      if (current_score < best_score) {
        best = current;
        best_score = current_score;
      }
    }
  }
  return {best, MaxUtilization(topo, best, tm)};
}

}  // namespace marlte
