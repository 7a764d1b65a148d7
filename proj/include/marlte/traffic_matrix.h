#ifndef MARLTE_TRAFFIC_MATRIX_H_
#define MARLTE_TRAFFIC_MATRIX_H_

#include <string>
#include <string_view>
#include <vector>

#include "marlte/topology.h"

namespace marlte {

// N x N demand volumes, row = source, column = destination. Diagonal is zero
// and all entries are non-negative.
class TrafficMatrix {
 public:
  explicit TrafficMatrix(int node_count);
  TrafficMatrix(int node_count, std::vector<double> row_major);

  int node_count() const { return n_; }
  double demand(NodeId src, NodeId dst) const { return d_[src * n_ + dst]; }
  void set_demand(NodeId src, NodeId dst, double volume);
  double Total() const;
  TrafficMatrix Scaled(double factor) const;
  const std::vector<double>& row_major() const { return d_; }

  // One CSV row per source, comma separated, full double precision.
  std::string ToCsv() const;

  bool operator==(const TrafficMatrix&) const = default;

 private:
  int n_;
  std::vector<double> d_;
};

TrafficMatrix ParseTrafficMatrixCsv(std::string_view text);
TrafficMatrix LoadTrafficMatrixFile(const std::string& path);

// Every off-diagonal entry i.i.d. Uniform[low, high].
TrafficMatrix UniformTm(const Topology& topo, double low, double high, Rng& rng);

// Gravity model: demand(s,d) = total * m_s m_d / sum_{i != j} m_i m_j with
// masses drawn i.i.d. from Exponential(1).
TrafficMatrix GravityTm(const Topology& topo, double total_traffic, Rng& rng);

// The node masses GravityTm draws: n i.i.d. Exponential(1) values.
std::vector<double> DrawGravityMasses(int node_count, Rng& rng);

// Gravity model with caller-supplied masses.
TrafficMatrix GravityTmFromMasses(const std::vector<double>& masses,
                                  double total_traffic);

// Synthetic TM family plus its parameters.
struct TrafficProfile {
  enum class Kind { kUniform, kGravity };
  Kind kind = Kind::kGravity;
  double low = 0.0;     // uniform lower bound
  double high = 1.0;    // uniform upper bound
  double total = 100.0; // gravity total volume
};

TrafficProfile::Kind ParseTrafficKind(const std::string& name);
std::string TrafficKindName(TrafficProfile::Kind kind);

// Deterministic in (profile, topology size, seed).
TrafficMatrix GenerateTm(const TrafficProfile& profile, const Topology& topo,
                         uint64_t seed);

}  // namespace marlte

#endif  // MARLTE_TRAFFIC_MATRIX_H_
