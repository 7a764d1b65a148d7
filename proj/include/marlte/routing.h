#ifndef MARLTE_ROUTING_H_
#define MARLTE_ROUTING_H_

#include <cstdint>
#include <vector>

#include "marlte/topology.h"
#include "marlte/traffic_matrix.h"

namespace marlte {

// Per-link integer OSPF weight indexed by link id. Every entry >= 1.
using WeightVector = std::vector<int>;

void ValidateWeights(const Topology& topo, const WeightVector& w);

// Shortest-path DAG towards one destination. dist[v] is the weighted distance
// from v to dest; next_links[v] lists, in link-id order, every outgoing link
// (v,x) with dist[v] == w(v,x) + dist[x]. next_links[dest] is empty.
struct ShortestPathDag {
  NodeId dest;
  std::vector<int64_t> dist;
  std::vector<std::vector<LinkId>> next_links;
};

ShortestPathDag ComputeShortestPathDag(const Topology& topo,
                                       const WeightVector& w, NodeId dest);

struct RoutingState {
  std::vector<double> loads;
  std::vector<double> utilizations;
  double max_utilization = 0.0;
};

// OSPF/ECMP flow model: every demand follows the shortest-path DAG of its
// destination, and each node splits the volume it holds for that destination
// equally over its DAG out-links. Utilization is load / capacity and is not
// clamped to 1.
RoutingState EcmpLoads(const Topology& topo, const WeightVector& w,
                       const TrafficMatrix& tm);

double MaxUtilization(const Topology& topo, const WeightVector& w,
                      const TrafficMatrix& tm);

// Weights inversely proportional to capacity:
//   w_e = max(1, round(scale / c_e)),  scale = max(1, round(max_e c_e)).
WeightVector DefaultOspfWeights(const Topology& topo);

// When enabled, every EcmpLoads call also verifies per-destination flow
// conservation and that tripling every weight reproduces bit-identical loads,
// throwing std::logic_error on violation. Process-wide; meant for test runs.
void SetRoutingSelfCheck(bool enabled);
bool RoutingSelfCheckEnabled();
uint64_t RoutingSelfCheckCount();

}  // namespace marlte

#endif  // MARLTE_ROUTING_H_
