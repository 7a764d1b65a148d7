#ifndef MARLTE_TESTS_ROUTING_ORACLE_H_
#define MARLTE_TESTS_ROUTING_ORACLE_H_

#include <limits>
#include <utility>
#include <vector>

#include "marlte/routing.h"

namespace marlte {
namespace testing_util {

// Reference ECMP loads computed without the library's Dijkstra or DAG code:
// Floyd-Warshall distances, then a depth-first walk over every equal-cost
// path that halves (thirds, ...) the volume at each branching hop.
struct OracleLoads {
  std::vector<double> loads;
  double total_hops = 0.0;  // sum over demands of volume x expected hop count
};

inline OracleLoads EnumerateEcmpPaths(const Topology& topo, const WeightVector& w,
                                      const TrafficMatrix& tm) {
  int n = topo.node_count();
  const long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<std::vector<long long>> dist(n, std::vector<long long>(n, kInf));
  for (int v = 0; v < n; ++v) dist[v][v] = 0;
  for (const Link& l : topo.links()) {
    dist[l.src][l.dst] = std::min<long long>(dist[l.src][l.dst], w[l.id]);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (dist[i][k] + dist[k][j] < dist[i][j]) dist[i][j] = dist[i][k] + dist[k][j];
      }
    }
  }

  OracleLoads out;
  out.loads.assign(topo.link_count(), 0.0);
  // Explicit stack of (node, volume, hops so far) per demand.
  for (int s = 0; s < n; ++s) {
    for (int d = 0; d < n; ++d) {
      double volume = tm.demand(s, d);
      if (s == d || volume == 0.0) continue;
      std::vector<std::pair<int, double>> stack = {{s, volume}};
      while (!stack.empty()) {
        auto [v, vol] = stack.back();
        stack.pop_back();
        if (v == d) continue;
        std::vector<LinkId> next;
        for (const Link& l : topo.links()) {
          if (l.src == v && w[l.id] + dist[l.dst][d] == dist[v][d]) next.push_back(l.id);
        }
        double share = vol / static_cast<double>(next.size());
        for (LinkId e : next) {
          out.loads[e] += share;
          out.total_hops += share;
          stack.push_back({topo.link(e).dst, share});
        }
      }
    }
  }
  return out;
}

}  // namespace testing_util
}  // namespace marlte

#endif  // MARLTE_TESTS_ROUTING_ORACLE_H_
