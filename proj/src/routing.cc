#include "marlte/routing.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace marlte {
namespace {

std::atomic<bool> self_check_enabled{false};
std::atomic<uint64_t> self_check_count{0};

constexpr int64_t kUnreachable = std::numeric_limits<int64_t>::max();

// Volume per link towards one destination, and the node processing order.
void PropagateDestination(const Topology& topo, const ShortestPathDag& dag,
                          const TrafficMatrix& tm, std::vector<double>* load) {
  int n = topo.node_count();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Decreasing distance is a topological order of the DAG since weights >= 1.
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return dag.dist[a] > dag.dist[b];
  });

  std::vector<double> held(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    if (v != dag.dest) held[v] = tm.demand(v, dag.dest);
  }
  for (NodeId v : order) {
    if (v == dag.dest) continue;
    const std::vector<LinkId>& next = dag.next_links[v];
    double share = held[v] / static_cast<double>(next.size());
    for (LinkId l : next) {
      (*load)[l] += share;
      held[topo.link(l).dst] += share;
    }
  }
}

void CheckConservation(const Topology& topo, const TrafficMatrix& tm,
                       NodeId dest, const std::vector<double>& load) {
  int n = topo.node_count();
  double scale = 1.0;
  for (NodeId s = 0; s < n; ++s) scale += tm.demand(s, dest);
  double tol = 1e-9 * scale;
  for (NodeId v = 0; v < n; ++v) {
    double in = 0.0;
    double out = 0.0;
    for (LinkId l : topo.in_links(v)) in += load[l];
    for (LinkId l : topo.out_links(v)) out += load[l];
    double residual;
    if (v == dest) {
      double sunk = 0.0;
      for (NodeId s = 0; s < n; ++s) sunk += tm.demand(s, dest);
      residual = std::abs(in - sunk) + std::abs(out);
    } else {
      residual = std::abs(in + tm.demand(v, dest) - out);
    }
    if (!(residual <= tol)) {
      throw std::logic_error("flow conservation violated at node " +
                             std::to_string(v) + " for destination " +
                             std::to_string(dest));
    }
  }
}

std::vector<double> ComputeLoads(const Topology& topo, const WeightVector& w,
                                 const TrafficMatrix& tm, bool check) {
  std::vector<double> loads(topo.link_count(), 0.0);
  std::vector<double> per_dest(topo.link_count());
  for (NodeId d = 0; d < topo.node_count(); ++d) {
    ShortestPathDag dag = ComputeShortestPathDag(topo, w, d);
    std::fill(per_dest.begin(), per_dest.end(), 0.0);
    PropagateDestination(topo, dag, tm, &per_dest);
    if (check) CheckConservation(topo, tm, d, per_dest);
    for (size_t l = 0; l < loads.size(); ++l) loads[l] += per_dest[l];
  }
  return loads;
}

}  // namespace

void ValidateWeights(const Topology& topo, const WeightVector& w) {
  if (static_cast<int>(w.size()) != topo.link_count()) {
    throw std::invalid_argument("weight vector has " + std::to_string(w.size()) +
                                " entries, topology has " +
                                std::to_string(topo.link_count()) + " links");
  }
  for (int v : w) {
    if (v < 1) throw std::invalid_argument("link weights must be >= 1");
  }
}

ShortestPathDag ComputeShortestPathDag(const Topology& topo,
                                       const WeightVector& w, NodeId dest) {
  int n = topo.node_count();
  ShortestPathDag dag{dest, std::vector<int64_t>(n, kUnreachable),
                      std::vector<std::vector<LinkId>>(n)};
  // Dijkstra on reversed links; ties pop the smallest node id first.
  using Entry = std::pair<int64_t, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  dag.dist[dest] = 0;
  queue.emplace(0, dest);
  std::vector<bool> done(n, false);
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (done[v]) continue;
    done[v] = true;
    for (LinkId l : topo.in_links(v)) {
      NodeId u = topo.link(l).src;
      int64_t candidate = d + w[l];
      if (candidate < dag.dist[u]) {
        dag.dist[u] = candidate;
        queue.emplace(candidate, u);
      }
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (dag.dist[v] == kUnreachable) {
      throw std::logic_error("destination " + std::to_string(dest) +
                             " unreachable from node " + std::to_string(v));
    }
    if (v == dest) continue;
    for (LinkId l : topo.out_links(v)) {
      if (dag.dist[v] == w[l] + dag.dist[topo.link(l).dst]) {
        dag.next_links[v].push_back(l);
      }
    }
  }
  return dag;
}

RoutingState EcmpLoads(const Topology& topo, const WeightVector& w,
                       const TrafficMatrix& tm) {
  ValidateWeights(topo, w);
  if (tm.node_count() != topo.node_count()) {
    throw std::invalid_argument("traffic matrix size does not match topology");
  }
  bool check = self_check_enabled.load(std::memory_order_relaxed);
  RoutingState state;
  state.loads = ComputeLoads(topo, w, tm, check);
  if (check) {
    WeightVector tripled = w;
    for (int& v : tripled) v *= 3;
    if (ComputeLoads(topo, tripled, tm, false) != state.loads) {
      throw std::logic_error("weight-scaling invariance violated");
    }
    self_check_count.fetch_add(1, std::memory_order_relaxed);
  }
  state.utilizations.resize(state.loads.size());
  for (size_t l = 0; l < state.loads.size(); ++l) {
    state.utilizations[l] = state.loads[l] / topo.capacity(static_cast<LinkId>(l));
    state.max_utilization = std::max(state.max_utilization, state.utilizations[l]);
  }
  return state;
}

double MaxUtilization(const Topology& topo, const WeightVector& w,
                      const TrafficMatrix& tm) {
  return EcmpLoads(topo, w, tm).max_utilization;
}

WeightVector DefaultOspfWeights(const Topology& topo) {
  double max_cap = 0.0;
  for (const Link& l : topo.links()) max_cap = std::max(max_cap, l.capacity);
  double scale = std::max(1.0, std::round(max_cap));
  WeightVector w(topo.link_count());
  for (const Link& l : topo.links()) {
    w[l.id] = static_cast<int>(std::max(1.0, std::round(scale / l.capacity)));
  }
  return w;
}

void SetRoutingSelfCheck(bool enabled) { self_check_enabled = enabled; }
bool RoutingSelfCheckEnabled() { return self_check_enabled; }
uint64_t RoutingSelfCheckCount() { return self_check_count; }

}  // namespace marlte
