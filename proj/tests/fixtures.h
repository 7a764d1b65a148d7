#ifndef MARLTE_TESTS_FIXTURES_H_
#define MARLTE_TESTS_FIXTURES_H_

#include <string>
#include <utility>
#include <vector>

#include "marlte/topology.h"
#include "marlte/traffic_matrix.h"

namespace marlte {
namespace testing_util {

// Builds a topology from undirected adjacencies. Adjacency i becomes links
// 2i (a->b) and 2i+1 (b->a).
inline Topology FromAdjacencies(int nodes,
                                const std::vector<std::pair<int, int>>& adj,
                                double capacity = 10.0) {
  std::vector<Link> links;
  for (const auto& [a, b] : adj) {
    links.push_back({static_cast<LinkId>(links.size()), a, b, capacity});
    links.push_back({static_cast<LinkId>(links.size()), b, a, capacity});
  }
  return Topology(nodes, std::move(links));
}

// A=0 -> B=1 -> C=2.
inline Topology Path3() { return FromAdjacencies(3, {{0, 1}, {1, 2}}); }

// A=0, B=1, C=2, D=3 with A-B, B-D, A-C, C-D. Links: 0 A->B, 1 B->A,
// 2 B->D, 3 D->B, 4 A->C, 5 C->A, 6 C->D, 7 D->C.
inline Topology Diamond() {
  return FromAdjacencies(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
}

inline Topology Triangle() {
  return FromAdjacencies(3, {{0, 1}, {1, 2}, {0, 2}});
}

inline Topology Pair() { return FromAdjacencies(2, {{0, 1}}); }

inline std::string DataPath(const std::string& name) {
  return std::string(MARLTE_DATA_DIR) + "/" + name;
}

inline Topology LoadData(const std::string& name) {
  return LoadTopologyFile(DataPath("topologies/" + name));
}

}  // namespace testing_util
}  // namespace marlte

#endif  // MARLTE_TESTS_FIXTURES_H_
