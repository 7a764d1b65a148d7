#ifndef MARLTE_TOPOLOGY_H_
#define MARLTE_TOPOLOGY_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace marlte {

using NodeId = int;
using LinkId = int;
using Rng = std::mt19937_64;

struct Link {
  LinkId id;
  NodeId src;
  NodeId dst;
  double capacity;
};

// Raised by the topology parser. The message carries the 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Directed-link graph. Link ids are dense in [0, link_count()) and links()[i]
// has id i. Construction validates every invariant: positive capacities, node
// ids in range, no self-loops, no duplicate (src,dst), every link has a reverse
// link, strong connectivity. Immutable afterwards.
class Topology {
 public:
  Topology(int node_count, std::vector<Link> links);

  int node_count() const { return node_count_; }
  int link_count() const { return static_cast<int>(links_.size()); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_[id]; }
  double capacity(LinkId id) const { return links_[id].capacity; }

  // Outgoing / incoming link ids per node, sorted by link id.
  const std::vector<LinkId>& out_links(NodeId n) const { return out_[n]; }
  const std::vector<LinkId>& in_links(NodeId n) const { return in_[n]; }

  // Id of the (dst,src) link.
  LinkId reverse(LinkId id) const { return reverse_[id]; }

  // Serializes in the "nodes N / link id src dst cap" text format.
  std::string ToText() const;

 private:
  int node_count_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<std::vector<LinkId>> in_;
  std::vector<LinkId> reverse_;
};

// Parses the plain-text topology format:
//   nodes <N>
//   link <id> <src> <dst> <capacity>
// Blank lines and lines starting with '#' are ignored. Link ids must be
// 0..|E|-1 in any order.
Topology ParseTopology(std::string_view text);
Topology LoadTopologyFile(const std::string& path);

// True if every node reaches every other node over directed links.
bool IsStronglyConnected(int node_count, const std::vector<Link>& links);

// B(e) for every link: the links e' != e sharing at least one endpoint with e,
// sorted by id.
using LinkNeighborhood = std::vector<std::vector<LinkId>>;
LinkNeighborhood LinkNeighborhoods(const Topology& topo);

// Removes n_failures undirected adjacencies chosen uniformly at random,
// resampling until the residual graph is strongly connected. Surviving links
// are renumbered densely, preserving their relative order. Throws
// std::runtime_error if no connected residual was found in max_attempts draws.
Topology FailLinks(const Topology& topo, int n_failures, Rng& rng,
                   int max_attempts = 1000);

// Random strongly connected topology: a random spanning tree plus random
// extra adjacencies up to `adjacencies` total. Every adjacency gets a capacity
// drawn uniformly from `capacities`.
Topology RandomTopology(int node_count, int adjacencies,
                        const std::vector<double>& capacities, Rng& rng);

// Relabels links: link with old id i gets new id perm[i].
Topology PermuteLinks(const Topology& topo, const std::vector<LinkId>& perm);

}  // namespace marlte

#endif  // MARLTE_TOPOLOGY_H_
