#include "marlte/topology.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace marlte {
namespace {

std::vector<bool> Reachable(int node_count, const std::vector<Link>& links,
                            bool forward) {
  std::vector<std::vector<NodeId>> adj(node_count);
  for (const Link& l : links) {
    if (forward) {
      adj[l.src].push_back(l.dst);
    } else {
      adj[l.dst].push_back(l.src);
    }
  }
  std::vector<bool> seen(node_count, false);
  std::vector<NodeId> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (NodeId next : adj[n]) {
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  return seen;
}

}  // namespace

bool IsStronglyConnected(int node_count, const std::vector<Link>& links) {
  if (node_count <= 1) return true;
  for (bool forward : {true, false}) {
    std::vector<bool> seen = Reachable(node_count, links, forward);
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
  }
  return true;
}

Topology::Topology(int node_count, std::vector<Link> links)
    : node_count_(node_count) {
  if (node_count < 1) throw ValidationError("topology needs at least one node");
  links_.resize(links.size());
  std::vector<bool> id_seen(links.size(), false);
  for (const Link& l : links) {
    if (l.id < 0 || l.id >= static_cast<int>(links.size()) || id_seen[l.id]) {
      throw ValidationError("link ids must be unique and dense in [0, " +
                            std::to_string(links.size()) + "), got " +
                            std::to_string(l.id));
    }
    id_seen[l.id] = true;
    links_[l.id] = l;
  }

  std::map<std::pair<NodeId, NodeId>, LinkId> by_endpoints;
  for (const Link& l : links_) {
    std::string name = "link " + std::to_string(l.id);
    if (l.src < 0 || l.src >= node_count || l.dst < 0 || l.dst >= node_count) {
      throw ValidationError(name + ": node id out of range");
    }
    if (l.src == l.dst) throw ValidationError(name + ": self-loop");
    if (!(l.capacity > 0.0)) {
      throw ValidationError(name + ": nonpositive capacity");
    }
    if (!by_endpoints.emplace(std::make_pair(l.src, l.dst), l.id).second) {
      throw ValidationError(name + ": duplicate link " + std::to_string(l.src) +
                            "->" + std::to_string(l.dst));
    }
  }

  reverse_.resize(links_.size());
  for (const Link& l : links_) {
    auto it = by_endpoints.find({l.dst, l.src});
    if (it == by_endpoints.end()) {
      throw ValidationError("link " + std::to_string(l.id) +
                            ": missing reverse link");
    }
    reverse_[l.id] = it->second;
  }

  if (!IsStronglyConnected(node_count, links_)) {
    throw ValidationError("topology is disconnected");
  }

  out_.resize(node_count);
  in_.resize(node_count);
  for (const Link& l : links_) {
    out_[l.src].push_back(l.id);
    in_[l.dst].push_back(l.id);
  }
}

std::string Topology::ToText() const {
  std::ostringstream out;
  out.precision(17);
  out << "nodes " << node_count_ << "\n";
  for (const Link& l : links_) {
    out << "link " << l.id << " " << l.src << " " << l.dst << " "
        << l.capacity << "\n";
  }
  return out.str();
}

Topology ParseTopology(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  int node_count = -1;
  std::vector<Link> links;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword) || keyword[0] == '#') continue;

    if (keyword == "nodes") {
      if (node_count >= 0) throw ParseError(line_no, "repeated 'nodes' line");
      if (!(fields >> node_count) || node_count < 1) {
        throw ParseError(line_no, "expected 'nodes <N>' with N >= 1");
      }
    } else if (keyword == "link") {
      if (node_count < 0) {
        throw ParseError(line_no, "'link' before 'nodes' declaration");
      }
      Link l{};
      if (!(fields >> l.id >> l.src >> l.dst >> l.capacity)) {
        throw ParseError(line_no,
                         "expected 'link <id> <src> <dst> <capacity>'");
      }
      links.push_back(l);
    } else {
      throw ParseError(line_no, "unknown keyword '" + keyword + "'");
    }
    std::string trailing;
    if (fields >> trailing && trailing[0] != '#') {
      throw ParseError(line_no, "unexpected trailing token '" + trailing + "'");
    }
  }
  if (node_count < 0) throw ParseError(line_no, "missing 'nodes' line");
  return Topology(node_count, std::move(links));
}

Topology LoadTopologyFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseTopology(buf.str());
}

LinkNeighborhood LinkNeighborhoods(const Topology& topo) {
  LinkNeighborhood nbr(topo.link_count());
  for (const Link& l : topo.links()) {
    std::vector<LinkId>& out = nbr[l.id];
    for (NodeId n : {l.src, l.dst}) {
      for (const auto* list : {&topo.out_links(n), &topo.in_links(n)}) {
        for (LinkId other : *list) {
          if (other != l.id) out.push_back(other);
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return nbr;
}

Topology FailLinks(const Topology& topo, int n_failures, Rng& rng,
                   int max_attempts) {
  if (n_failures < 0) throw std::invalid_argument("n_failures must be >= 0");
  if (n_failures == 0) return topo;

  // One representative per adjacency: the lower link id of each pair.
  std::vector<LinkId> adjacencies;
  for (const Link& l : topo.links()) {
    if (l.id < topo.reverse(l.id)) adjacencies.push_back(l.id);
  }
  if (n_failures > static_cast<int>(adjacencies.size())) {
    throw std::invalid_argument("more failures than adjacencies");
  }

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<LinkId> pool = adjacencies;
    std::vector<bool> removed(topo.link_count(), false);
    // Partial Fisher-Yates: the first n_failures entries are the failures.
    for (int i = 0; i < n_failures; ++i) {
      std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
      std::swap(pool[i], pool[pick(rng)]);
      removed[pool[i]] = true;
      removed[topo.reverse(pool[i])] = true;
    }
    std::vector<Link> kept;
    for (const Link& l : topo.links()) {
      if (!removed[l.id]) {
        Link copy = l;
        copy.id = static_cast<LinkId>(kept.size());
        kept.push_back(copy);
      }
    }
    if (IsStronglyConnected(topo.node_count(), kept)) {
      return Topology(topo.node_count(), std::move(kept));
    }
  }
  throw std::runtime_error("FailLinks: no strongly connected residual after " +
                           std::to_string(max_attempts) + " attempts");
}

Topology RandomTopology(int node_count, int adjacencies,
                        const std::vector<double>& capacities, Rng& rng) {
  int max_adj = node_count * (node_count - 1) / 2;
  if (node_count < 2 || adjacencies < node_count - 1 || adjacencies > max_adj ||
      capacities.empty()) {
    throw std::invalid_argument("RandomTopology: infeasible parameters");
  }
  std::set<std::pair<NodeId, NodeId>> edges;
  std::vector<NodeId> order(node_count);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < node_count; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    NodeId a = order[i];
    NodeId b = order[parent(rng)];
    edges.emplace(std::min(a, b), std::max(a, b));
  }
  std::uniform_int_distribution<int> node(0, node_count - 1);
  while (static_cast<int>(edges.size()) < adjacencies) {
    NodeId a = node(rng);
    NodeId b = node(rng);
    if (a != b) edges.emplace(std::min(a, b), std::max(a, b));
  }
  std::uniform_int_distribution<size_t> cap(0, capacities.size() - 1);
  std::vector<Link> links;
  for (const auto& [a, b] : edges) {
    double c = capacities[cap(rng)];
    links.push_back({static_cast<LinkId>(links.size()), a, b, c});
    links.push_back({static_cast<LinkId>(links.size()), b, a, c});
  }
  return Topology(node_count, std::move(links));
}

Topology PermuteLinks(const Topology& topo, const std::vector<LinkId>& perm) {
  if (static_cast<int>(perm.size()) != topo.link_count()) {
    throw std::invalid_argument("PermuteLinks: permutation size mismatch");
  }
  std::vector<Link> links;
  for (const Link& l : topo.links()) {
    Link copy = l;
    copy.id = perm[l.id];
    links.push_back(copy);
  }
  return Topology(topo.node_count(), std::move(links));
}

}  // namespace marlte
