#include "qnet/routing.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace qnet {

namespace {

std::uint64_t edge_key(int u, int v) {
  const auto a = static_cast<std::uint32_t>(std::min(u, v));
  const auto b = static_cast<std::uint32_t>(std::max(u, v));
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

using NodeSeq = std::vector<int>;
using Banned = std::unordered_set<std::uint64_t>;
using BannedNodes = std::unordered_set<int>;

// Lexicographically smallest shortest path from src to dst over the allowed
// subgraph, as a node sequence. BFS from dst yields hop distances; walking
// from src and always taking the smallest-id neighbor one hop closer to dst
// is then exactly the lexicographic minimum among all shortest paths.
std::optional<NodeSeq> lex_shortest(const Network& net, int src, int dst,
                                    const BannedNodes& banned_nodes,
                                    const Banned& banned_edges) {
  std::unordered_map<int, int> dist;
  dist[dst] = 0;
  std::queue<int> frontier;
  frontier.push(dst);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (const int v : net.neighbors(u)) {
      if (banned_nodes.count(v) || banned_edges.count(edge_key(u, v)) ||
          dist.count(v)) {
        continue;
      }
      dist[v] = dist[u] + 1;
      frontier.push(v);
    }
  }
  const auto it = dist.find(src);
  if (it == dist.end()) {
    return std::nullopt;
  }

  NodeSeq path{src};
  int cur = src;
  while (cur != dst) {
    const int want = dist[cur] - 1;
    int next = std::numeric_limits<int>::max();
    for (const int v : net.neighbors(cur)) {
      if (banned_nodes.count(v) || banned_edges.count(edge_key(cur, v))) {
        continue;
      }
      const auto dit = dist.find(v);
      if (dit != dist.end() && dit->second == want) {
        next = v;
        break;  // neighbors are sorted ascending
      }
    }
    path.push_back(next);
    cur = next;
  }
  return path;
}

struct SeqOrder {
  bool operator()(const NodeSeq& a, const NodeSeq& b) const {
    if (a.size() != b.size()) {
      return a.size() < b.size();
    }
    return a < b;
  }
};

Path to_path(const Network& net, const NodeSeq& nodes) {
  Path path;
  path.nodes = nodes;
  path.link_indices.reserve(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    path.link_indices.push_back(net.link_index(nodes[i], nodes[i + 1]));
  }
  return path;
}

}  // namespace

std::vector<Path> k_shortest_paths(const Network& net, int src, int dst,
                                   int k) {
  if (k < 1) {
    throw std::invalid_argument("k must be >= 1, got " + std::to_string(k));
  }
  if (!net.has_node(src) || !net.has_node(dst)) {
    throw std::invalid_argument("unknown node in pair (" +
                                std::to_string(src) + ", " +
                                std::to_string(dst) + ")");
  }
  if (src == dst) {
    throw std::invalid_argument("source equals destination: " +
                                std::to_string(src));
  }

  std::vector<NodeSeq> accepted;
  const auto first = lex_shortest(net, src, dst, {}, {});
  if (!first) {
    return {};
  }
  accepted.push_back(*first);

  // Yen's deviation search. Candidates keep (length, node-sequence) order so
  // ties always resolve the same way.
  std::set<NodeSeq, SeqOrder> candidates;
  while (static_cast<int>(accepted.size()) < k) {
    const NodeSeq& prev = accepted.back();
    for (std::size_t j = 0; j + 1 < prev.size(); ++j) {
      const int spur_node = prev[j];
      Banned banned_edges;
      for (const NodeSeq& p : accepted) {
        if (p.size() > j + 1 && std::equal(prev.begin(), prev.begin() + j + 1,
                                           p.begin())) {
          banned_edges.insert(edge_key(p[j], p[j + 1]));
        }
      }
      BannedNodes banned_nodes(prev.begin(), prev.begin() + j);
      const auto spur =
          lex_shortest(net, spur_node, dst, banned_nodes, banned_edges);
      if (!spur) {
        continue;
      }
      NodeSeq candidate(prev.begin(), prev.begin() + j);
      candidate.insert(candidate.end(), spur->begin(), spur->end());
      candidates.insert(std::move(candidate));
    }
    if (candidates.empty()) {
      break;
    }
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }

  std::vector<Path> paths;
  paths.reserve(accepted.size());
  for (const NodeSeq& seq : accepted) {
    paths.push_back(to_path(net, seq));
  }
  return paths;
}

std::vector<FeasiblePath> feasible_paths(const Network& net,
                                         const PairDemand& demand, int k,
                                         const OpReliability& ops) {
  std::vector<FeasiblePath> result;
  for (Path& path : k_shortest_paths(net, demand.a, demand.b, k)) {
    std::vector<double> weights;
    weights.reserve(path.link_indices.size());
    for (const int li : path.link_indices) {
      weights.push_back(werner_weight(net.links()[li].elementary_fidelity));
    }
    const double fidelity = path_fidelity(weights, ops);
    if (fidelity >= demand.min_fidelity) {
      result.push_back({std::move(path), fidelity});
    }
  }
  return result;
}

}  // namespace qnet
