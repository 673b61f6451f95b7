#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace qnet {

enum class NodeKind { Endpoint, Repeater };

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Endpoint;
  std::string label;  // empty means unlabeled

  bool operator==(const Node&) const = default;
};

// Undirected entanglement-generation link. Capacity is EPR pairs per second,
// shared by both directions; fidelity is the elementary fidelity of the
// pairs produced over this link.
struct Link {
  int u = 0;
  int v = 0;
  double capacity = 0.0;
  double elementary_fidelity = 1.0;

  bool operator==(const Link&) const = default;
};

// Immutable quantum network graph. Construction canonicalizes (nodes sorted
// by id, links stored with u < v and sorted) and validates every invariant:
// unique node ids, no self-loops, at most one link per node pair (parallel
// links are merged at ingestion by summing capacities), link endpoints must
// exist, capacity > 0, elementary fidelity in (0.25, 1]. Immutable after
// construction, so instances can be shared freely across threads.
class Network {
 public:
  Network(std::vector<Node> nodes, std::vector<Link> links,
          std::map<std::string, std::string> metadata = {});

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::map<std::string, std::string>& metadata() const {
    return metadata_;
  }

  bool has_node(int id) const { return node_pos_.count(id) != 0; }
  const Node& node(int id) const;

  // Neighbor node ids in ascending order.
  const std::vector<int>& neighbors(int id) const;

  // Index into links() for the unordered pair, or -1 when absent.
  int link_index(int u, int v) const;

  // Ids of all Endpoint nodes, ascending.
  std::vector<int> endpoint_ids() const;

  bool operator==(const Network&) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::map<std::string, std::string> metadata_;
  std::unordered_map<int, std::size_t> node_pos_;
  std::unordered_map<int, std::vector<int>> adjacency_;
  std::unordered_map<std::uint64_t, int> link_pos_;
};

// rows x cols lattice with identical links; node (r, c) has id r * cols + c.
// All nodes are Endpoints unless interior_repeaters is set, in which case
// nodes not on the lattice border become Repeaters.
Network build_grid(int rows, int cols, double capacity,
                   double elementary_fidelity, bool interior_repeaters = false);

struct RandomGraphSpec {
  int nodes = 2;
  double edge_prob = 0.5;       // in (0, 1]
  double capacity_lo = 1.0;     // EPR pairs per second
  double capacity_hi = 1.0;
  double fidelity_lo = 1.0;     // in (0.25, 1]
  double fidelity_hi = 1.0;
};

// Erdos-Renyi graph, deterministic in the seed. When the draw is
// disconnected only the largest connected component is kept (smallest node
// ids win ties) and the pruning is recorded in the network metadata.
Network generate_random(std::uint64_t seed, const RandomGraphSpec& spec);

// JSON round trip; load(save(net)) compares equal to net. Schema errors are
// reported with the path of the offending element.
Network load_network(const std::string& json_text);
std::string save_network(const Network& net);

}  // namespace qnet
