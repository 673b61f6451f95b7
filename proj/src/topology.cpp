#include "qnet/topology.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "json.hpp"
#include "qnet/fidelity.hpp"
#include "qnet/rng.hpp"

namespace qnet {

namespace {

using nlohmann::json;

std::uint64_t pair_key(int u, int v) {
  const auto a = static_cast<std::uint32_t>(std::min(u, v));
  const auto b = static_cast<std::uint32_t>(std::max(u, v));
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

void check_link_values(double capacity, double fidelity,
                       const std::string& where) {
  if (!(capacity > 0.0)) {
    throw std::invalid_argument(where + ": capacity = " +
                                std::to_string(capacity) + " must be > 0");
  }
  if (!(fidelity > kWernerFloor && fidelity <= 1.0)) {
    throw std::invalid_argument(where + ": elementary_fidelity = " +
                                std::to_string(fidelity) +
                                " outside (0.25, 1]");
  }
}

}  // namespace

Network::Network(std::vector<Node> nodes, std::vector<Link> links,
                 std::map<std::string, std::string> metadata)
    : metadata_(std::move(metadata)) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!node_pos_.emplace(nodes[i].id, 0).second) {
      throw std::invalid_argument("nodes[" + std::to_string(i) +
                                  "]: duplicate id " +
                                  std::to_string(nodes[i].id));
    }
  }

  // Canonicalize and merge parallel links: capacities add up, the fidelity
  // becomes the capacity-weighted mean of the merged generators.
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::vector<Link> merged;
  for (std::size_t i = 0; i < links.size(); ++i) {
    Link link = links[i];
    const std::string where = "links[" + std::to_string(i) + "]";
    if (link.u == link.v) {
      throw std::invalid_argument(where + ": self-loop at node " +
                                  std::to_string(link.u));
    }
    for (const int end : {link.u, link.v}) {
      if (node_pos_.count(end) == 0) {
        throw std::invalid_argument(where + ": endpoint " +
                                    std::to_string(end) +
                                    " references no node");
      }
    }
    check_link_values(link.capacity, link.elementary_fidelity, where);
    if (link.u > link.v) {
      std::swap(link.u, link.v);
    }
    const auto [it, inserted] = seen.emplace(pair_key(link.u, link.v),
                                             merged.size());
    if (inserted) {
      merged.push_back(link);
    } else {
      Link& prev = merged[it->second];
      const double total = prev.capacity + link.capacity;
      prev.elementary_fidelity =
          (prev.capacity * prev.elementary_fidelity +
           link.capacity * link.elementary_fidelity) /
          total;
      prev.capacity = total;
    }
  }

  nodes_ = std::move(nodes);
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    node_pos_[nodes_[i].id] = i;
    adjacency_[nodes_[i].id];  // ensure every node has an adjacency entry
  }

  links_ = std::move(merged);
  std::sort(links_.begin(), links_.end(), [](const Link& a, const Link& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  for (std::size_t i = 0; i < links_.size(); ++i) {
    link_pos_[pair_key(links_[i].u, links_[i].v)] = static_cast<int>(i);
    adjacency_[links_[i].u].push_back(links_[i].v);
    adjacency_[links_[i].v].push_back(links_[i].u);
  }
  for (auto& [id, nbrs] : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
  }
}

const Node& Network::node(int id) const {
  const auto it = node_pos_.find(id);
  if (it == node_pos_.end()) {
    throw std::invalid_argument("unknown node id " + std::to_string(id));
  }
  return nodes_[it->second];
}

const std::vector<int>& Network::neighbors(int id) const {
  const auto it = adjacency_.find(id);
  if (it == adjacency_.end()) {
    throw std::invalid_argument("unknown node id " + std::to_string(id));
  }
  return it->second;
}

int Network::link_index(int u, int v) const {
  const auto it = link_pos_.find(pair_key(u, v));
  return it == link_pos_.end() ? -1 : it->second;
}

std::vector<int> Network::endpoint_ids() const {
  std::vector<int> ids;
  for (const Node& node : nodes_) {
    if (node.kind == NodeKind::Endpoint) {
      ids.push_back(node.id);
    }
  }
  return ids;
}

bool Network::operator==(const Network& other) const {
  return nodes_ == other.nodes_ && links_ == other.links_ &&
         metadata_ == other.metadata_;
}

Network build_grid(int rows, int cols, double capacity,
                   double elementary_fidelity, bool interior_repeaters) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("grid dimensions must be >= 1, got " +
                                std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  check_link_values(capacity, elementary_fidelity, "grid link");

  std::vector<Node> nodes;
  std::vector<Link> links;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int id = r * cols + c;
      const bool interior = r > 0 && r < rows - 1 && c > 0 && c < cols - 1;
      nodes.push_back({id,
                       interior_repeaters && interior ? NodeKind::Repeater
                                                      : NodeKind::Endpoint,
                       {}});
      if (c + 1 < cols) {
        links.push_back({id, id + 1, capacity, elementary_fidelity});
      }
      if (r + 1 < rows) {
        links.push_back({id, id + cols, capacity, elementary_fidelity});
      }
    }
  }
  return Network(std::move(nodes), std::move(links));
}

Network generate_random(std::uint64_t seed, const RandomGraphSpec& spec) {
  if (spec.nodes < 2) {
    throw std::invalid_argument("random graph needs >= 2 nodes, got " +
                                std::to_string(spec.nodes));
  }
  if (!(spec.edge_prob > 0.0 && spec.edge_prob <= 1.0)) {
    throw std::invalid_argument("edge_prob = " +
                                std::to_string(spec.edge_prob) +
                                " outside (0, 1]");
  }
  if (!(spec.capacity_lo <= spec.capacity_hi) ||
      !(spec.fidelity_lo <= spec.fidelity_hi)) {
    throw std::invalid_argument("range lower bound exceeds upper bound");
  }
  check_link_values(spec.capacity_lo, spec.fidelity_lo, "capacity/fidelity range lo");
  check_link_values(spec.capacity_hi, spec.fidelity_hi, "capacity/fidelity range hi");

  Rng rng(seed);
  std::vector<Link> links;
  for (int u = 0; u < spec.nodes; ++u) {
    for (int v = u + 1; v < spec.nodes; ++v) {
      // Draw capacity and fidelity unconditionally so that each pair
      // consumes a fixed number of draws; edge presence then never shifts
      // the stream for later pairs.
      const double accept = rng.uniform01();
      const double capacity = rng.uniform(spec.capacity_lo, spec.capacity_hi);
      const double fidelity = rng.uniform(spec.fidelity_lo, spec.fidelity_hi);
      if (accept < spec.edge_prob) {
        links.push_back({u, v, capacity, fidelity});
      }
    }
  }

  // Largest connected component; ties go to the component with the smallest
  // node id.
  std::vector<std::vector<int>> adj(spec.nodes);
  for (const Link& link : links) {
    adj[link.u].push_back(link.v);
    adj[link.v].push_back(link.u);
  }
  std::vector<int> component(spec.nodes, -1);
  std::vector<int> component_size;
  for (int start = 0; start < spec.nodes; ++start) {
    if (component[start] >= 0) {
      continue;
    }
    const int c = static_cast<int>(component_size.size());
    int size = 0;
    std::queue<int> frontier;
    frontier.push(start);
    component[start] = c;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      ++size;
      for (const int v : adj[u]) {
        if (component[v] < 0) {
          component[v] = c;
          frontier.push(v);
        }
      }
    }
    component_size.push_back(size);
  }
  const int best = static_cast<int>(
      std::max_element(component_size.begin(), component_size.end()) -
      component_size.begin());

  std::vector<Node> nodes;
  for (int id = 0; id < spec.nodes; ++id) {
    if (component[id] == best) {
      nodes.push_back({id, NodeKind::Endpoint, {}});
    }
  }
  std::erase_if(links, [&](const Link& link) {
    return component[link.u] != best;
  });

  std::map<std::string, std::string> metadata;
  if (static_cast<int>(nodes.size()) < spec.nodes) {
    metadata["largest_component_nodes"] = std::to_string(nodes.size());
    metadata["original_nodes"] = std::to_string(spec.nodes);
  }
  return Network(std::move(nodes), std::move(links), std::move(metadata));
}

namespace {

const json& require(const json& obj, const char* field,
                    const std::string& where) {
  const auto it = obj.find(field);
  if (it == obj.end()) {
    throw std::runtime_error(where + ": missing field '" + field + "'");
  }
  return *it;
}

int require_int(const json& obj, const char* field, const std::string& where) {
  const json& value = require(obj, field, where);
  if (!value.is_number_integer()) {
    throw std::runtime_error(where + "." + field + ": expected an integer");
  }
  return value.get<int>();
}

double require_number(const json& obj, const char* field,
                      const std::string& where) {
  const json& value = require(obj, field, where);
  if (!value.is_number()) {
    throw std::runtime_error(where + "." + field + ": expected a number");
  }
  return value.get<double>();
}

}  // namespace

Network load_network(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw std::runtime_error("network document must be a JSON object");
  }

  std::vector<Node> nodes;
  const json& jnodes = require(doc, "nodes", "network");
  if (!jnodes.is_array()) {
    throw std::runtime_error("nodes: expected an array");
  }
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const json& jn = jnodes[i];
    if (!jn.is_object()) {
      throw std::runtime_error(where + ": expected an object");
    }
    Node node;
    node.id = require_int(jn, "id", where);
    const json& kind = require(jn, "kind", where);
    if (kind == "endpoint") {
      node.kind = NodeKind::Endpoint;
    } else if (kind == "repeater") {
      node.kind = NodeKind::Repeater;
    } else {
      throw std::runtime_error(where + ".kind: expected 'endpoint' or "
                               "'repeater', got " + kind.dump());
    }
    if (jn.contains("label")) {
      if (!jn["label"].is_string()) {
        throw std::runtime_error(where + ".label: expected a string");
      }
      node.label = jn["label"].get<std::string>();
    }
    nodes.push_back(std::move(node));
  }

  std::vector<Link> links;
  const json& jlinks = require(doc, "links", "network");
  if (!jlinks.is_array()) {
    throw std::runtime_error("links: expected an array");
  }
  for (std::size_t i = 0; i < jlinks.size(); ++i) {
    const std::string where = "links[" + std::to_string(i) + "]";
    const json& jl = jlinks[i];
    if (!jl.is_object()) {
      throw std::runtime_error(where + ": expected an object");
    }
    links.push_back({require_int(jl, "u", where), require_int(jl, "v", where),
                     require_number(jl, "capacity_eprps", where),
                     require_number(jl, "fidelity", where)});
  }

  std::map<std::string, std::string> metadata;
  if (doc.contains("metadata")) {
    const json& jmeta = doc["metadata"];
    if (!jmeta.is_object()) {
      throw std::runtime_error("metadata: expected an object");
    }
    for (const auto& [key, value] : jmeta.items()) {
      if (!value.is_string()) {
        throw std::runtime_error("metadata." + key + ": expected a string");
      }
      metadata[key] = value.get<std::string>();
    }
  }

  try {
    return Network(std::move(nodes), std::move(links), std::move(metadata));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
}

std::string save_network(const Network& net) {
  json doc;
  doc["nodes"] = json::array();
  for (const Node& node : net.nodes()) {
    json jn{{"id", node.id},
            {"kind", node.kind == NodeKind::Endpoint ? "endpoint" : "repeater"}};
    if (!node.label.empty()) {
      jn["label"] = node.label;
    }
    doc["nodes"].push_back(std::move(jn));
  }
  doc["links"] = json::array();
  for (const Link& link : net.links()) {
    doc["links"].push_back({{"u", link.u},
                            {"v", link.v},
                            {"capacity_eprps", link.capacity},
                            {"fidelity", link.elementary_fidelity}});
  }
  if (!net.metadata().empty()) {
    doc["metadata"] = net.metadata();
  }
  return doc.dump(2) + "\n";
}

}  // namespace qnet
