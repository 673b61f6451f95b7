#pragma once

#include <vector>

#include "qnet/fidelity.hpp"
#include "qnet/topology.hpp"
#include "qnet/traffic.hpp"

namespace qnet {

// Simple path through the network: nodes.size() == link_indices.size() + 1,
// consecutive nodes joined by the listed links, no repeated nodes. A path of
// h hops needs h - 1 entanglement swaps.
struct Path {
  std::vector<int> nodes;
  std::vector<int> link_indices;

  int hop_count() const { return static_cast<int>(link_indices.size()); }
  int num_intermediate() const { return hop_count() - 1; }

  bool operator==(const Path&) const = default;
};

// Yen's algorithm over the hop-count metric. Paths come out in nondecreasing
// hop count; equal-length paths are ordered by their node-id sequence, which
// makes the enumeration reproducible across platforms. A disconnected pair
// yields an empty list.
std::vector<Path> k_shortest_paths(const Network& net, int src, int dst,
                                   int k);

struct FeasiblePath {
  Path path;
  double fidelity = 0.0;
};

// The k shortest paths filtered to those whose end-to-end fidelity (product
// of per-link Werner weights through the swap chain) meets the demand's
// threshold; order preserved, each path annotated with its fidelity.
std::vector<FeasiblePath> feasible_paths(const Network& net,
                                         const PairDemand& demand, int k,
                                         const OpReliability& ops);

}  // namespace qnet
