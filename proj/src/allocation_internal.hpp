#pragma once

#include <cstddef>
#include <vector>

#include "qnet/allocation.hpp"

namespace qnet::detail {

// One rate variable of the allocation problem: a point-to-point demand, or a
// whole Dqc app whose member demands share the common coupled rate.
struct RateVariable {
  int app_id = 0;
  double weight = 1.0;
  double cap = 0.0;                  // +inf when elastic
  std::vector<std::size_t> members;  // indices into PreparedInstance::demands
  // Links drained by one rate unit: (link index, multiplicity across the
  // member paths).
  std::vector<std::pair<int, int>> usage;
};

// Demands that survived feasibility filtering, each pinned to its first
// feasible path, grouped into rate variables; the rest already rejected.
struct PreparedInstance {
  std::vector<PairDemand> demands;
  std::vector<Path> paths;  // chosen path per demand index
  std::vector<std::vector<FeasiblePath>> candidates;  // all feasible, per demand
  std::vector<RateVariable> variables;
  std::vector<Rejection> rejected;
};

PreparedInstance prepare_instance(const Network& net,
                                  const std::vector<App>& apps,
                                  const OpReliability& ops, int k);

// Recomputes a variable's link usage for a specific choice of member paths.
std::vector<std::pair<int, int>> usage_of(
    const std::vector<const Path*>& member_paths);

// Assembles the Allocation from per-variable rates. Zero-rate variables
// become Starved rejections when starved_to_rejected is set, otherwise they
// stay as zero-rate assignments.
Allocation finalize_allocation(const Network& net,
                               const PreparedInstance& instance,
                               const std::vector<double>& variable_rates,
                               bool starved_to_rejected);

// Refuses instances beyond the toy-scale oracle guard.
void enforce_oracle_guard(const Network& net,
                          const PreparedInstance& instance);

}  // namespace qnet::detail
