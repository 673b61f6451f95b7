#pragma once

#include <string>
#include <vector>

#include "qnet/routing.hpp"

namespace qnet {

enum class Policy { GreedyShortest, MaxMin, WeightedMaxMin };

struct PolicyConfig {
  Policy policy = Policy::MaxMin;
};

Policy parse_policy(const std::string& name);  // greedy_shortest|max_min|weighted_max_min
std::string policy_name(Policy policy);
std::vector<std::string> policy_names();

enum class RejectReason { NoFeasiblePath, Starved };

std::string reject_reason_name(RejectReason reason);

struct Assignment {
  PairDemand demand;
  Path path;
  double rate = 0.0;  // EPR pairs per second
};

struct Rejection {
  PairDemand demand;
  RejectReason reason = RejectReason::NoFeasiblePath;
};

// Output of a policy run. Invariants: per-link loads never exceed capacity
// (within 1e-9 absolute), every assignment's path meets its demand's
// fidelity threshold, assignments of one coupling group have equal rates,
// capped demands stay at or below their cap.
struct Allocation {
  std::vector<Assignment> assignments;
  std::vector<double> residual;  // per links() index, remaining capacity
  std::vector<Rejection> rejected;
};

// A link is treated as saturated when its residual drops below this fraction
// of the original capacity.
inline constexpr double kSaturationTolerance = 1e-9;

// Runs the selected policy over the expanded demands of all apps, each
// demand pinned to its first feasible path:
//   GreedyShortest  - demands in descending app weight (ties: ascending app
//                     id) take the residual bottleneck of their path.
//   MaxMin          - progressive filling: all unfrozen rates grow together,
//                     a demand freezes when its path hits a saturated link.
//   WeightedMaxMin  - progressive filling with growth speed equal to the
//                     app weight.
// A Dqc app grows as a single coupled variable whose common rate consumes
// capacity on every member path at once; if any member pair has no feasible
// path the whole app is rejected.
Allocation allocate(const Network& net, const std::vector<App>& apps,
                    const PolicyConfig& policy, const OpReliability& ops,
                    int k);

enum class Objective { MaxMinRate, TotalRate };

// Exhaustive test oracle: enumerates every combination of feasible paths and
// solves each fixed-path instance exactly (bisection water-filling for
// MaxMinRate, simplex for TotalRate). Guarded to toy instances: at most 8
// demands, 12 links and 4 candidate paths per demand, otherwise it refuses.
Allocation brute_force_optimal(const Network& net, const std::vector<App>& apps,
                               Objective objective, const OpReliability& ops,
                               int k);

// Exact max-min rates with each demand pinned to its first feasible path,
// solved level by level with bisection. Shares no code with the progressive
// filling in allocate(), so the two act as independent routes to the same
// answer. Subject to the same instance guard as brute_force_optimal.
Allocation oracle_max_min_first_paths(const Network& net,
                                      const std::vector<App>& apps,
                                      const OpReliability& ops, int k);

struct Violation {
  enum class Kind {
    CapacityExceeded,
    FidelityViolated,
    CouplingViolated,
    CapExceeded,
    InvalidPath,
    UnknownDemand,
    NegativeRate,
  };
  Kind kind;
  std::string detail;
};

std::string violation_kind_name(Violation::Kind kind);

// Re-derives every Allocation invariant from scratch; empty result means the
// allocation is consistent with the network and apps. Total function: never
// throws on malformed allocations, it reports them. Pass the operation
// reliabilities the allocation was produced with so the fidelity re-check
// matches exactly.
std::vector<Violation> verify_allocation(const Network& net,
                                         const std::vector<App>& apps,
                                         const Allocation& alloc,
                                         const OpReliability& ops = {});

// JSON with assignments (app id, pair, node path, rate), residual capacity
// keyed by "u-v" and rejected demands with reasons.
std::string save_allocation(const Network& net, const Allocation& alloc);

}  // namespace qnet
