#pragma once

#include <span>
#include <vector>

namespace qnet {

// Werner floor: a two-qubit Werner state with fidelity 0.25 carries no
// entanglement, so every fidelity in the engine lives in (0.25, 1].
inline constexpr double kWernerFloor = 0.25;

// Reliability of the local operations performed at each swapping node.
// p1: one-qubit operations, p2: two-qubit operations, both in (0, 1];
// eta: measurement parameter in (0.5, 1] so that 4*eta^2 - 1 > 0.
struct OpReliability {
  double p1 = 1.0;
  double p2 = 1.0;
  double eta = 1.0;

  // Per-swap attenuation g = p1^2 * p2 * (4*eta^2 - 1) / 3, in (0, 1].
  double gate_factor() const;
};

// Parameters of a chain of entanglement swaps: num_intermediate repeaters
// merge num_intermediate + 1 elementary pairs of fidelity
// elementary_fidelity into one end-to-end pair.
struct SwapChainParams {
  double elementary_fidelity = 1.0;
  int num_intermediate = 0;
  OpReliability ops;
};

// Werner weight w = (4f - 1) / 3, the multiplicative component of a Werner
// state; strictly increasing, maps (0.25, 1] onto (0, 1].
double werner_weight(double fidelity);

// End-to-end fidelity of a swap chain:
//   F' = 1/4 + 3/4 * g^L * w^(L+1)
// with L = num_intermediate, g the gate factor and w the Werner weight of
// the elementary fidelity (Briegel et al., Phys. Rev. Lett. 81, 5932, 1998).
double fidelity_generic(const SwapChainParams& params);

// Same chain with perfect local operations (g = 1):
//   F' = 1/4 + 3/4 * w^(L+1)
double fidelity_perfect(double elementary_fidelity, int num_intermediate);

// Heterogeneous chain: one Werner weight per elementary link, L swaps join
// weights.size() == L + 1 links. Reduces exactly to fidelity_generic when
// all weights are equal.
double path_fidelity(std::span<const double> werner_weights,
                     const OpReliability& ops);

// Result of inverting the perfect-operations chain for the largest number of
// intermediate repeaters that still meets a fidelity threshold.
struct RepeaterBound {
  enum class Kind { Bounded, Unbounded, Infeasible };

  Kind kind = Kind::Infeasible;
  int l_max = -1;  // meaningful only when kind == Bounded

  static RepeaterBound bounded(int l) { return {Kind::Bounded, l}; }
  static RepeaterBound unbounded() { return {Kind::Unbounded, -1}; }
  static RepeaterBound infeasible() { return {Kind::Infeasible, -1}; }

  bool is_bounded() const { return kind == Kind::Bounded; }
  bool is_unbounded() const { return kind == Kind::Unbounded; }
  bool is_infeasible() const { return kind == Kind::Infeasible; }
  bool operator==(const RepeaterBound&) const = default;
};

// Largest L with fidelity_perfect(elementary_fidelity, L) >= min_fidelity.
// Infeasible when even a direct pair misses the threshold, Unbounded when
// elementary_fidelity == 1. Computed by logarithm, then verified against
// direct evaluation at the boundary to absorb floating-point error. L is
// clamped at 2^30 for thresholds vanishingly close to the Werner floor.
RepeaterBound max_intermediate_repeaters(double elementary_fidelity,
                                         double min_fidelity);

}  // namespace qnet
