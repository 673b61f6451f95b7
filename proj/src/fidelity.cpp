#include "qnet/fidelity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qnet {

namespace {

void check_range(double value, double lo, double hi, const char* name,
                 const char* range) {
  if (!(value > lo && value <= hi)) {
    throw std::invalid_argument(std::string(name) + " = " +
                                std::to_string(value) + " outside " + range);
  }
}

void check_fidelity(double f, const char* name) {
  check_range(f, kWernerFloor, 1.0, name, "(0.25, 1]");
}

void check_ops(const OpReliability& ops) {
  check_range(ops.p1, 0.0, 1.0, "p1", "(0, 1]");
  check_range(ops.p2, 0.0, 1.0, "p2", "(0, 1]");
  check_range(ops.eta, 0.5, 1.0, "eta", "(0.5, 1]");
}

void check_num_intermediate(int l) {
  if (l < 0) {
    throw std::invalid_argument("num_intermediate = " + std::to_string(l) +
                                " must be >= 0");
  }
}

}  // namespace

double OpReliability::gate_factor() const {
  check_ops(*this);
  return p1 * p1 * p2 * (4.0 * eta * eta - 1.0) / 3.0;
}

double werner_weight(double fidelity) {
  check_fidelity(fidelity, "fidelity");
  return (4.0 * fidelity - 1.0) / 3.0;
}

double fidelity_generic(const SwapChainParams& params) {
  check_num_intermediate(params.num_intermediate);
  const double w = werner_weight(params.elementary_fidelity);
  const double g = params.ops.gate_factor();
  return 0.25 + 0.75 * std::pow(g, params.num_intermediate) *
                    std::pow(w, params.num_intermediate + 1);
}

double fidelity_perfect(double elementary_fidelity, int num_intermediate) {
  check_num_intermediate(num_intermediate);
  const double w = werner_weight(elementary_fidelity);
  return 0.25 + 0.75 * std::pow(w, num_intermediate + 1);
}

double path_fidelity(std::span<const double> werner_weights,
                     const OpReliability& ops) {
  if (werner_weights.empty()) {
    throw std::invalid_argument("path_fidelity: empty weight sequence");
  }
  const double g = ops.gate_factor();
  double product = 1.0;
  for (const double w : werner_weights) {
    if (!(w > 0.0 && w <= 1.0)) {
      throw std::invalid_argument("werner weight = " + std::to_string(w) +
                                  " outside (0, 1]");
    }
    product *= w;
  }
  const int num_swaps = static_cast<int>(werner_weights.size()) - 1;
  return 0.25 + 0.75 * std::pow(g, num_swaps) * product;
}

RepeaterBound max_intermediate_repeaters(double elementary_fidelity,
                                         double min_fidelity) {
  check_fidelity(elementary_fidelity, "elementary_fidelity");
  check_fidelity(min_fidelity, "min_fidelity");
  if (elementary_fidelity < min_fidelity) {
    return RepeaterBound::infeasible();
  }
  if (elementary_fidelity == 1.0) {
    return RepeaterBound::unbounded();
  }

  constexpr int kClamp = 1 << 30;

  // F'(L) >= f_min  <=>  w^(L+1) >= (f_min - 1/4) / (3/4), solve for L and
  // then fix up by direct evaluation: the logarithm alone can land one off
  // at threshold boundaries.
  const double w = werner_weight(elementary_fidelity);
  const double target = (min_fidelity - 0.25) / 0.75;
  double estimate = std::floor(std::log(target) / std::log(w)) - 1.0;
  int l = static_cast<int>(
      std::min(std::max(estimate, 0.0), static_cast<double>(kClamp)));

  while (l < kClamp && fidelity_perfect(elementary_fidelity, l + 1) >= min_fidelity) {
    ++l;
  }
  while (l > 0 && fidelity_perfect(elementary_fidelity, l) < min_fidelity) {
    --l;
  }
  return RepeaterBound::bounded(l);
}

}  // namespace qnet
