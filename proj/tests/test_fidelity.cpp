#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qnet/fidelity.hpp"
#include "qnet/rng.hpp"

using namespace qnet;

TEST_CASE("werner_weight maps fidelity onto (0, 1]") {
  CHECK(werner_weight(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(werner_weight(0.85) == doctest::Approx(0.8).epsilon(1e-15));
  // strictly increasing
  CHECK(werner_weight(0.9) > werner_weight(0.8));
  CHECK_THROWS_AS(werner_weight(0.25), std::invalid_argument);
  CHECK_THROWS_AS(werner_weight(0.2), std::invalid_argument);
  CHECK_THROWS_AS(werner_weight(1.0000001), std::invalid_argument);
  CHECK_THROWS_AS(werner_weight(-1.0), std::invalid_argument);
}

TEST_CASE("fidelity_generic matches hand-evaluated constants") {
  // zero swaps return the elementary fidelity
  CHECK(fidelity_generic({0.95, 0, {}}) == doctest::Approx(0.95).epsilon(1e-12));
  // perfect inputs stay perfect
  CHECK(fidelity_generic({1.0, 5, {}}) == doctest::Approx(1.0).epsilon(1e-12));
  // w = 2.6/3, F' = 0.25 + 0.75 w^3
  CHECK(fidelity_generic({0.9, 2, {}}) ==
        doctest::Approx(0.7382222222222222).epsilon(1e-12));
  // frozen regression value for imperfect operations
  CHECK(fidelity_generic({0.95, 1, {0.99, 0.99, 0.99}}) ==
        doctest::Approx(0.867108439024).epsilon(1e-12));
}

TEST_CASE("fidelity_generic rejects out-of-range parameters") {
  CHECK_THROWS_AS(fidelity_generic({0.95, -1, {}}), std::invalid_argument);
  CHECK_THROWS_AS(fidelity_generic({0.2, 1, {}}), std::invalid_argument);
  CHECK_THROWS_AS(fidelity_generic({0.95, 1, {0.0, 1.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fidelity_generic({0.95, 1, {1.0, 1.0, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fidelity_generic({0.95, 1, {1.0, 1.1, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("fidelity_perfect pins the derived constants") {
  CHECK(fidelity_perfect(0.95, 0) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(fidelity_perfect(0.95, 2) ==
        doctest::Approx(0.8597777777777778).epsilon(1e-12));
  CHECK(std::abs(fidelity_perfect(0.95, 2) - 0.8598) < 1e-4);
  CHECK(fidelity_perfect(1.0, 100) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fidelity_perfect equals fidelity_generic with perfect operations") {
  Rng rng(20240117);
  for (int i = 0; i < 2000; ++i) {
    const double fbar = rng.uniform(0.3, 1.0);
    const int l = rng.uniform_int(0, 20);
    CHECK(std::abs(fidelity_generic({fbar, l, {}}) -
                   fidelity_perfect(fbar, l)) <= 1e-12);
  }
}

TEST_CASE("fidelity decays monotonically in the number of swaps") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double fbar = rng.uniform(0.3, 0.999);
    double previous = fidelity_perfect(fbar, 0);
    for (int l = 1; l <= 30; ++l) {
      const double current = fidelity_perfect(fbar, l);
      CHECK(current <= previous);
      // strictly decreasing until the value saturates at the 1/4 asymptote,
      // below which doubles cannot represent the remaining gap
      if (previous - 0.25 > 1e-12) {
        CHECK(current < previous);
      }
      CHECK(current >= 0.25);
      previous = current;
    }
  }
}

TEST_CASE("fidelity is nondecreasing in every quality parameter") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    SwapChainParams params{rng.uniform(0.3, 0.99), rng.uniform_int(0, 8),
                           {rng.uniform(0.8, 0.99), rng.uniform(0.8, 0.99),
                            rng.uniform(0.8, 0.99)}};
    const double base = fidelity_generic(params);
    auto bumped = params;
    bumped.elementary_fidelity += 0.005;
    CHECK(fidelity_generic(bumped) >= base);
    bumped = params;
    bumped.ops.p1 += 0.005;
    CHECK(fidelity_generic(bumped) >= base);
    bumped = params;
    bumped.ops.p2 += 0.005;
    CHECK(fidelity_generic(bumped) >= base);
    bumped = params;
    bumped.ops.eta += 0.005;
    CHECK(fidelity_generic(bumped) >= base);
  }
}

TEST_CASE("path_fidelity handles heterogeneous links") {
  const double w95 = werner_weight(0.95);
  const double w90 = werner_weight(0.9);

  // one hop, no swap: back to the elementary fidelity
  CHECK(path_fidelity(std::vector{w90}, {}) ==
        doctest::Approx(0.9).epsilon(1e-12));
  // uniform case reduces to the closed form
  CHECK(std::abs(path_fidelity(std::vector{w90, w90}, {}) -
                 fidelity_perfect(0.9, 1)) <= 1e-12);
  // mixed 0.95 / 0.90: 0.25 + 0.75 * (2.8/3) * (2.6/3)
  CHECK(path_fidelity(std::vector{w95, w90}, {}) ==
        doctest::Approx(0.8566666666666667).epsilon(1e-12));

  CHECK_THROWS_AS(path_fidelity({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(path_fidelity(std::vector{0.5, 1.5}, {}),
                  std::invalid_argument);
}

TEST_CASE("uniform paths agree with the closed form for any length") {
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    const double fbar = rng.uniform(0.3, 1.0);
    const int hops = rng.uniform_int(1, 12);
    const OpReliability ops{rng.uniform(0.9, 1.0), rng.uniform(0.9, 1.0),
                            rng.uniform(0.9, 1.0)};
    const std::vector<double> weights(hops, werner_weight(fbar));
    CHECK(std::abs(path_fidelity(weights, ops) -
                   fidelity_generic({fbar, hops - 1, ops})) <= 1e-12);
  }
}

TEST_CASE("max_intermediate_repeaters cases") {
  const auto bound = max_intermediate_repeaters(0.95, 0.8);
  REQUIRE(bound.is_bounded());
  CHECK(bound.l_max == 3);

  CHECK(max_intermediate_repeaters(0.9, 0.95).is_infeasible());
  CHECK(max_intermediate_repeaters(1.0, 0.99).is_unbounded());
  CHECK(max_intermediate_repeaters(1.0, 1.0).is_unbounded());
  // exactly at the threshold a direct pair is still feasible
  const auto tight = max_intermediate_repeaters(0.9, 0.9);
  REQUIRE(tight.is_bounded());
  CHECK(tight.l_max == 0);

  CHECK_THROWS_AS(max_intermediate_repeaters(0.2, 0.8), std::invalid_argument);
  CHECK_THROWS_AS(max_intermediate_repeaters(0.9, 1.2), std::invalid_argument);
}

TEST_CASE("bounded inversions are consistent with direct evaluation") {
  Rng rng(17);
  int bounded_seen = 0;
  for (int i = 0; i < 2000; ++i) {
    const double fbar = rng.uniform(0.3, 0.999);
    const double fmin = rng.uniform(0.26, 1.0);
    const auto bound = max_intermediate_repeaters(fbar, fmin);
    if (bound.is_infeasible()) {
      CHECK(fbar < fmin);
      continue;
    }
    REQUIRE(bound.is_bounded());
    ++bounded_seen;
    CHECK(fidelity_perfect(fbar, bound.l_max) >= fmin);
    CHECK(fidelity_perfect(fbar, bound.l_max + 1) < fmin);
  }
  CHECK(bounded_seen > 500);
}
