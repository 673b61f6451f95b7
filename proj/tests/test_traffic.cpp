#include <set>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "qnet/rng.hpp"
#include "qnet/traffic.hpp"

using namespace qnet;

TEST_CASE("expand_app produces the closed-form demand counts") {
  SUBCASE("point-to-point") {
    const auto demands = expand_app(App::point_to_point(7, 5, 0, 0.8));
    REQUIRE(demands.size() == 1);
    CHECK(demands[0].a == 0);  // canonical order
    CHECK(demands[0].b == 5);
    CHECK(demands[0].app_id == 7);
    CHECK(!demands[0].coupling_group.has_value());
  }
  SUBCASE("star fans out from the coordinator") {
    const auto demands =
        expand_app(App::dqc(3, {0, 1, 2, 3}, DqcPattern::Star, 0.8, 1.0,
                            std::nullopt, 0));
    REQUIRE(demands.size() == 3);
    for (const auto& demand : demands) {
      CHECK(demand.a == 0);
      CHECK(demand.coupling_group == 3);
      CHECK(demand.min_fidelity == 0.8);
    }
  }
  SUBCASE("all-pairs enumerates C(|H|, 2)") {
    const auto demands =
        expand_app(App::dqc(1, {4, 2, 9, 7}, DqcPattern::AllPairs, 0.8));
    CHECK(demands.size() == 6);
    std::set<std::pair<int, int>> pairs;
    for (const auto& demand : demands) {
      CHECK(demand.a < demand.b);
      pairs.emplace(demand.a, demand.b);
      CHECK(demand.coupling_group == 1);
    }
    CHECK(pairs.size() == 6);
  }
}

TEST_CASE("demand counts hold for randomly shaped apps") {
  Rng rng(555);
  for (int i = 0; i < 300; ++i) {
    const int size = rng.uniform_int(2, 9);
    std::vector<int> hosts;
    for (int h = 0; h < size; ++h) {
      hosts.push_back(h * 3 + 1);
    }
    const bool star = rng.uniform01() < 0.5;
    const App app = App::dqc(i, hosts,
                             star ? DqcPattern::Star : DqcPattern::AllPairs,
                             0.8, 1.0, std::nullopt, hosts[0]);
    const auto demands = expand_app(app);
    const std::size_t expected =
        star ? static_cast<std::size_t>(size - 1)
             : static_cast<std::size_t>(size) * (size - 1) / 2;
    CHECK(demands.size() == expected);
    for (const auto& demand : demands) {
      CHECK(demand.coupling_group == app.id);
      CHECK(demand.min_fidelity == app.min_fidelity);
    }
  }
}

TEST_CASE("apps are validated structurally and against the network") {
  const Network net = build_grid(2, 2, 10.0, 0.95);
  CHECK_THROWS_AS(expand_app(App::point_to_point(0, 3, 3, 0.8)),
                  std::invalid_argument);
  CHECK_THROWS_AS(expand_app(App::dqc(0, {1}, DqcPattern::AllPairs, 0.8)),
                  std::invalid_argument);
  CHECK_THROWS_AS(expand_app(App::dqc(0, {1, 1, 2}, DqcPattern::AllPairs, 0.8)),
                  std::invalid_argument);
  CHECK_THROWS_AS(expand_app(App::dqc(0, {1, 2}, DqcPattern::Star, 0.8, 1.0,
                                      std::nullopt, 5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(expand_app(App::point_to_point(0, 0, 1, 0.2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(expand_app(App::point_to_point(0, 0, 1, 0.8, -1.0)),
                  std::invalid_argument);

  CHECK_THROWS_WITH_AS(validate_app(App::point_to_point(9, 0, 17, 0.8), net),
                       doctest::Contains("node 17"), std::invalid_argument);
  const Network with_repeater = build_grid(3, 3, 10.0, 0.95, true);
  CHECK_THROWS_WITH_AS(
      validate_app(App::point_to_point(9, 0, 4, 0.8), with_repeater),
      doctest::Contains("repeater"), std::invalid_argument);
}

TEST_CASE("generate_workload is deterministic and honors the class mix") {
  const Network net = build_grid(3, 3, 10.0, 0.95);

  SUBCASE("class_mix 0 yields only point-to-point apps") {
    WorkloadSpec spec{20, 0.0, 2, 3, 0.6, 0.9};
    for (const App& app : generate_workload(1, net, spec)) {
      CHECK(app.traffic_class == TrafficClass::PointToPoint);
      CHECK(app.src != app.dst);
      CHECK(app.min_fidelity >= 0.6);
      CHECK(app.min_fidelity <= 0.9);
    }
  }
  SUBCASE("class_mix 1 with a fixed size yields only that Dqc size") {
    WorkloadSpec spec{20, 1.0, 3, 3, 0.6, 0.9};
    for (const App& app : generate_workload(2, net, spec)) {
      CHECK(app.traffic_class == TrafficClass::Dqc);
      CHECK(app.hosts.size() == 3);
      CHECK(std::set<int>(app.hosts.begin(), app.hosts.end()).size() == 3);
    }
  }
  SUBCASE("identical seeds give identical workloads") {
    WorkloadSpec spec{15, 0.5, 2, 4, 0.5, 0.95};
    CHECK(save_apps(generate_workload(77, net, spec)) ==
          save_apps(generate_workload(77, net, spec)));
    CHECK(save_apps(generate_workload(77, net, spec)) !=
          save_apps(generate_workload(78, net, spec)));
  }
  SUBCASE("repeaters never appear as app endpoints") {
    const Network with_repeater = build_grid(3, 3, 10.0, 0.95, true);
    WorkloadSpec spec{40, 0.5, 2, 4, 0.5, 0.95};
    for (const App& app : generate_workload(5, with_repeater, spec)) {
      CHECK_NOTHROW(validate_app(app, with_repeater));
    }
  }
  SUBCASE("insufficient endpoints is a configuration error") {
    const Network tiny = build_grid(1, 2, 10.0, 0.95);
    WorkloadSpec spec{5, 1.0, 3, 3, 0.6, 0.9};
    CHECK_THROWS_WITH_AS(generate_workload(1, tiny, spec),
                         doctest::Contains("endpoints"), std::runtime_error);
  }
  SUBCASE("bad ranges are rejected") {
    CHECK_THROWS_AS(generate_workload(1, net, {5, 0.5, 2, 2, 0.2, 0.9}),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_workload(1, net, {5, 1.5, 2, 2, 0.6, 0.9}),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_workload(1, net, {5, 0.5, 4, 2, 0.6, 0.9}),
                    std::invalid_argument);
  }
}

TEST_CASE("apps JSON round trip") {
  std::vector<App> apps;
  apps.push_back(App::point_to_point(0, 1, 5, 0.8, 2.0, 3.5));
  apps.push_back(App::dqc(1, {0, 2, 6}, DqcPattern::AllPairs, 0.7));
  apps.push_back(App::dqc(2, {0, 4, 8}, DqcPattern::Star, 0.75, 1.5,
                          std::nullopt, 4));
  const auto reloaded = load_apps(save_apps(apps));
  CHECK(save_apps(reloaded) == save_apps(apps));

  CHECK_THROWS_WITH_AS(load_apps(R"([{"id": 1}])"), doctest::Contains("class"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(
      load_apps(R"([{"id": 1, "class": "p2p", "src": 0, "dst": 1,
                     "min_fidelity": 0.8},
                    {"id": 1, "class": "p2p", "src": 0, "dst": 2,
                     "min_fidelity": 0.8}])"),
      doctest::Contains("duplicate"), std::runtime_error);
}
