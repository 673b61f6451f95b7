#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "qnet/harness.hpp"
#include "qnet/rng.hpp"

using namespace qnet;

namespace {

std::string tiny_grid_config(const std::string& extra = "") {
  return R"({
    "topology": {"type": "grid", "rows": 3, "cols": 3,
                 "capacity": 10.0, "fidelity": 0.95},
    "workload": {"n_apps": 6, "class_mix": 0.4, "dqc_size_range": [2, 3],
                 "fidelity_floor_range": [0.5, 0.8]},
    "policy": "max_min",
    "k": 4,
    "replications": 3,
    "base_seed": 42)" +
         extra + "\n}";
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (const char c : text) {
    lines += c == '\n';
  }
  return lines;
}

}  // namespace

TEST_CASE("jain index on the canonical vectors") {
  CHECK(jain_index(std::vector{4.0, 4.0, 4.0}) == 1.0);
  CHECK(jain_index(std::vector{1.0, 0.0, 0.0}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(jain_index(std::vector{1.0, 2.0, 3.0}) ==
        doctest::Approx(0.8571428571428571).epsilon(1e-15));
  CHECK(jain_index(std::vector{5.0}) == 1.0);

  CHECK_THROWS_AS(jain_index({}), std::invalid_argument);
  CHECK_THROWS_AS(jain_index(std::vector{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(jain_index(std::vector{1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("jain index stays inside [1/n, 1]") {
  Rng rng(2718);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = rng.uniform_int(1, 40);
    std::vector<double> rates;
    for (int i = 0; i < n; ++i) {
      rates.push_back(rng.uniform01() < 0.2 ? 0.0 : rng.uniform(0.0, 100.0));
    }
    bool positive = false;
    for (const double r : rates) {
      positive = positive || r > 0.0;
    }
    if (!positive) {
      continue;
    }
    const double j = jain_index(rates);
    CHECK(j >= 1.0 / n);
    CHECK(j <= 1.0);
  }
  // constant vectors are exactly fair
  for (const double c : {0.1, 569.2043056183375, 1e-7, 12345.678}) {
    CHECK(jain_index(std::vector<double>(9, c)) == 1.0);
  }
}

TEST_CASE("config parsing") {
  SUBCASE("valid config round-trips into a runnable campaign") {
    const ExperimentConfig config =
        parse_experiment_config(tiny_grid_config());
    CHECK(config.replications == 3);
    CHECK(config.base_seed == 42);
    CHECK(config.k == 4);
    CHECK(!config.sweep.has_value());
  }
  SUBCASE("replications must be positive") {
    CHECK_THROWS_WITH_AS(
        parse_experiment_config(tiny_grid_config(", \"replications\": 0")),
        doctest::Contains("replications"), std::runtime_error);
  }
  SUBCASE("unknown policy and sweep parameter are rejected") {
    std::string bad = tiny_grid_config();
    bad.replace(bad.find("max_min"), 7, "best_effort");
    CHECK_THROWS_AS(parse_experiment_config(bad), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        parse_experiment_config(tiny_grid_config(
            R"(, "sweep": {"parameter": "flux", "values": [1]})")),
        doctest::Contains("unknown parameter"), std::runtime_error);
  }
  SUBCASE("sweep values must match the parameter type") {
    CHECK_THROWS_WITH_AS(
        parse_experiment_config(tiny_grid_config(
            R"(, "sweep": {"parameter": "n_apps", "values": [1.5]})")),
        doctest::Contains("integers"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        parse_experiment_config(tiny_grid_config(
            R"(, "sweep": {"parameter": "policy", "values": [3]})")),
        doctest::Contains("strings"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        parse_experiment_config(tiny_grid_config(
            R"(, "sweep": {"parameter": "edge_prob", "values": [0.2]})")),
        doctest::Contains("random topology"), std::runtime_error);
  }
}

TEST_CASE("campaigns produce one row per sweep value and replication") {
  SUBCASE("no sweep: one row per replication") {
    const auto rows =
        run_experiment(parse_experiment_config(tiny_grid_config()));
    REQUIRE(rows.size() == 3);
    for (int r = 0; r < 3; ++r) {
      CHECK(rows[r].replication == r);
      CHECK(rows[r].seed == derive_seed(42, r));
      CHECK(rows[r].error.empty());
      CHECK(rows[r].n_apps == 6);
      CHECK(rows[r].admission_ratio >= 0.0);
      CHECK(rows[r].admission_ratio <= 1.0);
    }
  }
  SUBCASE("policy sweep is sweep-major, replication-minor") {
    const auto rows = run_experiment(parse_experiment_config(tiny_grid_config(
        R"(, "sweep": {"parameter": "policy",
                       "values": ["greedy_shortest", "max_min"]})")));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].sweep_value == "greedy_shortest");
    CHECK(rows[2].sweep_value == "greedy_shortest");
    CHECK(rows[3].sweep_value == "max_min");
    CHECK(rows[0].replication == 0);
    CHECK(rows[1].replication == 1);
    // same replication index means the very same seed across sweep values
    CHECK(rows[0].seed == rows[3].seed);
  }
}

TEST_CASE("campaign output is a pure function of the config") {
  const ExperimentConfig config = parse_experiment_config(tiny_grid_config(
      R"(, "sweep": {"parameter": "n_apps", "values": [2, 6]})"));
  const std::string once = metrics_to_csv(run_experiment(config, 1));
  const std::string twice = metrics_to_csv(run_experiment(config, 1));
  const std::string parallel = metrics_to_csv(run_experiment(config, 4));
  CHECK(once == twice);
  CHECK(once == parallel);
  CHECK(count_lines(once) == 7);  // header + 2 sweep values x 3 replications
}

TEST_CASE("replication metrics do not depend on other replications") {
  ExperimentConfig config = parse_experiment_config(tiny_grid_config());
  config.replications = 2;
  const auto short_run = run_experiment(config);
  config.replications = 5;
  const auto long_run = run_experiment(config, 3);
  for (std::size_t r = 0; r < short_run.size(); ++r) {
    CHECK(short_run[r].seed == long_run[r].seed);
    CHECK(short_run[r].total_rate == long_run[r].total_rate);
    CHECK(short_run[r].jain == long_run[r].jain);
    CHECK(short_run[r].n_admitted == long_run[r].n_admitted);
  }
}

TEST_CASE("failed replications become error rows, not aborts") {
  const ExperimentConfig config = parse_experiment_config(R"({
    "topology": {"type": "file", "path": "/nonexistent/net.json"},
    "workload": {"n_apps": 2, "class_mix": 0.0,
                 "fidelity_floor_range": [0.5, 0.5]},
    "policy": "max_min",
    "replications": 2,
    "base_seed": 1
  })");
  const auto rows = run_experiment(config);
  REQUIRE(rows.size() == 2);
  for (const RunMetrics& row : rows) {
    CHECK(!row.error.empty());
  }
  const std::string csv = metrics_to_csv(rows);
  CHECK(count_lines(csv) == 3);
  CHECK(csv.find("cannot open") != std::string::npos);
  // every row keeps the full 16-column layout
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 15);
  }
}

TEST_CASE("raising every fidelity floor never admits more apps") {
  const std::string base = R"({
    "topology": {"type": "grid", "rows": 4, "cols": 4,
                 "capacity": 8.0, "fidelity": 0.93},
    "workload": {"n_apps": 10, "class_mix": 0.3, "dqc_size_range": [2, 3],
                 "fidelity_floor_range": [0.0, 0.0]},
    "policy": "max_min",
    "replications": 4,
    "base_seed": )";
  for (const int seed : {1, 7, 13}) {
    std::vector<std::vector<int>> admitted_by_level;
    for (const double floor : {0.5, 0.65, 0.8, 0.9, 0.97}) {
      std::ostringstream json;
      json << base << seed << R"(, "sweep": {"parameter": "min_fidelity",
                                             "values": [)"
           << floor << "]}}";
      const auto rows =
          run_experiment(parse_experiment_config(json.str()));
      std::vector<int> admitted;
      for (const RunMetrics& row : rows) {
        REQUIRE(row.error.empty());
        admitted.push_back(row.n_admitted);
      }
      admitted_by_level.push_back(admitted);
    }
    for (std::size_t level = 1; level < admitted_by_level.size(); ++level) {
      for (std::size_t r = 0; r < admitted_by_level[level].size(); ++r) {
        CHECK(admitted_by_level[level][r] <= admitted_by_level[level - 1][r]);
      }
    }
  }
}

TEST_CASE("csv layout is stable") {
  const auto rows = run_experiment(parse_experiment_config(tiny_grid_config()));
  const std::string csv = metrics_to_csv(rows);
  CHECK(csv.rfind("sweep_name,sweep_value,replication,seed,n_apps,n_admitted,"
                  "admission_ratio,total_rate,min_rate,jain_index,"
                  "mean_hop_count,p2p_admission_ratio,dqc_admission_ratio,"
                  "p2p_total_rate,dqc_total_rate,error\n",
                  0) == 0);
  // commas inside error messages stay quoted
  RunMetrics failed;
  failed.error = "boom, with \"quotes\"";
  const std::string one = metrics_to_csv({failed});
  CHECK(one.find("\"boom, with \"\"quotes\"\"\"") != std::string::npos);
}
