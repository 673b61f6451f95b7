#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qnet/allocation.hpp"

namespace qnet {

struct GridSpec {
  int rows = 1;
  int cols = 2;
  double capacity = 1.0;
  double elementary_fidelity = 1.0;
  bool interior_repeaters = false;
};

struct FileSpec {
  std::string path;
};

using TopologySpec = std::variant<GridSpec, RandomGraphSpec, FileSpec>;

// One sweep dimension: the named config parameter takes each value in turn.
// Supported parameters: policy, k, n_apps, class_mix, min_fidelity, nodes,
// edge_prob, capacity, fidelity.
struct Sweep {
  std::string parameter;
  std::vector<std::string> values;  // canonical string form, see sweep_value
};

struct ExperimentConfig {
  TopologySpec topology;
  WorkloadSpec workload;
  PolicyConfig policy;
  OpReliability ops;
  int k = 4;
  int replications = 1;
  std::uint64_t base_seed = 0;
  std::optional<Sweep> sweep;
};

// Parses the JSON campaign document (schema in the README); throws
// std::runtime_error with the offending path on malformed input.
ExperimentConfig parse_experiment_config(const std::string& json_text);

// Jain's fairness index (sum x)^2 / (n * sum x^2), in [1/n, 1]. Requires a
// nonempty, nonnegative vector with at least one positive entry.
double jain_index(std::span<const double> rates);

// One row of campaign output. An app's rate is its single demand's rate for
// PointToPoint and the common coupled rate for Dqc; an app is admitted when
// every one of its pair demands carries a positive rate.
struct RunMetrics {
  std::string sweep_name;   // empty when the campaign has no sweep
  std::string sweep_value;
  int replication = 0;
  std::uint64_t seed = 0;
  int n_apps = 0;
  int n_admitted = 0;
  double admission_ratio = 0.0;
  double total_rate = 0.0;
  double min_rate = 0.0;  // over admitted apps; 0 when none admitted
  double jain = 0.0;      // 0 when no app carries a positive rate
  double mean_hop_count = 0.0;
  double p2p_admission_ratio = 0.0;  // 0 when the class is absent
  double dqc_admission_ratio = 0.0;
  double p2p_total_rate = 0.0;
  double dqc_total_rate = 0.0;
  std::string error;  // nonempty marks a failed replication
};

// Runs the campaign: every sweep value crossed with every replication, rows
// in sweep-major, replication-minor order. Replication r uses the seed
// derive_seed(base_seed, r) regardless of sweep value or other replications.
// A failing replication contributes an error row and the campaign continues.
// jobs > 1 runs replications concurrently without changing the output.
std::vector<RunMetrics> run_experiment(const ExperimentConfig& config,
                                       int jobs = 1);

// CSV with the documented fixed column order; doubles in shortest
// round-trip form, so equal configs yield byte-identical documents.
std::string metrics_to_csv(const std::vector<RunMetrics>& rows);

}  // namespace qnet
