#include "qnet/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qnet/rng.hpp"

namespace qnet {

namespace {

using nlohmann::json;

std::string format_double(double value) {
  std::array<char, 32> buf;
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

const json& require(const json& obj, const char* field,
                    const std::string& where) {
  const auto it = obj.find(field);
  if (it == obj.end()) {
    throw std::runtime_error(where + ": missing field '" + field + "'");
  }
  return *it;
}

std::pair<double, double> number_range(const json& value,
                                       const std::string& where) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
      !value[1].is_number()) {
    throw std::runtime_error(where + ": expected [lo, hi]");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

TopologySpec parse_topology(const json& jt) {
  if (!jt.is_object()) {
    throw std::runtime_error("topology: expected an object");
  }
  const std::string type = require(jt, "type", "topology").get<std::string>();
  if (type == "grid") {
    GridSpec grid;
    grid.rows = require(jt, "rows", "topology").get<int>();
    grid.cols = require(jt, "cols", "topology").get<int>();
    grid.capacity = require(jt, "capacity", "topology").get<double>();
    grid.elementary_fidelity = require(jt, "fidelity", "topology").get<double>();
    grid.interior_repeaters = jt.value("interior_repeaters", false);
    return grid;
  }
  if (type == "random") {
    RandomGraphSpec spec;
    spec.nodes = require(jt, "nodes", "topology").get<int>();
    spec.edge_prob = require(jt, "edge_prob", "topology").get<double>();
    std::tie(spec.capacity_lo, spec.capacity_hi) =
        number_range(require(jt, "capacity_range", "topology"),
                     "topology.capacity_range");
    std::tie(spec.fidelity_lo, spec.fidelity_hi) =
        number_range(require(jt, "fidelity_range", "topology"),
                     "topology.fidelity_range");
    return spec;
  }
  if (type == "file") {
    return FileSpec{require(jt, "path", "topology").get<std::string>()};
  }
  throw std::runtime_error("topology.type: expected 'grid', 'random' or "
                           "'file', got '" + type + "'");
}

WorkloadSpec parse_workload(const json& jw) {
  if (!jw.is_object()) {
    throw std::runtime_error("workload: expected an object");
  }
  WorkloadSpec spec;
  spec.n_apps = require(jw, "n_apps", "workload").get<int>();
  spec.dqc_fraction = require(jw, "class_mix", "workload").get<double>();
  if (jw.contains("dqc_size_range")) {
    const auto [lo, hi] =
        number_range(jw["dqc_size_range"], "workload.dqc_size_range");
    spec.dqc_size_lo = static_cast<int>(lo);
    spec.dqc_size_hi = static_cast<int>(hi);
  }
  std::tie(spec.fidelity_floor_lo, spec.fidelity_floor_hi) =
      number_range(require(jw, "fidelity_floor_range", "workload"),
                   "workload.fidelity_floor_range");
  const std::string pattern = jw.value("dqc_pattern", "all_pairs");
  if (pattern == "all_pairs") {
    spec.dqc_pattern = DqcPattern::AllPairs;
  } else if (pattern == "star") {
    spec.dqc_pattern = DqcPattern::Star;
  } else {
    throw std::runtime_error("workload.dqc_pattern: expected 'all_pairs' or "
                             "'star', got '" + pattern + "'");
  }
  spec.weight = jw.value("weight", 1.0);
  return spec;
}

enum class SweepParam {
  Policy,
  K,
  NApps,
  ClassMix,
  MinFidelity,
  Nodes,
  EdgeProb,
  Capacity,
  Fidelity,
};

SweepParam parse_sweep_param(const std::string& name) {
  static const std::map<std::string, SweepParam> names = {
      {"policy", SweepParam::Policy},       {"k", SweepParam::K},
      {"n_apps", SweepParam::NApps},        {"class_mix", SweepParam::ClassMix},
      {"min_fidelity", SweepParam::MinFidelity}, {"nodes", SweepParam::Nodes},
      {"edge_prob", SweepParam::EdgeProb},  {"capacity", SweepParam::Capacity},
      {"fidelity", SweepParam::Fidelity},
  };
  const auto it = names.find(name);
  if (it == names.end()) {
    std::string known;
    for (const auto& [n, p] : names) {
      known += known.empty() ? n : ", " + n;
    }
    throw std::runtime_error("sweep.parameter: unknown parameter '" + name +
                             "', expected one of: " + known);
  }
  return it->second;
}

bool sweep_param_is_integer(SweepParam param) {
  return param == SweepParam::K || param == SweepParam::NApps ||
         param == SweepParam::Nodes;
}

// Applies one canonical sweep value to a per-task copy of the config.
void apply_sweep_value(ExperimentConfig& config, const std::string& parameter,
                       const std::string& value) {
  const SweepParam param = parse_sweep_param(parameter);
  switch (param) {
    case SweepParam::Policy:
      config.policy.policy = parse_policy(value);
      return;
    case SweepParam::K:
      config.k = std::stoi(value);
      return;
    case SweepParam::NApps:
      config.workload.n_apps = std::stoi(value);
      return;
    case SweepParam::ClassMix:
      config.workload.dqc_fraction = std::stod(value);
      return;
    case SweepParam::MinFidelity:
      config.workload.fidelity_floor_lo = std::stod(value);
      config.workload.fidelity_floor_hi = std::stod(value);
      return;
    case SweepParam::Nodes:
      std::get<RandomGraphSpec>(config.topology).nodes = std::stoi(value);
      return;
    case SweepParam::EdgeProb:
      std::get<RandomGraphSpec>(config.topology).edge_prob = std::stod(value);
      return;
    case SweepParam::Capacity:
      std::get<GridSpec>(config.topology).capacity = std::stod(value);
      return;
    case SweepParam::Fidelity:
      std::get<GridSpec>(config.topology).elementary_fidelity =
          std::stod(value);
      return;
  }
}

Sweep parse_sweep(const json& js, const ExperimentConfig& config) {
  Sweep sweep;
  sweep.parameter = require(js, "parameter", "sweep").get<std::string>();
  const SweepParam param = parse_sweep_param(sweep.parameter);

  const bool topology_is_random =
      std::holds_alternative<RandomGraphSpec>(config.topology);
  const bool topology_is_grid = std::holds_alternative<GridSpec>(config.topology);
  if ((param == SweepParam::Nodes || param == SweepParam::EdgeProb) &&
      !topology_is_random) {
    throw std::runtime_error("sweep.parameter: '" + sweep.parameter +
                             "' requires a random topology");
  }
  if ((param == SweepParam::Capacity || param == SweepParam::Fidelity) &&
      !topology_is_grid) {
    throw std::runtime_error("sweep.parameter: '" + sweep.parameter +
                             "' requires a grid topology");
  }

  const json& values = require(js, "values", "sweep");
  if (!values.is_array() || values.empty()) {
    throw std::runtime_error("sweep.values: expected a nonempty array");
  }
  for (const json& value : values) {
    if (param == SweepParam::Policy) {
      if (!value.is_string()) {
        throw std::runtime_error("sweep.values: policy values must be strings");
      }
      parse_policy(value.get<std::string>());  // fail fast on unknown names
      sweep.values.push_back(value.get<std::string>());
    } else if (sweep_param_is_integer(param)) {
      if (!value.is_number_integer()) {
        throw std::runtime_error("sweep.values: '" + sweep.parameter +
                                 "' values must be integers");
      }
      sweep.values.push_back(value.dump());
    } else {
      if (!value.is_number()) {
        throw std::runtime_error("sweep.values: '" + sweep.parameter +
                                 "' values must be numbers");
      }
      sweep.values.push_back(value.dump());
    }
  }
  return sweep;
}

Network build_topology(const TopologySpec& spec, std::uint64_t seed) {
  if (const auto* grid = std::get_if<GridSpec>(&spec)) {
    return build_grid(grid->rows, grid->cols, grid->capacity,
                      grid->elementary_fidelity, grid->interior_repeaters);
  }
  if (const auto* random = std::get_if<RandomGraphSpec>(&spec)) {
    return generate_random(seed, *random);
  }
  const auto& file = std::get<FileSpec>(spec);
  std::ifstream in(file.path);
  if (!in) {
    throw std::runtime_error("cannot open network file: " + file.path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_network(buffer.str());
}

std::string csv_escape(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) {
    return raw;
  }
  std::string escaped = "\"";
  for (const char c : raw) {
    if (c == '"') {
      escaped += '"';
    }
    escaped += c;
  }
  escaped += '"';
  return escaped;
}

RunMetrics run_one(const ExperimentConfig& base, const std::string& sweep_name,
                   const std::string& sweep_value, int replication) {
  RunMetrics row;
  row.sweep_name = sweep_name;
  row.sweep_value = sweep_value;
  row.replication = replication;
  row.seed = derive_seed(base.base_seed, static_cast<std::uint64_t>(replication));

  try {
    ExperimentConfig config = base;
    if (!sweep_name.empty()) {
      apply_sweep_value(config, sweep_name, sweep_value);
    }
    const std::uint64_t topology_seed = derive_seed(row.seed, 1);
    const std::uint64_t workload_seed = derive_seed(row.seed, 2);

    const Network net = build_topology(config.topology, topology_seed);
    const std::vector<App> apps =
        generate_workload(workload_seed, net, config.workload);
    const Allocation alloc =
        allocate(net, apps, config.policy, config.ops, config.k);

    std::map<int, std::size_t> assigned_count;
    std::map<int, double> app_rate;
    for (const Assignment& assignment : alloc.assignments) {
      ++assigned_count[assignment.demand.app_id];
      app_rate[assignment.demand.app_id] = assignment.rate;
    }

    row.n_apps = static_cast<int>(apps.size());
    std::vector<double> rates;
    double hop_sum = 0.0;
    for (const Assignment& assignment : alloc.assignments) {
      hop_sum += assignment.path.hop_count();
    }
    int p2p_total = 0, dqc_total = 0, p2p_admitted = 0, dqc_admitted = 0;
    for (const App& app : apps) {
      const std::size_t expected = expand_app(app).size();
      const auto it = assigned_count.find(app.id);
      const bool admitted =
          it != assigned_count.end() && it->second == expected &&
          app_rate[app.id] > 0.0;
      const double rate = admitted ? app_rate[app.id] : 0.0;
      rates.push_back(rate);
      const bool is_p2p = app.traffic_class == TrafficClass::PointToPoint;
      (is_p2p ? p2p_total : dqc_total) += 1;
      if (admitted) {
        ++row.n_admitted;
        (is_p2p ? p2p_admitted : dqc_admitted) += 1;
        row.total_rate += rate;
        (is_p2p ? row.p2p_total_rate : row.dqc_total_rate) += rate;
        row.min_rate = row.min_rate == 0.0 ? rate : std::min(row.min_rate, rate);
      }
    }
    row.admission_ratio =
        row.n_apps > 0 ? static_cast<double>(row.n_admitted) / row.n_apps : 0.0;
    row.p2p_admission_ratio =
        p2p_total > 0 ? static_cast<double>(p2p_admitted) / p2p_total : 0.0;
    row.dqc_admission_ratio =
        dqc_total > 0 ? static_cast<double>(dqc_admitted) / dqc_total : 0.0;
    const bool any_positive =
        std::any_of(rates.begin(), rates.end(), [](double r) { return r > 0; });
    row.jain = any_positive ? jain_index(rates) : 0.0;
    row.mean_hop_count = alloc.assignments.empty()
                             ? 0.0
                             : hop_sum / alloc.assignments.size();
  } catch (const std::exception& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    row.error = message;
  }
  return row;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw std::runtime_error("config must be a JSON object");
  }

  ExperimentConfig config;
  config.topology = parse_topology(require(doc, "topology", "config"));
  config.workload = parse_workload(require(doc, "workload", "config"));
  config.policy.policy =
      parse_policy(require(doc, "policy", "config").get<std::string>());
  if (doc.contains("ops")) {
    const json& jo = doc["ops"];
    config.ops.p1 = jo.value("p1", 1.0);
    config.ops.p2 = jo.value("p2", 1.0);
    config.ops.eta = jo.value("eta", 1.0);
  }
  config.k = doc.value("k", 4);
  if (config.k < 1) {
    throw std::runtime_error("k must be >= 1");
  }
  config.replications = require(doc, "replications", "config").get<int>();
  if (config.replications < 1) {
    throw std::runtime_error("replications must be >= 1");
  }
  config.base_seed = require(doc, "base_seed", "config").get<std::uint64_t>();
  if (doc.contains("sweep") && !doc["sweep"].is_null()) {
    config.sweep = parse_sweep(doc["sweep"], config);
  }
  return config;
}

double jain_index(std::span<const double> rates) {
  if (rates.empty()) {
    throw std::invalid_argument("jain_index: empty rate vector");
  }
  double sum = 0.0, sum_sq = 0.0;
  bool uniform = true;
  for (const double rate : rates) {
    if (rate < 0.0) {
      throw std::invalid_argument("jain_index: negative rate");
    }
    uniform = uniform && rate == rates.front();
    sum += rate;
    sum_sq += rate * rate;
  }
  if (sum_sq == 0.0) {
    throw std::invalid_argument("jain_index: undefined for all-zero rates");
  }
  if (uniform) {
    return 1.0;  // exact where plain summation would wobble by an ulp
  }
  // Cauchy-Schwarz puts the true value in [1/n, 1]; rounding in the sums can
  // step just outside, so clamp back into the valid range.
  const double n = static_cast<double>(rates.size());
  return std::clamp(sum * sum / (n * sum_sq), 1.0 / n, 1.0);
}

std::vector<RunMetrics> run_experiment(const ExperimentConfig& config,
                                       int jobs) {
  std::vector<std::pair<std::string, std::string>> sweep_points;
  if (config.sweep) {
    for (const std::string& value : config.sweep->values) {
      sweep_points.emplace_back(config.sweep->parameter, value);
    }
  } else {
    sweep_points.emplace_back("", "");
  }

  const std::size_t total = sweep_points.size() *
                            static_cast<std::size_t>(config.replications);
  std::vector<RunMetrics> rows(total);
  const auto task = [&](std::size_t index) {
    const auto& [name, value] =
        sweep_points[index / static_cast<std::size_t>(config.replications)];
    const int replication =
        static_cast<int>(index % static_cast<std::size_t>(config.replications));
    rows[index] = run_one(config, name, value, replication);
  };

  if (jobs <= 1 || total <= 1) {
    for (std::size_t i = 0; i < total; ++i) {
      task(i);
    }
  } else {
    // Rows land in their canonical slot, so the schedule cannot change the
    // output.
    std::atomic<std::size_t> next{0};
    const std::size_t nthreads =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), total);
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < total;
             i = next.fetch_add(1)) {
          task(i);
        }
      });
    }
    for (std::thread& worker : workers) {
      worker.join();
    }
  }
  return rows;
}

std::string metrics_to_csv(const std::vector<RunMetrics>& rows) {
  std::string csv =
      "sweep_name,sweep_value,replication,seed,n_apps,n_admitted,"
      "admission_ratio,total_rate,min_rate,jain_index,mean_hop_count,"
      "p2p_admission_ratio,dqc_admission_ratio,p2p_total_rate,dqc_total_rate,"
      "error\n";
  for (const RunMetrics& row : rows) {
    csv += csv_escape(row.sweep_name) + ',' + csv_escape(row.sweep_value) +
           ',' + std::to_string(row.replication) + ',' +
           std::to_string(row.seed) + ',';
    if (row.error.empty()) {
      csv += std::to_string(row.n_apps) + ',' +
             std::to_string(row.n_admitted) + ',' +
             format_double(row.admission_ratio) + ',' +
             format_double(row.total_rate) + ',' +
             format_double(row.min_rate) + ',' + format_double(row.jain) +
             ',' + format_double(row.mean_hop_count) + ',' +
             format_double(row.p2p_admission_ratio) + ',' +
             format_double(row.dqc_admission_ratio) + ',' +
             format_double(row.p2p_total_rate) + ',' +
             format_double(row.dqc_total_rate) + ',';
    } else {
      csv += ",,,,,,,,,,,";
    }
    csv += csv_escape(row.error) + '\n';
  }
  return csv;
}

}  // namespace qnet
