#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnet/allocation.hpp"
#include "qnet/fidelity.hpp"
#include "qnet/harness.hpp"
#include "qnet/topology.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;   // validation / data failures
constexpr int kExitUsage = 2;  // bad flags or domain violations

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out << content;
}

// Each subcommand has one natural output format; --format exists so scripts
// can pin it and fail loudly instead of misparsing.
int check_format(const std::string& format, const std::string& natural) {
  if (format != natural) {
    std::cerr << "error: unsupported format '" << format << "' (only '"
              << natural << "' here)\n";
    return kExitUsage;
  }
  return kExitOk;
}

struct TopoGenerateArgs {
  std::string grid;
  bool random = false;
  std::uint64_t seed = 0;
  int nodes = 0;
  double edge_prob = 0.5;
  double capacity = 10.0;
  double fidelity = 0.95;
  std::vector<double> capacity_range;
  std::vector<double> fidelity_range;
  bool interior_repeaters = false;
  std::string output;
  std::string format = "json";
};

int run_topo_generate(const TopoGenerateArgs& args) {
  try {
    qnet::Network net = [&] {
      if (!args.grid.empty()) {
        int rows = 0, cols = 0;
        char sep = 0;
        std::istringstream dims(args.grid);
        if (!(dims >> rows >> sep >> cols) || sep != 'x' || !dims.eof()) {
          throw std::invalid_argument("--grid expects ROWSxCOLS, got '" +
                                      args.grid + "'");
        }
        return qnet::build_grid(rows, cols, args.capacity, args.fidelity,
                                args.interior_repeaters);
      }
      qnet::RandomGraphSpec spec;
      spec.nodes = args.nodes;
      spec.edge_prob = args.edge_prob;
      spec.capacity_lo = args.capacity_range.empty() ? args.capacity
                                                     : args.capacity_range[0];
      spec.capacity_hi = args.capacity_range.empty() ? args.capacity
                                                     : args.capacity_range[1];
      spec.fidelity_lo = args.fidelity_range.empty() ? args.fidelity
                                                     : args.fidelity_range[0];
      spec.fidelity_hi = args.fidelity_range.empty() ? args.fidelity
                                                     : args.fidelity_range[1];
      return qnet::generate_random(args.seed, spec);
    }();
    write_output(args.output, qnet::save_network(net));
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_topo_validate(const std::string& input) {
  try {
    const qnet::Network net = qnet::load_network(read_file(input));
    std::cerr << "valid: " << net.nodes().size() << " nodes, "
              << net.links().size() << " links\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitData;
  }
}

struct FidelityArgs {
  double fbar = 0.0;
  int num_intermediate = 0;
  double p1 = 1.0;
  double p2 = 1.0;
  double eta = 1.0;
  bool invert = false;
  double fmin = 0.0;
};

int run_fidelity(const FidelityArgs& args) {
  try {
    if (args.invert) {
      const auto bound = qnet::max_intermediate_repeaters(args.fbar, args.fmin);
      if (bound.is_bounded()) {
        std::printf("%d\n", bound.l_max);
      } else {
        std::printf("%s\n", bound.is_unbounded() ? "unbounded" : "infeasible");
      }
      return kExitOk;
    }
    const double result = qnet::fidelity_generic(
        {args.fbar, args.num_intermediate, {args.p1, args.p2, args.eta}});
    std::printf("%.12g\n", result);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

struct AllocateArgs {
  std::string network;
  std::string apps;
  std::string policy;
  int k = 4;
  double p1 = 1.0;
  double p2 = 1.0;
  double eta = 1.0;
  std::string output;
  std::string format = "json";
};

int run_allocate(const AllocateArgs& args) {
  qnet::PolicyConfig policy;
  try {
    policy.policy = qnet::parse_policy(args.policy);
    if (args.k < 1) {
      throw std::invalid_argument("--k must be >= 1");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const qnet::Network net = qnet::load_network(read_file(args.network));
    const std::vector<qnet::App> apps = qnet::load_apps(read_file(args.apps));
    const qnet::Allocation alloc = qnet::allocate(
        net, apps, policy, {args.p1, args.p2, args.eta}, args.k);
    write_output(args.output, qnet::save_allocation(net, alloc));
    return kExitOk;  // rejected demands are data, not failure
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

struct SimulateArgs {
  std::string config;
  int jobs = 1;
  std::string output;
  std::string format = "csv";
};

int run_simulate(const SimulateArgs& args) {
  try {
    const qnet::ExperimentConfig config =
        qnet::parse_experiment_config(read_file(args.config));
    const std::vector<qnet::RunMetrics> rows =
        qnet::run_experiment(config, args.jobs);
    write_output(args.output, qnet::metrics_to_csv(rows));
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flow-level quantum network simulator and rate allocator"};
  app.require_subcommand(1);

  // topo
  CLI::App* topo = app.add_subcommand("topo", "Topology generation and validation");
  topo->require_subcommand(1);
  TopoGenerateArgs topo_args;
  CLI::App* topo_generate = topo->add_subcommand("generate", "Generate a network");
  topo_generate->add_option("--grid", topo_args.grid, "Grid ROWSxCOLS");
  CLI::Option* random_flag =
      topo_generate->add_flag("--random", topo_args.random, "Erdos-Renyi graph");
  topo_generate->add_option("--seed", topo_args.seed, "Random seed");
  topo_generate->add_option("--nodes", topo_args.nodes, "Node count (random)");
  topo_generate->add_option("--edge-prob", topo_args.edge_prob,
                            "Edge probability (random)");
  topo_generate->add_option("--capacity", topo_args.capacity,
                            "Link capacity in EPR pairs/s");
  topo_generate->add_option("--fidelity", topo_args.fidelity,
                            "Elementary link fidelity");
  topo_generate
      ->add_option("--capacity-range", topo_args.capacity_range,
                   "Capacity range LO HI (random)")
      ->expected(2);
  topo_generate
      ->add_option("--fidelity-range", topo_args.fidelity_range,
                   "Fidelity range LO HI (random)")
      ->expected(2);
  topo_generate->add_flag("--interior-repeaters", topo_args.interior_repeaters,
                          "Mark interior grid nodes as repeaters");
  topo_generate->add_option("--output,-o", topo_args.output,
                            "Output path (default stdout)");
  topo_generate->add_option("--format", topo_args.format, "Output format");

  std::string validate_input;
  CLI::App* topo_validate = topo->add_subcommand("validate", "Validate a network file");
  topo_validate->add_option("--input", validate_input, "Network JSON file")
      ->required();

  // fidelity
  FidelityArgs fidelity_args;
  CLI::App* fidelity = app.add_subcommand(
      "fidelity", "End-to-end fidelity of a repeater swap chain");
  fidelity->add_option("--fbar", fidelity_args.fbar, "Elementary fidelity")
      ->required();
  fidelity->add_option("--L", fidelity_args.num_intermediate,
                       "Intermediate repeater count");
  fidelity->add_option("--p1", fidelity_args.p1, "One-qubit op reliability");
  fidelity->add_option("--p2", fidelity_args.p2, "Two-qubit op reliability");
  fidelity->add_option("--eta", fidelity_args.eta, "Measurement parameter");
  CLI::Option* invert_flag = fidelity->add_flag(
      "--invert", fidelity_args.invert, "Largest L meeting --fmin instead");
  fidelity->add_option("--fmin", fidelity_args.fmin, "Fidelity threshold")
      ->needs(invert_flag);

  // allocate
  AllocateArgs allocate_args;
  CLI::App* allocate = app.add_subcommand("allocate", "Allocate rates to demands");
  allocate->add_option("--network", allocate_args.network, "Network JSON file")
      ->required();
  allocate->add_option("--apps", allocate_args.apps, "Apps JSON file")
      ->required();
  allocate->add_option("--policy", allocate_args.policy,
                       "One of: greedy_shortest, max_min, weighted_max_min")
      ->required();
  allocate->add_option("--k", allocate_args.k, "Candidate paths per demand");
  allocate->add_option("--p1", allocate_args.p1, "One-qubit op reliability");
  allocate->add_option("--p2", allocate_args.p2, "Two-qubit op reliability");
  allocate->add_option("--eta", allocate_args.eta, "Measurement parameter");
  allocate->add_option("--output,-o", allocate_args.output,
                       "Output path (default stdout)");
  allocate->add_option("--format", allocate_args.format, "Output format");

  // simulate
  SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a campaign config");
  simulate->add_option("--config", simulate_args.config, "Campaign JSON config")
      ->required();
  simulate->add_option("--jobs", simulate_args.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--output,-o", simulate_args.output,
                       "Output path (default stdout)");
  simulate->add_option("--format", simulate_args.format, "Output format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (topo_generate->parsed()) {
    if (topo_args.grid.empty() == !*random_flag) {
      std::cerr << "error: pass exactly one of --grid or --random\n";
      return kExitUsage;
    }
    if (const int rc = check_format(topo_args.format, "json"); rc != kExitOk) {
      return rc;
    }
    return run_topo_generate(topo_args);
  }
  if (topo_validate->parsed()) {
    return run_topo_validate(validate_input);
  }
  if (fidelity->parsed()) {
    if (fidelity_args.invert && fidelity->count("--fmin") == 0) {
      std::cerr << "error: --invert needs --fmin\n";
      return kExitUsage;
    }
    return run_fidelity(fidelity_args);
  }
  if (allocate->parsed()) {
    if (const int rc = check_format(allocate_args.format, "json");
        rc != kExitOk) {
      return rc;
    }
    return run_allocate(allocate_args);
  }
  if (simulate->parsed()) {
    if (const int rc = check_format(simulate_args.format, "csv");
        rc != kExitOk) {
      return rc;
    }
    return run_simulate(simulate_args);
  }
  return kExitUsage;
}
