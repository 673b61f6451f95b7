#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qnet/allocation.hpp"
#include "qnet/fidelity.hpp"
#include "qnet/harness.hpp"
#include "qnet/routing.hpp"
#include "qnet/topology.hpp"
#include "qnet/traffic.hpp"

namespace py = pybind11;
using namespace qnet;

namespace {

OpReliability make_ops(double p1, double p2, double eta) {
  return {p1, p2, eta};
}

DqcPattern parse_pattern(const std::string& name) {
  if (name == "all_pairs") {
    return DqcPattern::AllPairs;
  }
  if (name == "star") {
    return DqcPattern::Star;
  }
  throw std::invalid_argument("pattern must be 'all_pairs' or 'star'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flow-level quantum network simulator: repeater-chain fidelity, "
            "routing and entanglement-rate allocation";

  py::enum_<NodeKind>(m, "NodeKind")
      .value("ENDPOINT", NodeKind::Endpoint)
      .value("REPEATER", NodeKind::Repeater);

  py::class_<Node>(m, "Node")
      .def(py::init([](int id, NodeKind kind, const std::string& label) {
             return Node{id, kind, label};
           }),
           py::arg("id"), py::arg("kind") = NodeKind::Endpoint,
           py::arg("label") = "")
      .def_readonly("id", &Node::id)
      .def_readonly("kind", &Node::kind)
      .def_readonly("label", &Node::label)
      .def("__repr__", [](const Node& n) {
        return "Node(id=" + std::to_string(n.id) + ")";
      });

  py::class_<Link>(m, "Link")
      .def(py::init([](int u, int v, double capacity, double fidelity) {
             return Link{u, v, capacity, fidelity};
           }),
           py::arg("u"), py::arg("v"), py::arg("capacity"),
           py::arg("fidelity"))
      .def_readonly("u", &Link::u)
      .def_readonly("v", &Link::v)
      .def_readonly("capacity", &Link::capacity)
      .def_readonly("elementary_fidelity", &Link::elementary_fidelity);

  py::class_<Network>(m, "Network")
      .def(py::init<std::vector<Node>, std::vector<Link>,
                    std::map<std::string, std::string>>(),
           py::arg("nodes"), py::arg("links"),
           py::arg("metadata") = std::map<std::string, std::string>{})
      .def_property_readonly("nodes", &Network::nodes)
      .def_property_readonly("links", &Network::links)
      .def_property_readonly("metadata", &Network::metadata)
      .def("neighbors", &Network::neighbors, py::arg("id"))
      .def("endpoint_ids", &Network::endpoint_ids)
      .def("__eq__", [](const Network& a, const Network& b) { return a == b; })
      .def("__repr__", [](const Network& net) {
        return "Network(" + std::to_string(net.nodes().size()) + " nodes, " +
               std::to_string(net.links().size()) + " links)";
      });

  m.def("build_grid", &build_grid, py::arg("rows"), py::arg("cols"),
        py::arg("capacity"), py::arg("fidelity"),
        py::arg("interior_repeaters") = false);
  m.def(
      "generate_random",
      [](std::uint64_t seed, int nodes, double edge_prob,
         std::pair<double, double> capacity_range,
         std::pair<double, double> fidelity_range) {
        return generate_random(seed, {nodes, edge_prob, capacity_range.first,
                                      capacity_range.second,
                                      fidelity_range.first,
                                      fidelity_range.second});
      },
      py::arg("seed"), py::arg("nodes"), py::arg("edge_prob"),
      py::arg("capacity_range"), py::arg("fidelity_range"));
  m.def("load_network", &load_network, py::arg("text"));
  m.def("save_network", &save_network, py::arg("net"));

  m.def("werner_weight", &werner_weight, py::arg("fidelity"));
  m.def(
      "fidelity_generic",
      [](double fbar, int num_intermediate, double p1, double p2, double eta) {
        return fidelity_generic({fbar, num_intermediate, make_ops(p1, p2, eta)});
      },
      py::arg("elementary_fidelity"), py::arg("num_intermediate"),
      py::arg("p1") = 1.0, py::arg("p2") = 1.0, py::arg("eta") = 1.0);
  m.def("fidelity_perfect", &fidelity_perfect, py::arg("elementary_fidelity"),
        py::arg("num_intermediate"));
  m.def(
      "path_fidelity",
      [](const std::vector<double>& weights, double p1, double p2, double eta) {
        return path_fidelity(weights, make_ops(p1, p2, eta));
      },
      py::arg("werner_weights"), py::arg("p1") = 1.0, py::arg("p2") = 1.0,
      py::arg("eta") = 1.0);

  py::class_<RepeaterBound>(m, "RepeaterBound")
      .def_property_readonly("bounded", &RepeaterBound::is_bounded)
      .def_property_readonly("unbounded", &RepeaterBound::is_unbounded)
      .def_property_readonly("infeasible", &RepeaterBound::is_infeasible)
      .def_readonly("l_max", &RepeaterBound::l_max)
      .def("__repr__", [](const RepeaterBound& b) {
        if (b.is_bounded()) {
          return "RepeaterBound(l_max=" + std::to_string(b.l_max) + ")";
        }
        return std::string(b.is_unbounded() ? "RepeaterBound(unbounded)"
                                            : "RepeaterBound(infeasible)");
      });
  m.def("max_intermediate_repeaters", &max_intermediate_repeaters,
        py::arg("elementary_fidelity"), py::arg("min_fidelity"));

  py::enum_<TrafficClass>(m, "TrafficClass")
      .value("POINT_TO_POINT", TrafficClass::PointToPoint)
      .value("DQC", TrafficClass::Dqc);

  py::class_<App>(m, "App")
      .def_readonly("id", &App::id)
      .def_readonly("traffic_class", &App::traffic_class)
      .def_readonly("src", &App::src)
      .def_readonly("dst", &App::dst)
      .def_readonly("hosts", &App::hosts)
      .def_readonly("coordinator", &App::coordinator)
      .def_readonly("min_fidelity", &App::min_fidelity)
      .def_readonly("weight", &App::weight)
      .def_readonly("rate_demand", &App::rate_demand)
      .def_static("point_to_point", &App::point_to_point, py::arg("id"),
                  py::arg("src"), py::arg("dst"), py::arg("min_fidelity"),
                  py::arg("weight") = 1.0,
                  py::arg("rate_demand") = std::optional<double>{})
      .def_static(
          "dqc",
          [](int id, std::vector<int> hosts, const std::string& pattern,
             double min_fidelity, double weight,
             std::optional<double> rate_demand, int coordinator) {
            return App::dqc(id, std::move(hosts), parse_pattern(pattern),
                            min_fidelity, weight, rate_demand, coordinator);
          },
          py::arg("id"), py::arg("hosts"), py::arg("pattern") = "all_pairs",
          py::arg("min_fidelity") = 0.5, py::arg("weight") = 1.0,
          py::arg("rate_demand") = std::optional<double>{},
          py::arg("coordinator") = -1);

  py::class_<PairDemand>(m, "PairDemand")
      .def(py::init([](int app_id, int a, int b, double min_fidelity,
                       std::optional<int> coupling_group) {
             return PairDemand{app_id, std::min(a, b), std::max(a, b),
                               min_fidelity, coupling_group};
           }),
           py::arg("app_id"), py::arg("a"), py::arg("b"),
           py::arg("min_fidelity"),
           py::arg("coupling_group") = std::optional<int>{})
      .def_readonly("app_id", &PairDemand::app_id)
      .def_readonly("a", &PairDemand::a)
      .def_readonly("b", &PairDemand::b)
      .def_readonly("min_fidelity", &PairDemand::min_fidelity)
      .def_readonly("coupling_group", &PairDemand::coupling_group);

  m.def("expand_app", &expand_app, py::arg("app"));
  m.def(
      "generate_workload",
      [](std::uint64_t seed, const Network& net, int n_apps, double class_mix,
         std::pair<int, int> dqc_size_range,
         std::pair<double, double> fidelity_floor_range,
         const std::string& dqc_pattern, double weight) {
        WorkloadSpec spec;
        spec.n_apps = n_apps;
        spec.dqc_fraction = class_mix;
        spec.dqc_size_lo = dqc_size_range.first;
        spec.dqc_size_hi = dqc_size_range.second;
        spec.fidelity_floor_lo = fidelity_floor_range.first;
        spec.fidelity_floor_hi = fidelity_floor_range.second;
        spec.dqc_pattern = parse_pattern(dqc_pattern);
        spec.weight = weight;
        return generate_workload(seed, net, spec);
      },
      py::arg("seed"), py::arg("net"), py::arg("n_apps"),
      py::arg("class_mix") = 0.0, py::arg("dqc_size_range") = std::pair(2, 2),
      py::arg("fidelity_floor_range") = std::pair(0.5, 0.5),
      py::arg("dqc_pattern") = "all_pairs", py::arg("weight") = 1.0);
  m.def("load_apps", &load_apps, py::arg("text"));
  m.def("save_apps", &save_apps, py::arg("apps"));

  py::class_<Path>(m, "Path")
      .def_readonly("nodes", &Path::nodes)
      .def_property_readonly("hop_count", &Path::hop_count)
      .def_property_readonly("num_intermediate", &Path::num_intermediate);

  py::class_<FeasiblePath>(m, "FeasiblePath")
      .def_readonly("path", &FeasiblePath::path)
      .def_readonly("fidelity", &FeasiblePath::fidelity);

  m.def("k_shortest_paths", &k_shortest_paths, py::arg("net"), py::arg("src"),
        py::arg("dst"), py::arg("k"));
  m.def(
      "feasible_paths",
      [](const Network& net, const PairDemand& demand, int k, double p1,
         double p2, double eta) {
        return feasible_paths(net, demand, k, make_ops(p1, p2, eta));
      },
      py::arg("net"), py::arg("demand"), py::arg("k") = 4, py::arg("p1") = 1.0,
      py::arg("p2") = 1.0, py::arg("eta") = 1.0);

  py::class_<Assignment>(m, "Assignment")
      .def_readonly("demand", &Assignment::demand)
      .def_readonly("path", &Assignment::path)
      .def_readonly("rate", &Assignment::rate);

  py::class_<Rejection>(m, "Rejection")
      .def_readonly("demand", &Rejection::demand)
      .def_property_readonly("reason", [](const Rejection& r) {
        return reject_reason_name(r.reason);
      });

  py::class_<Allocation>(m, "Allocation")
      .def_readonly("assignments", &Allocation::assignments)
      .def_readonly("residual", &Allocation::residual)
      .def_readonly("rejected", &Allocation::rejected);

  m.def(
      "allocate",
      [](const Network& net, const std::vector<App>& apps,
         const std::string& policy, int k, double p1, double p2, double eta) {
        return allocate(net, apps, {parse_policy(policy)},
                        make_ops(p1, p2, eta), k);
      },
      py::arg("net"), py::arg("apps"), py::arg("policy") = "max_min",
      py::arg("k") = 4, py::arg("p1") = 1.0, py::arg("p2") = 1.0,
      py::arg("eta") = 1.0);
  m.def(
      "brute_force_optimal",
      [](const Network& net, const std::vector<App>& apps,
         const std::string& objective, int k, double p1, double p2,
         double eta) {
        Objective obj;
        if (objective == "max_min_rate") {
          obj = Objective::MaxMinRate;
        } else if (objective == "total_rate") {
          obj = Objective::TotalRate;
        } else {
          throw std::invalid_argument(
              "objective must be 'max_min_rate' or 'total_rate'");
        }
        return brute_force_optimal(net, apps, obj, make_ops(p1, p2, eta), k);
      },
      py::arg("net"), py::arg("apps"), py::arg("objective") = "max_min_rate",
      py::arg("k") = 4, py::arg("p1") = 1.0, py::arg("p2") = 1.0,
      py::arg("eta") = 1.0);

  py::class_<Violation>(m, "Violation")
      .def_property_readonly("kind", [](const Violation& v) {
        return violation_kind_name(v.kind);
      })
      .def_readonly("detail", &Violation::detail)
      .def("__repr__", [](const Violation& v) {
        return violation_kind_name(v.kind) + ": " + v.detail;
      });

  m.def(
      "verify_allocation",
      [](const Network& net, const std::vector<App>& apps,
         const Allocation& alloc, double p1, double p2, double eta) {
        return verify_allocation(net, apps, alloc, make_ops(p1, p2, eta));
      },
      py::arg("net"), py::arg("apps"), py::arg("alloc"), py::arg("p1") = 1.0,
      py::arg("p2") = 1.0, py::arg("eta") = 1.0);
  m.def("save_allocation", &save_allocation, py::arg("net"), py::arg("alloc"));

  m.def(
      "jain_index",
      [](const std::vector<double>& rates) { return jain_index(rates); },
      py::arg("rates"));
  m.def(
      "run_experiment",
      [](const std::string& config_json, int jobs) {
        return metrics_to_csv(
            run_experiment(parse_experiment_config(config_json), jobs));
      },
      py::arg("config_json"), py::arg("jobs") = 1,
      "Runs a campaign config and returns the CSV document");
}
