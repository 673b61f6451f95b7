#include "qnet/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "allocation_internal.hpp"
#include "json.hpp"

namespace qnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Policy parse_policy(const std::string& name) {
  if (name == "greedy_shortest") {
    return Policy::GreedyShortest;
  }
  if (name == "max_min") {
    return Policy::MaxMin;
  }
  if (name == "weighted_max_min") {
    return Policy::WeightedMaxMin;
  }
  throw std::invalid_argument("unknown policy '" + name + "', expected one of: " +
                              [] {
                                std::string all;
                                for (const auto& n : policy_names()) {
                                  all += all.empty() ? n : ", " + n;
                                }
                                return all;
                              }());
}

std::string policy_name(Policy policy) {
  switch (policy) {
    case Policy::GreedyShortest:
      return "greedy_shortest";
    case Policy::MaxMin:
      return "max_min";
    case Policy::WeightedMaxMin:
      return "weighted_max_min";
  }
  return "?";
}

std::vector<std::string> policy_names() {
  return {"greedy_shortest", "max_min", "weighted_max_min"};
}

std::string reject_reason_name(RejectReason reason) {
  return reason == RejectReason::NoFeasiblePath ? "no_feasible_path"
                                                : "starved";
}

std::string violation_kind_name(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::CapacityExceeded:
      return "capacity_exceeded";
    case Violation::Kind::FidelityViolated:
      return "fidelity_violated";
    case Violation::Kind::CouplingViolated:
      return "coupling_violated";
    case Violation::Kind::CapExceeded:
      return "cap_exceeded";
    case Violation::Kind::InvalidPath:
      return "invalid_path";
    case Violation::Kind::UnknownDemand:
      return "unknown_demand";
    case Violation::Kind::NegativeRate:
      return "negative_rate";
  }
  return "?";
}

namespace detail {

std::vector<std::pair<int, int>> usage_of(
    const std::vector<const Path*>& member_paths) {
  std::map<int, int> counts;
  for (const Path* path : member_paths) {
    for (const int li : path->link_indices) {
      ++counts[li];
    }
  }
  return {counts.begin(), counts.end()};
}

PreparedInstance prepare_instance(const Network& net,
                                  const std::vector<App>& apps,
                                  const OpReliability& ops, int k) {
  std::set<int> ids;
  for (const App& app : apps) {
    if (!ids.insert(app.id).second) {
      throw std::invalid_argument("duplicate app id " + std::to_string(app.id));
    }
    validate_app(app, net);
  }

  PreparedInstance instance;
  for (const App& app : apps) {
    const std::vector<PairDemand> demands = expand_app(app);
    std::vector<std::vector<FeasiblePath>> feasible;
    feasible.reserve(demands.size());
    bool all_routable = true;
    for (const PairDemand& demand : demands) {
      feasible.push_back(feasible_paths(net, demand, k, ops));
      all_routable = all_routable && !feasible.back().empty();
    }
    // A Dqc app needs every member pair provisioned at the same rate; one
    // unroutable pair therefore takes the whole app down.
    if (!all_routable) {
      if (app.traffic_class == TrafficClass::PointToPoint) {
        instance.rejected.push_back({demands[0], RejectReason::NoFeasiblePath});
      } else {
        for (const PairDemand& demand : demands) {
          instance.rejected.push_back({demand, RejectReason::NoFeasiblePath});
        }
      }
      continue;
    }

    RateVariable variable;
    variable.app_id = app.id;
    variable.weight = app.weight;
    variable.cap = app.rate_demand ? *app.rate_demand : kInf;
    std::vector<const Path*> chosen;
    for (std::size_t i = 0; i < demands.size(); ++i) {
      variable.members.push_back(instance.demands.size());
      instance.demands.push_back(demands[i]);
      instance.paths.push_back(feasible[i].front().path);
      instance.candidates.push_back(std::move(feasible[i]));
    }
    for (const std::size_t m : variable.members) {
      chosen.push_back(&instance.paths[m]);
    }
    variable.usage = usage_of(chosen);
    instance.variables.push_back(std::move(variable));
  }
  return instance;
}

Allocation finalize_allocation(const Network& net,
                               const PreparedInstance& instance,
                               const std::vector<double>& variable_rates,
                               bool starved_to_rejected) {
  Allocation alloc;
  alloc.rejected = instance.rejected;
  alloc.residual.reserve(net.links().size());
  for (const Link& link : net.links()) {
    alloc.residual.push_back(link.capacity);
  }
  for (std::size_t v = 0; v < instance.variables.size(); ++v) {
    const RateVariable& variable = instance.variables[v];
    const double rate = variable_rates[v];
    if (rate <= 0.0 && starved_to_rejected) {
      for (const std::size_t m : variable.members) {
        alloc.rejected.push_back({instance.demands[m], RejectReason::Starved});
      }
      continue;
    }
    for (const std::size_t m : variable.members) {
      alloc.assignments.push_back(
          {instance.demands[m], instance.paths[m], rate});
    }
    for (const auto& [link, multiplicity] : variable.usage) {
      alloc.residual[link] =
          std::max(0.0, alloc.residual[link] - multiplicity * rate);
    }
  }
  return alloc;
}

void enforce_oracle_guard(const Network& net,
                          const PreparedInstance& instance) {
  std::size_t paths_max = 0;
  for (const auto& candidates : instance.candidates) {
    paths_max = std::max(paths_max, candidates.size());
  }
  if (instance.demands.size() > 8 || net.links().size() > 12 ||
      paths_max > 4) {
    throw std::runtime_error(
        "instance too large for the exhaustive oracle (needs <= 8 demands, "
        "<= 12 links, <= 4 candidate paths per demand)");
  }
}

namespace {

// Progressive filling. All active variables grow at their own speed until a
// link saturates or a rate cap is hit; variables touching a saturated link
// freeze at their current rate. Terminates because every round freezes at
// least one variable or exhausts a link.
std::vector<double> progressive_fill(const Network& net,
                                     const PreparedInstance& instance,
                                     bool weighted) {
  const std::size_t nvars = instance.variables.size();
  const std::size_t nlinks = net.links().size();
  std::vector<double> rates(nvars, 0.0);
  std::vector<bool> frozen(nvars, false);
  std::vector<double> residual(nlinks), original(nlinks);
  for (std::size_t l = 0; l < nlinks; ++l) {
    residual[l] = original[l] = net.links()[l].capacity;
  }
  std::vector<double> speed(nvars, 1.0);
  if (weighted) {
    for (std::size_t v = 0; v < nvars; ++v) {
      speed[v] = instance.variables[v].weight;
    }
  }

  std::size_t active = nvars;
  while (active > 0) {
    std::vector<double> drain(nlinks, 0.0);
    for (std::size_t v = 0; v < nvars; ++v) {
      if (frozen[v]) {
        continue;
      }
      for (const auto& [link, multiplicity] : instance.variables[v].usage) {
        drain[link] += multiplicity * speed[v];
      }
    }
    double delta = kInf;
    for (std::size_t l = 0; l < nlinks; ++l) {
      if (drain[l] > 0.0) {
        delta = std::min(delta, residual[l] / drain[l]);
      }
    }
    for (std::size_t v = 0; v < nvars; ++v) {
      if (!frozen[v] && std::isfinite(instance.variables[v].cap)) {
        delta = std::min(delta, (instance.variables[v].cap - rates[v]) / speed[v]);
      }
    }
    if (!std::isfinite(delta)) {
      break;  // no variable drains any link; cannot happen with simple paths
    }

    for (std::size_t v = 0; v < nvars; ++v) {
      if (!frozen[v]) {
        rates[v] += speed[v] * delta;
      }
    }
    for (std::size_t l = 0; l < nlinks; ++l) {
      if (drain[l] > 0.0) {
        residual[l] = std::max(0.0, residual[l] - drain[l] * delta);
      }
    }

    bool any_frozen = false;
    for (std::size_t v = 0; v < nvars; ++v) {
      if (frozen[v]) {
        continue;
      }
      const RateVariable& variable = instance.variables[v];
      const double cap = variable.cap;
      if (std::isfinite(cap) &&
          rates[v] >= cap - kSaturationTolerance * std::max(1.0, cap)) {
        rates[v] = cap;
        frozen[v] = true;
      } else {
        for (const auto& [link, multiplicity] : variable.usage) {
          if (residual[link] < kSaturationTolerance * original[link]) {
            frozen[v] = true;
            break;
          }
        }
      }
      if (frozen[v]) {
        any_frozen = true;
        --active;
      }
    }
    if (!any_frozen) {
      // Numerical safety net: force progress by freezing everything on the
      // tightest link.
      std::size_t tightest = 0;
      double best = kInf;
      for (std::size_t l = 0; l < nlinks; ++l) {
        if (drain[l] > 0.0 && residual[l] / original[l] < best) {
          best = residual[l] / original[l];
          tightest = l;
        }
      }
      for (std::size_t v = 0; v < nvars; ++v) {
        if (frozen[v]) {
          continue;
        }
        for (const auto& [link, multiplicity] : instance.variables[v].usage) {
          if (link == static_cast<int>(tightest)) {
            frozen[v] = true;
            --active;
            break;
          }
        }
      }
    }
  }
  return rates;
}

// Demands in descending app weight (ties: ascending app id) take the
// residual bottleneck of their fixed path, coupled Dqc members jointly.
std::vector<double> greedy_fill(const Network& net,
                                const PreparedInstance& instance) {
  const std::size_t nvars = instance.variables.size();
  const std::size_t nlinks = net.links().size();
  std::vector<double> rates(nvars, 0.0);
  std::vector<double> residual(nlinks), original(nlinks);
  for (std::size_t l = 0; l < nlinks; ++l) {
    residual[l] = original[l] = net.links()[l].capacity;
  }

  std::vector<std::size_t> order(nvars);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const RateVariable& va = instance.variables[a];
    const RateVariable& vb = instance.variables[b];
    if (va.weight != vb.weight) {
      return va.weight > vb.weight;
    }
    return va.app_id < vb.app_id;
  });

  for (const std::size_t v : order) {
    const RateVariable& variable = instance.variables[v];
    double rate = variable.cap;
    for (const auto& [link, multiplicity] : variable.usage) {
      if (residual[link] < kSaturationTolerance * original[link]) {
        rate = 0.0;
        break;
      }
      rate = std::min(rate, residual[link] / multiplicity);
    }
    rates[v] = std::max(0.0, rate);
    if (rates[v] > 0.0) {
      for (const auto& [link, multiplicity] : variable.usage) {
        residual[link] =
            std::max(0.0, residual[link] - multiplicity * rates[v]);
      }
    }
  }
  return rates;
}

}  // namespace

}  // namespace detail

Allocation allocate(const Network& net, const std::vector<App>& apps,
                    const PolicyConfig& policy, const OpReliability& ops,
                    int k) {
  const detail::PreparedInstance instance =
      detail::prepare_instance(net, apps, ops, k);
  std::vector<double> rates;
  switch (policy.policy) {
    case Policy::GreedyShortest:
      rates = detail::greedy_fill(net, instance);
      break;
    case Policy::MaxMin:
      rates = detail::progressive_fill(net, instance, /*weighted=*/false);
      break;
    case Policy::WeightedMaxMin:
      rates = detail::progressive_fill(net, instance, /*weighted=*/true);
      break;
  }
  return detail::finalize_allocation(net, instance, rates,
                                     /*starved_to_rejected=*/true);
}

namespace {

struct DemandInfo {
  double min_fidelity = 0.0;
  double cap = kInf;
  std::optional<int> coupling_group;
};

std::string pair_str(int a, int b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

std::vector<Violation> verify_allocation(const Network& net,
                                         const std::vector<App>& apps,
                                         const Allocation& alloc,
                                         const OpReliability& ops) {
  std::vector<Violation> violations;

  std::map<std::tuple<int, int, int>, DemandInfo> known;
  for (const App& app : apps) {
    try {
      for (const PairDemand& demand : expand_app(app)) {
        known[{demand.app_id, demand.a, demand.b}] = {
            demand.min_fidelity,
            app.rate_demand ? *app.rate_demand : kInf,
            demand.coupling_group};
      }
    } catch (const std::exception& e) {
      violations.push_back({Violation::Kind::UnknownDemand,
                            std::string("invalid app: ") + e.what()});
    }
  }

  std::vector<double> load(net.links().size(), 0.0);
  std::map<int, std::vector<double>> group_rates;

  for (const Assignment& assignment : alloc.assignments) {
    const PairDemand& demand = assignment.demand;
    const std::string who = "app " + std::to_string(demand.app_id) +
                            " demand " + pair_str(demand.a, demand.b);
    const auto it = known.find({demand.app_id, demand.a, demand.b});
    if (it == known.end()) {
      violations.push_back(
          {Violation::Kind::UnknownDemand, who + " not in the app list"});
      continue;
    }
    const DemandInfo& info = it->second;
    if (assignment.rate < 0.0) {
      violations.push_back({Violation::Kind::NegativeRate,
                            who + " rate " + std::to_string(assignment.rate)});
    }
    if (assignment.rate > info.cap + 1e-9) {
      violations.push_back({Violation::Kind::CapExceeded,
                            who + " rate " + std::to_string(assignment.rate) +
                                " exceeds cap " + std::to_string(info.cap)});
    }

    // Path structure; links are re-derived from the node sequence so a
    // fabricated link_indices field cannot hide an invalid path.
    const std::vector<int>& nodes = assignment.path.nodes;
    bool path_ok = nodes.size() >= 2;
    if (path_ok) {
      const auto [lo, hi] = std::minmax(nodes.front(), nodes.back());
      path_ok = lo == demand.a && hi == demand.b;
      if (!path_ok) {
        violations.push_back({Violation::Kind::InvalidPath,
                              who + " path endpoints do not match the pair"});
      }
    } else {
      violations.push_back(
          {Violation::Kind::InvalidPath, who + " path too short"});
    }
    if (path_ok &&
        std::set<int>(nodes.begin(), nodes.end()).size() != nodes.size()) {
      violations.push_back(
          {Violation::Kind::InvalidPath, who + " path repeats a node"});
      path_ok = false;
    }
    std::vector<double> weights;
    for (std::size_t i = 0; path_ok && i + 1 < nodes.size(); ++i) {
      const int li = net.link_index(nodes[i], nodes[i + 1]);
      if (li < 0) {
        violations.push_back({Violation::Kind::InvalidPath,
                              who + " uses missing link " +
                                  pair_str(nodes[i], nodes[i + 1])});
        path_ok = false;
        break;
      }
      weights.push_back(werner_weight(net.links()[li].elementary_fidelity));
      if (assignment.rate > 0.0) {
        load[li] += assignment.rate;
      }
    }
    if (path_ok && path_fidelity(weights, ops) < info.min_fidelity) {
      violations.push_back(
          {Violation::Kind::FidelityViolated,
           who + " path fidelity below threshold " +
               std::to_string(info.min_fidelity)});
    }
    if (info.coupling_group) {
      group_rates[*info.coupling_group].push_back(assignment.rate);
    }
  }

  for (std::size_t l = 0; l < load.size(); ++l) {
    const Link& link = net.links()[l];
    if (load[l] > link.capacity + 1e-9) {
      violations.push_back({Violation::Kind::CapacityExceeded,
                            "link " + std::to_string(link.u) + "-" +
                                std::to_string(link.v) + " load " +
                                std::to_string(load[l]) + " exceeds capacity " +
                                std::to_string(link.capacity)});
    }
  }
  for (const auto& [group, rates] : group_rates) {
    const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
    if (*hi - *lo > 1e-9) {
      violations.push_back({Violation::Kind::CouplingViolated,
                            "coupling group " + std::to_string(group) +
                                " rates span [" + std::to_string(*lo) + ", " +
                                std::to_string(*hi) + "]"});
    }
  }
  return violations;
}

std::string save_allocation(const Network& net, const Allocation& alloc) {
  nlohmann::json doc;
  doc["assignments"] = nlohmann::json::array();
  for (const Assignment& assignment : alloc.assignments) {
    doc["assignments"].push_back({{"app_id", assignment.demand.app_id},
                                  {"pair", {assignment.demand.a,
                                            assignment.demand.b}},
                                  {"path", assignment.path.nodes},
                                  {"rate", assignment.rate}});
  }
  doc["residual"] = nlohmann::json::object();
  for (std::size_t l = 0; l < alloc.residual.size(); ++l) {
    const Link& link = net.links()[l];
    doc["residual"][std::to_string(link.u) + "-" + std::to_string(link.v)] =
        alloc.residual[l];
  }
  doc["rejected"] = nlohmann::json::array();
  for (const Rejection& rejection : alloc.rejected) {
    doc["rejected"].push_back({{"app_id", rejection.demand.app_id},
                               {"pair", {rejection.demand.a,
                                         rejection.demand.b}},
                               {"reason", reject_reason_name(rejection.reason)}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace qnet
