#include "qnet/traffic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "qnet/fidelity.hpp"
#include "qnet/rng.hpp"

namespace qnet {

namespace {

using nlohmann::json;

void check_app_ranges(const App& app) {
  if (!(app.min_fidelity > kWernerFloor && app.min_fidelity <= 1.0)) {
    throw std::invalid_argument("app " + std::to_string(app.id) +
                                ": min_fidelity = " +
                                std::to_string(app.min_fidelity) +
                                " outside (0.25, 1]");
  }
  if (!(app.weight > 0.0)) {
    throw std::invalid_argument("app " + std::to_string(app.id) +
                                ": weight must be positive");
  }
  if (app.rate_demand && !(*app.rate_demand > 0.0)) {
    throw std::invalid_argument("app " + std::to_string(app.id) +
                                ": rate_demand must be positive when set");
  }
}

PairDemand make_demand(const App& app, int a, int b) {
  PairDemand demand;
  demand.app_id = app.id;
  demand.a = std::min(a, b);
  demand.b = std::max(a, b);
  demand.min_fidelity = app.min_fidelity;
  if (app.traffic_class == TrafficClass::Dqc) {
    demand.coupling_group = app.id;
  }
  return demand;
}

}  // namespace

App App::point_to_point(int id, int src, int dst, double min_fidelity,
                        double weight, std::optional<double> rate_demand) {
  App app;
  app.id = id;
  app.traffic_class = TrafficClass::PointToPoint;
  app.src = src;
  app.dst = dst;
  app.min_fidelity = min_fidelity;
  app.weight = weight;
  app.rate_demand = rate_demand;
  return app;
}

App App::dqc(int id, std::vector<int> hosts, DqcPattern pattern,
             double min_fidelity, double weight,
             std::optional<double> rate_demand, int coordinator) {
  App app;
  app.id = id;
  app.traffic_class = TrafficClass::Dqc;
  app.hosts = std::move(hosts);
  app.pattern = pattern;
  app.coordinator =
      coordinator >= 0 ? coordinator
                       : (app.hosts.empty() ? -1 : app.hosts.front());
  app.min_fidelity = min_fidelity;
  app.weight = weight;
  app.rate_demand = rate_demand;
  return app;
}

void validate_app(const App& app) {
  check_app_ranges(app);
  if (app.traffic_class == TrafficClass::PointToPoint) {
    if (app.src == app.dst) {
      throw std::invalid_argument("app " + std::to_string(app.id) +
                                  ": src and dst must differ");
    }
  } else {
    std::set<int> distinct(app.hosts.begin(), app.hosts.end());
    if (distinct.size() < 2 || distinct.size() != app.hosts.size()) {
      throw std::invalid_argument("app " + std::to_string(app.id) +
                                  ": needs >= 2 distinct hosts");
    }
    if (app.pattern == DqcPattern::Star && distinct.count(app.coordinator) == 0) {
      throw std::invalid_argument("app " + std::to_string(app.id) +
                                  ": coordinator " +
                                  std::to_string(app.coordinator) +
                                  " not among hosts");
    }
  }
}

void validate_app(const App& app, const Network& net) {
  validate_app(app);
  std::vector<int> referenced;
  if (app.traffic_class == TrafficClass::PointToPoint) {
    referenced = {app.src, app.dst};
  } else {
    referenced = app.hosts;
  }
  for (const int id : referenced) {
    if (!net.has_node(id)) {
      throw std::invalid_argument("app " + std::to_string(app.id) +
                                  ": node " + std::to_string(id) +
                                  " not in the network");
    }
    if (net.node(id).kind != NodeKind::Endpoint) {
      throw std::invalid_argument("app " + std::to_string(app.id) +
                                  ": node " + std::to_string(id) +
                                  " is a repeater, not an endpoint");
    }
  }
}

std::vector<PairDemand> expand_app(const App& app) {
  validate_app(app);
  std::vector<PairDemand> demands;
  if (app.traffic_class == TrafficClass::PointToPoint) {
    demands.push_back(make_demand(app, app.src, app.dst));
    return demands;
  }
  std::vector<int> hosts = app.hosts;
  std::sort(hosts.begin(), hosts.end());
  if (app.pattern == DqcPattern::AllPairs) {
    for (std::size_t i = 0; i < hosts.size(); ++i) {
      for (std::size_t j = i + 1; j < hosts.size(); ++j) {
        demands.push_back(make_demand(app, hosts[i], hosts[j]));
      }
    }
  } else {
    for (const int host : hosts) {
      if (host != app.coordinator) {
        demands.push_back(make_demand(app, app.coordinator, host));
      }
    }
  }
  return demands;
}

std::vector<PairDemand> expand_apps(const std::vector<App>& apps) {
  std::vector<PairDemand> demands;
  for (const App& app : apps) {
    auto expanded = expand_app(app);
    demands.insert(demands.end(), expanded.begin(), expanded.end());
  }
  return demands;
}

std::vector<App> generate_workload(std::uint64_t seed, const Network& net,
                                   const WorkloadSpec& spec) {
  if (spec.n_apps < 0) {
    throw std::invalid_argument("n_apps must be >= 0");
  }
  if (!(spec.dqc_fraction >= 0.0 && spec.dqc_fraction <= 1.0)) {
    throw std::invalid_argument("class mix must be in [0, 1]");
  }
  if (spec.dqc_size_lo < 2 || spec.dqc_size_lo > spec.dqc_size_hi) {
    throw std::invalid_argument("dqc size range invalid: [" +
                                std::to_string(spec.dqc_size_lo) + ", " +
                                std::to_string(spec.dqc_size_hi) + "]");
  }
  if (!(spec.fidelity_floor_lo > kWernerFloor &&
        spec.fidelity_floor_hi <= 1.0 &&
        spec.fidelity_floor_lo <= spec.fidelity_floor_hi)) {
    throw std::invalid_argument("fidelity floor range outside (0.25, 1]");
  }

  const std::vector<int> endpoints = net.endpoint_ids();
  const std::size_t needed =
      spec.dqc_fraction > 0.0 ? static_cast<std::size_t>(spec.dqc_size_hi) : 2;
  if (endpoints.size() < needed) {
    throw std::runtime_error(
        "network has " + std::to_string(endpoints.size()) +
        " endpoints, workload needs at least " + std::to_string(needed));
  }

  Rng rng(seed);
  std::vector<App> apps;
  apps.reserve(static_cast<std::size_t>(spec.n_apps));
  for (int i = 0; i < spec.n_apps; ++i) {
    const bool is_dqc = rng.uniform01() < spec.dqc_fraction;
    const double floor =
        rng.uniform(spec.fidelity_floor_lo, spec.fidelity_floor_hi);
    if (is_dqc) {
      const int size = rng.uniform_int(spec.dqc_size_lo, spec.dqc_size_hi);
      std::vector<int> hosts =
          rng.sample(endpoints, static_cast<std::size_t>(size));
      const int coordinator = hosts.front();  // first drawn host coordinates
      apps.push_back(App::dqc(i, std::move(hosts), spec.dqc_pattern, floor,
                              spec.weight, std::nullopt, coordinator));
    } else {
      const std::vector<int> pair = rng.sample(endpoints, 2);
      apps.push_back(App::point_to_point(i, pair[0], pair[1], floor,
                                         spec.weight));
    }
  }
  return apps;
}

namespace {

std::string pattern_name(DqcPattern pattern) {
  return pattern == DqcPattern::AllPairs ? "all_pairs" : "star";
}

}  // namespace

std::vector<App> load_apps(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw std::runtime_error("apps document must be a JSON array");
  }

  std::vector<App> apps;
  std::set<int> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "apps[" + std::to_string(i) + "]";
    const json& ja = doc[i];
    if (!ja.is_object()) {
      throw std::runtime_error(where + ": expected an object");
    }
    App app;
    if (!ja.contains("id") || !ja["id"].is_number_integer()) {
      throw std::runtime_error(where + ".id: expected an integer");
    }
    app.id = ja["id"].get<int>();
    if (!ids.insert(app.id).second) {
      throw std::runtime_error(where + ": duplicate app id " +
                               std::to_string(app.id));
    }
    const json& cls = ja.contains("class") ? ja["class"] : json();
    if (cls == "p2p") {
      app.traffic_class = TrafficClass::PointToPoint;
      if (!ja.contains("src") || !ja.contains("dst")) {
        throw std::runtime_error(where + ": p2p app needs src and dst");
      }
      app.src = ja["src"].get<int>();
      app.dst = ja["dst"].get<int>();
    } else if (cls == "dqc") {
      app.traffic_class = TrafficClass::Dqc;
      if (!ja.contains("hosts") || !ja["hosts"].is_array()) {
        throw std::runtime_error(where + ": dqc app needs a hosts array");
      }
      app.hosts = ja["hosts"].get<std::vector<int>>();
      const std::string pat =
          ja.contains("pattern") ? ja["pattern"].get<std::string>()
                                 : "all_pairs";
      if (pat == "all_pairs") {
        app.pattern = DqcPattern::AllPairs;
      } else if (pat == "star") {
        app.pattern = DqcPattern::Star;
      } else {
        throw std::runtime_error(where + ".pattern: expected 'all_pairs' or "
                                 "'star', got '" + pat + "'");
      }
      if (app.pattern == DqcPattern::Star) {
        if (!ja.contains("coordinator")) {
          throw std::runtime_error(where + ": star pattern needs a coordinator");
        }
        app.coordinator = ja["coordinator"].get<int>();
      }
    } else {
      throw std::runtime_error(where + ".class: expected 'p2p' or 'dqc'");
    }
    if (!ja.contains("min_fidelity") || !ja["min_fidelity"].is_number()) {
      throw std::runtime_error(where + ".min_fidelity: expected a number");
    }
    app.min_fidelity = ja["min_fidelity"].get<double>();
    if (ja.contains("weight")) {
      app.weight = ja["weight"].get<double>();
    }
    if (ja.contains("rate_demand") && !ja["rate_demand"].is_null()) {
      app.rate_demand = ja["rate_demand"].get<double>();
    }
    try {
      validate_app(app);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    apps.push_back(std::move(app));
  }
  return apps;
}

std::string save_apps(const std::vector<App>& apps) {
  json doc = json::array();
  for (const App& app : apps) {
    json ja{{"id", app.id},
            {"min_fidelity", app.min_fidelity},
            {"weight", app.weight}};
    if (app.traffic_class == TrafficClass::PointToPoint) {
      ja["class"] = "p2p";
      ja["src"] = app.src;
      ja["dst"] = app.dst;
    } else {
      ja["class"] = "dqc";
      ja["hosts"] = app.hosts;
      ja["pattern"] = pattern_name(app.pattern);
      if (app.pattern == DqcPattern::Star) {
        ja["coordinator"] = app.coordinator;
      }
    }
    if (app.rate_demand) {
      ja["rate_demand"] = *app.rate_demand;
    }
    doc.push_back(std::move(ja));
  }
  return doc.dump(2) + "\n";
}

}  // namespace qnet
