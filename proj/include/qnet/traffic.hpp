#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnet/topology.hpp"

namespace qnet {

enum class TrafficClass { PointToPoint, Dqc };

// Communication pattern of a distributed-quantum-computing application:
// entanglement between every host pair, or between a coordinator and each
// other host.
enum class DqcPattern { AllPairs, Star };

struct App {
  int id = 0;
  TrafficClass traffic_class = TrafficClass::PointToPoint;

  // PointToPoint endpoints.
  int src = -1;
  int dst = -1;

  // Dqc hosts (>= 2 distinct) and pattern; coordinator only for Star.
  std::vector<int> hosts;
  DqcPattern pattern = DqcPattern::AllPairs;
  int coordinator = -1;

  double min_fidelity = 0.5;
  double weight = 1.0;
  std::optional<double> rate_demand;  // absent: elastic

  static App point_to_point(int id, int src, int dst, double min_fidelity,
                            double weight = 1.0,
                            std::optional<double> rate_demand = std::nullopt);
  static App dqc(int id, std::vector<int> hosts, DqcPattern pattern,
                 double min_fidelity, double weight = 1.0,
                 std::optional<double> rate_demand = std::nullopt,
                 int coordinator = -1);
};

// Unit of allocation: one endpoint pair that needs entangled pairs at a
// minimum fidelity. All demands of a Dqc app carry the app id as coupling
// group and must be provisioned at equal rate.
struct PairDemand {
  int app_id = 0;
  int a = 0;  // canonical a < b
  int b = 0;
  double min_fidelity = 0.5;
  std::optional<int> coupling_group;

  bool operator==(const PairDemand&) const = default;
};

// Structural validation (class shape, ranges) independent of any network.
void validate_app(const App& app);

// Full validation against a network: endpoints exist and are Endpoint nodes.
void validate_app(const App& app, const Network& net);

// PointToPoint -> 1 demand; Dqc AllPairs -> C(|H|, 2); Dqc Star -> |H| - 1.
// Demands are emitted in ascending canonical pair order.
std::vector<PairDemand> expand_app(const App& app);
std::vector<PairDemand> expand_apps(const std::vector<App>& apps);

struct WorkloadSpec {
  int n_apps = 1;
  double dqc_fraction = 0.0;  // probability that an app is Dqc
  int dqc_size_lo = 2;
  int dqc_size_hi = 2;
  double fidelity_floor_lo = 0.5;  // min_fidelity drawn uniformly in range
  double fidelity_floor_hi = 0.5;
  DqcPattern dqc_pattern = DqcPattern::AllPairs;
  double weight = 1.0;
};

// Seeded workload generator; a pure function of (seed, net, spec). Endpoints
// are drawn uniformly without replacement per app, the class by
// dqc_fraction, the fidelity floor uniformly in its range.
std::vector<App> generate_workload(std::uint64_t seed, const Network& net,
                                   const WorkloadSpec& spec);

// JSON array of app objects; see README for the schema.
std::vector<App> load_apps(const std::string& json_text);
std::string save_apps(const std::vector<App>& apps);

}  // namespace qnet
