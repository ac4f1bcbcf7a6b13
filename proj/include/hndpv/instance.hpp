#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hndpv/errors.hpp"
#include "hndpv/matrix.hpp"

namespace hndpv {

// Sentinel for hubs with unrestricted capacity.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Uniform fleet parameters. Primary vehicles run on inter-hub arcs, secondary
// vehicles on hub-to-node access arcs.
struct VehicleConfig {
  double Q = 0.0; // primary capacity
  double q = 0.0; // secondary capacity
  double B = 0.0; // primary unit traveling cost per distance
  double b = 0.0; // secondary unit traveling cost per distance
  double G = 0.0; // primary fixed utilization cost
  double g = 0.0; // secondary fixed utilization cost

  bool operator==(const VehicleConfig&) const = default;
};

// The L1-L4 presets (all fixed utilization costs zero).
std::optional<VehicleConfig> vehicle_preset(const std::string& label);
// "L1".."L4" when the config matches a preset, "custom" otherwise.
std::string vehicle_label(const VehicleConfig& v);

enum class NetworkMode { Complete, General };
enum class CapacityMode { Tight, Loose, Uncapacitated };

char capacity_mode_letter(CapacityMode m);

// Immutable problem data for one solve. Construct via load_instance /
// import_ap or fill the fields and call finalize().
struct Instance {
  std::string name;
  int n = 0;
  std::vector<int> hubs; // candidate hub nodes, sorted ascending
  Matrix flow;           // n x n origin-destination demand w_ij
  bool has_coords = false;
  std::vector<std::array<double, 2>> coords;
  Matrix distance; // n x n, symmetric, zero diagonal
  std::vector<double> fixed_cost;   // per candidate, aligned with hubs
  std::vector<double> hub_capacity; // per candidate, kUnbounded if unrestricted
  VehicleConfig vehicle;
  std::optional<int> p_hubs;
  NetworkMode network = NetworkMode::Complete;
  std::optional<CapacityMode> capacity_mode; // set by import_ap, label only

  // Derived on finalize().
  std::vector<double> origin_total; // O_i = sum_j w_ij
  std::vector<double> dest_total;   // D_i = sum_j w_ji

  int hub_count() const { return static_cast<int>(hubs.size()); }
  bool uncapacitated() const;
  double total_flow() const;
  // Position of node h in hubs, -1 if not a candidate.
  int hub_index(int node) const;
  std::string label() const; // e.g. "20T-L1" when mode/config are known

  // Computes distance from coords when absent, fills O/D totals, and checks
  // all invariants. Throws ValidationError.
  void finalize();
};

// Non-fatal advisories, e.g. an economies-of-scale ratio B/Q >= b/q.
std::vector<std::string> instance_warnings(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text, const std::string& name);

// AP raw layout: n, then n coordinate pairs, n*n flows row-major, n fixed
// costs, n tight capacities, n loose capacities, whitespace-separated.
Instance import_ap(const std::string& path, CapacityMode mode,
                   const VehicleConfig& vehicle);

// Finite-support demand scenarios over the same node set.
struct ScenarioSet {
  std::vector<Matrix> flows;
  std::vector<double> probabilities;

  int count() const { return static_cast<int>(flows.size()); }
  void validate(int n) const; // throws ValidationError
};

// Per scenario: draw pi_i ~ U[0.5, 1.5] per node, then
// w^s_ij ~ Poisson(pi_i * pi_j * w_ij). Probabilities are uniform 1/m.
ScenarioSet generate_scenarios(const Instance& inst, int m, std::uint64_t seed);

ScenarioSet load_scenarios(const std::string& path, int n);
void save_scenarios(const ScenarioSet& scen, const std::string& path);

} // namespace hndpv
