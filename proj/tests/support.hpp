#pragma once

#include <random>
#include <vector>

#include "hndpv/instance.hpp"
#include "hndpv/rng.hpp"

namespace testsupport {

using hndpv::Instance;
using hndpv::Matrix;

// Three-node micro instance with a hand-computable optimum (TC 1750, hub 1).
// Nodes 0..2; d(0,1)=10, d(0,2)=20, d(1,2)=15; Q=100, q=50, B=10, b=5,
// G=g=0, F=1000 each, uncapacitated.
inline Instance t3() {
  Instance inst;
  inst.name = "t3";
  inst.n = 3;
  inst.flow = Matrix(3, 3);
  inst.flow(0, 1) = 60;
  inst.flow(0, 2) = 50;
  inst.flow(1, 0) = 30;
  inst.flow(1, 2) = 70;
  inst.flow(2, 0) = 20;
  inst.flow(2, 1) = 40;
  inst.distance = Matrix(3, 3);
  inst.distance(0, 1) = inst.distance(1, 0) = 10;
  inst.distance(0, 2) = inst.distance(2, 0) = 20;
  inst.distance(1, 2) = inst.distance(2, 1) = 15;
  inst.fixed_cost = {1000, 1000, 1000};
  inst.hub_capacity = {hndpv::kUnbounded, hndpv::kUnbounded, hndpv::kUnbounded};
  inst.vehicle = {100, 50, 10, 5, 0, 0};
  inst.finalize();
  return inst;
}

// Random solvable instance in the oracle-verifiable size range. Flows are
// small integers with zeros mixed in; capacities per mode are generated so a
// feasible assignment always exists (verified by construction: every ratio
// keeps two hubs sufficient).
inline Instance random_instance(std::mt19937_64& gen, int n,
                                hndpv::CapacityMode cap_mode,
                                const hndpv::VehicleConfig& vehicle,
                                std::optional<int> p_hubs = std::nullopt) {
  using hndpv::rng::uniform;
  Instance inst;
  inst.name = "rand" + std::to_string(n);
  inst.n = n;
  inst.has_coords = true;
  inst.coords.resize(n);
  for (int i = 0; i < n; ++i)
    inst.coords[i] = {uniform(gen, 0.0, 100.0), uniform(gen, 0.0, 100.0)};
  inst.flow = Matrix(n, n);
  double total = 0.0;
  std::vector<double> origin(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double u = uniform(gen, 0.0, 1.0);
      double w = u < 0.3 ? 0.0 : std::floor(uniform(gen, 1.0, 400.0));
      inst.flow(i, j) = w;
      origin[i] += w;
      total += w;
    }
  for (int i = 0; i < n; ++i)
    inst.fixed_cost.push_back(std::floor(uniform(gen, 2000.0, 20000.0)));
  double max_origin = 0.0;
  for (double o : origin) max_origin = std::max(max_origin, o);
  switch (cap_mode) {
    case hndpv::CapacityMode::Uncapacitated:
      inst.hub_capacity.assign(n, hndpv::kUnbounded);
      break;
    case hndpv::CapacityMode::Tight:
      // max_origin + half the total keeps a two-hub split feasible for any
      // demand pattern while still binding single-hub designs.
      for (int i = 0; i < n; ++i)
        inst.hub_capacity.push_back(max_origin + std::floor(uniform(gen, 0.5, 0.7) * total));
      break;
    case hndpv::CapacityMode::Loose:
      for (int i = 0; i < n; ++i)
        inst.hub_capacity.push_back(max_origin + std::floor(uniform(gen, 0.9, 1.3) * total));
      break;
  }
  inst.capacity_mode = cap_mode;
  inst.vehicle = vehicle;
  inst.p_hubs = p_hubs;
  inst.finalize();
  return inst;
}

inline hndpv::VehicleConfig preset(int idx) {
  return *hndpv::vehicle_preset("L" + std::to_string(idx));
}

} // namespace testsupport
