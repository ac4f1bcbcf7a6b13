#include "hndpv/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hndpv/rng.hpp"
#include "json.hpp"

namespace hndpv {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::pair<const char*, VehicleConfig> kPresets[] = {
    {"L1", {600, 100, 600, 260, 0, 0}},
    {"L2", {600, 150, 600, 300, 0, 0}},
    {"L3", {320, 100, 500, 260, 0, 0}},
    {"L4", {320, 150, 500, 300, 0, 0}},
};

std::string file_stem(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

Matrix parse_matrix(const ordered_json& j, int n, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ParseError("field '" + field + "' must be an " + std::to_string(n) +
                     "x" + std::to_string(n) + " matrix");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ParseError("field '" + field + "' row " + std::to_string(r) +
                       " has wrong length");
    for (int c = 0; c < n; ++c) {
      if (!row[c].is_number())
        throw ParseError("field '" + field + "' entry (" + std::to_string(r) +
                         "," + std::to_string(c) + ") is not a number");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

} // namespace

std::optional<VehicleConfig> vehicle_preset(const std::string& label) {
  for (const auto& [name, cfg] : kPresets)
    if (label == name) return cfg;
  return std::nullopt;
}

std::string vehicle_label(const VehicleConfig& v) {
  for (const auto& [name, cfg] : kPresets)
    if (cfg == v) return name;
  return "custom";
}

char capacity_mode_letter(CapacityMode m) {
  switch (m) {
    case CapacityMode::Tight:
      return 'T';
    case CapacityMode::Loose:
      return 'L';
    case CapacityMode::Uncapacitated:
      return 'U';
  }
  return '?';
}

bool Instance::uncapacitated() const {
  return std::all_of(hub_capacity.begin(), hub_capacity.end(),
                     [](double u) { return u == kUnbounded; });
}

double Instance::total_flow() const {
  return std::accumulate(flow.data().begin(), flow.data().end(), 0.0);
}

int Instance::hub_index(int node) const {
  auto it = std::lower_bound(hubs.begin(), hubs.end(), node);
  if (it == hubs.end() || *it != node) return -1;
  return static_cast<int>(it - hubs.begin());
}

std::string Instance::label() const {
  std::string l = std::to_string(n);
  if (capacity_mode) l += capacity_mode_letter(*capacity_mode);
  l += "-" + vehicle_label(vehicle);
  return l;
}

void Instance::finalize() {
  if (n <= 0) throw ValidationError("node count must be positive");
  if (hubs.empty()) {
    hubs.resize(n);
    std::iota(hubs.begin(), hubs.end(), 0);
  }
  std::sort(hubs.begin(), hubs.end());
  if (std::adjacent_find(hubs.begin(), hubs.end()) != hubs.end())
    throw ValidationError("duplicate hub candidates");
  if (hubs.front() < 0 || hubs.back() >= n)
    throw ValidationError("hub candidate out of node range");

  if (flow.rows() != n || flow.cols() != n)
    throw ValidationError("flow matrix must be n x n");
  for (double w : flow.data())
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ValidationError("flow must be nonnegative");

  if (has_coords) {
    if (static_cast<int>(coords.size()) != n)
      throw ValidationError("coords must list n points");
    if (distance.rows() == 0) {
      distance = Matrix(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double dx = coords[i][0] - coords[j][0];
          double dy = coords[i][1] - coords[j][1];
          double d = std::hypot(dx, dy);
          distance(i, j) = d;
          distance(j, i) = d;
        }
    }
  }
  if (distance.rows() != n || distance.cols() != n)
    throw ValidationError("distance matrix must be n x n");
  for (int i = 0; i < n; ++i) {
    if (distance(i, i) != 0.0)
      throw ValidationError("distance diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (!(distance(i, j) >= 0.0) || !std::isfinite(distance(i, j)))
        throw ValidationError("distance must be nonnegative");
      if (std::abs(distance(i, j) - distance(j, i)) > 1e-9)
        throw ValidationError("distance must be symmetric");
    }
  }

  const int nh = hub_count();
  if (static_cast<int>(fixed_cost.size()) != nh)
    throw ValidationError("fixed_cost must have one entry per hub candidate");
  for (double f : fixed_cost)
    if (!(f >= 0.0) || !std::isfinite(f))
      throw ValidationError("fixed_cost must be nonnegative");
  if (hub_capacity.empty()) hub_capacity.assign(nh, kUnbounded);
  if (static_cast<int>(hub_capacity.size()) != nh)
    throw ValidationError("capacity must have one entry per hub candidate");
  for (double u : hub_capacity)
    if (!(u > 0.0))
      throw ValidationError("hub capacity must be positive or unbounded");

  if (!(vehicle.Q > vehicle.q) || !(vehicle.q > 0.0))
    throw ValidationError("vehicle capacities must satisfy Q > q > 0");
  if (vehicle.B < 0 || vehicle.b < 0 || vehicle.G < 0 || vehicle.g < 0)
    throw ValidationError("vehicle costs must be nonnegative");

  if (p_hubs) {
    if (*p_hubs < 1 || *p_hubs > nh)
      throw ValidationError("p_hubs must be between 1 and the number of hub candidates");
  }

  origin_total.assign(n, 0.0);
  dest_total.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      origin_total[i] += flow(i, j);
      dest_total[j] += flow(i, j);
    }
}

std::vector<std::string> instance_warnings(const Instance& inst) {
  std::vector<std::string> w;
  const auto& v = inst.vehicle;
  if (v.B / v.Q >= v.b / v.q) {
    std::ostringstream os;
    os << "economies-of-scale ratio not satisfied: B/Q = " << v.B / v.Q
       << " >= b/q = " << v.b / v.q;
    w.push_back(os.str());
  }
  return w;
}

Instance instance_from_json(const std::string& text, const std::string& name) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("instance document must be an object");

  Instance inst;
  inst.name = name;
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw ParseError("field 'n' (integer) is required");
  inst.n = j["n"].get<int>();
  if (inst.n <= 0) throw ParseError("field 'n' must be positive");

  const bool has_coords = j.contains("coords");
  const bool has_distance = j.contains("distance");
  if (has_coords == has_distance)
    throw ParseError("exactly one of 'coords' and 'distance' is required");

  if (has_coords) {
    const auto& c = j["coords"];
    if (!c.is_array() || static_cast<int>(c.size()) != inst.n)
      throw ParseError("field 'coords' must list n [x,y] pairs");
    inst.has_coords = true;
    inst.coords.resize(inst.n);
    for (int i = 0; i < inst.n; ++i) {
      if (!c[i].is_array() || c[i].size() != 2 || !c[i][0].is_number() ||
          !c[i][1].is_number())
        throw ParseError("coords entry " + std::to_string(i) +
                         " must be an [x,y] pair");
      inst.coords[i] = {c[i][0].get<double>(), c[i][1].get<double>()};
    }
  } else {
    inst.distance = parse_matrix(j["distance"], inst.n, "distance");
  }

  if (!j.contains("flow")) throw ParseError("field 'flow' is required");
  inst.flow = parse_matrix(j["flow"], inst.n, "flow");

  if (j.contains("hubs")) {
    for (const auto& h : j["hubs"]) {
      if (!h.is_number_integer())
        throw ParseError("field 'hubs' must list node indices");
      inst.hubs.push_back(h.get<int>());
    }
    if (inst.hubs.empty()) throw ParseError("field 'hubs' must be nonempty");
  }
  const int nh = inst.hubs.empty() ? inst.n : static_cast<int>(inst.hubs.size());

  if (!j.contains("fixed_cost") || !j["fixed_cost"].is_array() ||
      static_cast<int>(j["fixed_cost"].size()) != nh)
    throw ParseError("field 'fixed_cost' must list one value per hub candidate");
  for (const auto& f : j["fixed_cost"]) {
    if (!f.is_number()) throw ParseError("fixed_cost entries must be numbers");
    inst.fixed_cost.push_back(f.get<double>());
  }

  if (!j.contains("capacity")) throw ParseError("field 'capacity' is required");
  const auto& cap = j["capacity"];
  auto parse_cap = [](const ordered_json& c) -> double {
    if (c.is_null()) return kUnbounded;
    if (c.is_string() && c.get<std::string>() == "unbounded") return kUnbounded;
    if (c.is_number()) return c.get<double>();
    throw ParseError("capacity entries must be numbers or \"unbounded\"");
  };
  if (cap.is_string() || cap.is_null()) {
    inst.hub_capacity.assign(nh, parse_cap(cap));
  } else if (cap.is_array() && static_cast<int>(cap.size()) == nh) {
    for (const auto& c : cap) inst.hub_capacity.push_back(parse_cap(c));
  } else {
    throw ParseError("field 'capacity' must be \"unbounded\" or one value per hub candidate");
  }

  if (!j.contains("vehicle") || !j["vehicle"].is_object())
    throw ParseError("field 'vehicle' is required");
  const auto& v = j["vehicle"];
  for (const char* key : {"Q", "q", "B", "b"})
    if (!v.contains(key) || !v[key].is_number())
      throw ParseError(std::string("vehicle field '") + key + "' is required");
  inst.vehicle.Q = v["Q"].get<double>();
  inst.vehicle.q = v["q"].get<double>();
  inst.vehicle.B = v["B"].get<double>();
  inst.vehicle.b = v["b"].get<double>();
  inst.vehicle.G = v.value("G", 0.0);
  inst.vehicle.g = v.value("g", 0.0);

  if (j.contains("p_hubs")) {
    if (!j["p_hubs"].is_number_integer())
      throw ParseError("field 'p_hubs' must be an integer");
    inst.p_hubs = j["p_hubs"].get<int>();
  }

  if (j.contains("network")) {
    std::string net = j["network"].get<std::string>();
    if (net == "complete")
      inst.network = NetworkMode::Complete;
    else if (net == "general")
      inst.network = NetworkMode::General;
    else
      throw ParseError("field 'network' must be \"complete\" or \"general\"");
  }

  if (j.contains("capacity_mode")) {
    std::string cm = j["capacity_mode"].get<std::string>();
    if (cm == "T")
      inst.capacity_mode = CapacityMode::Tight;
    else if (cm == "L")
      inst.capacity_mode = CapacityMode::Loose;
    else if (cm == "U")
      inst.capacity_mode = CapacityMode::Uncapacitated;
    else
      throw ParseError("field 'capacity_mode' must be T, L, or U");
  }

  inst.finalize();
  return inst;
}

std::string instance_to_json(const Instance& inst) {
  ordered_json j;
  j["n"] = inst.n;
  if (inst.has_coords) {
    auto arr = ordered_json::array();
    for (const auto& c : inst.coords) arr.push_back({c[0], c[1]});
    j["coords"] = std::move(arr);
  } else {
    auto arr = ordered_json::array();
    for (int r = 0; r < inst.n; ++r) {
      auto row = ordered_json::array();
      for (int c = 0; c < inst.n; ++c) row.push_back(inst.distance(r, c));
      arr.push_back(std::move(row));
    }
    j["distance"] = std::move(arr);
  }
  {
    auto arr = ordered_json::array();
    for (int r = 0; r < inst.n; ++r) {
      auto row = ordered_json::array();
      for (int c = 0; c < inst.n; ++c) row.push_back(inst.flow(r, c));
      arr.push_back(std::move(row));
    }
    j["flow"] = std::move(arr);
  }
  bool all_hubs = inst.hub_count() == inst.n;
  if (!all_hubs) j["hubs"] = inst.hubs;
  j["fixed_cost"] = inst.fixed_cost;
  {
    auto arr = ordered_json::array();
    for (double u : inst.hub_capacity) {
      if (u == kUnbounded)
        arr.push_back("unbounded");
      else
        arr.push_back(u);
    }
    j["capacity"] = std::move(arr);
  }
  j["vehicle"] = {{"Q", inst.vehicle.Q}, {"q", inst.vehicle.q},
                  {"B", inst.vehicle.B}, {"b", inst.vehicle.b},
                  {"G", inst.vehicle.G}, {"g", inst.vehicle.g}};
  if (inst.p_hubs) j["p_hubs"] = *inst.p_hubs;
  j["network"] = inst.network == NetworkMode::General ? "general" : "complete";
  if (inst.capacity_mode)
    j["capacity_mode"] = std::string(1, capacity_mode_letter(*inst.capacity_mode));
  return j.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
  return instance_from_json(read_file(path), file_stem(path));
}

void save_instance(const Instance& inst, const std::string& path) {
  write_file(path, instance_to_json(inst));
}

Instance import_ap(const std::string& path, CapacityMode mode,
                   const VehicleConfig& vehicle) {
  std::istringstream in(read_file(path));
  std::vector<double> tokens;
  double v;
  while (in >> v) tokens.push_back(v);
  if (!in.eof()) {
    in.clear();
    std::string bad;
    in >> bad;
    throw ParseError("ap import: non-numeric token '" + bad + "' at position " +
                     std::to_string(tokens.size() + 1));
  }
  if (tokens.empty()) throw ParseError("ap import: empty file");
  double nd = tokens[0];
  if (nd != std::floor(nd) || nd < 1)
    throw ParseError("ap import: first token must be the node count");
  const int n = static_cast<int>(nd);
  const std::size_t expected = 1 + 2u * n + static_cast<std::size_t>(n) * n + 3u * n;
  if (tokens.size() != expected)
    throw ParseError("ap import: expected " + std::to_string(expected) +
                     " values for n=" + std::to_string(n) + ", found " +
                     std::to_string(tokens.size()));

  Instance inst;
  inst.name = file_stem(path);
  inst.n = n;
  inst.has_coords = true;
  inst.coords.resize(n);
  std::size_t pos = 1;
  for (int i = 0; i < n; ++i) {
    inst.coords[i] = {tokens[pos], tokens[pos + 1]};
    pos += 2;
  }
  inst.flow = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inst.flow(i, j) = tokens[pos++];
  inst.fixed_cost.assign(tokens.begin() + pos, tokens.begin() + pos + n);
  pos += n;
  std::vector<double> tight(tokens.begin() + pos, tokens.begin() + pos + n);
  pos += n;
  std::vector<double> loose(tokens.begin() + pos, tokens.begin() + pos + n);

  switch (mode) {
    case CapacityMode::Tight:
      inst.hub_capacity = std::move(tight);
      break;
    case CapacityMode::Loose:
      inst.hub_capacity = std::move(loose);
      break;
    case CapacityMode::Uncapacitated:
      inst.hub_capacity.assign(n, kUnbounded);
      break;
  }
  inst.capacity_mode = mode;
  inst.vehicle = vehicle;
  inst.finalize();
  return inst;
}

void ScenarioSet::validate(int n) const {
  if (flows.empty()) throw ValidationError("scenario set must be nonempty");
  if (flows.size() != probabilities.size())
    throw ValidationError("scenario probabilities and flows differ in count");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw ValidationError("scenario probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("scenario probabilities must sum to 1");
  for (const auto& m : flows) {
    if (m.rows() != n || m.cols() != n)
      throw ValidationError("scenario flow matrices must be n x n");
    for (double w : m.data())
      if (!(w >= 0.0) || !std::isfinite(w))
        throw ValidationError("scenario flows must be nonnegative");
  }
}

ScenarioSet generate_scenarios(const Instance& inst, int m, std::uint64_t seed) {
  if (m < 1) throw ValidationError("scenario count must be at least 1");
  ScenarioSet scen;
  scen.probabilities.assign(m, 1.0 / m);
  scen.flows.reserve(m);
  std::mt19937_64 gen(seed);
  std::vector<double> pi(inst.n);
  for (int s = 0; s < m; ++s) {
    for (int i = 0; i < inst.n; ++i) pi[i] = rng::uniform(gen, 0.5, 1.5);
    Matrix ws(inst.n, inst.n);
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < inst.n; ++j) {
        double rate = pi[i] * pi[j] * inst.flow(i, j);
        ws(i, j) = static_cast<double>(rng::poisson(gen, rate));
      }
    scen.flows.push_back(std::move(ws));
  }
  scen.validate(inst.n);
  return scen;
}

ScenarioSet load_scenarios(const std::string& path, int n) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid scenario JSON: ") + e.what());
  }
  if (!j.contains("m") || !j.contains("flows"))
    throw ParseError("scenario file requires fields 'm' and 'flows'");
  const int m = j["m"].get<int>();
  if (!j["flows"].is_array() || static_cast<int>(j["flows"].size()) != m)
    throw ParseError("scenario file: 'flows' must list m matrices");
  ScenarioSet scen;
  for (int s = 0; s < m; ++s)
    scen.flows.push_back(parse_matrix(j["flows"][s], n, "flows[" + std::to_string(s) + "]"));
  if (j.contains("probabilities")) {
    for (const auto& p : j["probabilities"])
      scen.probabilities.push_back(p.get<double>());
  } else {
    scen.probabilities.assign(m, 1.0 / m);
  }
  scen.validate(n);
  return scen;
}

void save_scenarios(const ScenarioSet& scen, const std::string& path) {
  ordered_json j;
  j["m"] = scen.count();
  j["probabilities"] = scen.probabilities;
  auto all = ordered_json::array();
  for (const auto& mflow : scen.flows) {
    auto mat = ordered_json::array();
    for (int r = 0; r < mflow.rows(); ++r) {
      auto row = ordered_json::array();
      for (int c = 0; c < mflow.cols(); ++c) row.push_back(mflow(r, c));
      mat.push_back(std::move(row));
    }
    all.push_back(std::move(mat));
  }
  j["flows"] = std::move(all);
  write_file(path, j.dump(2) + "\n");
}

} // namespace hndpv
