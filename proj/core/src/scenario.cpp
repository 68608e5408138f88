#include "migplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "migplan/errors.hpp"
#include "migplan/rng.hpp"

namespace migplan {

namespace {

using json = nlohmann::json;

double rate_field(const json& obj, const std::string& bits_key,
                  const std::string& bytes_key, const std::string& what) {
  const bool has_bits = obj.contains(bits_key);
  const bool has_bytes = obj.contains(bytes_key);
  if (has_bits && has_bytes) {
    throw ParseError(what + ": give either " + bits_key + " or " + bytes_key);
  }
  if (!has_bits && !has_bytes) {
    throw ParseError(what + ": missing " + bits_key + " / " + bytes_key);
  }
  const double v = has_bits ? obj.at(bits_key).get<double>() / 8.0
                            : obj.at(bytes_key).get<double>();
  if (!std::isfinite(v) || v < 0) {
    throw ValidationError(what + ": rate must be finite and >= 0");
  }
  return v;
}

NetworkTopology resolve_topology(const json& value,
                                 const std::filesystem::path& base_dir) {
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "b4") return builtin_b4();
    std::filesystem::path p(s);
    if (p.is_relative()) p = base_dir / p;
    return load_topology_file(p);
  }
  if (value.is_object() && value.contains("builtin")) {
    const std::string name = value.at("builtin").get<std::string>();
    if (name == "b4") return builtin_b4();
    if (name == "fattree") {
      const int pods = value.value("pods", 4);
      double cap_min = 1e9, cap_max = 1e9;
      if (value.contains("cap_min_Bps") || value.contains("cap_max_Bps")) {
        cap_min = value.at("cap_min_Bps").get<double>();
        cap_max = value.at("cap_max_Bps").get<double>();
      }
      const std::uint64_t seed = value.value("seed", 0);
      return builtin_fattree(pods, cap_min, cap_max, seed);
    }
    throw ParseError("unknown builtin topology: " + name);
  }
  throw ParseError("scenario topology must be a path, \"b4\", or a builtin object");
}

}  // namespace

const std::vector<std::string> kPlannerNames = {"fpta", "grouping",
                                                "one-by-one", "optimal",
                                                "forced"};

bool is_known_planner(const std::string& name) {
  return std::find(kPlannerNames.begin(), kPlannerNames.end(), name) !=
         kPlannerNames.end();
}

void validate_requests(const NetworkTopology& topo,
                       const std::vector<MigrationRequest>& requests) {
  std::set<std::string> ids;
  for (const auto& r : requests) {
    if (r.id.empty()) throw ValidationError("request with empty id");
    if (!ids.insert(r.id).second) {
      throw ValidationError("duplicate request id: " + r.id);
    }
    topo.node_index(r.src);
    topo.node_index(r.dst);
    if (r.src == r.dst) {
      throw ValidationError("request " + r.id + ": src == dst");
    }
    if (!(r.memory_bytes > 0) || !std::isfinite(r.memory_bytes)) {
      throw ValidationError("request " + r.id + ": memory must be positive");
    }
    if (r.dirty_rate_Bps < 0 || !std::isfinite(r.dirty_rate_Bps)) {
      throw ValidationError("request " + r.id + ": dirty rate must be >= 0");
    }
    if (r.arrival_s < 0) {
      throw ValidationError("request " + r.id + ": arrival must be >= 0");
    }
  }
}

void ScenarioSpec::instantiate(std::uint64_t seed_value) {
  seed = seed_value;
  if (!generator) return;
  const RequestGenerator& gen = *generator;

  std::vector<std::string> pool = gen.endpoints;
  if (pool.empty()) {
    for (int i = 0; i < topology.node_count(); ++i) {
      pool.push_back(topology.node_id(i));
    }
  }
  if (pool.size() < 2) {
    throw ValidationError("request generator needs at least two endpoints");
  }

  Rng rng(seed_value);
  requests.clear();
  requests.reserve(gen.count);
  double total = 0;
  for (int i = 0; i < gen.count; ++i) {
    MigrationRequest r;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "vm%03d", i + 1);
    r.id = buf;
    const int a = static_cast<int>(rng.uniform_int(0, pool.size() - 1));
    int b = static_cast<int>(rng.uniform_int(0, pool.size() - 2));
    if (b >= a) ++b;
    r.src = pool[a];
    r.dst = pool[b];
    r.memory_bytes = rng.uniform(gen.memory_min_bytes, gen.memory_max_bytes);
    r.dirty_rate_Bps = gen.dirty_rate_Bps;
    requests.push_back(std::move(r));
    total += requests.back().memory_bytes;
  }
  if (gen.total_memory_bytes && total > 0) {
    const double scale = *gen.total_memory_bytes / total;
    for (auto& r : requests) r.memory_bytes *= scale;
  }
  validate_requests(topology, requests);
}

ScenarioSpec load_scenario(const std::string& json_text,
                           const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("topology")) {
    throw ParseError("scenario document: missing topology");
  }

  ScenarioSpec spec;
  spec.topology = resolve_topology(doc.at("topology"), base_dir);
  spec.planner = doc.value("planner", std::string("fpta"));
  if (!is_known_planner(spec.planner)) {
    throw ValidationError("unknown planner: " + spec.planner);
  }
  spec.solver.epsilon = doc.value("epsilon", spec.solver.epsilon);
  spec.solver.theta = doc.value("theta", spec.solver.theta);
  spec.v_thd_bytes = doc.value("v_thd_bytes", 0.0);
  spec.t_r_s = doc.value("t_r_s", 0.0);
  spec.seed = doc.value("seed", 0);
  if (spec.v_thd_bytes < 0 || spec.t_r_s < 0) {
    throw ValidationError("v_thd_bytes and t_r_s must be >= 0");
  }

  if (doc.contains("capacity_reductions")) {
    // Static background traffic: reduce residual capacity per link id.
    for (const auto& red : doc.at("capacity_reductions")) {
      const std::string link_id = red.at("link").get<std::string>();
      const double amount =
          rate_field(red, "amount_bps", "amount_Bps", "capacity reduction");
      bool found = false;
      for (int e = 0; e < spec.topology.link_count(); ++e) {
        if (spec.topology.link(e).id != link_id) continue;
        found = true;
        const int g = spec.topology.link(e).group;
        const double left = spec.topology.group_capacity(g) - amount;
        if (left <= 0) {
          throw ValidationError("capacity reduction exhausts link " + link_id);
        }
        spec.topology.set_group_capacity(g, left);
        break;
      }
      if (!found) {
        throw ValidationError("capacity reduction on unknown link " + link_id);
      }
    }
  }

  if (doc.contains("requests")) {
    for (const auto& r : doc.at("requests")) {
      MigrationRequest req;
      req.id = r.at("id").get<std::string>();
      req.src = r.at("src").get<std::string>();
      req.dst = r.at("dst").get<std::string>();
      req.memory_bytes = r.at("memory_bytes").get<double>();
      req.dirty_rate_Bps =
          rate_field(r, "dirty_rate_bps", "dirty_rate_Bps", "request " + req.id);
      req.arrival_s = r.value("arrival_s", 0.0);
      spec.requests.push_back(std::move(req));
    }
  }
  if (doc.contains("generator")) {
    const auto& g = doc.at("generator");
    RequestGenerator gen;
    gen.count = g.at("count").get<int>();
    if (gen.count <= 0) throw ValidationError("generator count must be > 0");
    gen.memory_min_bytes = g.value("memory_min_bytes", gen.memory_min_bytes);
    gen.memory_max_bytes = g.value("memory_max_bytes", gen.memory_max_bytes);
    if (!(gen.memory_min_bytes > 0) || gen.memory_max_bytes < gen.memory_min_bytes) {
      throw ValidationError("generator memory range invalid");
    }
    gen.dirty_rate_Bps =
        g.contains("dirty_rate_bps") || g.contains("dirty_rate_Bps")
            ? rate_field(g, "dirty_rate_bps", "dirty_rate_Bps", "generator")
            : 0.0;
    if (g.contains("total_memory_bytes")) {
      gen.total_memory_bytes = g.at("total_memory_bytes").get<double>();
    }
    if (g.contains("endpoints")) {
      for (const auto& e : g.at("endpoints")) {
        gen.endpoints.push_back(e.get<std::string>());
      }
    }
    spec.generator = std::move(gen);
    if (spec.requests.empty()) spec.instantiate(spec.seed);
  }

  if (doc.contains("forced_batches")) {
    for (const auto& batch : doc.at("forced_batches")) {
      std::vector<std::string> ids;
      for (const auto& id : batch) ids.push_back(id.get<std::string>());
      spec.forced_batches.push_back(std::move(ids));
    }
  }
  if (spec.planner == "forced" && spec.forced_batches.empty()) {
    throw ValidationError("planner \"forced\" requires forced_batches");
  }

  validate_requests(spec.topology, spec.requests);
  return spec;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str(), path.parent_path());
}

}  // namespace migplan
