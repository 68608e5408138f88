// migplan: VM migration planning and replay.
//
// Subcommands: plan, simulate, compare, oracle-check.
// Exit codes: 0 success, 1 usage error, 2 input error, 3 check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "migplan/errors.hpp"
#include "migplan/fpta.hpp"
#include "migplan/oracle.hpp"
#include "migplan/rng.hpp"
#include "migplan/scenario.hpp"
#include "migplan/simulator.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace migplan;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitCheckFailed = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct GlobalOptions {
  double epsilon = 0.1;
  bool epsilon_set = false;
  double theta = 0.1;
  bool theta_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string output_dir = ".";
};

/// Scenario fields yield to explicit command-line flags.
void apply_overrides(ScenarioSpec& sc, const GlobalOptions& opt) {
  if (opt.epsilon_set) sc.solver.epsilon = opt.epsilon;
  if (opt.theta_set) sc.solver.theta = opt.theta;
  if (opt.seed_set) {
    if (sc.generator) {
      sc.instantiate(opt.seed);
    } else {
      sc.seed = opt.seed;
    }
  }
}

json config_json(const ScenarioSpec& sc, const GlobalOptions& opt) {
  json c;
  c["planner"] = sc.planner;
  c["epsilon"] = sc.solver.epsilon;
  c["theta"] = sc.solver.theta;
  c["v_thd_bytes"] = sc.v_thd_bytes;
  c["t_r_s"] = sc.t_r_s;
  c["seed"] = sc.seed;
  c["output_dir"] = opt.output_dir;
  return c;
}

json plan_to_json(const PlanSolution& plan, const NetworkTopology& topo) {
  json out = json::array();
  for (const auto& e : plan.migrations) {
    json entry;
    entry["id"] = e.id;
    entry["started"] = e.started;
    entry["bandwidth_bps"] = e.bandwidth_Bps * 8;
    json paths = json::array();
    for (const auto& pf : e.paths) {
      json p;
      json links = json::array();
      for (int link : pf.path.links) links.push_back(topo.link(link).id);
      p["links"] = links;
      p["flow_bps"] = pf.flow_Bps * 8;
      paths.push_back(p);
    }
    entry["paths"] = paths;
    out.push_back(entry);
  }
  return out;
}

int cmd_plan(const std::filesystem::path& scenario_path,
             const GlobalOptions& opt) {
  ScenarioSpec sc = load_scenario_file(scenario_path);
  apply_overrides(sc, opt);
  // `plan` always runs the flow-approximation planner; the scenario's
  // planner field only drives `simulate`.
  sc.planner = "fpta";
  const PlanSolution plan = solve(sc.topology, sc.requests, sc.solver);

  json doc;
  doc["manifest"] = cli::make_manifest("plan", config_json(sc, opt), scenario_path);
  doc["migrations"] = plan_to_json(plan, sc.topology);
  doc["W_bps"] = plan.throughput_Bps * 8;
  doc["F_bps"] = plan.net_rate_Bps * 8;
  doc["phases"] = plan.stats.phases;
  doc["phase_bound"] = plan.stats.phase_bound;
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_simulate(const std::filesystem::path& scenario_path,
                 const GlobalOptions& opt, const std::string& planner_flag) {
  ScenarioSpec sc = load_scenario_file(scenario_path);
  if (!planner_flag.empty()) {
    if (!is_known_planner(planner_flag)) {
      std::string names;
      for (const auto& n : kPlannerNames) names += (names.empty() ? "" : ", ") + n;
      std::cerr << "unknown planner \"" << planner_flag << "\"; valid: " << names
                << "\n";
      return kExitUsage;
    }
    sc.planner = planner_flag;
  }
  apply_overrides(sc, opt);

  const SimulationResult result = run(sc);

  json summary;
  summary["manifest"] =
      cli::make_manifest("simulate", config_json(sc, opt), scenario_path);
  summary["planner"] = sc.planner;
  summary["makespan_s"] = result.makespan_s;
  summary["net_rate_integral_bytes"] = result.net_rate_integral_bytes;
  summary["replans"] = result.replans;
  summary["plan_compute_s"] = result.plan_compute_s;
  json vms = json::array();
  for (const auto& vm : result.vms) {
    json v;
    v["id"] = vm.id;
    v["start_s"] = vm.start_s;
    v["precopy_end_s"] = vm.precopy_end_s;
    v["done_s"] = vm.done_s;
    v["migration_time_s"] = vm.migration_time_s;
    v["downtime_s"] = vm.downtime_s;
    v["final_bandwidth_bps"] = vm.final_bandwidth_Bps * 8;
    vms.push_back(v);
  }
  summary["vms"] = vms;

  // Build every output in memory first so a failure leaves no partial files.
  const std::string manifest_line =
      "# " + summary["manifest"].dump() + "\n";
  std::string events_csv = manifest_line + "t_s,event,id,bandwidth_bps\n";
  for (const auto& ev : result.events) {
    events_csv += fmt(ev.t_s) + "," + ev.kind + "," + ev.id + "," +
                  fmt(ev.value * 8) + "\n";
  }
  std::string curve_csv = manifest_line + "t_start_s,t_end_s,net_rate_bps\n";
  for (const auto& step : result.net_rate_curve) {
    curve_csv += fmt(step.t0_s) + "," + fmt(step.t1_s) + "," +
                 fmt(step.rate_Bps * 8) + "\n";
  }

  std::filesystem::create_directories(opt.output_dir);
  const auto dir = std::filesystem::path(opt.output_dir);
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
  std::ofstream(dir / "events.csv") << events_csv;
  std::ofstream(dir / "net_rate.csv") << curve_csv;

  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_compare(const std::filesystem::path& scenario_path,
                const GlobalOptions& opt, const std::string& planners_flag,
                int seeds) {
  ScenarioSpec base = load_scenario_file(scenario_path);
  apply_overrides(base, opt);

  std::vector<std::string> planners;
  std::string token;
  std::istringstream in(planners_flag);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) planners.push_back(token);
  }
  for (const auto& p : planners) {
    if (!is_known_planner(p)) {
      std::string names;
      for (const auto& n : kPlannerNames) names += (names.empty() ? "" : ", ") + n;
      std::cerr << "unknown planner \"" << p << "\"; valid: " << names << "\n";
      return kExitUsage;
    }
  }
  if (planners.empty()) {
    std::cerr << "--planners must name at least one planner\n";
    return kExitUsage;
  }
  if (seeds < 1) {
    std::cerr << "--seeds must be >= 1\n";
    return kExitUsage;
  }

  std::vector<ScenarioSpec> scenarios;
  for (int i = 0; i < seeds; ++i) {
    ScenarioSpec sc = base;
    if (sc.generator) {
      sc.instantiate(base.seed + static_cast<std::uint64_t>(i));
    } else {
      sc.seed = base.seed + static_cast<std::uint64_t>(i);
    }
    scenarios.push_back(std::move(sc));
  }
  const auto rows = compare(scenarios, planners);

  json config = config_json(base, opt);
  config["planners"] = planners;
  config["seeds"] = seeds;
  const json manifest = cli::make_manifest("compare", config, scenario_path);
  std::cout << "# " << manifest.dump() << "\n";
  std::cout << "planner,seed,makespan_s,mean_downtime_s,max_downtime_s,plan_compute_s\n";
  for (const auto& row : rows) {
    std::cout << row.planner << "," << row.seed << "," << fmt(row.makespan_s)
              << "," << fmt(row.mean_downtime_s) << "," << fmt(row.max_downtime_s)
              << "," << fmt(row.plan_compute_s) << "\n";
  }
  return kExitOk;
}

const char* check_str(BoundCheck c) {
  switch (c) {
    case BoundCheck::pass:
      return "pass";
    case BoundCheck::fail:
      return "fail";
    default:
      return "n/a";
  }
}

int cmd_oracle_check(const GlobalOptions& opt, int instances) {
  if (instances < 1) {
    std::cerr << "--instances must be >= 1\n";
    return kExitUsage;
  }
  SolverConfig cfg;
  cfg.epsilon = opt.epsilon;
  cfg.theta = opt.theta;

  json config;
  config["epsilon"] = cfg.epsilon;
  config["theta"] = cfg.theta;
  config["instances"] = instances;
  config["seed"] = opt.seed;
  const json manifest = cli::make_manifest("oracle-check", config);
  std::cout << "# " << manifest.dump() << "\n";
  std::cout << "instance,hosts,commodities,U,V,W,F,n_star,eta,sigma,"
               "throughput_bound,relaxation_bound,net_rate_bound\n";

  bool any_fail = false;
  Rng rng(opt.seed);
  for (int i = 0; i < instances; ++i) {
    const int h = 2 + static_cast<int>(rng.uniform_int(0, 4));
    HostCapacityModel model;
    for (int j = 0; j < h; ++j) {
      model.send_cap.push_back(rng.uniform(1e8, 1e9));
      model.recv_cap.push_back(rng.uniform(1e8, 1e9));
    }
    double l0 = 1e300;
    for (double c : model.send_cap) l0 = std::min(l0, c);
    for (double c : model.recv_cap) l0 = std::min(l0, c);
    const int k = 1 + static_cast<int>(rng.uniform_int(0, 4));
    std::vector<MigrationRequest> reqs;
    for (int j = 0; j < k; ++j) {
      MigrationRequest r;
      r.id = "m" + std::to_string(j + 1);
      const int a = static_cast<int>(rng.uniform_int(0, h - 1));
      int b = static_cast<int>(rng.uniform_int(0, h - 2));
      if (b >= a) ++b;
      r.src = HostCapacityModel::host_id(a);
      r.dst = HostCapacityModel::host_id(b);
      r.memory_bytes = 1e9;
      // most instances in the sigma-applicable regime, some beyond it
      r.dirty_rate_Bps = rng.uniform(0, 0.6 * l0);
      reqs.push_back(std::move(r));
    }
    const BoundReport rep = bound_report(model, reqs, cfg);
    if (!rep.all_applicable_pass()) any_fail = true;
    std::cout << i << "," << h << "," << k << "," << fmt(rep.U) << ","
              << fmt(rep.V) << "," << fmt(rep.W) << "," << fmt(rep.F) << ","
              << rep.n_star << "," << fmt(rep.eta) << "," << fmt(rep.sigma)
              << "," << check_str(rep.throughput_bound) << "," << check_str(rep.relaxation_bound)
              << "," << check_str(rep.net_rate_bound) << "\n";
  }
  return any_fail ? kExitCheckFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VM migration planning toolkit"};
  app.require_subcommand(1);

  GlobalOptions opt;
  auto* eps_opt = app.add_option("--epsilon", opt.epsilon,
                                 "Approximation accuracy, in (0, 0.5)")
                      ->check(CLI::Range(1e-9, 0.4999999));
  auto* theta_opt = app.add_option("--theta", opt.theta,
                                   "Start filter margin, >= 0")
                        ->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", opt.seed, "Random seed");
  app.add_option("--output-dir", opt.output_dir, "Directory for output files");

  std::string scenario_plan, scenario_sim, scenario_cmp;
  std::string planner_flag;
  std::string planners_flag = "fpta,grouping,one-by-one";
  int seeds = 1;
  int instances = 100;

  auto* plan = app.add_subcommand("plan", "Compute a migration plan");
  plan->add_option("scenario", scenario_plan, "Scenario file")->required();

  auto* sim = app.add_subcommand("simulate", "Replay a migration batch");
  sim->add_option("scenario", scenario_sim, "Scenario file")->required();
  sim->add_option("--planner", planner_flag,
                  "Planner override (fpta, grouping, one-by-one, optimal, forced)");

  auto* cmp = app.add_subcommand("compare", "Compare planners over seeds");
  cmp->add_option("scenario", scenario_cmp, "Scenario file")->required();
  cmp->add_option("--planners", planners_flag, "Comma-separated planner list");
  cmp->add_option("--seeds", seeds, "Number of seeded instantiations");

  auto* oc = app.add_subcommand("oracle-check",
                                "Verify approximation bounds on random instances");
  oc->add_option("--instances", instances, "Number of instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  opt.epsilon_set = eps_opt->count() > 0;
  opt.theta_set = theta_opt->count() > 0;
  opt.seed_set = seed_opt->count() > 0;

  try {
    if (*plan) return cmd_plan(scenario_plan, opt);
    if (*sim) return cmd_simulate(scenario_sim, opt, planner_flag);
    if (*cmp) return cmd_compare(scenario_cmp, opt, planners_flag, seeds);
    if (*oc) return cmd_oracle_check(opt, instances);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SizeBoundError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SolveError& e) {
    std::cerr << "solve error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
