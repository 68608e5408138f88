#include "migplan/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "migplan/baselines.hpp"
#include "migplan/errors.hpp"
#include "migplan/oracle.hpp"

namespace migplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kVolumeEps = 0.5;  // bytes; drain completion threshold

struct VmState {
  MigStatus status = MigStatus::pending;
  bool arrived = false;
  double remaining = 0;  // bytes of pre-copy volume left
  double bandwidth = 0;
  double net = 0;  // bandwidth - dirty rate
  std::vector<PathFlow> paths;
  double start_s = -1;
  double precopy_end_s = -1;
  double stopcopy_end_s = kInf;
  double done_s = -1;
  double final_bandwidth = 0;
  double downtime_s = 0;
};

class StopWatch {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  void stop() {
    total_ += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0_).count();
  }
  double total_s() const { return total_; }

 private:
  std::chrono::steady_clock::time_point t0_;
  double total_ = 0;
};

class Simulation {
 public:
  Simulation(const ScenarioSpec& scenario, const SimOptions& options)
      : scenario_(scenario), options_(options), states_(scenario.requests.size()) {
    validate_requests(scenario_.topology, scenario_.requests);
    for (std::size_t k = 0; k < states_.size(); ++k) {
      states_[k].remaining = scenario_.requests[k].memory_bytes;
    }
    schedule_driven_ = scenario_.planner == "one-by-one" ||
                       scenario_.planner == "grouping" ||
                       scenario_.planner == "forced";
  }

  SimulationResult run() {
    prepare_planner();

    double now = 0;
    process_arrivals(now);
    replan(now);
    snapshot_checks(now);

    int guard = static_cast<int>(states_.size()) * 8 + 64;
    while (!all_done()) {
      const double next = next_event_time(now);
      if (!std::isfinite(next)) {
        throw SolveError(stall_diagnostic(now));
      }
      if (--guard < 0) throw SolveError("simulation exceeded event budget");

      record_step(now, next);
      drain(now, next);
      now = next;

      bool changed = true;
      while (changed) {
        changed = false;
        changed |= process_stopcopy_completions(now);
        changed |= process_precopy_completions(now);
      }
      process_arrivals(now);
      replan(now);
      snapshot_checks(now);
    }

    finish(now);
    return std::move(result_);
  }

 private:
  bool all_done() const {
    for (const VmState& s : states_) {
      if (s.status != MigStatus::done) return false;
    }
    return true;
  }

  double next_event_time(double now) const {
    double t = kInf;
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const VmState& s = states_[k];
      if (!s.arrived) t = std::min(t, scenario_.requests[k].arrival_s);
      if (s.status == MigStatus::migrating) {
        t = std::min(t, now + s.remaining / s.net);
      }
      if (s.status == MigStatus::stop_and_copy) t = std::min(t, s.stopcopy_end_s);
    }
    return t;
  }

  void record_step(double t0, double t1) {
    if (t1 <= t0) return;
    double rate = 0;
    for (const VmState& s : states_) {
      if (s.status == MigStatus::migrating) rate += s.net;
    }
    result_.net_rate_curve.push_back({t0, t1, rate});
  }

  void drain(double t0, double t1) {
    const double dt = t1 - t0;
    if (dt <= 0) return;
    for (VmState& s : states_) {
      if (s.status == MigStatus::migrating) {
        s.remaining = std::max(0.0, s.remaining - s.net * dt);
      }
    }
  }

  bool process_stopcopy_completions(double now) {
    bool any = false;
    for (std::size_t k : ids_ascending()) {
      VmState& s = states_[k];
      if (s.status == MigStatus::stop_and_copy && s.stopcopy_end_s <= now + 1e-12 * std::max(1.0, now)) {
        s.status = MigStatus::done;
        s.done_s = now;
        s.paths.clear();
        s.bandwidth = 0;
        s.net = 0;
        log(now, "done", scenario_.requests[k].id);
        any = true;
      }
    }
    return any;
  }

  bool process_precopy_completions(double now) {
    bool any = false;
    for (std::size_t k : ids_ascending()) {
      VmState& s = states_[k];
      if (s.status == MigStatus::migrating && s.remaining <= kVolumeEps) {
        s.status = MigStatus::stop_and_copy;
        s.remaining = 0;
        s.precopy_end_s = now;
        s.final_bandwidth = s.bandwidth;
        s.downtime_s = scenario_.v_thd_bytes / s.bandwidth + scenario_.t_r_s;
        s.stopcopy_end_s = now + s.downtime_s;
        log(now, "precopy_end", scenario_.requests[k].id);
        any = true;
      }
    }
    return any;
  }

  void process_arrivals(double now) {
    for (std::size_t k : ids_ascending()) {
      VmState& s = states_[k];
      if (!s.arrived && scenario_.requests[k].arrival_s <= now + 1e-12 * std::max(1.0, now)) {
        s.arrived = true;
        log(now, "arrival", scenario_.requests[k].id);
      }
    }
  }

  // --- planner dispatch ----------------------------------------------------

  void prepare_planner() {
    if (!schedule_driven_) return;
    watch_.start();
    if (scenario_.planner == "one-by-one") {
      schedule_ = plan_one_by_one(scenario_.topology, scenario_.requests);
    } else if (scenario_.planner == "grouping") {
      schedule_ = plan_grouping(scenario_.topology, scenario_.requests);
    } else {
      schedule_ = plan_forced(scenario_.topology, scenario_.requests,
                              scenario_.forced_batches);
    }
    watch_.stop();
  }

  void replan(double now) {
    if (schedule_driven_) {
      advance_schedule(now);
    } else {
      replan_incremental(now);
    }
    ++result_.replans;
  }

  void advance_schedule(double now) {
    while (batch_cursor_ < schedule_.batches.size()) {
      const Schedule::Batch& batch = schedule_.batches[batch_cursor_];
      bool batch_done = true;
      bool batch_ready = true;
      for (const auto& item : batch.items) {
        const std::size_t k = index_of(item.id);
        if (states_[k].status != MigStatus::done) batch_done = false;
        if (!states_[k].arrived) batch_ready = false;
      }
      if (batch_done) {
        ++batch_cursor_;
        continue;
      }
      if (!batch_ready) return;  // wait for arrivals
      for (const auto& item : batch.items) {
        const std::size_t k = index_of(item.id);
        VmState& s = states_[k];
        if (s.status != MigStatus::pending) continue;
        const double r = scenario_.requests[k].dirty_rate_Bps;
        if (item.bandwidth_Bps <= r) {
          throw SolveError("planner " + scenario_.planner + ": migration " +
                           item.id + " cannot converge (bandwidth <= dirty rate)");
        }
        start_vm(k, item.bandwidth_Bps, item.paths, now);
      }
      return;
    }
  }

  void replan_incremental(double now) {
    // Requests visible to the planner: running pre-copy plus arrived pending.
    std::vector<MigrationRequest> live;
    std::vector<std::size_t> live_index;
    CommittedPlan committed;
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const VmState& s = states_[k];
      if (s.status == MigStatus::migrating ||
          (s.status == MigStatus::pending && s.arrived)) {
        live.push_back(scenario_.requests[k]);
        live_index.push_back(k);
      }
      if (s.status == MigStatus::migrating ||
          s.status == MigStatus::stop_and_copy) {
        committed.entries.push_back(
            {scenario_.requests[k].id, s.bandwidth, s.paths});
      }
    }
    if (live.empty()) return;

    watch_.start();
    PlanSolution plan;
    if (scenario_.planner == "optimal") {
      plan = solve_optimal_incremental(scenario_.topology, live, committed);
    } else {
      plan = solve_incremental(scenario_.topology, live, committed,
                               scenario_.solver);
    }
    watch_.stop();

    bool started_any = false;
    for (std::size_t i = 0; i < live.size(); ++i) {
      const std::size_t k = live_index[i];
      VmState& s = states_[k];
      const PlanSolution::Entry& entry = plan.migrations[i];
      if (s.status == MigStatus::migrating) {
        if (entry.bandwidth_Bps < s.bandwidth * (1 - 1e-9) - 1e-6) {
          result_.commitments_monotone = false;
        }
        if (std::abs(entry.bandwidth_Bps - s.bandwidth) > 1e-9 * std::max(1.0, s.bandwidth)) {
          log(now, "rate_change", entry.id, entry.bandwidth_Bps);
        }
        s.bandwidth = entry.bandwidth_Bps;
        s.net = s.bandwidth - scenario_.requests[k].dirty_rate_Bps;
        s.paths = entry.paths;
      } else if (entry.started) {
        start_vm(k, entry.bandwidth_Bps, entry.paths, now);
        started_any = true;
      }
    }

    if (!started_any && scenario_.planner == "fpta") {
      maybe_recover_stall(now);
    }
  }

  /// One-pass start filtering can leave everything unstarted under heavy
  /// contention. If nothing is running and nothing will arrive, fill the
  /// network greedily: repeatedly start the pending migration with the
  /// largest residual max flow until none clears its start threshold.
  void maybe_recover_stall(double now) {
    bool anything_active = false;
    bool future_arrival = false;
    bool any_pending = false;
    for (const VmState& s : states_) {
      if (s.status == MigStatus::migrating || s.status == MigStatus::stop_and_copy) {
        anything_active = true;
      }
      if (!s.arrived) future_arrival = true;
      if (s.status == MigStatus::pending && s.arrived) any_pending = true;
    }
    if (anything_active || future_arrival || !any_pending) return;

    bool recovered = false;
    while (true) {
      CommittedPlan active;
      for (std::size_t k = 0; k < states_.size(); ++k) {
        if (states_[k].status == MigStatus::migrating) {
          active.entries.push_back(
              {scenario_.requests[k].id, states_[k].bandwidth, states_[k].paths});
        }
      }
      std::vector<int> old_to_new;
      const NetworkTopology residual =
          active.empty()
              ? scenario_.topology
              : residual_topology(scenario_.topology, active, &old_to_new);
      std::vector<int> new_to_old(residual.link_count(), -1);
      if (active.empty()) {
        new_to_old.resize(residual.link_count());
        for (std::size_t e = 0; e < new_to_old.size(); ++e) {
          new_to_old[e] = static_cast<int>(e);
        }
      } else {
        for (std::size_t e = 0; e < old_to_new.size(); ++e) {
          if (old_to_new[e] >= 0) new_to_old[old_to_new[e]] = static_cast<int>(e);
        }
      }
      std::size_t best = states_.size();
      MaxFlowResult best_flow;
      for (std::size_t k : ids_ascending()) {
        if (states_[k].status != MigStatus::pending) continue;
        if (!residual.has_node(scenario_.requests[k].src) ||
            !residual.has_node(scenario_.requests[k].dst)) {
          continue;
        }
        MaxFlowResult mf = max_flow(residual, scenario_.requests[k].src,
                                    scenario_.requests[k].dst);
        const double threshold =
            (1 + scenario_.solver.theta) * scenario_.requests[k].dirty_rate_Bps;
        if (mf.value_Bps > threshold &&
            (best == states_.size() || mf.value_Bps > best_flow.value_Bps)) {
          best = k;
          best_flow = std::move(mf);
        }
      }
      if (best == states_.size()) break;
      double total = 0;
      for (PathFlow& pf : best_flow.paths) {
        for (int& e : pf.path.links) e = new_to_old[e];
        total += pf.flow_Bps;
      }
      start_vm(best, total, best_flow.paths, now);
      recovered = true;
    }
    if (!recovered) throw SolveError(stall_diagnostic(now));
  }

  std::string stall_diagnostic(double now) const {
    std::string pending;
    for (std::size_t k = 0; k < states_.size(); ++k) {
      if (states_[k].status != MigStatus::done) {
        if (!pending.empty()) pending += ", ";
        pending += scenario_.requests[k].id;
      }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", now);
    return "non-terminating scenario at t=" + std::string(buf) +
           ": no achievable bandwidth exceeds the dirty rate for pending "
           "migrations [" + pending + "]";
  }

  void start_vm(std::size_t k, double bandwidth,
                const std::vector<PathFlow>& paths, double now) {
    VmState& s = states_[k];
    s.status = MigStatus::migrating;
    s.bandwidth = bandwidth;
    s.net = bandwidth - scenario_.requests[k].dirty_rate_Bps;
    if (s.net <= 0) {
      throw SolveError("planner started non-convergent migration " +
                       scenario_.requests[k].id);
    }
    s.paths = paths;
    s.start_s = now;
    log(now, "start", scenario_.requests[k].id, bandwidth);
  }

  // --- invariant tracking ---------------------------------------------------

  void snapshot_checks(double now) {
    std::vector<double> load(scenario_.topology.group_count(), 0);
    for (const VmState& s : states_) {
      if (s.status != MigStatus::migrating && s.status != MigStatus::stop_and_copy) {
        continue;
      }
      for (const PathFlow& pf : s.paths) {
        for (int e : pf.path.links) {
          load[scenario_.topology.link(e).group] += pf.flow_Bps;
        }
      }
    }
    for (int g = 0; g < scenario_.topology.group_count(); ++g) {
      const double cap = scenario_.topology.group_capacity(g);
      if (load[g] > cap) {
        result_.max_group_overload_rel =
            std::max(result_.max_group_overload_rel, (load[g] - cap) / cap);
      }
    }

    if (options_.check_work_conservation && scenario_.planner == "fpta") {
      check_work_conservation(now);
    }
  }

  void check_work_conservation(double) {
    CommittedPlan active;
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const VmState& s = states_[k];
      if (s.status == MigStatus::migrating || s.status == MigStatus::stop_and_copy) {
        active.entries.push_back({scenario_.requests[k].id, s.bandwidth, s.paths});
      }
    }
    NetworkTopology residual = active.empty()
                                   ? scenario_.topology
                                   : residual_topology(scenario_.topology, active);
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const VmState& s = states_[k];
      if (s.status != MigStatus::pending || !s.arrived) continue;
      if (!residual.has_node(scenario_.requests[k].src) ||
          !residual.has_node(scenario_.requests[k].dst)) {
        continue;
      }
      const MaxFlowResult mf = max_flow(residual, scenario_.requests[k].src,
                                        scenario_.requests[k].dst);
      const double threshold =
          (1 + scenario_.solver.theta) * scenario_.requests[k].dirty_rate_Bps;
      if (mf.value_Bps > threshold * (1 + 1e-6) + 1.0) {
        ++result_.work_conservation_violations;
      }
    }
  }

  // --- bookkeeping -----------------------------------------------------------

  std::vector<std::size_t> ids_ascending() const {
    std::vector<std::size_t> order(states_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scenario_.requests[a].id < scenario_.requests[b].id;
    });
    return order;
  }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t k = 0; k < scenario_.requests.size(); ++k) {
      if (scenario_.requests[k].id == id) return k;
    }
    throw SolveError("unknown migration id in schedule: " + id);
  }

  void log(double t, const char* kind, const std::string& id, double value = 0) {
    result_.events.push_back({t, kind, id, value});
  }

  void finish(double now) {
    result_.makespan_s = 0;
    result_.vms.resize(states_.size());
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const VmState& s = states_[k];
      VmOutcome& out = result_.vms[k];
      out.id = scenario_.requests[k].id;
      out.start_s = s.start_s;
      out.precopy_end_s = s.precopy_end_s;
      out.done_s = s.done_s;
      out.migration_time_s = s.done_s - s.start_s;
      out.downtime_s = s.downtime_s;
      out.final_bandwidth_Bps = s.final_bandwidth;
      result_.makespan_s = std::max(result_.makespan_s, s.done_s);
    }
    (void)now;
    result_.net_rate_integral_bytes = net_rate_integral(result_.net_rate_curve);
    result_.plan_compute_s = watch_.total_s();
  }

  const ScenarioSpec& scenario_;
  SimOptions options_;
  std::vector<VmState> states_;
  bool schedule_driven_ = false;
  Schedule schedule_;
  std::size_t batch_cursor_ = 0;
  StopWatch watch_;
  SimulationResult result_;
};

}  // namespace

SimulationResult run(const ScenarioSpec& scenario, const SimOptions& options) {
  if (!is_known_planner(scenario.planner)) {
    throw ValidationError("unknown planner: " + scenario.planner);
  }
  Simulation sim(scenario, options);
  return sim.run();
}

double net_rate_integral(std::span<const NetRateStep> curve) {
  double total = 0;
  for (const NetRateStep& step : curve) {
    total += (step.t1_s - step.t0_s) * step.rate_Bps;
  }
  return total;
}

std::vector<CompareRow> compare(std::span<const ScenarioSpec> scenarios,
                                std::span<const std::string> planners) {
  for (const std::string& planner : planners) {
    if (!is_known_planner(planner)) {
      throw ValidationError("unknown planner: " + planner);
    }
  }

  // Runs are independent; execute them concurrently and assemble the rows in
  // scenario-major, planner-minor order regardless of completion order.
  const std::size_t total = scenarios.size() * planners.size();
  std::vector<CompareRow> rows(total);
  std::vector<std::string> failures(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const ScenarioSpec& scenario = scenarios[i / planners.size()];
      const std::string& planner = planners[i % planners.size()];
      CompareRow row;
      row.planner = planner;
      row.seed = scenario.seed;
      try {
        ScenarioSpec variant = scenario;
        variant.planner = planner;
        const SimulationResult r = run(variant);
        row.makespan_s = r.makespan_s;
        double sum = 0, mx = 0;
        for (const VmOutcome& vm : r.vms) {
          sum += vm.downtime_s;
          mx = std::max(mx, vm.downtime_s);
        }
        row.mean_downtime_s =
            r.vms.empty() ? 0 : sum / static_cast<double>(r.vms.size());
        row.max_downtime_s = mx;
        row.plan_compute_s = r.plan_compute_s;
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
      rows[i] = std::move(row);
    }
  };
  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min<std::size_t>(
          {total, std::thread::hardware_concurrency(), 8}));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const std::string& f : failures) {
    if (!f.empty()) throw SolveError(f);
  }
  return rows;
}

}  // namespace migplan
