#pragma once

#include <map>
#include <string>
#include <vector>

#include "evacsim/scenario.hpp"
#include "evacsim/sim.hpp"

namespace evacsim {

struct ExperimentSpec {
    std::vector<RoutingMode> modes{RoutingMode::Dijkstra, RoutingMode::CpnSp,
                                   RoutingMode::CpnSt};
    std::vector<int> populations{30, 60, 90, 120};
    int replications = 10;
    std::uint64_t base_seed = 1;  // run seed = base_seed + replication index
    OscillationPolicy policy;
    double time_cap_s = 3600.0;
    double tick_s = 1.0;
    double sp_refresh_period_s = 5.0;
    CpnConfig cpn;
    bool event_log = false;
};

struct CellStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for a single value
    double min = 0.0;
    double max = 0.0;
};

CellStats summarize(const std::vector<double>& values);

// One (population, mode) cell with its replication results.
struct ExperimentCell {
    int population = 0;
    RoutingMode mode = RoutingMode::Dijkstra;
    std::vector<SimResult> runs;

    CellStats survivors() const;
    CellStats evac_time() const;
    CellStats congestion() const;
    // Exited evacuees per exit, pooled over replications, normalized.
    std::vector<double> pooled_exit_shares() const;
    // Edge visit totals over replications.
    std::vector<std::int64_t> summed_edge_visits() const;
};

struct ExperimentResult {
    std::vector<ExperimentCell> cells;  // populations outer, modes inner

    const ExperimentCell& cell(int population, RoutingMode mode) const;
};

ExperimentResult run_experiment(const Scenario& scenario, const ExperimentSpec& spec);

struct DepthSweepRow {
    int depth = 0;
    CellStats survivors;
};

struct DepthSweepResult {
    std::vector<DepthSweepRow> rows;
    int best_depth = 0;  // first depth achieving the maximum mean survivors
};

// Survivors vs movement depth at a fixed population (first CPN mode of the
// spec, cpn-st when none is listed).
DepthSweepResult movement_depth_sweep(const Scenario& scenario, const ExperimentSpec& spec,
                                      int depth_lo, int depth_hi, int population = 120);

// CSV emitters. All are pure functions of the results so the files can be
// recomputed and byte-compared.
std::string runs_csv(const ExperimentResult& result);
std::string summary_csv(const ExperimentResult& result);
std::string congestion_table_csv(const ExperimentResult& result);
std::string exit_shares_csv(const ExperimentResult& result, const BuildingGraph& graph);
std::string edge_visits_csv(const ExperimentCell& cell, const BuildingGraph& graph);
std::string depth_sweep_csv(const DepthSweepResult& sweep);

// Spec echo + git-style content hash of the scenario document.
std::string manifest_json(const ExperimentSpec& spec, const std::string& scenario_path,
                          const std::string& scenario_text);

// Writes all experiment outputs under out_dir (created if missing).
void write_experiment_outputs(const std::string& out_dir, const Scenario& scenario,
                              const ExperimentResult& result);

}  // namespace evacsim
