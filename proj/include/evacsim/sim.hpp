#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evacsim/cpn.hpp"
#include "evacsim/goals.hpp"
#include "evacsim/graph.hpp"
#include "evacsim/hazard.hpp"
#include "evacsim/scenario.hpp"

namespace evacsim {

enum class RoutingMode { Dijkstra, CpnSp, CpnSt, CpnEnergy, CpnSafety };

std::string to_string(RoutingMode m);
std::optional<RoutingMode> routing_mode_from_string(const std::string& s);

// Goal class a CPN mode optimizes (Dijkstra maps to Distance but bypasses
// the engine entirely).
GoalClass routing_goal(RoutingMode m);

enum class EvacueeState { Queued, Moving, Exited, Dead };

struct Evacuee {
    int id = 0;
    int class_index = 0;
    EvacueeState state = EvacueeState::Queued;
    NodeId node = kNoNode;   // current node while queued; edge tail while moving
    NodeId edge_to = kNoNode;
    double edge_length_cm = 0.0;
    double progress_cm = 0.0;
    Path route;              // remaining route; route.front() is the current node
    int hops_since_replan = 0;
    bool route_invalid = false;
    double health = 100.0;
    double egress_time_s = -1.0;
    double death_time_s = -1.0;
    double distance_cm = 0.0;
    int congestion_hits = 0;
};

// Sliding-window arrival/departure counters for one node. Rates use Laplace
// +1 smoothing over the window so downstream divisions stay finite.
class NodeQueueStats {
public:
    explicit NodeQueueStats(double window_s = 30.0) : window_s_(window_s) {}

    void record_arrival(double t);
    void record_departure(double t);
    // Drops events older than t - window; call once per tick before reading.
    void advance(double t);

    double arrival_rate() const;    // persons/s
    double departure_rate() const;  // persons/s

    std::int64_t total_arrivals() const { return total_arrivals_; }
    std::int64_t total_departures() const { return total_departures_; }

private:
    double window_s_;
    std::deque<double> arrivals_;
    std::deque<double> departures_;
    std::int64_t total_arrivals_ = 0;
    std::int64_t total_departures_ = 0;
};

struct OscillationPolicy {
    int movement_depth = 3;            // hops before a new suggestion is considered
    double switch_prob = 1.0;          // adoption probability once eligible
    double hazard_check_period_s = 5.0;
};

// Replan gate: a forced replan (unusable or hazard-invalidated route) always
// adopts; below the movement depth the cached route is kept; otherwise the
// suggestion is adopted with probability switch_prob.
bool replan_adopts(int hops_since_replan, int movement_depth, bool forced, double switch_prob,
                   Rng& rng);

struct RunConfig {
    RoutingMode mode = RoutingMode::Dijkstra;
    int population = 30;
    OscillationPolicy policy;
    std::uint64_t seed = 1;
    // One-second ticks make a capacity-1 doorway pass one person per second,
    // which is the usual flow figure for a single door leaf.
    double tick_s = 1.0;
    double time_cap_s = 3600.0;
    double sp_refresh_period_s = 5.0;  // CPN modes: smart-packet batch cadence
    // Node probe timers start staggered across this many ticks, so neighbour
    // routing lists sample congestion at slightly different instants. 1 means
    // a building-wide sync pulse; larger values desynchronize further.
    int sp_phase_spread = 10;
    CpnConfig cpn;
    bool record_events = false;
    // Explicit starting nodes (evacuee i starts at spawn_nodes[i % size]);
    // empty means uniform random placement over non-exit nodes.
    std::vector<NodeId> spawn_nodes;
};

struct SimResult {
    RoutingMode mode = RoutingMode::Dijkstra;
    int population = 0;
    std::uint64_t seed = 0;

    int survivors = 0;
    int dead = 0;
    int stranded = 0;  // alive at the time cap; counted as non-survivors

    std::int64_t congestion_events = 0;
    double total_evac_time_s = 0.0;  // last egress, or the cap when nobody left
    double mean_egress_time_s = 0.0;

    std::vector<double> egress_times;       // per evacuee; -1 when not exited
    std::vector<std::int64_t> edge_visits;  // per edge index
    std::vector<int> max_queue;             // per node
    std::vector<std::int64_t> exit_counts;  // aligned with graph.exits()
    std::vector<double> exit_shares;        // fraction of exited per exit

    CpnDiagnostics cpn;
    std::int64_t conservation_violations = 0;
    std::int64_t ticks = 0;

    // Event lines "t,type,evacuee,node", filled when cfg.record_events.
    std::vector<std::string> events;

    // Canonical CSV rendering; identical runs produce identical bytes.
    std::string to_csv(const BuildingGraph& graph) const;
};

// One full run. Holds all mutable state; one instance per (config, seed).
class Simulation {
public:
    Simulation(const Scenario& scenario, RunConfig cfg);

    SimResult run();

    // Event log lines "t,type,evacuee,node", filled when cfg.record_events.
    const std::vector<std::string>& event_log() const { return events_; }

    // Sensor snapshot for one node at the current sim time.
    SensorReading sensor_read(NodeId node) const;

private:
    void place_evacuees();
    void refresh_smart_packets();
    void check_hazard_paths();
    void service_phase();
    void movement_phase();
    void health_phase();
    void finish_tick_stats();

    Path plan_route(Evacuee& ev);
    bool route_usable(const Evacuee& ev) const;
    void adopt(Evacuee& ev, Path route);
    void release(Evacuee& ev, std::size_t edge_index);
    void record(const char* type, int evacuee, NodeId node);
    std::vector<SensorReading> snapshot_readings() const;

    const Scenario& scenario_;
    RunConfig cfg_;
    const BuildingGraph& g_;
    HazardState hazard_;
    GoalClass goal_;
    Rng rng_;

    std::vector<Evacuee> evs_;
    std::vector<std::deque<int>> queues_;
    std::vector<NodeQueueStats> stats_;
    std::unique_ptr<CpnEngine> engine_;

    double t_ = 0.0;
    std::int64_t tick_ = 0;
    int alive_ = 0;
    int exited_ = 0;
    int dead_ = 0;

    SimResult result_;
    std::vector<std::string> events_;
};

SimResult run_simulation(const Scenario& scenario, const RunConfig& cfg);

}  // namespace evacsim
