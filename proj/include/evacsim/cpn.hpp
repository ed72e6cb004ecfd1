#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "evacsim/goals.hpp"
#include "evacsim/graph.hpp"
#include "evacsim/hazard.hpp"
#include "evacsim/rnn.hpp"

namespace evacsim {

using Rng = std::mt19937_64;

// Removes revisited segments from a walk so no node repeats, scanning from
// the destination end and cutting each re-entered stretch back to the
// occurrence nearest the destination. The result is a subsequence of the
// input, keeps both endpoints, and every consecutive pair already appeared
// consecutively in the input.
Path remove_loops(const Path& walk);

// One discovered route with its goal value. Lists keep the best value first.
struct RouteEntry {
    Path path;
    double goal_value = 0.0;
    double timestamp = 0.0;
};

class RoutingList {
public:
    explicit RoutingList(std::size_t capacity = 5) : capacity_(capacity) {}

    // Inserts a route or refreshes its value if the same path is present.
    // When full, the worst entry is evicted (a new route worse than all kept
    // entries is dropped). A non-finite value removes the path instead, so
    // routes re-measured as unusable do not linger at the top.
    void insert(const Path& path, double goal_value, double timestamp);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    const RouteEntry& best() const { return entries_.front(); }
    const std::vector<RouteEntry>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

private:
    std::size_t capacity_;
    std::vector<RouteEntry> entries_;  // ascending goal_value
};

// Exploration packet state while walking the graph.
struct SmartPacket {
    NodeId origin = kNoNode;
    GoalClass goal = GoalClass::Distance;
    Path visited;                            // nodes in visit order, origin first
    std::vector<SensorReading> measurements; // one per visited node
    int hop_budget = 0;
};

// Acknowledgement retracing a delivered smart packet. reverse_path runs from
// the exit back to the origin and is loop-free; suffix_goal_values[i] is the
// goal value of the route from reverse_path[i] to the exit.
struct Ack {
    GoalClass goal = GoalClass::Distance;
    Path reverse_path;
    std::vector<SensorReading> collected;     // reading for each reverse_path node
    std::vector<double> suffix_goal_values;
    double timestamp = 0.0;
};

struct CpnConfig {
    double drift_probability = 0.15;  // chance a smart packet ignores the RNN
    // Fraction of packets that random-walk the whole way. Per-hop drift alone
    // cannot escape a corridor whose every node has locked onto one direction
    // (that needs several deviations in a row), so a few packets stay blind
    // to keep rediscovery possible no matter what the RNNs have learned.
    double scout_fraction = 0.1;
    int hop_budget_factor = 4;        // budget = factor * node count
    std::size_t routing_list_capacity = 5;
    int sp_batch_size = 20;           // smart packets per refresh
    double rnn_alpha = 0.8;
    double rnn_initial_weight = 0.5;
};

// Everything a smart-packet batch can observe: the static map, the hazard
// model used for reach-time estimates, a per-node sensor snapshot, the class
// whose goal is being optimized, and the current time.
struct CpnEnvironment {
    const BuildingGraph* graph = nullptr;
    const HazardState* hazard = nullptr;
    std::span<const SensorReading> readings;
    const EvacueeClass* evacuee_class = nullptr;
    double t_now = 0.0;
};

struct CpnDiagnostics {
    std::int64_t sp_launched = 0;
    std::int64_t sp_delivered = 0;
    std::int64_t sp_dropped = 0;
    std::int64_t acks_applied = 0;
};

// Per-node routing state: one RNN and one routing list per goal class, plus
// the hazard picture assembled from acknowledgements passing through.
class CpnNodeState {
public:
    CpnNodeState(const BuildingGraph& graph, NodeId id, const CpnConfig& cfg);

    RnnState& rnn(GoalClass g) { return rnn_[static_cast<std::size_t>(g)]; }
    const RnnState& rnn(GoalClass g) const { return rnn_[static_cast<std::size_t>(g)]; }
    RoutingList& routes(GoalClass g) { return routes_[static_cast<std::size_t>(g)]; }
    const RoutingList& routes(GoalClass g) const { return routes_[static_cast<std::size_t>(g)]; }

    // Latest hazard intensity this node has learned per graph node, and when
    // it was measured.
    std::vector<double> known_intensity;
    std::vector<double> known_intensity_time;

private:
    std::vector<RnnState> rnn_;        // indexed by GoalClass
    std::vector<RoutingList> routes_;  // indexed by GoalClass
};

// Next hop for a smart packet at a node: drift uniformly at random with the
// given probability, otherwise follow the most excited neuron (ties to the
// smaller node id).
NodeId sp_next_hop(const BuildingGraph& graph, NodeId node, const RnnState& rnn,
                   double drift_probability, Rng& rng);

class CpnEngine {
public:
    CpnEngine(const BuildingGraph& graph, CpnConfig cfg = {});

    const CpnConfig& config() const { return cfg_; }
    CpnNodeState& node_state(NodeId id) { return states_.at(static_cast<std::size_t>(id)); }
    const CpnNodeState& node_state(NodeId id) const { return states_.at(static_cast<std::size_t>(id)); }

    // Launches `count` smart packets from origin toward the exits. Delivered
    // packets produce acknowledgements that are applied to every node on
    // their reverse path (and returned, mainly for inspection). Packets that
    // exhaust their hop budget are dropped and counted.
    std::vector<Ack> launch_smart_packets(NodeId origin, GoalClass goal, int count,
                                          const CpnEnvironment& env, Rng& rng);

    // Applies one acknowledgement at one node: refreshes the routing list
    // with the suffix from this node and trains the RNN toward the next hop.
    void process_ack(NodeId node, const Ack& ack);

    // Top-ranked route from a node, if any route is known.
    std::optional<Path> best_route(NodeId node, GoalClass goal) const;

    // Best route by the node's learned hazard picture when the routing list
    // is empty: an effective-length shortest path over known intensities.
    Path fallback_route(NodeId node, double t_now) const;

    CpnDiagnostics diagnostics;

private:
    const BuildingGraph& graph_;
    CpnConfig cfg_;
    std::vector<CpnNodeState> states_;
};

}  // namespace evacsim
