#pragma once

#include <vector>

#include "evacsim/graph.hpp"

namespace evacsim {

// Deterministic fire model: the front travels along the graph at spread_rate_a
// cm/s from the source, and intensity at a reached node grows linearly at
// growth_rate_b per second. Immutable per scenario.
class HazardState {
public:
    // Hazard-free placeholder: every node is reached at t = infinity.
    static HazardState none(std::size_t node_count);

    HazardState(const BuildingGraph& graph, NodeId source, double spread_rate_a,
                double growth_rate_b, double start_time_s = 0.0);

    NodeId source() const { return source_; }
    double spread_rate() const { return spread_rate_a_; }
    double growth_rate() const { return growth_rate_b_; }
    double start_time() const { return start_time_s_; }
    bool active() const { return source_ != kNoNode; }

    // Seconds after hazard start for the front to reach each node.
    const std::vector<double>& reach_times() const { return reach_times_; }
    double reach_time(NodeId n) const { return reach_times_.at(static_cast<std::size_t>(n)); }

    // Intensity at node n at absolute time t. Zero before the front arrives,
    // then growth_rate_b per second.
    double intensity(NodeId n, double t) const {
        const double arrival = start_time_s_ + reach_times_.at(static_cast<std::size_t>(n));
        if (t < arrival) return 0.0;
        return growth_rate_b_ * (t - arrival);
    }

    // Effective-length penalty per intensity unit and the intensity above
    // which an edge endpoint makes the edge impassable.
    double kappa() const { return kappa_; }
    double block_threshold() const { return block_threshold_; }

private:
    HazardState() = default;

    NodeId source_ = kNoNode;
    double spread_rate_a_ = 1.0;
    double growth_rate_b_ = 0.0;
    double start_time_s_ = 0.0;
    double kappa_ = 1.0;
    double block_threshold_ = 10.0;
    std::vector<double> reach_times_;
};

// Geodesic reach times: shortest physical path distance from the source to
// every node, divided by the spread rate. Unreachable nodes get infinity.
std::vector<double> compute_reach_times(const BuildingGraph& graph, NodeId source, double spread_rate_a);

// What a node's sensors report: local queue, smoothed arrival/departure rates
// and the hazard intensity at the node.
struct SensorReading {
    NodeId node = kNoNode;
    double queue_length = 0.0;     // persons
    double arrival_rate = 0.0;     // persons/s
    double departure_rate = 0.0;   // persons/s
    double hazard_intensity = 0.0;
};

}  // namespace evacsim
