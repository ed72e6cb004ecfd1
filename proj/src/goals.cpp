#include "evacsim/goals.hpp"

#include <cmath>

namespace evacsim {

std::string to_string(GoalClass g) {
    switch (g) {
        case GoalClass::Time: return "time";
        case GoalClass::Energy: return "energy";
        case GoalClass::Safety: return "safety";
        case GoalClass::Distance: return "distance";
    }
    return "?";
}

std::optional<GoalClass> goal_class_from_string(const std::string& s) {
    if (s == "time") return GoalClass::Time;
    if (s == "energy") return GoalClass::Energy;
    if (s == "safety") return GoalClass::Safety;
    if (s == "distance") return GoalClass::Distance;
    return std::nullopt;
}

double effective_length_from_readings(const BuildingGraph& graph, std::size_t edge_index,
                                      std::span<const SensorReading> readings,
                                      const HazardState& hazard) {
    const GraphEdge& e = graph.edge(edge_index);
    return effective_length(e.length_cm, readings[e.src].hazard_intensity,
                            readings[e.dst].hazard_intensity, hazard.kappa(),
                            hazard.block_threshold());
}

TimedForecast predict_congestion_timed(const Path& path, const BuildingGraph& graph,
                                       std::span<const SensorReading> readings,
                                       const EvacueeClass& cls, const HazardState& hazard) {
    TimedForecast out;
    out.arrival_times.reserve(path.size());
    out.arrival_times.push_back(0.0);

    double total_time = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const std::size_t ei = graph.edge_between(path[i], path[i + 1]);
        if (ei == BuildingGraph::npos)
            throw GraphError("predict_congestion: missing edge " + std::to_string(path[i]) + "-" +
                             std::to_string(path[i + 1]));
        const double t_edge =
            effective_length_from_readings(graph, ei, readings, hazard) / cls.speed_cm_s;

        // Queue projected to the moment this evacuee reaches path[i].
        const SensorReading& r = readings[path[i]];
        const double projected_queue =
            r.queue_length + (r.arrival_rate - r.departure_rate) * total_time;
        double t_node = 0.0;
        if (projected_queue > 0.0) {
            t_node = r.arrival_rate > 0.0 ? projected_queue / r.arrival_rate : kNodeWaitCap_s;
            out.totals.congestion_events += 1;
        }
        total_time += t_edge + t_node;
        out.arrival_times.push_back(total_time);
    }
    out.totals.travel_time_s = total_time;
    return out;
}

CongestionForecast predict_congestion(const Path& path, const BuildingGraph& graph,
                                      std::span<const SensorReading> readings,
                                      const EvacueeClass& cls, const HazardState& hazard) {
    return predict_congestion_timed(path, graph, readings, cls, hazard).totals;
}

double goal_time(const Path& path, const BuildingGraph& graph,
                 std::span<const SensorReading> readings, const EvacueeClass& cls,
                 const HazardState& hazard) {
    return predict_congestion(path, graph, readings, cls, hazard).travel_time_s;
}

double goal_energy(const Path& path, const BuildingGraph& graph,
                   std::span<const SensorReading> readings, const EvacueeClass& cls,
                   const HazardState& hazard) {
    const CongestionForecast fc = predict_congestion(path, graph, readings, cls, hazard);
    double energy = cls.brake_energy * fc.congestion_events;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const std::size_t ei = graph.edge_between(path[i], path[i + 1]);
        energy += cls.move_energy_per_cm * effective_length_from_readings(graph, ei, readings, hazard);
    }
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        energy += cls.turn_energy_per_degree * rotation_angle(path[i - 1], path[i], path[i + 1], graph);
    }
    return energy;
}

double goal_safety(const Path& path, const BuildingGraph& graph, const HazardState& hazard,
                   std::span<const SensorReading> readings, const EvacueeClass& cls,
                   double t_current) {
    const TimedForecast fc = predict_congestion_timed(path, graph, readings, cls, hazard);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const NodeId reached = path[i + 1];
        const double t_evacuee = fc.arrival_times[i + 1];
        const double hazard_arrival = hazard.start_time() + hazard.reach_time(reached);
        // Exposure accrues only when the hazard beats the evacuee to the node.
        if (t_evacuee + t_current >= hazard_arrival && std::isfinite(hazard_arrival)) {
            total += hazard.growth_rate() * (t_evacuee + t_current - hazard_arrival);
        }
        total += graph.effective_safety(graph.edge_between(path[i], path[i + 1]));
    }
    return total;
}

double goal_distance(const Path& path, const BuildingGraph& graph, const HazardState& hazard,
                     double t) {
    return path_cost(graph, path, hazard, t);
}

double goal_distance_from_readings(const Path& path, const BuildingGraph& graph,
                                   std::span<const SensorReading> readings,
                                   const HazardState& hazard) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const std::size_t ei = graph.edge_between(path[i], path[i + 1]);
        if (ei == BuildingGraph::npos)
            throw GraphError("goal_distance: missing edge " + std::to_string(path[i]) + "-" +
                             std::to_string(path[i + 1]));
        total += effective_length_from_readings(graph, ei, readings, hazard);
    }
    return total;
}

double goal_value(GoalClass goal, const Path& path, const BuildingGraph& graph,
                  const HazardState& hazard, std::span<const SensorReading> readings,
                  const EvacueeClass& cls, double t_current) {
    switch (goal) {
        case GoalClass::Time: return goal_time(path, graph, readings, cls, hazard);
        case GoalClass::Energy: return goal_energy(path, graph, readings, cls, hazard);
        case GoalClass::Safety: return goal_safety(path, graph, hazard, readings, cls, t_current);
        case GoalClass::Distance: return goal_distance_from_readings(path, graph, readings, hazard);
    }
    return kInfiniteLength;
}

}  // namespace evacsim
