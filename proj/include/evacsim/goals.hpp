#pragma once

#include <optional>
#include <span>
#include <string>

#include "evacsim/graph.hpp"
#include "evacsim/hazard.hpp"

namespace evacsim {

enum class GoalClass { Time, Energy, Safety, Distance };

std::string to_string(GoalClass g);
std::optional<GoalClass> goal_class_from_string(const std::string& s);

// Mobility/energy/health profile of one category of evacuees.
struct EvacueeClass {
    std::string name = "normal";
    double speed_cm_s = 100.0;              // V_speed
    GoalClass goal = GoalClass::Time;
    double brake_energy = 10.0;             // energy per congestion (braking) event
    double move_energy_per_cm = 0.01;       // energy per cm travelled
    double turn_energy_per_degree = 0.2;    // energy per degree turned
    double initial_health = 100.0;
};

// Outcome of the congestion forecast along a path.
struct CongestionForecast {
    int congestion_events = 0;   // predicted number of non-empty queues met
    double travel_time_s = 0.0;  // predicted total time including queue waits
};

// Upper bound on a single queue wait when the recorded arrival rate is zero.
inline constexpr double kNodeWaitCap_s = 300.0;

// Clamp-at-zero used by the time goal: K[x] = max(x, 0).
inline double clamp_nonneg(double x) { return x > 0.0 ? x : 0.0; }

// Hazard-penalized length of the edge between path[i] and path[i+1], computed
// from the intensities the sensors reported at the two endpoints.
double effective_length_from_readings(const BuildingGraph& graph, std::size_t edge_index,
                                      std::span<const SensorReading> readings,
                                      const HazardState& hazard);

// Forecast congestion and travel time along a path. Per edge the walk costs
// effective_length / speed; per visited node the queue projected to the
// arrival instant (q0 + (lambda - mu) * T) adds a wait of queue / lambda and
// counts one congestion event when positive.
CongestionForecast predict_congestion(const Path& path, const BuildingGraph& graph,
                                      std::span<const SensorReading> readings,
                                      const EvacueeClass& cls, const HazardState& hazard);

// As predict_congestion, but also reports the predicted arrival time at every
// path node (arrival_times[i] is the time to reach path[i]; index 0 is 0).
struct TimedForecast {
    CongestionForecast totals;
    std::vector<double> arrival_times;
};
TimedForecast predict_congestion_timed(const Path& path, const BuildingGraph& graph,
                                       std::span<const SensorReading> readings,
                                       const EvacueeClass& cls, const HazardState& hazard);

// Predicted egress time: travel plus clamped queue waits. Equal to
// predict_congestion(...).travel_time_s by construction.
double goal_time(const Path& path, const BuildingGraph& graph,
                 std::span<const SensorReading> readings, const EvacueeClass& cls,
                 const HazardState& hazard);

// Energy cost: braking at predicted congestion points, straight movement per
// effective cm, and turning per degree at interior nodes.
double goal_energy(const Path& path, const BuildingGraph& graph,
                   std::span<const SensorReading> readings, const EvacueeClass& cls,
                   const HazardState& hazard);

// Hazard exposure: for each downstream node, growth-rate exposure accrued
// between the hazard's arrival and the evacuee's predicted arrival (only when
// the hazard gets there first), plus the per-edge baseline exposure weight.
double goal_safety(const Path& path, const BuildingGraph& graph, const HazardState& hazard,
                   std::span<const SensorReading> readings, const EvacueeClass& cls,
                   double t_current);

// Total effective length at time t under the global hazard picture.
double goal_distance(const Path& path, const BuildingGraph& graph, const HazardState& hazard,
                     double t);

// Total effective length from sensor readings (the smart-packet view).
double goal_distance_from_readings(const Path& path, const BuildingGraph& graph,
                                   std::span<const SensorReading> readings,
                                   const HazardState& hazard);

// Goal-function dispatch used when scoring a discovered route from collected
// measurements. t_current matters only for the safety goal.
double goal_value(GoalClass goal, const Path& path, const BuildingGraph& graph,
                  const HazardState& hazard, std::span<const SensorReading> readings,
                  const EvacueeClass& cls, double t_current);

}  // namespace evacsim
