#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evacsim/goals.hpp"
#include "evacsim/graph.hpp"
#include "evacsim/hazard.hpp"

namespace evacsim {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HazardConfig {
    NodeId source = kNoNode;
    double spread_rate_cm_s = 1.0;
    double growth_rate_per_s = 0.0;
    double start_time_s = 0.0;
};

// A full scenario document: the building, an optional fire, and the evacuee
// classes that may populate it.
struct Scenario {
    std::string name = "scenario";
    BuildingGraph graph;
    std::optional<HazardConfig> hazard;
    std::vector<EvacueeClass> classes;

    // Hazard model for this scenario (a hazard-free state when none is set).
    HazardState make_hazard() const;
};

// Parses and validates a scenario document (UTF-8 JSON, schema version 1).
// Throws ScenarioError with the offending location or invariant.
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// Graph-only view of a scenario document.
BuildingGraph load_graph(const std::string& text);

// Canonical JSON rendering; load_scenario(serialize(s)) reproduces s.
std::string serialize(const Scenario& scenario);

}  // namespace evacsim
