#include "evacsim/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace evacsim {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ScenarioError(where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

double as_number(const json& v, const char* key, const std::string& where) {
    if (!v.is_number()) fail(where, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

double num_field(const json& obj, const char* key, const std::string& where) {
    return as_number(require(obj, key, where), key, where);
}

double num_or(const json& obj, const char* key, double fallback, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return as_number(*it, key, where);
}

int int_field(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) fail(where, std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

GraphNode parse_node(const json& j, size_t index) {
    std::string where = "nodes[" + std::to_string(index) + "]";
    if (!j.is_object()) fail(where, "must be an object");
    GraphNode n;
    n.id = int_field(j, "id", where);
    n.x_cm = num_field(j, "x_cm", where);
    n.y_cm = num_field(j, "y_cm", where);
    n.floor = int_field(j, "floor", where);
    n.capacity = j.contains("capacity") ? int_field(j, "capacity", where) : 1;
    n.is_exit = j.value("is_exit", false);
    return n;
}

GraphEdge parse_edge(const json& j, size_t index) {
    std::string where = "edges[" + std::to_string(index) + "]";
    if (!j.is_object()) fail(where, "must be an object");
    GraphEdge e;
    e.src = int_field(j, "src", where);
    e.dst = int_field(j, "dst", where);
    e.length_cm = num_field(j, "length_cm", where);
    return e;
}

EvacueeClass parse_class(const json& j, size_t index) {
    std::string where = "classes[" + std::to_string(index) + "]";
    if (!j.is_object()) fail(where, "must be an object");
    EvacueeClass c;
    c.name = j.value("name", c.name);
    c.speed_cm_s = num_or(j, "speed_cm_s", c.speed_cm_s, where);
    if (c.speed_cm_s <= 0.0) fail(where, "speed_cm_s must be positive");
    if (j.contains("goal")) {
        const json& g = j.at("goal");
        if (!g.is_string()) fail(where, "field 'goal' must be a string");
        auto parsed = goal_class_from_string(g.get<std::string>());
        if (!parsed) fail(where, "unknown goal '" + g.get<std::string>() + "'");
        c.goal = *parsed;
    }
    c.brake_energy = num_or(j, "c_b", c.brake_energy, where);
    c.move_energy_per_cm = num_or(j, "c_s", c.move_energy_per_cm, where);
    c.turn_energy_per_degree = num_or(j, "c_t", c.turn_energy_per_degree, where);
    c.initial_health = num_or(j, "health", c.initial_health, where);
    if (c.initial_health <= 0.0) fail(where, "health must be positive");
    return c;
}

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("invalid JSON: ") + e.what());
    }
}

Scenario scenario_from_json(const json& doc) {
    if (!doc.is_object()) fail("document", "root must be an object");
    int schema = int_field(doc, "schema", "document");
    if (schema != 1) fail("document", "unsupported schema version " + std::to_string(schema));

    Scenario s;
    s.name = doc.value("name", s.name);

    const json& jnodes = require(doc, "nodes", "document");
    const json& jedges = require(doc, "edges", "document");
    if (!jnodes.is_array() || jnodes.empty()) fail("document", "'nodes' must be a non-empty array");
    if (!jedges.is_array()) fail("document", "'edges' must be an array");

    std::vector<GraphNode> nodes;
    nodes.reserve(jnodes.size());
    for (size_t i = 0; i < jnodes.size(); ++i) nodes.push_back(parse_node(jnodes[i], i));

    std::vector<GraphEdge> edges;
    edges.reserve(jedges.size());
    for (size_t i = 0; i < jedges.size(); ++i) edges.push_back(parse_edge(jedges[i], i));

    try {
        s.graph = BuildingGraph(std::move(nodes), std::move(edges));
        s.graph.validate();
    } catch (const GraphError& e) {
        throw ScenarioError(std::string("invalid graph: ") + e.what());
    }

    if (doc.contains("hazard") && !doc.at("hazard").is_null()) {
        const json& jh = doc.at("hazard");
        if (!jh.is_object()) fail("hazard", "must be an object");
        HazardConfig h;
        h.source = int_field(jh, "source", "hazard");
        if (h.source < 0 || h.source >= static_cast<NodeId>(s.graph.node_count()))
            fail("hazard", "source node " + std::to_string(h.source) + " does not exist");
        h.spread_rate_cm_s = num_field(jh, "spread_rate_cm_s", "hazard");
        if (h.spread_rate_cm_s <= 0.0) fail("hazard", "spread_rate_cm_s must be positive");
        h.growth_rate_per_s = num_field(jh, "growth_rate_per_s", "hazard");
        if (h.growth_rate_per_s < 0.0) fail("hazard", "growth_rate_per_s must be non-negative");
        h.start_time_s = num_or(jh, "start_time_s", 0.0, "hazard");
        if (h.start_time_s < 0.0) fail("hazard", "start_time_s must be non-negative");
        s.hazard = h;
    }

    if (doc.contains("classes")) {
        const json& jc = doc.at("classes");
        if (!jc.is_array()) fail("document", "'classes' must be an array");
        for (size_t i = 0; i < jc.size(); ++i) s.classes.push_back(parse_class(jc[i], i));
    }
    if (s.classes.empty()) s.classes.push_back(EvacueeClass{});

    return s;
}

}  // namespace

HazardState Scenario::make_hazard() const {
    if (!hazard) return HazardState::none(graph.node_count());
    return HazardState(graph, hazard->source, hazard->spread_rate_cm_s,
                       hazard->growth_rate_per_s, hazard->start_time_s);
}

Scenario load_scenario(const std::string& text) {
    return scenario_from_json(parse_document(text));
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return load_scenario(buf.str());
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + ": " + e.what());
    }
}

BuildingGraph load_graph(const std::string& text) {
    return load_scenario(text).graph;
}

std::string serialize(const Scenario& scenario) {
    json doc;
    doc["schema"] = 1;
    doc["name"] = scenario.name;

    json jnodes = json::array();
    for (const GraphNode& n : scenario.graph.nodes()) {
        jnodes.push_back({{"id", n.id},
                          {"x_cm", n.x_cm},
                          {"y_cm", n.y_cm},
                          {"floor", n.floor},
                          {"capacity", n.capacity},
                          {"is_exit", n.is_exit}});
    }
    doc["nodes"] = std::move(jnodes);

    json jedges = json::array();
    for (const GraphEdge& e : scenario.graph.edges()) {
        jedges.push_back({{"src", e.src}, {"dst", e.dst}, {"length_cm", e.length_cm}});
    }
    doc["edges"] = std::move(jedges);

    if (scenario.hazard) {
        doc["hazard"] = {{"source", scenario.hazard->source},
                         {"spread_rate_cm_s", scenario.hazard->spread_rate_cm_s},
                         {"growth_rate_per_s", scenario.hazard->growth_rate_per_s},
                         {"start_time_s", scenario.hazard->start_time_s}};
    }

    json jclasses = json::array();
    for (const EvacueeClass& c : scenario.classes) {
        jclasses.push_back({{"name", c.name},
                            {"speed_cm_s", c.speed_cm_s},
                            {"goal", to_string(c.goal)},
                            {"c_b", c.brake_energy},
                            {"c_s", c.move_energy_per_cm},
                            {"c_t", c.turn_energy_per_degree},
                            {"health", c.initial_health}});
    }
    doc["classes"] = std::move(jclasses);

    return doc.dump(2) + "\n";
}

}  // namespace evacsim
