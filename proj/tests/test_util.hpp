#pragma once

// Shared fixtures for the test suite: small graph builders, random instance
// generators and a brute-force shortest-route oracle.

#include <algorithm>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "evacsim/cpn.hpp"
#include "evacsim/graph.hpp"
#include "evacsim/hazard.hpp"
#include "evacsim/scenario.hpp"

namespace evacsim::test {

inline GraphNode node_at(NodeId id, double x, double y, bool is_exit = false, int capacity = 1,
                         int floor = 0) {
    GraphNode n;
    n.id = id;
    n.x_cm = x;
    n.y_cm = y;
    n.floor = floor;
    n.capacity = capacity;
    n.is_exit = is_exit;
    return n;
}

inline GraphEdge edge_of(NodeId src, NodeId dst, double length_cm) {
    GraphEdge e;
    e.src = src;
    e.dst = dst;
    e.length_cm = length_cm;
    return e;
}

// Corridor 0-1-...-(n-1), uniform edge length, last node is the exit.
inline BuildingGraph line_graph(int n, double length_cm = 100.0) {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    for (int i = 0; i < n; ++i)
        nodes.push_back(node_at(i, 100.0 * i, 0.0, i == n - 1));
    for (int i = 0; i + 1 < n; ++i)
        edges.push_back(edge_of(i, i + 1, length_cm));
    return BuildingGraph(std::move(nodes), std::move(edges));
}

inline Scenario scenario_of(BuildingGraph graph, std::optional<HazardConfig> hazard = std::nullopt,
                            std::vector<EvacueeClass> classes = {}) {
    Scenario s;
    s.name = "test";
    s.graph = std::move(graph);
    s.hazard = hazard;
    if (classes.empty()) classes.push_back(EvacueeClass{});
    s.classes = std::move(classes);
    return s;
}

inline std::vector<SensorReading> zero_readings(const BuildingGraph& g) {
    std::vector<SensorReading> out(g.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i].node = static_cast<NodeId>(i);
    return out;
}

// Connected random graph: a spanning tree plus a few extra edges, lengths in
// multiples of 50 cm (sums stay exact in double), one or two exits.
inline BuildingGraph random_connected_graph(Rng& rng, int max_nodes = 10, int max_extra_edges = 4,
                                            int max_exits = 2) {
    std::uniform_int_distribution<int> nd(2, max_nodes);
    const int n = nd(rng);
    std::uniform_int_distribution<int> len(1, 19);

    std::vector<GraphNode> nodes;
    for (int i = 0; i < n; ++i)
        nodes.push_back(node_at(i, 300.0 * (i % 5), 300.0 * (i / 5)));

    std::set<std::pair<NodeId, NodeId>> seen;
    std::vector<GraphEdge> edges;
    auto add = [&](NodeId u, NodeId v) {
        if (u == v) return false;
        if (u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second) return false;
        edges.push_back(edge_of(u, v, 50.0 * len(rng)));
        return true;
    };
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> prev(0, i - 1);
        add(prev(rng), i);
    }
    std::uniform_int_distribution<int> extra(0, max_extra_edges);
    std::uniform_int_distribution<int> any(0, n - 1);
    for (int k = extra(rng); k > 0; --k) add(any(rng), any(rng));

    std::uniform_int_distribution<int> xd(1, std::min(max_exits, n));
    int want = xd(rng);
    while (want > 0) {
        GraphNode& cand = nodes[static_cast<std::size_t>(any(rng))];
        if (!cand.is_exit) {
            cand.is_exit = true;
            --want;
        }
    }
    return BuildingGraph(std::move(nodes), std::move(edges));
}

inline Path random_walk(const BuildingGraph& g, Rng& rng, int max_steps = 30) {
    std::uniform_int_distribution<int> start(0, static_cast<int>(g.node_count()) - 1);
    std::uniform_int_distribution<int> steps(0, max_steps);
    Path walk{start(rng)};
    for (int k = steps(rng); k > 0; --k) {
        const auto adj = g.neighbours(walk.back());
        if (adj.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, adj.size() - 1);
        walk.push_back(adj[pick(rng)].neighbour);
    }
    return walk;
}

// Exhaustive oracle for shortest_path: enumerate every simple path that stops
// at the first exit it touches, accumulate edge costs left to right, keep the
// cheapest (ties to the lexicographically smaller node sequence).
struct OraclePath {
    Path path;
    double cost = std::numeric_limits<double>::infinity();
};

namespace detail {
inline void oracle_dfs(const BuildingGraph& g, const HazardState& hz, double t, Path& cur,
                       std::vector<char>& used, double cost, OraclePath& best) {
    const NodeId u = cur.back();
    if (g.node(u).is_exit) {
        if (cost < best.cost || (cost == best.cost && (best.path.empty() || cur < best.path))) {
            best.cost = cost;
            best.path = cur;
        }
        return;
    }
    for (const auto& adj : g.neighbours(u)) {
        if (used[static_cast<std::size_t>(adj.neighbour)]) continue;
        const double w = effective_length(g, g.edge(adj.edge_index), hz, t);
        if (!(w < kInfiniteLength)) continue;
        used[static_cast<std::size_t>(adj.neighbour)] = 1;
        cur.push_back(adj.neighbour);
        oracle_dfs(g, hz, t, cur, used, cost + w, best);
        cur.pop_back();
        used[static_cast<std::size_t>(adj.neighbour)] = 0;
    }
}
}  // namespace detail

inline OraclePath brute_shortest_to_exit(const BuildingGraph& g, NodeId src, const HazardState& hz,
                                         double t) {
    OraclePath best;
    Path cur{src};
    std::vector<char> used(g.node_count(), 0);
    used[static_cast<std::size_t>(src)] = 1;
    detail::oracle_dfs(g, hz, t, cur, used, 0.0, best);
    return best;
}

// First exception message of type E thrown by fn, or empty when none is.
template <typename E, typename Fn>
std::string thrown_message(Fn&& fn) {
    try {
        fn();
    } catch (const E& e) {
        return e.what();
    } catch (...) {
    }
    return {};
}

inline bool msg_contains(const std::string& msg, const std::string& needle) {
    return msg.find(needle) != std::string::npos;
}

}  // namespace evacsim::test
