#include "evacsim/graph.hpp"

#include <algorithm>
#include <cmath>

#include "evacsim/hazard.hpp"

namespace evacsim {

BuildingGraph::BuildingGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    validate();

    // Build the adjacency index (neighbour lists sorted by id).
    const std::size_t n = nodes_.size();
    std::vector<std::vector<Adjacency>> lists(n);
    max_edge_length_ = 1.0;
    for (std::size_t ei = 0; ei < edges_.size(); ++ei) {
        const GraphEdge& e = edges_[ei];
        lists[e.src].push_back({e.dst, ei});
        lists[e.dst].push_back({e.src, ei});
        max_edge_length_ = std::max(max_edge_length_, e.length_cm);
    }
    adjacency_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& l = lists[i];
        std::sort(l.begin(), l.end(),
                  [](const Adjacency& a, const Adjacency& b) { return a.neighbour < b.neighbour; });
        adjacency_offsets_[i + 1] = adjacency_offsets_[i] + l.size();
        adjacency_.insert(adjacency_.end(), l.begin(), l.end());
    }
    for (const GraphNode& node : nodes_) {
        if (node.is_exit) exits_.push_back(node.id);
    }
}

const GraphNode& BuildingGraph::node(NodeId id) const {
    if (!has_node(id)) throw GraphError("unknown node id " + std::to_string(id));
    return nodes_[static_cast<std::size_t>(id)];
}

std::span<const BuildingGraph::Adjacency> BuildingGraph::neighbours(NodeId id) const {
    if (!has_node(id)) throw GraphError("unknown node id " + std::to_string(id));
    const std::size_t lo = adjacency_offsets_[id];
    const std::size_t hi = adjacency_offsets_[id + 1];
    return {adjacency_.data() + lo, hi - lo};
}

std::size_t BuildingGraph::edge_between(NodeId u, NodeId v) const {
    for (const auto& adj : neighbours(u)) {
        if (adj.neighbour == v) return adj.edge_index;
    }
    return npos;
}

void BuildingGraph::validate() const {
    if (nodes_.empty()) throw GraphError("graph has no nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const GraphNode& node = nodes_[i];
        if (node.id != static_cast<NodeId>(i))
            throw GraphError("node ids must be dense 0..N-1; node at index " + std::to_string(i) +
                             " has id " + std::to_string(node.id));
        if (node.capacity < 1)
            throw GraphError("node " + std::to_string(node.id) + " has capacity < 1");
    }
    bool any_exit = false;
    for (const GraphNode& node : nodes_) any_exit = any_exit || node.is_exit;
    if (!any_exit) throw GraphError("no exit node");

    std::vector<int> deg(nodes_.size(), 0);
    for (const GraphEdge& e : edges_) {
        if (e.src < 0 || static_cast<std::size_t>(e.src) >= nodes_.size() || e.dst < 0 ||
            static_cast<std::size_t>(e.dst) >= nodes_.size())
            throw GraphError("edge references unknown node");
        if (e.src == e.dst) throw GraphError("self-loop edge at node " + std::to_string(e.src));
        if (!(e.length_cm > 0.0))
            throw GraphError("edge " + std::to_string(e.src) + "-" + std::to_string(e.dst) +
                             " has non-positive length");
        ++deg[e.src];
        ++deg[e.dst];
    }
    for (const GraphNode& node : nodes_) {
        if (!node.is_exit && deg[node.id] == 0)
            throw GraphError("non-exit node " + std::to_string(node.id) + " has no neighbours");
    }
}

double effective_length(double physical_length_cm, double intensity_a, double intensity_b,
                        double kappa, double block_threshold) {
    const double worst = std::max(intensity_a, intensity_b);
    if (worst > block_threshold) return kInfiniteLength;
    return physical_length_cm * (1.0 + kappa * worst);
}

double effective_length(const BuildingGraph& graph, const GraphEdge& edge, const HazardState& hazard,
                        double t) {
    (void)graph;
    return effective_length(edge.length_cm, hazard.intensity(edge.src, t),
                            hazard.intensity(edge.dst, t), hazard.kappa(), hazard.block_threshold());
}

Path shortest_path(const BuildingGraph& graph, NodeId src, const HazardState& hazard, double t) {
    if (!graph.has_node(src)) throw GraphError("shortest_path: unknown node " + std::to_string(src));
    if (graph.node(src).is_exit) return {src};

    // Distance to the nearest exit from every node, then greedy descent from
    // src taking the smallest neighbour id among minimum-cost continuations.
    const auto res = dijkstra(graph, std::span<const NodeId>(graph.exits()), [&](std::size_t ei) {
        return effective_length(graph, graph.edge(ei), hazard, t);
    });
    if (!(res.dist[src] < kInfiniteLength)) return {};

    Path path{src};
    NodeId cur = src;
    while (!graph.node(cur).is_exit) {
        NodeId next = kNoNode;
        for (const auto& adj : graph.neighbours(cur)) {  // ascending neighbour id
            const double w = effective_length(graph, graph.edge(adj.edge_index), hazard, t);
            if (w + res.dist[adj.neighbour] == res.dist[cur]) {
                next = adj.neighbour;
                break;
            }
        }
        if (next == kNoNode) return {};  // unreachable under inconsistent costs; defensive
        path.push_back(next);
        cur = next;
    }
    return path;
}

double path_cost(const BuildingGraph& graph, const Path& path, const HazardState& hazard, double t) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const std::size_t ei = graph.edge_between(path[i], path[i + 1]);
        if (ei == BuildingGraph::npos)
            throw GraphError("path_cost: missing edge " + std::to_string(path[i]) + "-" +
                             std::to_string(path[i + 1]));
        total += effective_length(graph, graph.edge(ei), hazard, t);
    }
    return total;
}

double rotation_angle(NodeId prev, NodeId cur, NodeId next, const BuildingGraph& graph) {
    if (graph.edge_between(prev, cur) == BuildingGraph::npos ||
        graph.edge_between(cur, next) == BuildingGraph::npos)
        throw GraphError("rotation_angle: nodes are not connected");

    const GraphNode& a = graph.node(prev);
    const GraphNode& b = graph.node(cur);
    const GraphNode& c = graph.node(next);
    const double ux = b.x_cm - a.x_cm, uy = b.y_cm - a.y_cm;
    const double vx = c.x_cm - b.x_cm, vy = c.y_cm - b.y_cm;
    const double nu = std::hypot(ux, uy), nv = std::hypot(vx, vy);
    if (nu < 1e-9 || nv < 1e-9) return 0.0;  // vertical (stair) segment: no horizontal turn
    double cosang = (ux * vx + uy * vy) / (nu * nv);
    cosang = std::clamp(cosang, -1.0, 1.0);
    return std::acos(cosang) * 180.0 / std::acos(-1.0);
}

}  // namespace evacsim
