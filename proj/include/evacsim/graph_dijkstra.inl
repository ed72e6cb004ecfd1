#pragma once

#include <queue>
#include <utility>

namespace evacsim {

template <typename CostFn>
DijkstraResult dijkstra(const BuildingGraph& graph, std::span<const NodeId> sources, CostFn cost) {
    const std::size_t n = graph.node_count();
    DijkstraResult out;
    out.dist.assign(n, std::numeric_limits<double>::infinity());
    out.parent.assign(n, kNoNode);

    using Item = std::pair<double, NodeId>;  // (dist, node); node breaks ties
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (NodeId s : sources) {
        if (!graph.has_node(s)) throw GraphError("dijkstra: unknown source node " + std::to_string(s));
        out.dist[s] = 0.0;
        heap.emplace(0.0, s);
    }
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > out.dist[u]) continue;
        for (const auto& adj : graph.neighbours(u)) {
            const double w = cost(adj.edge_index);
            if (!(w < std::numeric_limits<double>::infinity())) continue;
            const double nd = d + w;
            const NodeId v = adj.neighbour;
            if (nd < out.dist[v] || (nd == out.dist[v] && u < out.parent[v])) {
                out.dist[v] = nd;
                out.parent[v] = u;
                heap.emplace(nd, v);
            }
        }
    }
    return out;
}

}  // namespace evacsim
