#include "evacsim/hazard.hpp"

namespace evacsim {

HazardState HazardState::none(std::size_t node_count) {
    HazardState h;
    h.reach_times_.assign(node_count, std::numeric_limits<double>::infinity());
    return h;
}

HazardState::HazardState(const BuildingGraph& graph, NodeId source, double spread_rate_a,
                         double growth_rate_b, double start_time_s)
    : source_(source),
      spread_rate_a_(spread_rate_a),
      growth_rate_b_(growth_rate_b),
      start_time_s_(start_time_s),
      reach_times_(compute_reach_times(graph, source, spread_rate_a)) {
    if (growth_rate_b < 0.0) throw GraphError("hazard growth rate must be >= 0");
}

std::vector<double> compute_reach_times(const BuildingGraph& graph, NodeId source,
                                        double spread_rate_a) {
    if (!graph.has_node(source))
        throw GraphError("compute_reach_times: unknown source node " + std::to_string(source));
    if (!(spread_rate_a > 0.0)) throw GraphError("hazard spread rate must be > 0");

    const NodeId sources[] = {source};
    const auto res = dijkstra(graph, std::span<const NodeId>(sources, 1),
                              [&](std::size_t ei) { return graph.edge(ei).length_cm; });
    std::vector<double> times(graph.node_count());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = res.dist[i] / spread_rate_a;
    return times;
}

}  // namespace evacsim
