#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evacsim {

using NodeId = std::int32_t;
constexpr NodeId kNoNode = -1;

// A route through the building, as a node sequence. Empty means "no route".
using Path = std::vector<NodeId>;

inline constexpr double kInfiniteLength = std::numeric_limits<double>::infinity();

class HazardState;

// Point of interest: a doorway, corridor segment, stair landing or exit.
// capacity is the maximum number of evacuees the node releases per tick.
struct GraphNode {
    NodeId id = kNoNode;
    double x_cm = 0.0;
    double y_cm = 0.0;
    int floor = 0;
    int capacity = 1;
    bool is_exit = false;
};

// Undirected physical connection between two points of interest.
struct GraphEdge {
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    double length_cm = 0.0;

    NodeId other(NodeId n) const { return n == src ? dst : src; }
};

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Immutable after construction; safe to share across concurrent runs.
class BuildingGraph {
public:
    BuildingGraph() = default;
    BuildingGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const GraphNode& node(NodeId id) const;
    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    const GraphEdge& edge(std::size_t index) const { return edges_.at(index); }

    bool has_node(NodeId id) const {
        return id >= 0 && static_cast<std::size_t>(id) < nodes_.size();
    }

    // Adjacent (neighbour id, edge index) pairs, sorted by neighbour id.
    struct Adjacency {
        NodeId neighbour;
        std::size_t edge_index;
    };
    std::span<const Adjacency> neighbours(NodeId id) const;
    std::size_t degree(NodeId id) const { return neighbours(id).size(); }

    // Edge index between u and v, or npos when the edge does not exist.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t edge_between(NodeId u, NodeId v) const;

    const std::vector<NodeId>& exits() const { return exits_; }
    double max_edge_length() const { return max_edge_length_; }

    // Baseline exposure weight of an edge: length normalized by the longest
    // edge, so safety costs stay nonzero on hazard-free routes.
    double effective_safety(std::size_t edge_index) const {
        return edges_.at(edge_index).length_cm / max_edge_length_;
    }

    // Throws GraphError naming the violated invariant.
    void validate() const;

private:
    std::vector<GraphNode> nodes_;
    std::vector<GraphEdge> edges_;
    std::vector<Adjacency> adjacency_;       // concatenated per-node lists
    std::vector<std::size_t> adjacency_offsets_;
    std::vector<NodeId> exits_;
    double max_edge_length_ = 1.0;
};

// Hazard-penalized edge length from endpoint intensities. Returns infinity
// when either endpoint is above the blocking threshold.
double effective_length(double physical_length_cm, double intensity_a, double intensity_b,
                        double kappa, double block_threshold);

// Effective length of an edge at time t under the global hazard picture.
double effective_length(const BuildingGraph& graph, const GraphEdge& edge,
                        const HazardState& hazard, double t);

// Minimum-total-effective-length route from src to the nearest exit at time t.
// Ties are broken toward the smaller next node id. Returns a single-node path
// when src is itself an exit and an empty path when no exit is reachable.
Path shortest_path(const BuildingGraph& graph, NodeId src, const HazardState& hazard, double t);

// Total effective length of a path at time t (infinite if any edge is blocked).
double path_cost(const BuildingGraph& graph, const Path& path, const HazardState& hazard, double t);

// Absolute turning angle in degrees, in [0, 180], between edges prev-cur and
// cur-next, projected on the floor plane. Stacked nodes (zero horizontal
// offset, e.g. stair flights) contribute no turn.
double rotation_angle(NodeId prev, NodeId cur, NodeId next, const BuildingGraph& graph);

// Shortest-path distances over an arbitrary nonnegative edge cost. Used by
// the exit router and by the hazard spread model. cost(edge_index) may return
// infinity for impassable edges.
struct DijkstraResult {
    std::vector<double> dist;
    std::vector<NodeId> parent;
};

template <typename CostFn>
DijkstraResult dijkstra(const BuildingGraph& graph, std::span<const NodeId> sources, CostFn cost);

}  // namespace evacsim

#include "evacsim/graph_dijkstra.inl"
