#include "evacsim/cpn.hpp"

#include <algorithm>
#include <cmath>

namespace evacsim {

Path remove_loops(const Path& walk) {
    if (walk.empty()) return {};
    // Scan from the back, keeping a stack; re-entering a node already on the
    // stack cuts the stretch between the two visits.
    std::vector<NodeId> stack;
    stack.reserve(walk.size());
    for (std::size_t k = walk.size(); k-- > 0;) {
        const NodeId x = walk[k];
        const auto it = std::find(stack.begin(), stack.end(), x);
        if (it != stack.end())
            stack.erase(it + 1, stack.end());
        else
            stack.push_back(x);
    }
    return Path(stack.rbegin(), stack.rend());
}

void RoutingList::insert(const Path& path, double goal_value, double timestamp) {
    if (!std::isfinite(goal_value)) {
        // A route re-measured as unusable is purged rather than kept stale.
        std::erase_if(entries_, [&](const RouteEntry& e) { return e.path == path; });
        return;
    }
    for (auto& e : entries_) {
        if (e.path == path) {
            e.goal_value = goal_value;
            e.timestamp = timestamp;
            std::stable_sort(entries_.begin(), entries_.end(),
                             [](const RouteEntry& a, const RouteEntry& b) {
                                 return a.goal_value < b.goal_value;
                             });
            return;
        }
    }
    RouteEntry entry{path, goal_value, timestamp};
    const auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry,
                                      [](const RouteEntry& a, const RouteEntry& b) {
                                          return a.goal_value < b.goal_value;
                                      });
    entries_.insert(pos, std::move(entry));
    if (entries_.size() > capacity_) entries_.pop_back();
}

CpnNodeState::CpnNodeState(const BuildingGraph& graph, NodeId id, const CpnConfig& cfg) {
    std::vector<NodeId> neigh;
    for (const auto& adj : graph.neighbours(id)) neigh.push_back(adj.neighbour);
    if (neigh.empty()) neigh.push_back(id);  // isolated exit; RNN is never consulted
    for (int g = 0; g < 4; ++g) {
        rnn_.emplace_back(neigh, cfg.rnn_initial_weight, cfg.rnn_alpha);
        routes_.emplace_back(cfg.routing_list_capacity);
    }
    known_intensity.assign(graph.node_count(), 0.0);
    known_intensity_time.assign(graph.node_count(), -1.0);
}

NodeId sp_next_hop(const BuildingGraph& graph, NodeId node, const RnnState& rnn,
                   double drift_probability, Rng& rng) {
    const auto adj = graph.neighbours(node);
    if (adj.empty()) throw GraphError("sp_next_hop: node " + std::to_string(node) + " is isolated");
    if (drift_probability > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < drift_probability) {
            std::uniform_int_distribution<std::size_t> pick(0, adj.size() - 1);
            return adj[pick(rng)].neighbour;
        }
    }
    return rnn.most_excited();
}

CpnEngine::CpnEngine(const BuildingGraph& graph, CpnConfig cfg) : graph_(graph), cfg_(cfg) {
    states_.reserve(graph.node_count());
    for (std::size_t i = 0; i < graph.node_count(); ++i)
        states_.emplace_back(graph, static_cast<NodeId>(i), cfg_);
}

std::vector<Ack> CpnEngine::launch_smart_packets(NodeId origin, GoalClass goal, int count,
                                                 const CpnEnvironment& env, Rng& rng) {
    std::vector<Ack> acks;
    if (graph_.node(origin).is_exit) return acks;

    const int hop_budget = cfg_.hop_budget_factor * static_cast<int>(graph_.node_count());
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int s = 0; s < count; ++s) {
        ++diagnostics.sp_launched;
        SmartPacket sp;
        sp.origin = origin;
        sp.goal = goal;
        sp.hop_budget = hop_budget;
        sp.visited.push_back(origin);
        sp.measurements.push_back(env.readings[origin]);

        const bool scout = coin(rng) < cfg_.scout_fraction;
        NodeId cur = origin;
        bool delivered = false;
        for (int hop = 0; hop < sp.hop_budget; ++hop) {
            const RnnState& rnn = node_state(cur).rnn(goal);
            // Untrained nodes explore blind; trained ones mostly follow the RNN.
            const double drift =
                scout || !rnn.trained() ? 1.0 : cfg_.drift_probability;
            const NodeId next = sp_next_hop(graph_, cur, rnn, drift, rng);
            cur = next;
            sp.visited.push_back(cur);
            sp.measurements.push_back(env.readings[cur]);
            if (graph_.node(cur).is_exit) {
                delivered = true;
                break;
            }
        }
        if (!delivered) {
            ++diagnostics.sp_dropped;
            continue;
        }
        ++diagnostics.sp_delivered;

        // Build the acknowledgement: loop-free reverse path with per-suffix
        // goal values computed from the packet's measurements.
        Ack ack;
        ack.goal = goal;
        ack.timestamp = env.t_now;
        Path forward = remove_loops(sp.visited);
        ack.reverse_path.assign(forward.rbegin(), forward.rend());
        ack.collected.reserve(ack.reverse_path.size());
        ack.suffix_goal_values.reserve(ack.reverse_path.size());
        for (std::size_t i = 0; i < ack.reverse_path.size(); ++i) {
            ack.collected.push_back(env.readings[ack.reverse_path[i]]);
            const Path suffix(forward.end() - static_cast<std::ptrdiff_t>(i) - 1, forward.end());
            ack.suffix_goal_values.push_back(goal_value(goal, suffix, *env.graph, *env.hazard,
                                                        env.readings, *env.evacuee_class, env.t_now));
        }
        for (NodeId n : ack.reverse_path) process_ack(n, ack);
        acks.push_back(std::move(ack));
    }
    return acks;
}

void CpnEngine::process_ack(NodeId node, const Ack& ack) {
    const auto it = std::find(ack.reverse_path.begin(), ack.reverse_path.end(), node);
    if (it == ack.reverse_path.end())
        throw GraphError("process_ack: node " + std::to_string(node) + " is not on the ack path");
    const std::size_t ri = static_cast<std::size_t>(it - ack.reverse_path.begin());

    CpnNodeState& state = node_state(node);

    // Fold the carried measurements into this node's hazard picture.
    for (std::size_t i = 0; i < ack.reverse_path.size(); ++i) {
        const NodeId n = ack.reverse_path[i];
        if (ack.timestamp >= state.known_intensity_time[n]) {
            state.known_intensity[n] = ack.collected[i].hazard_intensity;
            state.known_intensity_time[n] = ack.timestamp;
        }
    }

    if (ri == 0) return;  // the exit itself neither routes nor learns

    // Route from this node to the exit, in walking order.
    Path suffix(ack.reverse_path.begin(), it + 1);
    std::reverse(suffix.begin(), suffix.end());
    const double value = ack.suffix_goal_values[ri];
    state.routes(ack.goal).insert(suffix, value, ack.timestamp);
    if (!std::isfinite(value)) return;  // poisoned entry; nothing to reinforce

    const NodeId next_hop = ack.reverse_path[ri - 1];
    const double reward = 1.0 / std::max(value, 1e-9);
    state.rnn(ack.goal).reinforce(next_hop, reward);
    ++diagnostics.acks_applied;
}

std::optional<Path> CpnEngine::best_route(NodeId node, GoalClass goal) const {
    const RoutingList& list = node_state(node).routes(goal);
    if (list.empty()) return std::nullopt;
    return list.best().path;
}

Path CpnEngine::fallback_route(NodeId node, double t_now) const {
    (void)t_now;
    const CpnNodeState& state = node_state(node);
    const HazardState none = HazardState::none(graph_.node_count());
    const auto res = dijkstra(graph_, std::span<const NodeId>(graph_.exits()), [&](std::size_t ei) {
        const GraphEdge& e = graph_.edge(ei);
        return effective_length(e.length_cm, state.known_intensity[e.src],
                                state.known_intensity[e.dst], none.kappa(), none.block_threshold());
    });
    if (!(res.dist[node] < kInfiniteLength)) return {};
    Path path{node};
    NodeId cur = node;
    while (!graph_.node(cur).is_exit) {
        NodeId next = kNoNode;
        for (const auto& adj : graph_.neighbours(cur)) {
            const GraphEdge& e = graph_.edge(adj.edge_index);
            const double w = effective_length(e.length_cm, state.known_intensity[e.src],
                                              state.known_intensity[e.dst], none.kappa(),
                                              none.block_threshold());
            if (w + res.dist[adj.neighbour] == res.dist[cur]) {
                next = adj.neighbour;
                break;
            }
        }
        if (next == kNoNode) return {};
        path.push_back(next);
        cur = next;
    }
    return path;
}

}  // namespace evacsim
