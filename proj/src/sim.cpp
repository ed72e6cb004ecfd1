#include "evacsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

namespace evacsim {
namespace {

void appendf(std::string& out, const char* fmt, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    out += buf;
}

}  // namespace

std::string to_string(RoutingMode m) {
    switch (m) {
        case RoutingMode::Dijkstra: return "dijkstra";
        case RoutingMode::CpnSp: return "cpn-sp";
        case RoutingMode::CpnSt: return "cpn-st";
        case RoutingMode::CpnEnergy: return "cpn-energy";
        case RoutingMode::CpnSafety: return "cpn-safety";
    }
    return "unknown";
}

std::optional<RoutingMode> routing_mode_from_string(const std::string& s) {
    if (s == "dijkstra") return RoutingMode::Dijkstra;
    if (s == "cpn-sp") return RoutingMode::CpnSp;
    if (s == "cpn-st") return RoutingMode::CpnSt;
    if (s == "cpn-energy") return RoutingMode::CpnEnergy;
    if (s == "cpn-safety") return RoutingMode::CpnSafety;
    return std::nullopt;
}

GoalClass routing_goal(RoutingMode m) {
    switch (m) {
        case RoutingMode::CpnSt: return GoalClass::Time;
        case RoutingMode::CpnEnergy: return GoalClass::Energy;
        case RoutingMode::CpnSafety: return GoalClass::Safety;
        default: return GoalClass::Distance;
    }
}

bool replan_adopts(int hops_since_replan, int movement_depth, bool forced, double switch_prob,
                   Rng& rng) {
    if (forced) return true;
    if (hops_since_replan < movement_depth) return false;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    return coin(rng) < switch_prob;
}

void NodeQueueStats::record_arrival(double t) {
    arrivals_.push_back(t);
    ++total_arrivals_;
}

void NodeQueueStats::record_departure(double t) {
    departures_.push_back(t);
    ++total_departures_;
}

void NodeQueueStats::advance(double t) {
    const double cutoff = t - window_s_;
    while (!arrivals_.empty() && arrivals_.front() < cutoff) arrivals_.pop_front();
    while (!departures_.empty() && departures_.front() < cutoff) departures_.pop_front();
}

double NodeQueueStats::arrival_rate() const {
    return (static_cast<double>(arrivals_.size()) + 1.0) / window_s_;
}

double NodeQueueStats::departure_rate() const {
    return (static_cast<double>(departures_.size()) + 1.0) / window_s_;
}

Simulation::Simulation(const Scenario& scenario, RunConfig cfg)
    : scenario_(scenario),
      cfg_(cfg),
      g_(scenario.graph),
      hazard_(scenario.make_hazard()),
      goal_(routing_goal(cfg.mode)),
      rng_(cfg.seed) {
    if (cfg_.population < 1) throw std::invalid_argument("population must be >= 1");
    if (cfg_.tick_s <= 0.0) throw std::invalid_argument("tick must be positive");
    queues_.resize(g_.node_count());
    stats_.assign(g_.node_count(), NodeQueueStats{});
    if (cfg_.mode != RoutingMode::Dijkstra)
        engine_ = std::make_unique<CpnEngine>(g_, cfg_.cpn);
}

SensorReading Simulation::sensor_read(NodeId node) const {
    SensorReading r;
    r.node = node;
    r.queue_length = static_cast<double>(queues_.at(static_cast<std::size_t>(node)).size());
    r.arrival_rate = stats_.at(static_cast<std::size_t>(node)).arrival_rate();
    r.departure_rate = stats_.at(static_cast<std::size_t>(node)).departure_rate();
    r.hazard_intensity = hazard_.intensity(node, t_);
    return r;
}

std::vector<SensorReading> Simulation::snapshot_readings() const {
    std::vector<SensorReading> out;
    out.reserve(g_.node_count());
    for (NodeId n = 0; n < static_cast<NodeId>(g_.node_count()); ++n)
        out.push_back(sensor_read(n));
    return out;
}

void Simulation::record(const char* type, int evacuee, NodeId node) {
    if (!cfg_.record_events) return;
    std::string line;
    appendf(line, "%g,%s,%d,%d", t_, type, evacuee, node);
    events_.push_back(std::move(line));
}

void Simulation::place_evacuees() {
    std::vector<NodeId> spots;
    for (const GraphNode& n : g_.nodes())
        if (!n.is_exit) spots.push_back(n.id);
    if (spots.empty()) throw std::runtime_error("scenario has no non-exit node to place evacuees on");
    for (NodeId n : cfg_.spawn_nodes)
        if (!g_.has_node(n) || g_.node(n).is_exit)
            throw std::invalid_argument("spawn node " + std::to_string(n) +
                                        " is missing or an exit");

    std::uniform_int_distribution<std::size_t> pick(0, spots.size() - 1);
    const int classes = static_cast<int>(scenario_.classes.size());
    evs_.resize(static_cast<std::size_t>(cfg_.population));
    for (int i = 0; i < cfg_.population; ++i) {
        Evacuee& ev = evs_[static_cast<std::size_t>(i)];
        ev.id = i;
        ev.class_index = i % classes;
        ev.node = cfg_.spawn_nodes.empty()
                      ? spots[pick(rng_)]
                      : cfg_.spawn_nodes[static_cast<std::size_t>(i) % cfg_.spawn_nodes.size()];
        ev.health = scenario_.classes[static_cast<std::size_t>(ev.class_index)].initial_health;
        ev.state = EvacueeState::Queued;
        queues_[static_cast<std::size_t>(ev.node)].push_back(i);
        stats_[static_cast<std::size_t>(ev.node)].record_arrival(0.0);
        record("spawn", i, ev.node);
    }
    alive_ = cfg_.population;
}

void Simulation::check_hazard_paths() {
    for (Evacuee& ev : evs_) {
        if (ev.state != EvacueeState::Queued && ev.state != EvacueeState::Moving) continue;
        if (ev.route.size() < 2) continue;
        for (std::size_t i = 1; i < ev.route.size(); ++i) {
            if (hazard_.intensity(ev.route[i], t_) > 0.0) {
                ev.route_invalid = true;
                break;
            }
        }
    }
}

void Simulation::refresh_smart_packets() {
    // Each node runs its probe timer on its own phase of the common period;
    // there is no building-wide sync pulse. Neighbouring lists therefore
    // sample the queue state at different instants and can briefly disagree
    // while a congestion wave passes, which is exactly the disagreement the
    // movement-depth policy exists to ride out.
    const long slots =
        std::max<long>(1, std::lround(cfg_.sp_refresh_period_s / cfg_.tick_s));
    const long spread = std::clamp<long>(cfg_.sp_phase_spread, 1, slots);
    bool any_due = false;
    for (NodeId n = 0; n < static_cast<NodeId>(g_.node_count()); ++n)
        if (!g_.node(n).is_exit && tick_ % slots == n % spread) any_due = true;
    if (!any_due) return;

    auto readings = snapshot_readings();
    CpnEnvironment env;
    env.graph = &g_;
    env.hazard = &hazard_;
    env.readings = readings;
    env.evacuee_class = &scenario_.classes.front();
    env.t_now = t_;
    // Every node keeps probing, not just occupied ones: emptied regions must
    // re-measure routes the fire has since invalidated, or stale list values
    // would keep steering replanned evacuees into it.
    for (NodeId n = 0; n < static_cast<NodeId>(g_.node_count()); ++n) {
        if (g_.node(n).is_exit || tick_ % slots != n % spread) continue;
        engine_->launch_smart_packets(n, goal_, cfg_.cpn.sp_batch_size, env, rng_);
    }
}

bool Simulation::route_usable(const Evacuee& ev) const {
    if (ev.route.size() < 2 || ev.route.front() != ev.node) return false;
    const std::size_t ei = g_.edge_between(ev.route[0], ev.route[1]);
    if (ei == BuildingGraph::npos) return false;
    return std::isfinite(effective_length(g_, g_.edge(ei), hazard_, t_));
}

void Simulation::adopt(Evacuee& ev, Path route) {
    ev.route = std::move(route);
    ev.hops_since_replan = 0;
    ev.route_invalid = false;
}

Path Simulation::plan_route(Evacuee& ev) {
    const NodeId n = ev.node;
    if (cfg_.mode == RoutingMode::Dijkstra) {
        // Full knowledge, no oscillation policy: fresh global shortest path
        // at every decision node.
        adopt(ev, shortest_path(g_, n, hazard_, t_));
        return ev.route;
    }

    const bool force = !route_usable(ev) || ev.route_invalid;
    if (!replan_adopts(ev.hops_since_replan, cfg_.policy.movement_depth, force,
                       cfg_.policy.switch_prob, rng_))
        return ev.route;

    Path cand;
    if (auto best = engine_->best_route(n, goal_)) cand = std::move(*best);
    if (cand.empty()) cand = engine_->fallback_route(n, t_);

    bool cand_ok = cand.size() >= 2 && cand.front() == n;
    if (cand_ok) {
        const std::size_t ei = g_.edge_between(cand[0], cand[1]);
        cand_ok = ei != BuildingGraph::npos &&
                  std::isfinite(effective_length(g_, g_.edge(ei), hazard_, t_));
    }
    if (!cand_ok) return ev.route;

    adopt(ev, std::move(cand));
    return ev.route;
}

void Simulation::release(Evacuee& ev, std::size_t edge_index) {
    stats_[static_cast<std::size_t>(ev.node)].record_departure(t_);
    record("depart", ev.id, ev.node);
    ++result_.edge_visits[edge_index];
    ev.state = EvacueeState::Moving;
    ev.edge_to = ev.route[1];
    ev.edge_length_cm = g_.edge(edge_index).length_cm;
    ev.progress_cm = 0.0;
}

void Simulation::service_phase() {
    for (NodeId n = 0; n < static_cast<NodeId>(g_.node_count()); ++n) {
        auto& q = queues_[static_cast<std::size_t>(n)];
        if (q.empty()) continue;
        const bool is_exit = g_.node(n).is_exit;
        int budget = g_.node(n).capacity;

        std::deque<int> kept;
        while (!q.empty() && budget > 0) {
            const int id = q.front();
            q.pop_front();
            Evacuee& ev = evs_[static_cast<std::size_t>(id)];

            if (is_exit) {
                ev.state = EvacueeState::Exited;
                ev.egress_time_s = t_;
                stats_[static_cast<std::size_t>(n)].record_departure(t_);
                record("exit", id, n);
                --alive_;
                ++exited_;
                --budget;
                continue;
            }

            plan_route(ev);
            bool moved = false;
            if (ev.route.size() >= 2 && ev.route.front() == n) {
                const std::size_t ei = g_.edge_between(ev.route[0], ev.route[1]);
                if (ei != BuildingGraph::npos &&
                    std::isfinite(effective_length(g_, g_.edge(ei), hazard_, t_))) {
                    release(ev, ei);
                    --budget;
                    moved = true;
                }
            }
            if (!moved) {
                // Physically stuck this tick; retry after the next replan.
                ev.route_invalid = ev.route_invalid || !route_usable(ev);
                kept.push_back(id);
            }
        }
        if (!kept.empty()) {
            for (int id : q) kept.push_back(id);
            q.swap(kept);
        }
    }
}

void Simulation::movement_phase() {
    for (Evacuee& ev : evs_) {
        if (ev.state != EvacueeState::Moving) continue;
        const double v = scenario_.classes[static_cast<std::size_t>(ev.class_index)].speed_cm_s;
        const double step = v * cfg_.tick_s;
        ev.distance_cm += std::min(step, ev.edge_length_cm - ev.progress_cm);
        ev.progress_cm += step;
        if (ev.progress_cm + 1e-9 < ev.edge_length_cm) continue;

        const NodeId n = ev.edge_to;
        record("arrive", ev.id, n);
        if (!queues_[static_cast<std::size_t>(n)].empty()) {
            ++result_.congestion_events;
            ++ev.congestion_hits;
            record("congestion", ev.id, n);
        }
        ev.state = EvacueeState::Queued;
        ev.node = n;
        ev.edge_to = kNoNode;
        ev.progress_cm = 0.0;
        ev.edge_length_cm = 0.0;
        if (ev.route.size() >= 2 && ev.route[1] == n) {
            ev.route.erase(ev.route.begin());
        } else {
            ev.route.assign(1, n);
        }
        ++ev.hops_since_replan;
        queues_[static_cast<std::size_t>(n)].push_back(ev.id);
        stats_[static_cast<std::size_t>(n)].record_arrival(t_);
    }
}

void Simulation::health_phase() {
    if (!hazard_.active()) return;
    for (Evacuee& ev : evs_) {
        if (ev.state != EvacueeState::Queued && ev.state != EvacueeState::Moving) continue;
        double inten = hazard_.intensity(ev.node, t_);
        if (ev.state == EvacueeState::Moving)
            inten = std::max(inten, hazard_.intensity(ev.edge_to, t_));
        if (inten <= 0.0) continue;
        ev.health -= inten * cfg_.tick_s;
        if (ev.health > 0.0) continue;

        if (ev.state == EvacueeState::Queued) {
            auto& q = queues_[static_cast<std::size_t>(ev.node)];
            q.erase(std::find(q.begin(), q.end(), ev.id));
        }
        ev.state = EvacueeState::Dead;
        ev.death_time_s = t_;
        record("death", ev.id, ev.node);
        --alive_;
        ++dead_;
    }
}

void Simulation::finish_tick_stats() {
    int queued = 0;
    int moving = 0;
    for (const Evacuee& ev : evs_) {
        if (ev.state == EvacueeState::Queued) ++queued;
        else if (ev.state == EvacueeState::Moving) ++moving;
    }
    if (queued + moving + exited_ + dead_ != cfg_.population) ++result_.conservation_violations;
    for (std::size_t n = 0; n < queues_.size(); ++n) {
        const int len = static_cast<int>(queues_[n].size());
        if (len > result_.max_queue[n]) result_.max_queue[n] = len;
    }
}

SimResult Simulation::run() {
    result_ = SimResult{};
    result_.mode = cfg_.mode;
    result_.population = cfg_.population;
    result_.seed = cfg_.seed;
    result_.edge_visits.assign(g_.edge_count(), 0);
    result_.max_queue.assign(g_.node_count(), 0);
    result_.exit_counts.assign(g_.exits().size(), 0);
    result_.exit_shares.assign(g_.exits().size(), 0.0);

    place_evacuees();

    double next_hazard_check = cfg_.policy.hazard_check_period_s;

    while (alive_ > 0 && t_ < cfg_.time_cap_s - 1e-9) {
        for (NodeQueueStats& s : stats_) s.advance(t_);
        if (hazard_.active() && t_ + 1e-9 >= next_hazard_check) {
            next_hazard_check += cfg_.policy.hazard_check_period_s;
            check_hazard_paths();
        }
        if (engine_) refresh_smart_packets();
        service_phase();
        movement_phase();
        health_phase();
        finish_tick_stats();
        ++tick_;
        t_ = static_cast<double>(tick_) * cfg_.tick_s;
    }

    result_.ticks = tick_;
    result_.survivors = exited_;
    result_.dead = dead_;
    result_.stranded = alive_;
    result_.egress_times.assign(static_cast<std::size_t>(cfg_.population), -1.0);

    double egress_sum = 0.0;
    double last_egress = 0.0;
    for (const Evacuee& ev : evs_) {
        if (ev.state != EvacueeState::Exited) continue;
        result_.egress_times[static_cast<std::size_t>(ev.id)] = ev.egress_time_s;
        egress_sum += ev.egress_time_s;
        last_egress = std::max(last_egress, ev.egress_time_s);
        for (std::size_t x = 0; x < g_.exits().size(); ++x) {
            if (g_.exits()[x] == ev.node) {
                ++result_.exit_counts[x];
                break;
            }
        }
    }
    result_.mean_egress_time_s = exited_ > 0 ? egress_sum / exited_ : 0.0;
    result_.total_evac_time_s = exited_ == cfg_.population ? last_egress : t_;
    if (exited_ > 0)
        for (std::size_t x = 0; x < result_.exit_counts.size(); ++x)
            result_.exit_shares[x] = static_cast<double>(result_.exit_counts[x]) / exited_;
    if (engine_) result_.cpn = engine_->diagnostics;
    if (cfg_.record_events) result_.events = events_;
    return result_;
}

std::string SimResult::to_csv(const BuildingGraph& graph) const {
    std::string out;
    out += "key,value\n";
    appendf(out, "mode,%s\n", to_string(mode).c_str());
    appendf(out, "population,%d\n", population);
    appendf(out, "seed,%llu\n", static_cast<unsigned long long>(seed));
    appendf(out, "survivors,%d\n", survivors);
    appendf(out, "dead,%d\n", dead);
    appendf(out, "stranded,%d\n", stranded);
    appendf(out, "congestion_events,%lld\n", static_cast<long long>(congestion_events));
    appendf(out, "total_evac_time_s,%.6f\n", total_evac_time_s);
    appendf(out, "mean_egress_time_s,%.6f\n", mean_egress_time_s);
    appendf(out, "conservation_violations,%lld\n", static_cast<long long>(conservation_violations));
    appendf(out, "ticks,%lld\n", static_cast<long long>(ticks));
    appendf(out, "sp_launched,%lld\n", static_cast<long long>(cpn.sp_launched));
    appendf(out, "sp_delivered,%lld\n", static_cast<long long>(cpn.sp_delivered));
    appendf(out, "sp_dropped,%lld\n", static_cast<long long>(cpn.sp_dropped));
    appendf(out, "acks_applied,%lld\n", static_cast<long long>(cpn.acks_applied));

    out += "egress,evacuee,t_s\n";
    for (std::size_t i = 0; i < egress_times.size(); ++i)
        appendf(out, "egress,%zu,%.6f\n", i, egress_times[i]);

    out += "edge_visit,src,dst,count\n";
    for (std::size_t e = 0; e < edge_visits.size(); ++e)
        appendf(out, "edge_visit,%d,%d,%lld\n", graph.edge(e).src, graph.edge(e).dst,
                static_cast<long long>(edge_visits[e]));

    out += "max_queue,node,persons\n";
    for (std::size_t n = 0; n < max_queue.size(); ++n)
        appendf(out, "max_queue,%zu,%d\n", n, max_queue[n]);

    out += "exit_share,node,count,share\n";
    for (std::size_t x = 0; x < exit_counts.size(); ++x)
        appendf(out, "exit_share,%d,%lld,%.6f\n", graph.exits()[x],
                static_cast<long long>(exit_counts[x]), exit_shares[x]);
    return out;
}

SimResult run_simulation(const Scenario& scenario, const RunConfig& cfg) {
    Simulation sim(scenario, cfg);
    return sim.run();
}

}  // namespace evacsim
