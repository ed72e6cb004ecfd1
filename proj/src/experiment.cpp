#include "evacsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "evacsim/sha1.hpp"
#include "json.hpp"

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

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

RunConfig make_run_config(const ExperimentSpec& spec, RoutingMode mode, int population,
                          int replication) {
    RunConfig cfg;
    cfg.mode = mode;
    cfg.population = population;
    cfg.policy = spec.policy;
    cfg.seed = spec.base_seed + static_cast<std::uint64_t>(replication);
    cfg.tick_s = spec.tick_s;
    cfg.time_cap_s = spec.time_cap_s;
    cfg.sp_refresh_period_s = spec.sp_refresh_period_s;
    cfg.cpn = spec.cpn;
    cfg.record_events = spec.event_log;
    return cfg;
}

}  // namespace

CellStats summarize(const std::vector<double>& values) {
    CellStats s;
    if (values.empty()) return s;
    s.min = values.front();
    s.max = values.front();
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return s;
}

namespace {

template <typename Fn>
CellStats stat_over_runs(const std::vector<SimResult>& runs, Fn metric) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const SimResult& r : runs) v.push_back(metric(r));
    return summarize(v);
}

}  // namespace

CellStats ExperimentCell::survivors() const {
    return stat_over_runs(runs, [](const SimResult& r) { return double(r.survivors); });
}

CellStats ExperimentCell::evac_time() const {
    return stat_over_runs(runs, [](const SimResult& r) { return r.total_evac_time_s; });
}

CellStats ExperimentCell::congestion() const {
    return stat_over_runs(runs, [](const SimResult& r) { return double(r.congestion_events); });
}

std::vector<double> ExperimentCell::pooled_exit_shares() const {
    std::vector<double> shares;
    if (runs.empty()) return shares;
    std::vector<std::int64_t> counts(runs.front().exit_counts.size(), 0);
    std::int64_t total = 0;
    for (const SimResult& r : runs) {
        for (std::size_t x = 0; x < counts.size(); ++x) {
            counts[x] += r.exit_counts[x];
            total += r.exit_counts[x];
        }
    }
    shares.assign(counts.size(), 0.0);
    if (total > 0)
        for (std::size_t x = 0; x < counts.size(); ++x)
            shares[x] = static_cast<double>(counts[x]) / static_cast<double>(total);
    return shares;
}

std::vector<std::int64_t> ExperimentCell::summed_edge_visits() const {
    std::vector<std::int64_t> visits;
    if (runs.empty()) return visits;
    visits.assign(runs.front().edge_visits.size(), 0);
    for (const SimResult& r : runs)
        for (std::size_t e = 0; e < visits.size(); ++e) visits[e] += r.edge_visits[e];
    return visits;
}

const ExperimentCell& ExperimentResult::cell(int population, RoutingMode mode) const {
    for (const ExperimentCell& c : cells)
        if (c.population == population && c.mode == mode) return c;
    throw std::out_of_range("no such experiment cell");
}

ExperimentResult run_experiment(const Scenario& scenario, const ExperimentSpec& spec) {
    if (spec.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (spec.populations.empty()) throw std::invalid_argument("populations must be non-empty");
    if (spec.modes.empty()) throw std::invalid_argument("modes must be non-empty");

    ExperimentResult result;
    for (int population : spec.populations) {
        for (RoutingMode mode : spec.modes) {
            ExperimentCell cell;
            cell.population = population;
            cell.mode = mode;
            cell.runs.reserve(static_cast<std::size_t>(spec.replications));
            for (int rep = 0; rep < spec.replications; ++rep)
                cell.runs.push_back(
                    run_simulation(scenario, make_run_config(spec, mode, population, rep)));
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

DepthSweepResult movement_depth_sweep(const Scenario& scenario, const ExperimentSpec& spec,
                                      int depth_lo, int depth_hi, int population) {
    if (depth_lo < 1 || depth_hi < depth_lo) throw std::invalid_argument("bad depth range");

    RoutingMode mode = RoutingMode::CpnSt;
    for (RoutingMode m : spec.modes)
        if (m != RoutingMode::Dijkstra) {
            mode = m;
            break;
        }

    DepthSweepResult sweep;
    double best_mean = -1.0;
    for (int depth = depth_lo; depth <= depth_hi; ++depth) {
        std::vector<double> survivors;
        for (int rep = 0; rep < spec.replications; ++rep) {
            RunConfig cfg = make_run_config(spec, mode, population, rep);
            cfg.policy.movement_depth = depth;
            survivors.push_back(double(run_simulation(scenario, cfg).survivors));
        }
        DepthSweepRow row;
        row.depth = depth;
        row.survivors = summarize(survivors);
        if (row.survivors.mean > best_mean) {
            best_mean = row.survivors.mean;
            sweep.best_depth = depth;
        }
        sweep.rows.push_back(row);
    }
    return sweep;
}

std::string runs_csv(const ExperimentResult& result) {
    std::string out =
        "population,mode,replication,seed,survivors,dead,stranded,congestion_events,"
        "total_evac_time_s,mean_egress_time_s,sp_launched,sp_delivered,sp_dropped,"
        "acks_applied,conservation_violations\n";
    for (const ExperimentCell& cell : result.cells) {
        for (std::size_t rep = 0; rep < cell.runs.size(); ++rep) {
            const SimResult& r = cell.runs[rep];
            appendf(out, "%d,%s,%zu,%llu,%d,%d,%d,%lld,%.6f,%.6f,%lld,%lld,%lld,%lld,%lld\n",
                    cell.population, to_string(cell.mode).c_str(), rep,
                    static_cast<unsigned long long>(r.seed), r.survivors, r.dead, r.stranded,
                    static_cast<long long>(r.congestion_events), r.total_evac_time_s,
                    r.mean_egress_time_s, static_cast<long long>(r.cpn.sp_launched),
                    static_cast<long long>(r.cpn.sp_delivered),
                    static_cast<long long>(r.cpn.sp_dropped),
                    static_cast<long long>(r.cpn.acks_applied),
                    static_cast<long long>(r.conservation_violations));
        }
    }
    return out;
}

std::string summary_csv(const ExperimentResult& result) {
    std::string out =
        "population,mode,survivors_mean,survivors_std,survivors_min,survivors_max,"
        "evac_time_mean,evac_time_std,evac_time_min,evac_time_max,"
        "congestion_mean,congestion_std,congestion_min,congestion_max\n";
    for (const ExperimentCell& cell : result.cells) {
        const CellStats sv = cell.survivors();
        const CellStats et = cell.evac_time();
        const CellStats cg = cell.congestion();
        appendf(out, "%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                cell.population, to_string(cell.mode).c_str(), sv.mean, sv.stddev, sv.min, sv.max,
                et.mean, et.stddev, et.min, et.max, cg.mean, cg.stddev, cg.min, cg.max);
    }
    return out;
}

std::string congestion_table_csv(const ExperimentResult& result) {
    std::vector<int> populations;
    std::vector<RoutingMode> modes;
    for (const ExperimentCell& cell : result.cells) {
        if (std::find(populations.begin(), populations.end(), cell.population) ==
            populations.end())
            populations.push_back(cell.population);
        if (std::find(modes.begin(), modes.end(), cell.mode) == modes.end())
            modes.push_back(cell.mode);
    }
    std::string out = "population";
    for (RoutingMode m : modes) out += "," + to_string(m);
    out += "\n";
    for (int population : populations) {
        appendf(out, "%d", population);
        for (RoutingMode m : modes)
            appendf(out, ",%.1f", result.cell(population, m).congestion().mean);
        out += "\n";
    }
    return out;
}

std::string exit_shares_csv(const ExperimentResult& result, const BuildingGraph& graph) {
    std::string out = "population,mode,exit_node,count,share\n";
    for (const ExperimentCell& cell : result.cells) {
        std::vector<std::int64_t> counts(graph.exits().size(), 0);
        for (const SimResult& r : cell.runs)
            for (std::size_t x = 0; x < counts.size(); ++x) counts[x] += r.exit_counts[x];
        const std::vector<double> shares = cell.pooled_exit_shares();
        for (std::size_t x = 0; x < counts.size(); ++x)
            appendf(out, "%d,%s,%d,%lld,%.6f\n", cell.population, to_string(cell.mode).c_str(),
                    graph.exits()[x], static_cast<long long>(counts[x]), shares[x]);
    }
    return out;
}

std::string edge_visits_csv(const ExperimentCell& cell, const BuildingGraph& graph) {
    std::string out = "src,dst,visits\n";
    const std::vector<std::int64_t> visits = cell.summed_edge_visits();
    for (std::size_t e = 0; e < visits.size(); ++e)
        appendf(out, "%d,%d,%lld\n", graph.edge(e).src, graph.edge(e).dst,
                static_cast<long long>(visits[e]));
    return out;
}

std::string depth_sweep_csv(const DepthSweepResult& sweep) {
    std::string out = "depth,survivors_mean,survivors_std,survivors_min,survivors_max,best\n";
    for (const DepthSweepRow& row : sweep.rows)
        appendf(out, "%d,%.6f,%.6f,%.6f,%.6f,%d\n", row.depth, row.survivors.mean,
                row.survivors.stddev, row.survivors.min, row.survivors.max,
                row.depth == sweep.best_depth ? 1 : 0);
    return out;
}

std::string manifest_json(const ExperimentSpec& spec, const std::string& scenario_path,
                          const std::string& scenario_text) {
    nlohmann::json doc;
    doc["scenario"] = scenario_path;
    doc["scenario_sha1"] = git_blob_sha1(scenario_text);
    nlohmann::json modes = nlohmann::json::array();
    for (RoutingMode m : spec.modes) modes.push_back(to_string(m));
    doc["modes"] = std::move(modes);
    doc["populations"] = spec.populations;
    doc["replications"] = spec.replications;
    doc["base_seed"] = spec.base_seed;
    doc["movement_depth"] = spec.policy.movement_depth;
    doc["switch_prob"] = spec.policy.switch_prob;
    doc["hazard_check_period_s"] = spec.policy.hazard_check_period_s;
    doc["tick_s"] = spec.tick_s;
    doc["time_cap_s"] = spec.time_cap_s;
    doc["sp_refresh_period_s"] = spec.sp_refresh_period_s;
    doc["sp_batch_size"] = spec.cpn.sp_batch_size;
    doc["drift_probability"] = spec.cpn.drift_probability;
    doc["routing_list_capacity"] = spec.cpn.routing_list_capacity;
    return doc.dump(2) + "\n";
}

void write_experiment_outputs(const std::string& out_dir, const Scenario& scenario,
                              const ExperimentResult& result) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    write_file(dir / "runs.csv", runs_csv(result));
    write_file(dir / "summary.csv", summary_csv(result));
    write_file(dir / "congestion_table.csv", congestion_table_csv(result));
    if (scenario.graph.exits().size() >= 2) {
        write_file(dir / "exit_shares.csv", exit_shares_csv(result, scenario.graph));
    } else {
        write_file(dir / "exit_shares.csv",
                   "# single-exit scenario: shares are degenerate\n" +
                       exit_shares_csv(result, scenario.graph));
    }
    for (const ExperimentCell& cell : result.cells) {
        char name[64];
        snprintf(name, sizeof(name), "edge_visits_%s_p%d.csv", to_string(cell.mode).c_str(),
                 cell.population);
        write_file(dir / name, edge_visits_csv(cell, scenario.graph));
        for (std::size_t rep = 0; rep < cell.runs.size(); ++rep) {
            const SimResult& run = cell.runs[rep];
            if (run.events.empty()) continue;
            snprintf(name, sizeof(name), "events_%s_p%d_r%d.log", to_string(cell.mode).c_str(),
                     cell.population, static_cast<int>(rep));
            std::string text = "t,type,evacuee,node\n";
            for (const std::string& line : run.events) text += line + "\n";
            write_file(dir / name, text);
        }
    }
}

}  // namespace evacsim
