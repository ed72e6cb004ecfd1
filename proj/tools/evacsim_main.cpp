#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evacsim/experiment.hpp"
#include "evacsim/scenario.hpp"
#include "evacsim/sim.hpp"

namespace {

// "LO..HI" -> (lo, hi); a single number means a one-depth sweep.
bool parse_depth_range(const std::string& text, int& lo, int& hi) {
    const auto sep = text.find("..");
    try {
        if (sep == std::string::npos) {
            lo = hi = std::stoi(text);
        } else {
            lo = std::stoi(text.substr(0, sep));
            hi = std::stoi(text.substr(sep + 2));
        }
    } catch (const std::exception&) {
        return false;
    }
    return lo >= 1 && hi >= lo;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Building-evacuation simulator with CPN and Dijkstra routing"};

    std::string scenario_path;
    std::vector<std::string> mode_names{"dijkstra", "cpn-sp", "cpn-st"};
    std::vector<int> populations{30, 60, 90, 120};
    int replications = 10;
    std::uint64_t seed = 1;
    int movement_depth = 3;
    double switch_prob = 1.0;
    std::string sweep_range;
    std::string out_dir = "out";
    bool event_log = false;

    app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    app.add_option("--modes", mode_names,
                   "Routing modes: dijkstra,cpn-sp,cpn-st,cpn-energy,cpn-safety")
        ->delimiter(',');
    app.add_option("--populations", populations, "Evacuee counts to sweep")->delimiter(',');
    app.add_option("--replications", replications, "Replications per cell");
    app.add_option("--seed", seed, "Base seed; run seed = base + replication");
    app.add_option("--movement-depth", movement_depth, "Hops before a route switch is considered");
    app.add_option("--switch-prob", switch_prob, "Adoption probability once eligible");
    app.add_option("--sweep-depth", sweep_range, "Movement-depth sweep range, e.g. 1..10");
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--event-log", event_log, "Record per-evacuee event logs");

    CLI11_PARSE(app, argc, argv);

    evacsim::Scenario scenario;
    try {
        scenario = evacsim::load_scenario_file(scenario_path);
    } catch (const std::exception& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    evacsim::ExperimentSpec spec;
    spec.modes.clear();
    for (const std::string& name : mode_names) {
        auto mode = evacsim::routing_mode_from_string(name);
        if (!mode) {
            fprintf(stderr, "error: unknown routing mode '%s'\n", name.c_str());
            return 1;
        }
        spec.modes.push_back(*mode);
    }
    spec.populations = populations;
    spec.replications = replications;
    spec.base_seed = seed;
    spec.policy.movement_depth = movement_depth;
    spec.policy.switch_prob = switch_prob;
    spec.event_log = event_log;

    try {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);

        std::ofstream manifest(fs::path(out_dir) / "manifest.json", std::ios::binary);
        manifest << evacsim::manifest_json(spec, scenario_path, read_file(scenario_path));
        manifest.close();

        if (!sweep_range.empty()) {
            int lo = 0;
            int hi = 0;
            if (!parse_depth_range(sweep_range, lo, hi)) {
                fprintf(stderr, "error: bad --sweep-depth '%s' (expected LO..HI)\n",
                        sweep_range.c_str());
                return 1;
            }
            const auto sweep = evacsim::movement_depth_sweep(scenario, spec, lo, hi);
            std::ofstream csv(fs::path(out_dir) / "depth_sweep.csv", std::ios::binary);
            csv << evacsim::depth_sweep_csv(sweep);
            printf("depth sweep %d..%d: best depth %d\n", lo, hi, sweep.best_depth);
            for (const auto& row : sweep.rows)
                printf("  depth %2d: survivors %.1f +- %.1f\n", row.depth, row.survivors.mean,
                       row.survivors.stddev);
            return 0;
        }

        const auto result = evacsim::run_experiment(scenario, spec);
        evacsim::write_experiment_outputs(out_dir, scenario, result);

        if (scenario.graph.exits().size() < 2)
            fprintf(stderr, "warning: single-exit scenario, exit shares are degenerate\n");

        printf("%s", evacsim::congestion_table_csv(result).c_str());
        printf("outputs written to %s\n", out_dir.c_str());
    } catch (const std::exception& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
