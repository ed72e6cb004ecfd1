#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "evacsim/experiment.hpp"
#include "evacsim/sha1.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace evacsim;
using namespace evacsim::test;

namespace {

// Two ends of a corridor, each with its own nearby exit.
Scenario two_exit_scenario() {
    BuildingGraph g({node_at(0, 0, 0), node_at(1, -100, 0, true), node_at(2, 400, 0),
                     node_at(3, 500, 0, true)},
                    {edge_of(0, 1, 100), edge_of(2, 3, 100), edge_of(0, 2, 300)});
    return scenario_of(std::move(g));
}

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.modes = {RoutingMode::Dijkstra, RoutingMode::CpnSt};
    spec.populations = {2, 3};
    spec.replications = 2;
    spec.base_seed = 5;
    spec.time_cap_s = 120.0;
    return spec;
}

long line_count(const std::string& text) {
    return std::count(text.begin(), text.end(), '\n');
}

}  // namespace

TEST_CASE("summarize computes sample statistics") {
    const CellStats s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.min == 1.0);
    CHECK(s.max == 4.0);

    const CellStats one = summarize({7.0});
    CHECK(one.mean == 7.0);
    CHECK(one.stddev == 0.0);
    CHECK(one.min == 7.0);
    CHECK(one.max == 7.0);

    const CellStats none = summarize({});
    CHECK(none.mean == 0.0);
    CHECK(none.stddev == 0.0);
}

TEST_CASE("run_experiment produces one cell per population and mode") {
    const Scenario s = two_exit_scenario();
    const ExperimentSpec spec = small_spec();
    const ExperimentResult result = run_experiment(s, spec);

    REQUIRE(result.cells.size() == 4);
    for (int population : spec.populations) {
        for (RoutingMode mode : spec.modes) {
            const ExperimentCell& cell = result.cell(population, mode);
            CHECK(cell.population == population);
            CHECK(cell.mode == mode);
            REQUIRE(cell.runs.size() == 2);
            // Seeds are base + replication index.
            CHECK(cell.runs[0].seed == 5);
            CHECK(cell.runs[1].seed == 6);
            for (const SimResult& r : cell.runs) {
                CHECK(r.population == population);
                CHECK(r.mode == mode);
                CHECK(r.survivors + r.dead + r.stranded == population);
            }
        }
    }
    CHECK_THROWS_AS(result.cell(99, RoutingMode::Dijkstra), std::out_of_range);

    SUBCASE("aggregates recompute from the runs") {
        const ExperimentCell& cell = result.cell(3, RoutingMode::Dijkstra);
        double sum = 0.0;
        for (const SimResult& r : cell.runs) sum += r.survivors;
        CHECK(cell.survivors().mean == doctest::Approx(sum / 2.0));

        const auto shares = cell.pooled_exit_shares();
        REQUIRE(shares.size() == 2);
        double total = 0.0;
        for (double x : shares) total += x;
        CHECK(total == doctest::Approx(1.0));

        const auto visits = cell.summed_edge_visits();
        REQUIRE(visits.size() == 3);
        std::int64_t expect = 0;
        for (const SimResult& r : cell.runs)
            for (std::int64_t v : r.edge_visits) expect += v;
        std::int64_t got = 0;
        for (std::int64_t v : visits) got += v;
        CHECK(got == expect);
    }

    SUBCASE("reruns are byte-identical") {
        const ExperimentResult again = run_experiment(s, spec);
        CHECK(runs_csv(result) == runs_csv(again));
        CHECK(summary_csv(result) == summary_csv(again));
    }
}

TEST_CASE("csv emitters have the declared shapes") {
    const Scenario s = two_exit_scenario();
    const ExperimentSpec spec = small_spec();
    const ExperimentResult result = run_experiment(s, spec);

    // runs: header + populations * modes * replications.
    CHECK(line_count(runs_csv(result)) == 1 + 2 * 2 * 2);
    // summary: header + one line per cell.
    CHECK(line_count(summary_csv(result)) == 1 + 4);
    // congestion table: header + one line per population, a column per mode.
    const std::string table = congestion_table_csv(result);
    CHECK(line_count(table) == 1 + 2);
    std::istringstream in(table);
    std::string header;
    std::getline(in, header);
    CHECK(header == "population,dijkstra,cpn-st");
    // exit shares: header + cells * exits.
    CHECK(line_count(exit_shares_csv(result, s.graph)) == 1 + 4 * 2);
    // edge visits: header + one line per edge.
    CHECK(line_count(edge_visits_csv(result.cells.front(), s.graph)) == 1 + 3);
}

TEST_CASE("depth sweep scans the movement depth") {
    const Scenario s = two_exit_scenario();
    ExperimentSpec spec = small_spec();
    spec.populations = {2};
    const DepthSweepResult sweep = movement_depth_sweep(s, spec, 1, 3, 2);

    REQUIRE(sweep.rows.size() == 3);
    double best = -1.0;
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        CHECK(sweep.rows[i].depth == static_cast<int>(i) + 1);
        best = std::max(best, sweep.rows[i].survivors.mean);
    }
    CHECK(sweep.best_depth >= 1);
    CHECK(sweep.best_depth <= 3);
    // best_depth is the first depth reaching the maximum mean.
    for (const DepthSweepRow& row : sweep.rows) {
        if (row.depth == sweep.best_depth) CHECK(row.survivors.mean == best);
        if (row.depth < sweep.best_depth) CHECK(row.survivors.mean < best);
    }
    CHECK(line_count(depth_sweep_csv(sweep)) == 1 + 3);

    CHECK_THROWS_AS(movement_depth_sweep(s, spec, 0, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(movement_depth_sweep(s, spec, 3, 1, 2), std::invalid_argument);
}

TEST_CASE("sha1 matches known digests") {
    CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    CHECK(sha1_hex("The quick brown fox jumps over the lazy dog") ==
          "2fd4e1c67a2d28fced849ee1bb76e7391b93eb12");
    // Long input crosses several 64-byte blocks.
    CHECK(sha1_hex(std::string(1000, 'a')) == "291e9a6c66994949b57ba5e650361e98fc36b1ba");
    // Git-style blob hash, comparable with `git hash-object`.
    CHECK(git_blob_sha1("test content\n") == "d670460b4b4aece5915caf5c68d12f560a9fe3e4");
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("manifest echoes the spec and hashes the scenario") {
    ExperimentSpec spec = small_spec();
    const std::string text = "{\"schema\": 1}\n";
    const std::string manifest = manifest_json(spec, "demo.json", text);

    const auto doc = nlohmann::json::parse(manifest);
    CHECK(doc.at("scenario") == "demo.json");
    CHECK(doc.at("scenario_sha1") == git_blob_sha1(text));
    CHECK(doc.at("modes") == nlohmann::json({"dijkstra", "cpn-st"}));
    CHECK(doc.at("populations") == nlohmann::json({2, 3}));
    CHECK(doc.at("replications") == 2);
    CHECK(doc.at("base_seed") == 5);
    CHECK(doc.at("movement_depth") == 3);
    CHECK(doc.at("switch_prob") == 1.0);
    CHECK(doc.at("tick_s") == 1.0);
    CHECK(doc.at("sp_batch_size") == 20);
}

TEST_CASE("write_experiment_outputs materializes every table") {
    namespace fs = std::filesystem;
    const Scenario s = two_exit_scenario();
    const ExperimentSpec spec = small_spec();
    const ExperimentResult result = run_experiment(s, spec);

    const fs::path dir = fs::temp_directory_path() / "evacsim_experiment_test";
    fs::remove_all(dir);
    write_experiment_outputs(dir.string(), s, result);

    for (const char* name : {"runs.csv", "summary.csv", "congestion_table.csv",
                             "exit_shares.csv", "edge_visits_dijkstra_p2.csv",
                             "edge_visits_cpn-st_p3.csv"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir / name));
    }

    std::ifstream in(dir / "runs.csv", std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == runs_csv(result));
    fs::remove_all(dir);
}
