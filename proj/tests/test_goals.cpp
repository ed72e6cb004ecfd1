#include <cmath>

#include "doctest.h"
#include "evacsim/goals.hpp"
#include "test_util.hpp"

using namespace evacsim;
using namespace evacsim::test;

namespace {

// 0 -(500)- 1 -(200)- 2, exit at 2, all nodes collinear.
BuildingGraph corridor() {
    return BuildingGraph({node_at(0, 0, 0), node_at(1, 500, 0), node_at(2, 700, 0, true)},
                         {edge_of(0, 1, 500), edge_of(1, 2, 200)});
}

}  // namespace

TEST_CASE("goal class names round-trip") {
    for (GoalClass g :
         {GoalClass::Time, GoalClass::Energy, GoalClass::Safety, GoalClass::Distance}) {
        auto back = goal_class_from_string(to_string(g));
        REQUIRE(back.has_value());
        CHECK(*back == g);
    }
    CHECK(!goal_class_from_string("fastest").has_value());
}

TEST_CASE("quiet corridor forecast is pure walking time") {
    BuildingGraph g = corridor();
    const auto readings = zero_readings(g);
    const HazardState none = HazardState::none(3);
    const EvacueeClass cls;  // 100 cm/s

    const TimedForecast fc = predict_congestion_timed({0, 1, 2}, g, readings, cls, none);
    CHECK(fc.totals.congestion_events == 0);
    CHECK(fc.totals.travel_time_s == doctest::Approx(7.0));
    REQUIRE(fc.arrival_times.size() == 3);
    CHECK(fc.arrival_times[0] == 0.0);
    CHECK(fc.arrival_times[1] == doctest::Approx(5.0));
    CHECK(fc.arrival_times[2] == doctest::Approx(7.0));

    // Single-node and empty paths cost nothing.
    CHECK(predict_congestion({1}, g, readings, cls, none).travel_time_s == 0.0);
    CHECK(predict_congestion({}, g, readings, cls, none).travel_time_s == 0.0);
}

TEST_CASE("queue growth at a midpoint adds a projected wait") {
    BuildingGraph g = corridor();
    auto readings = zero_readings(g);
    // Node 1: two people queued, filling at 0.5/s, draining at 0.1/s.
    readings[1].queue_length = 2.0;
    readings[1].arrival_rate = 0.5;
    readings[1].departure_rate = 0.1;
    const HazardState none = HazardState::none(3);
    const EvacueeClass cls;

    // Arrive at node 1 after 5 s: queue 2 + 0.4*5 = 4, wait 4/0.5 = 8 s.
    const TimedForecast fc = predict_congestion_timed({0, 1, 2}, g, readings, cls, none);
    CHECK(fc.totals.congestion_events == 1);
    CHECK(fc.totals.travel_time_s == doctest::Approx(15.0));
    CHECK(fc.arrival_times[2] == doctest::Approx(15.0));
    CHECK(goal_time({0, 1, 2}, g, readings, cls, none) == fc.totals.travel_time_s);
}

TEST_CASE("a stalled queue costs the wait cap") {
    BuildingGraph g = corridor();
    auto readings = zero_readings(g);
    readings[1].queue_length = 3.0;
    const HazardState none = HazardState::none(3);
    const EvacueeClass cls;

    const CongestionForecast fc = predict_congestion({0, 1, 2}, g, readings, cls, none);
    CHECK(fc.congestion_events == 1);
    CHECK(fc.travel_time_s == doctest::Approx(7.0 + kNodeWaitCap_s));
}

TEST_CASE("forecast time is monotone in the starting queue") {
    BuildingGraph g = corridor();
    const HazardState none = HazardState::none(3);
    const EvacueeClass cls;
    double prev = 0.0;
    for (double q0 = 0.0; q0 <= 6.0; q0 += 1.0) {
        auto readings = zero_readings(g);
        readings[1].queue_length = q0;
        readings[1].arrival_rate = 0.5;
        readings[1].departure_rate = 0.5;
        const double t = goal_time({0, 1, 2}, g, readings, cls, none);
        CHECK(t >= prev);
        prev = t;
    }
}

TEST_CASE("energy charges movement, turning and braking") {
    const HazardState none = HazardState::none(4);
    EvacueeClass cls;  // c_b 10, c_s 0.01, c_t 0.2

    SUBCASE("straight quiet corridor: movement only") {
        BuildingGraph g = corridor();
        const auto readings = zero_readings(g);
        CHECK(goal_energy({0, 1, 2}, g, readings, cls, none) == doctest::Approx(7.0));
    }

    SUBCASE("right-angle turn adds 90 * c_t") {
        BuildingGraph g({node_at(0, 0, 0), node_at(1, 500, 0), node_at(2, 500, 200, true)},
                        {edge_of(0, 1, 500), edge_of(1, 2, 200)});
        const auto readings = zero_readings(g);
        CHECK(goal_energy({0, 1, 2}, g, readings, cls, none) == doctest::Approx(7.0 + 18.0));
    }

    SUBCASE("each predicted congestion event brakes once") {
        BuildingGraph g = corridor();
        auto readings = zero_readings(g);
        readings[1].queue_length = 2.0;
        readings[1].arrival_rate = 0.5;
        readings[1].departure_rate = 0.1;
        CHECK(goal_energy({0, 1, 2}, g, readings, cls, none) == doctest::Approx(10.0 + 7.0));
    }

    SUBCASE("hazard lengthens the effective walk") {
        BuildingGraph g = corridor();
        auto readings = zero_readings(g);
        readings[1].hazard_intensity = 1.0;  // both edges touch node 1
        HazardState hz(g, 1, 1.0, 1.0, 0.0);
        CHECK(goal_energy({0, 1, 2}, g, readings, cls, hz) == doctest::Approx(14.0));
    }
}

TEST_CASE("safety accrues exposure where the fire wins the race") {
    BuildingGraph g = corridor();
    // Fire starts at the exit end, 100 cm/s: reaches node 2 at 0 s, node 1 at
    // 2 s, node 0 at 7 s; it grows at 0.5/s.
    HazardState hz(g, 2, 100.0, 0.5, 0.0);
    const auto readings = zero_readings(g);
    const EvacueeClass cls;

    // Walker reaches node 1 at t=5 (fire arrived at 2): 0.5*3 exposure.
    // Reaches node 2 at t=7 (fire arrived at 0): 0.5*7 exposure.
    // Baseline edge weights: 500/500 + 200/500 = 1.4.
    const double expected = 0.5 * 3.0 + 0.5 * 7.0 + 1.4;
    CHECK(goal_safety({0, 1, 2}, g, hz, readings, cls, 0.0) == doctest::Approx(expected));

    // Leaving later only increases the exposure.
    CHECK(goal_safety({0, 1, 2}, g, hz, readings, cls, 4.0) ==
          doctest::Approx(expected + 0.5 * 4.0 * 2.0));

    // Hazard-free: only the baseline edge weights remain.
    const HazardState none = HazardState::none(3);
    CHECK(goal_safety({0, 1, 2}, g, none, readings, cls, 0.0) == doctest::Approx(1.4));
    CHECK(goal_safety({2}, g, none, readings, cls, 0.0) == 0.0);
}

TEST_CASE("safety beats the fire when the walker is faster") {
    // Fire starts far behind: it reaches node 1 at t=50, node 2 at t=52,
    // while the walker passes at t=5 and t=7. No exposure accrues.
    BuildingGraph g({node_at(0, 0, 0), node_at(1, 500, 0), node_at(2, 700, 0, true),
                     node_at(3, -5000, 0)},
                    {edge_of(0, 1, 500), edge_of(1, 2, 200), edge_of(3, 0, 5000)});
    HazardState hz(g, 3, 100.0, 0.5, 0.0);
    const auto readings = zero_readings(g);
    const EvacueeClass cls;
    CHECK(goal_safety({0, 1, 2}, g, hz, readings, cls, 0.0) ==
          doctest::Approx(500.0 / 5000.0 + 200.0 / 5000.0));
}

TEST_CASE("distance goals sum effective lengths") {
    BuildingGraph g = corridor();
    const HazardState none = HazardState::none(3);
    CHECK(goal_distance({0, 1, 2}, g, none, 0.0) == 700.0);

    auto readings = zero_readings(g);
    CHECK(goal_distance_from_readings({0, 1, 2}, g, readings, none) == 700.0);

    readings[0].hazard_intensity = 1.0;
    readings[1].hazard_intensity = 2.0;
    // Edge 0-1 worst endpoint 2.0: 500*3; edge 1-2 worst 2.0: 200*3.
    CHECK(goal_distance_from_readings({0, 1, 2}, g, readings, none) == 2100.0);

    readings[1].hazard_intensity = 11.0;
    CHECK(goal_distance_from_readings({0, 1, 2}, g, readings, none) == kInfiniteLength);
}

TEST_CASE("goal_value dispatches to the matching goal function") {
    BuildingGraph g = corridor();
    auto readings = zero_readings(g);
    readings[1].queue_length = 1.0;
    readings[1].arrival_rate = 0.5;
    readings[1].departure_rate = 0.25;
    HazardState hz(g, 2, 100.0, 0.5, 0.0);
    const EvacueeClass cls;
    const Path p{0, 1, 2};

    CHECK(goal_value(GoalClass::Time, p, g, hz, readings, cls, 3.0) ==
          goal_time(p, g, readings, cls, hz));
    CHECK(goal_value(GoalClass::Energy, p, g, hz, readings, cls, 3.0) ==
          goal_energy(p, g, readings, cls, hz));
    CHECK(goal_value(GoalClass::Safety, p, g, hz, readings, cls, 3.0) ==
          goal_safety(p, g, hz, readings, cls, 3.0));
    CHECK(goal_value(GoalClass::Distance, p, g, hz, readings, cls, 3.0) ==
          goal_distance_from_readings(p, g, readings, hz));
}

TEST_CASE("clamp_nonneg") {
    CHECK(clamp_nonneg(3.5) == 3.5);
    CHECK(clamp_nonneg(0.0) == 0.0);
    CHECK(clamp_nonneg(-2.0) == 0.0);
}
