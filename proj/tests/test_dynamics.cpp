#include <catch2/catch_amalgamated.hpp>

#include <evade/dynamics.hpp>

#include <limits>

using namespace evade;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("step_or moves at fixed speed along the commanded heading", "[dynamics]") {
    const OrParams p; // speed 0.1574
    const double dt = 0.05;

    SECTION("heading zero moves along +x") {
        const OrState s1 = step_or(OrState{0.0, 0.0}, p, EvaderAction{0.0}, dt);
        CHECK(s1.x == Approx(0.1574 * 0.05));
        CHECK_THAT(s1.y, WithinAbs(0.0, 1e-15));
    }
    SECTION("diagonal heading from an offset start") {
        const OrState s1 = step_or(OrState{1.0, 1.0}, p, EvaderAction{kPi / 4.0}, dt);
        CHECK(s1.x == Approx(1.0 + 0.1574 * std::cos(kPi / 4.0) * 0.05));
        CHECK(s1.y == Approx(1.0 + 0.1574 * std::sin(kPi / 4.0) * 0.05));
    }
    SECTION("one Euler step is the exact arithmetic identity") {
        const OrState s1 = step_or(OrState{0.3, -0.2}, p, EvaderAction{1.1}, dt);
        CHECK(s1.x == 0.3 + p.speed * std::cos(1.1) * dt);
        CHECK(s1.y == -0.2 + p.speed * std::sin(1.1) * dt);
    }
    SECTION("purity: identical inputs give identical outputs") {
        const OrState a = step_or(OrState{0.1, 0.2}, p, EvaderAction{2.0}, dt);
        const OrState b = step_or(OrState{0.1, 0.2}, p, EvaderAction{2.0}, dt);
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
    }
}

TEST_CASE("step_or rejects invalid inputs", "[dynamics]") {
    const OrParams p;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(step_or(OrState{}, p, EvaderAction{0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(step_or(OrState{}, p, EvaderAction{0.0}, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(step_or(OrState{nan, 0.0}, p, EvaderAction{0.0}, 0.05),
                    std::invalid_argument);
    CHECK_THROWS_AS(step_or(OrState{}, p, EvaderAction{nan}, 0.05), std::invalid_argument);
}

TEST_CASE("step_ddr implements the differential-drive kinematics", "[dynamics]") {
    const DdrParams p; // speed 0.2, half_axle 0.1, wheel_limit 0.4

    SECTION("equal wheels drive straight") {
        const DdrState s1 = step_ddr(DdrState{0.0, 0.0, 0.0}, p, DdrCommand{0.2, 0.2}, 0.05);
        CHECK(s1.x == Approx(0.2 * 0.05));
        CHECK_THAT(s1.y, WithinAbs(0.0, 1e-15));
        CHECK(s1.heading == 0.0);
    }
    SECTION("opposite wheels pivot in place") {
        const DdrState s1 = step_ddr(DdrState{0.5, -0.5, 0.3}, p, DdrCommand{-0.1, 0.1}, 0.05);
        CHECK(s1.x == 0.5);
        CHECK(s1.y == -0.5);
        // omega = (0.1 - (-0.1)) / (2 * 0.1) = 1 rad/s.
        CHECK(s1.heading == Approx(0.3 + 0.05));
    }
    SECTION("mixed command: v = 0.2, omega = 1") {
        const DdrState s1 = step_ddr(DdrState{0.0, 0.0, 0.0}, p, DdrCommand{0.1, 0.3}, 0.1);
        CHECK(s1.x == Approx(0.02));
        CHECK_THAT(s1.y, WithinAbs(0.0, 1e-15)); // position uses the pre-step heading
        CHECK(s1.heading == Approx(0.1));
    }
    SECTION("heading is wrapped after the step") {
        const DdrState s1 = step_ddr(DdrState{0.0, 0.0, 3.1}, p, DdrCommand{-0.04, 0.04}, 1.0);
        // 3.1 + 0.4 = 3.5 wraps to 3.5 - 2*pi.
        CHECK(s1.heading == Approx(3.5 - 2.0 * kPi));
    }
    SECTION("wheel bound is enforced with a descriptive message") {
        CHECK_THROWS_AS(step_ddr(DdrState{}, p, DdrCommand{0.5, 0.0}, 0.05),
                        std::invalid_argument);
        CHECK_THROWS_WITH(step_ddr(DdrState{}, p, DdrCommand{0.5, 0.0}, 0.05),
                          ContainsSubstring("exceeds wheel bound"));
        CHECK_THROWS_AS(step_ddr(DdrState{}, p, DdrCommand{0.0, -0.41}, 0.05),
                        std::invalid_argument);
        // Exactly at the limit is allowed.
        CHECK_NOTHROW(step_ddr(DdrState{}, p, DdrCommand{0.4, -0.4}, 0.05));
    }
    SECTION("invalid dt and non-finite state are rejected") {
        CHECK_THROWS_AS(step_ddr(DdrState{}, p, DdrCommand{}, 0.0), std::invalid_argument);
        const double inf = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(step_ddr(DdrState{inf, 0.0, 0.0}, p, DdrCommand{}, 0.05),
                        std::invalid_argument);
    }
}

TEST_CASE("step_obstacle drifts at constant velocity", "[dynamics]") {
    ObstacleState s{1.5, 0.0, 0.02, -0.01};
    const double dt = 0.05;
    for (int i = 0; i < 5000; ++i) s = step_obstacle(s, dt);
    CHECK_THAT(s.x, WithinAbs(1.5 + 5000 * dt * 0.02, 1e-9));
    CHECK_THAT(s.y, WithinAbs(0.0 + 5000 * dt * -0.01, 1e-9));
    CHECK(s.vx == 0.02);
    CHECK(s.vy == -0.01);

    CHECK_THROWS_AS(step_obstacle(s, -1.0), std::invalid_argument);
}

TEST_CASE("evader_velocity matches speed times heading vector", "[dynamics]") {
    const OrParams p;
    const Vec2 v = evader_velocity(p, EvaderAction{kPi / 2.0});
    CHECK_THAT(v.x, WithinAbs(0.0, 1e-15));
    CHECK(v.y == Approx(p.speed));
    CHECK(norm(evader_velocity(p, EvaderAction{-2.1})) == Approx(p.speed));
}
