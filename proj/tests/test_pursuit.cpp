#include <catch2/catch_amalgamated.hpp>

#include <evade/dynamics.hpp>
#include <evade/pursuit.hpp>

#include <cmath>

using namespace evade;
using Catch::Approx;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kDt = 0.05;

double separation(const DdrState& d, const OrState& e) {
    return std::hypot(e.x - d.x, e.y - d.y);
}

} // namespace

TEST_CASE("bearing_error measures the wrapped angle to the evader", "[pursuit]") {
    // Evader up-left of the pursuer: atan2(0.5, -1).
    const DdrState d{1.0, -0.5, 0.0};
    const OrState e{0.0, 0.0};
    CHECK(bearing_error(d, e) == Approx(std::atan2(0.5, -1.0)));

    // Heading already at the bearing: zero error.
    const DdrState aligned{1.0, -0.5, std::atan2(0.5, -1.0)};
    CHECK_THAT(bearing_error(aligned, e), WithinAbs(0.0, 1e-12));

    // Wrapping: bearing pi, heading -3: error wraps into (-pi, pi].
    const DdrState behind{1.0, 0.0, -3.0};
    CHECK(bearing_error(behind, OrState{0.0, 0.0}) == Approx(wrap_angle(kPi + 3.0)));

    CHECK_THROWS_AS(bearing_error(DdrState{std::nan(""), 0.0, 0.0}, e), std::invalid_argument);
    CHECK_THROWS_AS(bearing_error(d, OrState{0.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("turn-then-chase pivots in place when misaligned", "[pursuit]") {
    const DdrParams p;
    const PursuitConfig cfg; // tolerance 0.05
    const PursuitContext ctx;

    // Large error saturates the pivot at the wheel limit.
    const DdrCommand big = pursue(DdrState{1.0, -0.5, 0.0}, p, OrState{0.0, 0.0}, cfg, ctx, kDt);
    CHECK(big.left == Approx(-0.4));
    CHECK(big.right == Approx(0.4));

    // Negative bearing error pivots the other way.
    const DdrCommand cw = pursue(DdrState{0.0, 0.0, 0.0}, p, OrState{1.0, -1.0}, cfg, ctx, kDt);
    CHECK(cw.left == Approx(0.4));
    CHECK(cw.right == Approx(-0.4));

    // Pivot commands have zero translational speed.
    CHECK_THAT(big.left + big.right, WithinAbs(0.0, 1e-15));
}

TEST_CASE("pivot never overshoots the bearing in one step", "[pursuit]") {
    const DdrParams p;
    const PursuitConfig cfg;
    const PursuitContext ctx;

    // Error just above tolerance: the clamp w = |e|*b/dt turns exactly onto it.
    const double e0 = 0.06;
    DdrState d{0.0, 0.0, 0.0};
    const OrState evader{std::cos(e0), std::sin(e0)};
    REQUIRE(bearing_error(d, evader) == Approx(e0));
    const DdrCommand c = pursue(d, p, evader, cfg, ctx, kDt);
    d = step_ddr(d, p, c, kDt);
    CHECK_THAT(bearing_error(d, evader), WithinAbs(0.0, 1e-12));

    // Large error: one saturated pivot step still ends short of the bearing.
    DdrState far{0.0, 0.0, -2.0};
    const double before = std::abs(bearing_error(far, evader));
    far = step_ddr(far, p, pursue(far, p, evader, cfg, ctx, kDt), kDt);
    CHECK(std::abs(bearing_error(far, evader)) < before);
}

TEST_CASE("aimed pursuer drives straight at the braked speed", "[pursuit]") {
    const DdrParams p;
    PursuitConfig cfg;
    const PursuitContext ctx;

    // Far away: full cruise speed on both wheels.
    const DdrCommand far = pursue(DdrState{0.0, 0.0, 0.0}, p, OrState{2.0, 0.0}, cfg, ctx, kDt);
    CHECK(far.left == Approx(0.2));
    CHECK(far.right == Approx(0.2));

    // At the capture radius the brake caps closing speed at
    // evader_speed + gain*(0 - standoff) = 0.1574 - 1.2*0.08.
    const DdrCommand close = pursue(DdrState{0.0, 0.0, 0.0}, p, OrState{0.2, 0.0}, cfg, ctx, kDt);
    CHECK(close.left == Approx(0.1574 - 1.2 * 0.08));
    CHECK(close.right == Approx(close.left));

    // Brake disabled: full speed regardless of range.
    cfg.approach_brake = false;
    const DdrCommand off = pursue(DdrState{0.0, 0.0, 0.0}, p, OrState{0.2, 0.0}, cfg, ctx, kDt);
    CHECK(off.left == Approx(0.2));
}

TEST_CASE("braked speed tapers with range and never goes negative", "[pursuit]") {
    const PursuitConfig cfg;
    const PursuitContext ctx;

    // Monotone nondecreasing in distance.
    double prev = -1.0;
    for (double dist = 0.0; dist <= 2.0; dist += 0.01) {
        const double v = detail::braked_speed(0.2, 1.0, dist, cfg, ctx);
        REQUIRE(v >= 0.0);
        REQUIRE(v >= prev - 1e-12);
        REQUIRE(v <= 0.2 + 1e-12);
        prev = v;
    }
    // Deep inside the standoff the allowed closing hits zero.
    CHECK(detail::braked_speed(0.2, 1.0, 0.0, cfg, ctx) == 0.0);
    // Not closing (cos <= 0): the brake does not bind.
    CHECK(detail::braked_speed(0.2, -0.5, 0.0, cfg, ctx) == 0.2);
    CHECK(detail::braked_speed(0.2, 0.0, 0.0, cfg, ctx) == 0.2);
}

TEST_CASE("pure pursuit arcs within the wheel limit", "[pursuit]") {
    const DdrParams p;
    PursuitConfig cfg;
    cfg.mode = PursuitMode::PurePursuit;
    const PursuitContext ctx;

    // Moderate error: wheels differ, curvature sign matches the bearing.
    const DdrCommand c = pursue(DdrState{0.0, 0.0, 0.0}, p, OrState{1.0, 1.0}, cfg, ctx, kDt);
    CHECK(c.right > c.left);
    CHECK(std::abs(c.left) <= p.wheel_limit + 1e-12);
    CHECK(std::abs(c.right) <= p.wheel_limit + 1e-12);

    // Saturated case: scaling pins the peak wheel exactly at the limit.
    const DdrCommand s = pursue(DdrState{0.0, 0.0, -2.5}, p, OrState{1.0, 1.0}, cfg, ctx, kDt);
    CHECK(std::max(std::abs(s.left), std::abs(s.right)) == Approx(p.wheel_limit));

    // Aimed dead ahead: degenerates to straight driving.
    const DdrCommand ahead = pursue(DdrState{0.0, 0.0, 0.0}, p, OrState{2.0, 0.0}, cfg, ctx, kDt);
    CHECK(ahead.left == Approx(ahead.right));
    CHECK(ahead.left == Approx(0.2));
}

TEST_CASE("pursue validates configuration and dt", "[pursuit]") {
    const DdrParams p;
    const PursuitContext ctx;
    PursuitConfig cfg;
    CHECK_THROWS_AS(pursue(DdrState{}, p, OrState{1.0, 0.0}, cfg, ctx, 0.0),
                    std::invalid_argument);
    cfg.angle_tolerance = 0.0;
    CHECK_THROWS_AS(pursue(DdrState{}, p, OrState{1.0, 0.0}, cfg, ctx, kDt),
                    std::invalid_argument);
    cfg = PursuitConfig{};
    cfg.angular_gain = -1.0;
    CHECK_THROWS_AS(pursue(DdrState{}, p, OrState{1.0, 0.0}, cfg, ctx, kDt),
                    std::invalid_argument);
    cfg = PursuitConfig{};
    cfg.standoff = -0.01;
    CHECK_THROWS_AS(pursue(DdrState{}, p, OrState{1.0, 0.0}, cfg, ctx, kDt),
                    std::invalid_argument);
}

TEST_CASE("an unbraked pursuer runs down a slower straight-line evader", "[pursuit]") {
    const DdrParams p;
    const OrParams op;
    PursuitConfig cfg;
    cfg.approach_brake = false;
    const PursuitContext ctx;

    DdrState d{1.0, -0.5, 0.0};
    OrState e{0.0, 0.0};
    double min_sep = separation(d, e);
    for (int i = 0; i < 4000; ++i) {
        d = step_ddr(d, p, pursue(d, p, e, cfg, ctx, kDt), kDt);
        e = step_or(e, op, EvaderAction{0.0}, kDt); // flees east at 0.1574 < 0.2
        min_sep = std::min(min_sep, separation(d, e));
    }
    // 0.2 m/s beats 0.1574 m/s: the gap closes through the capture radius.
    CHECK(min_sep < ctx.capture_radius + 0.01);
}

TEST_CASE("the braked pursuer holds the standoff ring against a fleeing evader",
          "[pursuit]") {
    const DdrParams p;
    const OrParams op;
    const PursuitConfig cfg; // brake on, standoff 0.08
    const PursuitContext ctx;

    DdrState d{1.0, -0.5, 0.0};
    OrState e{0.0, 0.0};
    double sep = separation(d, e);
    for (int i = 0; i < 6000; ++i) {
        // Flee radially from the same snapshot both robots act on; heading
        // east instead would charge the pursuer's starting position.
        const Vec2 away = position(e) - position(d);
        const double flee = std::atan2(away.y, away.x);
        d = step_ddr(d, p, pursue(d, p, e, cfg, ctx, kDt), kDt);
        e = step_or(e, op, EvaderAction{flee}, kDt);
        sep = separation(d, e);
        REQUIRE(sep > ctx.capture_radius);
    }
    // Closing tapers to zero at capture_radius + standoff.
    CHECK_THAT(sep, WithinAbs(ctx.capture_radius + cfg.standoff, 0.02));
}

TEST_CASE("the braked pursuer still captures a target that does not flee", "[pursuit]") {
    const DdrParams p;
    const PursuitConfig cfg; // brake on
    const PursuitContext ctx;

    DdrState d{1.0, -0.5, 0.0};
    const OrState e{0.0, 0.0}; // stationary
    double min_sep = separation(d, e);
    for (int i = 0; i < 4000; ++i) {
        d = step_ddr(d, p, pursue(d, p, e, cfg, ctx, kDt), kDt);
        min_sep = std::min(min_sep, separation(d, e));
    }
    // Allowed closing stays positive down past h = 0, so the ring is crossed.
    CHECK(min_sep < ctx.capture_radius);
}
