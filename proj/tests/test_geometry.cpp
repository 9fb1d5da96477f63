#include <catch2/catch_amalgamated.hpp>

#include <evade/geometry.hpp>

#include <random>

using namespace evade;
using Catch::Approx;
using Catch::Matchers::WithinAbs;

TEST_CASE("wrap_angle maps into the half-open interval (-pi, pi]", "[geometry]") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi) == Approx(kPi));
    // -pi is excluded from the range; it wraps to +pi.
    CHECK(wrap_angle(-kPi) == Approx(kPi));
    CHECK(wrap_angle(3.0 * kPi) == Approx(kPi));
    CHECK(wrap_angle(-3.0 * kPi) == Approx(kPi));
    CHECK_THAT(wrap_angle(2.0 * kPi), WithinAbs(0.0, 1e-12));
    CHECK(wrap_angle(kPi + 0.1) == Approx(-kPi + 0.1));
    CHECK(wrap_angle(-kPi - 0.1) == Approx(kPi - 0.1));
    CHECK(wrap_angle(0.25) == Approx(0.25));
}

TEST_CASE("wrap_angle is idempotent and preserves direction", "[geometry]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> angle(-50.0, 50.0);
    for (int i = 0; i < 10000; ++i) {
        const double a = angle(rng);
        const double r = wrap_angle(a);
        REQUIRE(r > -kPi);
        REQUIRE(r <= kPi);
        REQUIRE_THAT(std::cos(r), WithinAbs(std::cos(a), 1e-9));
        REQUIRE_THAT(std::sin(r), WithinAbs(std::sin(a), 1e-9));
        REQUIRE(wrap_angle(r) == Approx(r).margin(1e-15));
    }
}

TEST_CASE("angular_distance is a symmetric metric on the circle", "[geometry]") {
    CHECK(angular_distance(0.1, -0.1) == Approx(0.2));
    CHECK(angular_distance(-0.1, 0.1) == Approx(0.2));
    // Going the short way around: |3 - (-3)| = 6 > pi, so 2*pi - 6.
    CHECK(angular_distance(3.0, -3.0) == Approx(2.0 * kPi - 6.0));
    CHECK(angular_distance(kPi, -kPi) == Approx(0.0).margin(1e-12));
    CHECK(angular_distance(1.7, 1.7) == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = angle(rng), b = angle(rng);
        const double d = angular_distance(a, b);
        REQUIRE(d >= 0.0);
        REQUIRE(d <= kPi + 1e-12);
        REQUIRE(d == Approx(angular_distance(b, a)));
    }
}

TEST_CASE("heading_vector returns the unit vector at the angle", "[geometry]") {
    CHECK(heading_vector(0.0).x == Approx(1.0));
    CHECK_THAT(heading_vector(0.0).y, WithinAbs(0.0, 1e-12));
    CHECK_THAT(heading_vector(kPi / 2.0).x, WithinAbs(0.0, 1e-12));
    CHECK(heading_vector(kPi / 2.0).y == Approx(1.0));
    CHECK(heading_vector(kPi / 4.0).x == Approx(std::sqrt(0.5)));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(norm(heading_vector(angle(rng))) == Approx(1.0));
    }
}

TEST_CASE("vector arithmetic and norms", "[geometry]") {
    const Vec2 a{3.0, 4.0};
    const Vec2 b{-1.0, 2.0};
    CHECK((a + b).x == Approx(2.0));
    CHECK((a + b).y == Approx(6.0));
    CHECK((a - b).x == Approx(4.0));
    CHECK((a - b).y == Approx(2.0));
    CHECK((2.0 * a).x == Approx(6.0));
    CHECK((a * 2.0).y == Approx(8.0));
    CHECK(dot(a, b) == Approx(5.0));
    CHECK(norm(a) == Approx(5.0));
    CHECK(finite(a));
    CHECK_FALSE(finite(Vec2{std::numeric_limits<double>::quiet_NaN(), 0.0}));
    CHECK_FALSE(finite(Vec2{0.0, std::numeric_limits<double>::infinity()}));
}
