#include <catch2/catch_amalgamated.hpp>

#include <qlgs/grid.hpp>
#include <qlgs/model.hpp>

#include <cmath>
#include <numbers>

using namespace qlgs;
using Catch::Approx;

TEST_CASE("make_model validates the admissible parameter box") {
    auto m = make_model(3, 2.0, 2.0, 1.0);
    CHECK(m.p() == Approx(4.0));

    CHECK_THROWS_AS(make_model(2, 2.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_model(3, 1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_model(3, 2.0, 0.9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_model(3, 2.0, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_model(3, 2.0, 2.0, -1.0), std::invalid_argument);
    // p = alpha + beta must stay strictly below 4N/(N-2) (= 12 at N = 3)
    CHECK_NOTHROW(make_model(3, 3.0, 3.0, 1.0));
    CHECK_THROWS_AS(make_model(3, 6.0, 6.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_model(3, 6.5, 6.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_model(4, 4.0, 4.0, 1.0), std::invalid_argument);  // bound 8
    CHECK_NOTHROW(make_model(4, 3.9, 4.0, 1.0));
}

TEST_CASE("potential registry evaluates the documented profiles") {
    auto c = make_potential("constant", 1.5, 1.5, 20.0);
    CHECK(c.value_at(0.0) == 1.5);
    CHECK(c.value_at(7.3) == 1.5);
    CHECK(c.slope_at(7.3) == 0.0);

    auto gw = make_potential("gauss-well", 1.0, 2.0, 20.0);
    CHECK(gw.value_at(0.0) == Approx(1.0).epsilon(1e-15));
    CHECK(gw.value_at(1.0) == Approx(2.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(gw.slope_at(1.0) == Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(gw.value_at(25.0) == 2.0);    // clamped beyond the grid
    CHECK(gw.slope_at(25.0) == 0.0);

    auto rw = make_potential("rational-well", 1.0, 2.0, 20.0);
    CHECK(rw.value_at(1.0) == Approx(2.0 - 0.5).epsilon(1e-15));
    CHECK(rw.slope_at(1.0) == Approx(2.0 * 1.0 / 4.0).epsilon(1e-15));

    CHECK_THROWS_AS(make_potential("unknown", 1.0, 2.0, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(make_potential("gauss-well", 0.0, 2.0, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(make_potential("gauss-well", 2.0, 1.0, 20.0), std::invalid_argument);
}

TEST_CASE("check_A1: range of the potential") {
    auto g = make_grid(3, 10.0, 500);

    auto c = make_potential("constant", 1.0, 1.0, g.r_max);
    CHECK(check_A1(c, g).pass);

    auto gw = make_potential("gauss-well", 1.0, 2.0, g.r_max);
    CHECK(check_A1(gw, g).pass);

    // a profile dipping to -1 at the origin violates the declared floor
    PotentialSpec bad = gw;
    bad.value_at = [](double r) { return 2.0 - 3.0 * std::exp(-r * r); };
    bad.slope_at = [](double r) { return 6.0 * r * std::exp(-r * r); };
    auto res = check_A1(bad, g);
    CHECK_FALSE(res.pass);
    CHECK(res.worst_location == Approx(0.0).margin(1e-12));
    CHECK(res.worst_value == Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("check_A2: boundedness of r times the radial slope") {
    auto g = make_grid(3, 10.0, 1000);

    auto c = make_potential("constant", 1.0, 1.0, g.r_max);
    auto rc = check_A2(c, g, 1.0);
    CHECK(rc.pass);
    CHECK(rc.worst_value == 0.0);

    // r * slope peaks at 2/e for the unit gauss-well (at r = 1, a grid node)
    auto gw = make_potential("gauss-well", 1.0, 2.0, g.r_max);
    auto rg = check_A2(gw, g, 1.0);
    CHECK(rg.pass);
    CHECK(rg.worst_value == Approx(2.0 / std::numbers::e).epsilon(1e-12));

    PotentialSpec logpot = gw;
    logpot.value_at = [](double r) { return std::log(1.0 + r); };
    logpot.slope_at = [](double r) { return 1.0 / (1.0 + r); };
    auto rl = check_A2(logpot, g, 1.1);
    CHECK(rl.pass);
    CHECK(rl.worst_value == Approx(10.0 / 11.0).epsilon(1e-12));
    CHECK_FALSE(check_A2(logpot, g, 0.5).pass);
}

TEST_CASE("check_A3: concavity of the scaling transform") {
    auto g = make_grid(3, 20.0, 256);
    auto m = make_model(3, 2.0, 2.0, 1.0);

    // the clamp kink is a slope discontinuity; the ladder must be dense
    // enough to resolve it, hence 400 samples here (the default)
    auto c = make_potential("constant", 1.0, 1.0, g.r_max);
    CHECK(check_A3(c, m, g, 400).pass);

    auto gw = make_potential("gauss-well", 1.0, 2.0, g.r_max);
    CHECK(check_A3(gw, m, g, 400).pass);

    // regression: the clamped rational-well fails the scan (the clamp at
    // r_max kinks the transform upward, chord excess ~5e-4 of scale)
    auto rw = make_potential("rational-well", 1.0, 2.0, g.r_max);
    auto rr = check_A3(rw, m, g, 400);
    CHECK_FALSE(rr.pass);
    CHECK(rr.worst_value > 1e-4);
    CHECK(rr.worst_value < 1e-2);

    // steeply convex profile clipped at Ainf must fail
    PotentialSpec convex = gw;
    convex.Ainf = 50.0;
    convex.value_at = [](double r) { return std::min(1.0 + r * r * r * r, 50.0); };
    convex.slope_at = [](double r) {
        return (1.0 + r * r * r * r < 50.0) ? 4.0 * r * r * r : 0.0;
    };
    CHECK_FALSE(check_A3(convex, m, g, 400).pass);
}

TEST_CASE("constant potential passes all hypothesis checks across exponents") {
    auto g = make_grid(3, 15.0, 200);
    auto c = make_potential("constant", 2.0, 2.0, g.r_max);
    for (double a : {1.2, 2.0, 2.8}) {
        for (double b : {1.3, 2.1, 2.9}) {
            auto m = make_model(3, a, b, 1.0);
            CHECK(check_A1(c, g).pass);
            CHECK(check_A2(c, g, 1e-12).pass);
            CHECK(check_A3(c, m, g, 32).pass);
        }
    }
}

TEST_CASE("hypothesis checks are deterministic") {
    auto g = make_grid(3, 20.0, 128);
    auto m = make_model(3, 2.0, 2.0, 1.0);
    auto gw = make_potential("gauss-well", 1.0, 2.0, g.r_max);
    auto r1 = check_A3(gw, m, g, 48);
    auto r2 = check_A3(gw, m, g, 48);
    CHECK(r1.pass == r2.pass);
    CHECK(r1.worst_value == r2.worst_value);
    CHECK(r1.worst_location == r2.worst_location);
}
