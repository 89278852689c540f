#include <catch2/catch_amalgamated.hpp>

#include <qlgs/grid.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace qlgs;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

Samples eval_on_grid(const RadialGrid& g, double (*f)(double)) {
    Samples s(g.node_count);
    for (int i = 0; i < g.node_count; ++i) s[i] = f(g.nodes[i]);
    return s;
}

} // namespace

TEST_CASE("make_grid produces uniform nodes and shell weights") {
    auto g = make_grid(3, 10.0, 100);
    REQUIRE(g.node_count == 100);
    CHECK(g.nodes.front() == Approx(0.1).epsilon(1e-15));
    CHECK(g.nodes.back() == Approx(10.0).epsilon(1e-15));
    for (int i : {0, 17, 49, 99}) {
        double r = g.nodes[i];
        CHECK(g.weights[i] == Approx(4.0 * kPi * r * r * 0.1).epsilon(1e-14));
    }
    for (int i = 1; i < g.node_count; ++i) {
        CHECK(g.nodes[i] > g.nodes[i - 1]);
        CHECK(g.weights[i] > 0.0);
    }
}

TEST_CASE("make_grid rejects invalid arguments") {
    CHECK_THROWS_AS(make_grid(2, 10.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(3, 0.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(3, -1.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(3, 10.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(3, 10.0, 64, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(3, 10.0, 64, 8), std::invalid_argument);
}

TEST_CASE("integrate: zero, linearity, determinism, error naming") {
    auto g = make_grid(3, 10.0, 128);
    Samples zero(g.node_count, 0.0);
    CHECK(integrate(g, zero) == 0.0);

    std::mt19937_64 rng(42);
    Samples f(g.node_count), h(g.node_count);
    for (int i = 0; i < g.node_count; ++i) {
        f[i] = std::ldexp(double(rng() >> 11), -53) - 0.5;
        h[i] = std::ldexp(double(rng() >> 11), -53) - 0.5;
    }
    double a = 1.7, b = -0.3;
    Samples comb(g.node_count);
    for (int i = 0; i < g.node_count; ++i) comb[i] = a * f[i] + b * h[i];
    double lhs = integrate(g, comb);
    double rhs = a * integrate(g, f) + b * integrate(g, h);
    CHECK(lhs == Approx(rhs).margin(1e-12 * (std::abs(lhs) + 1.0)));

    CHECK(integrate(g, f) == integrate(g, f));

    Samples bad = f;
    bad[37] = std::nan("");
    CHECK_THROWS_WITH(integrate(g, bad), Catch::Matchers::ContainsSubstring("37"));
}

TEST_CASE("integrate reproduces the Gaussian volume integral") {
    auto g = make_grid(3, 12.0, 2048);
    auto s = eval_on_grid(g, +[](double r) { return std::exp(-r * r); });
    double exact = std::pow(kPi, 1.5);
    CHECK(integrate(g, s) == Approx(exact).epsilon(1e-3));
    // the shell rule is far better than the stated tolerance on smooth decaying data
    CHECK(std::abs(integrate(g, s) - exact) / exact < 1e-9);
}

TEST_CASE("ball volume from an indicator integrand") {
    // An indicator jump sitting on a node costs a half shell, relative error
    // about (N/2)*(dr/R); resolving to 0.1% needs dr small enough.
    double exact = 4.0 / 3.0 * kPi * 125.0;
    auto indicator = [](const RadialGrid& g) {
        Samples s(g.node_count, 0.0);
        for (int i = 0; i < g.node_count; ++i) s[i] = (g.nodes[i] <= 5.0) ? 1.0 : 0.0;
        return s;
    };
    auto g1 = make_grid(3, 10.0, 1000);
    double err1 = std::abs(integrate(g1, indicator(g1)) - exact) / exact;
    CHECK(err1 < 5e-3);   // measured ~3e-3, the analytic half-shell level
    auto g2 = make_grid(3, 10.0, 8000);
    double err2 = std::abs(integrate(g2, indicator(g2)) - exact) / exact;
    CHECK(err2 < 1e-3);
}

TEST_CASE("ball volume invariant holds once shells are thin") {
    auto g = make_grid(3, 10.0, 8192);
    for (double R : {2.0, 3.0, 5.0}) {
        Samples s(g.node_count, 0.0);
        for (int i = 0; i < g.node_count; ++i) s[i] = (g.nodes[i] <= R) ? 1.0 : 0.0;
        double exact = 4.0 / 3.0 * kPi * R * R * R;
        CHECK(integrate(g, s) == Approx(exact).epsilon(1e-3));
    }
}

TEST_CASE("quadrature convergence: halving dr cuts the Gaussian error") {
    double exact = std::pow(kPi, 1.5);
    auto err_at = [&](int M) {
        auto g = make_grid(3, 12.0, M);
        auto s = eval_on_grid(g, +[](double r) { return std::exp(-r * r); });
        return std::abs(integrate(g, s) - exact);
    };
    double e20 = err_at(20), e40 = err_at(40);
    CHECK(e20 / std::max(e40, 1e-16 * exact) >= 3.0);
}

TEST_CASE("radial_derivative: constants and polynomials") {
    for (int order : {2, 4, 6}) {
        auto g = make_grid(3, 8.0, 64, order);
        int q = order / 2;

        Samples c(g.node_count, 3.25);
        auto dc = radial_derivative(g, c);
        for (double d : dc) CHECK(std::abs(d) < 1e-12);

        // linear data: central and one-sided rows are exact; the first q rows
        // fit even polynomials and are only approximate there
        Samples lin(g.node_count);
        for (int i = 0; i < g.node_count; ++i) lin[i] = 2.0 * g.nodes[i] - 1.0;
        auto dl = radial_derivative(g, lin);
        for (int i = q; i < g.node_count; ++i)
            CHECK(dl[i] == Approx(2.0).epsilon(1e-10));

        // even quadratic data: every row is exact for order >= 2
        Samples quad(g.node_count);
        for (int i = 0; i < g.node_count; ++i) quad[i] = 0.5 * g.nodes[i] * g.nodes[i];
        auto dq = radial_derivative(g, quad);
        for (int i = 0; i < g.node_count; ++i)
            CHECK(dq[i] == Approx(g.nodes[i]).epsilon(1e-9));
    }
}

TEST_CASE("radial_derivative: Gaussian accuracy and convergence order") {
    auto max_err = [](int M, int order) {
        auto g = make_grid(3, 8.0, M, order);
        Samples s(g.node_count), exact(g.node_count);
        for (int i = 0; i < g.node_count; ++i) {
            double r = g.nodes[i];
            s[i] = std::exp(-0.5 * r * r);
            exact[i] = -r * std::exp(-0.5 * r * r);
        }
        auto d = radial_derivative(g, s);
        double e = 0.0;
        for (int i = 0; i < g.node_count; ++i) e = std::max(e, std::abs(d[i] - exact[i]));
        return e;
    };
    double e2 = max_err(256, 2);
    double dr = 8.0 / 256;
    CHECK(e2 < 2.0 * dr * dr);            // second-order bound with a modest constant
    CHECK(max_err(512, 2) < e2 / 3.0);    // halving dr cuts the error by >= 3
    CHECK(max_err(256, 4) < e2);          // higher order is strictly more accurate here
    CHECK(max_err(256, 6) < max_err(256, 4));
}

TEST_CASE("derivative_transpose is the exact adjoint") {
    for (int order : {2, 4, 6}) {
        auto g = make_grid(3, 6.0, 48, order);
        std::mt19937_64 rng(7);
        Samples x(g.node_count), y(g.node_count);
        for (int i = 0; i < g.node_count; ++i) {
            x[i] = std::ldexp(double(rng() >> 11), -53) - 0.5;
            y[i] = std::ldexp(double(rng() >> 11), -53) - 0.5;
        }
        auto Dx = radial_derivative(g, x);
        auto Dty = derivative_transpose(g, y);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < g.node_count; ++i) {
            lhs += Dx[i] * y[i];
            rhs += x[i] * Dty[i];
        }
        CHECK(lhs == Approx(rhs).margin(1e-12 * (std::abs(lhs) + 1.0)));
    }
}
