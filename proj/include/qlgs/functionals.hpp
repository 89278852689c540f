#pragma once

// Variational core for the coupled quasilinear system: the energy I, the
// scaling constraint G, the Pohozaev-type functional P, the Gateaux pairing
// of I' with a test pair, the nodewise Euler-Lagrange residual, and the
// quadratic pair norm.  All functionals reduce to weighted sums over the
// radial grid; the six base integrals are collected once in EnergyBreakdown.

#include <qlgs/grid.hpp>
#include <qlgs/model.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace qlgs {

// Radial sample pair (u, v) on a shared grid, Dirichlet at the last node.
struct FieldPair {
    Samples u;
    Samples v;
};

// The six integrals every functional is assembled from:
//   kin      = int |grad u|^2 + |grad v|^2
//   potA     = int A(r) u^2
//   potB     = int B v^2
//   quasi    = int u^2 |grad u|^2 + v^2 |grad v|^2
//   gradA    = int r A'(r) u^2
//   coupling = int |u|^alpha |v|^beta
struct EnergyBreakdown {
    double kin = 0.0;
    double potA = 0.0;
    double potB = 0.0;
    double quasi = 0.0;
    double gradA = 0.0;
    double coupling = 0.0;
};

// Nodewise strong-form residuals of the two Euler-Lagrange equations plus
// their weighted L2 norm.  The Dirichlet node carries residual 0.
struct ElResidual {
    Samples ru;
    Samples rv;
    double norm = 0.0;
};

// sign(x) |x|^e, with the removable singularity at x = 0 set to 0.  Used for
// the coupling derivative |u|^{alpha-2} u when alpha < 2.
inline double sgnpow(double x, double e) {
    if (x > 0.0) return std::pow(x, e);
    if (x < 0.0) return -std::pow(-x, e);
    return 0.0;
}

namespace detail {

inline void require_pair(const RadialGrid& grid, const FieldPair& pair) {
    if (static_cast<int>(pair.u.size()) != grid.node_count ||
        static_cast<int>(pair.v.size()) != grid.node_count) {
        throw std::invalid_argument(
            "field pair length (" + std::to_string(pair.u.size()) + ", " +
            std::to_string(pair.v.size()) + ") does not match grid node count " +
            std::to_string(grid.node_count));
    }
}

// splitmix64: tiny deterministic generator for reproducible test pairs.
struct SplitMix {
    unsigned long long state;
    explicit SplitMix(unsigned long long seed) : state(seed) {}
    unsigned long long next() {
        state += 0x9E3779B97F4A7C15ull;
        unsigned long long z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double u01() { return std::ldexp(static_cast<double>(next() >> 11), -53); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
};

}  // namespace detail

// Deterministic smooth positive pair: each field is a sum of three Gaussian
// bumps with seeded amplitudes, centers, and widths.  Used by identity and
// inequality checks that quantify over "arbitrary" pairs.  The bumps are
// kept concentrated (support well inside r_max/2) so that dilations up to
// t = 2 stay inside the truncated domain.
inline FieldPair seeded_pair(const RadialGrid& grid, unsigned long long seed) {
    detail::SplitMix rng(seed);
    auto bumps = [&]() {
        Samples f(grid.node_count, 0.0);
        for (int k = 0; k < 3; ++k) {
            const double a = rng.uniform(0.2, 1.5);
            const double c = rng.uniform(0.0, 3.0);
            const double s = rng.uniform(0.5, 1.25);
            for (int i = 0; i < grid.node_count; ++i) {
                const double d = (grid.nodes[i] - c) / s;
                f[i] += a * std::exp(-0.5 * d * d);
            }
        }
        f.back() = 0.0;
        return f;
    };
    FieldPair pair;
    pair.u = bumps();
    pair.v = bumps();
    return pair;
}

inline EnergyBreakdown breakdown(const RadialGrid& grid, const ModelParams& model,
                                 const PotentialSpec& pot, const FieldPair& pair) {
    detail::require_pair(grid, pair);
    const int n = grid.node_count;
    const Samples du = radial_derivative(grid, pair.u);
    const Samples dv = radial_derivative(grid, pair.v);

    Samples kin(n), potA(n), potB(n), quasi(n), gradA(n), coupling(n);
    for (int i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        const double u = pair.u[i], v = pair.v[i];
        const double du2 = du[i] * du[i], dv2 = dv[i] * dv[i];
        kin[i] = du2 + dv2;
        potA[i] = pot.value_at(r) * u * u;
        potB[i] = model.coupling_B * v * v;
        quasi[i] = u * u * du2 + v * v * dv2;
        gradA[i] = r * pot.slope_at(r) * u * u;
        coupling[i] = std::pow(std::abs(u), model.alpha) *
                      std::pow(std::abs(v), model.beta);
    }
    EnergyBreakdown b;
    b.kin = integrate(grid, kin);
    b.potA = integrate(grid, potA);
    b.potB = integrate(grid, potB);
    b.quasi = integrate(grid, quasi);
    b.gradA = integrate(grid, gradA);
    b.coupling = integrate(grid, coupling);
    return b;
}

inline double energy_I(const RadialGrid& grid, const ModelParams& model,
                       const PotentialSpec& pot, const FieldPair& pair) {
    const auto b = breakdown(grid, model, pot, pair);
    return 0.5 * (b.kin + b.potA + b.potB + b.quasi) -
           (2.0 / model.p()) * b.coupling;
}

inline double constraint_G(const RadialGrid& grid, const ModelParams& model,
                           const PotentialSpec& pot, const FieldPair& pair) {
    const auto b = breakdown(grid, model, pot, pair);
    const double N = grid.dimension, p = model.p();
    return 0.5 * N * b.kin + 0.5 * (N + 2.0) * (b.potA + b.potB + b.quasi) +
           0.5 * b.gradA - (2.0 * (N + p) / p) * b.coupling;
}

// Sum of absolute values of the terms of G; the natural scale for testing
// |G| against zero.
inline double g_scale(const RadialGrid& grid, const ModelParams& model,
                      const PotentialSpec& pot, const FieldPair& pair) {
    const auto b = breakdown(grid, model, pot, pair);
    const double N = grid.dimension, p = model.p();
    return std::abs(0.5 * N * b.kin) +
           std::abs(0.5 * (N + 2.0) * (b.potA + b.potB + b.quasi)) +
           std::abs(0.5 * b.gradA) + std::abs((2.0 * (N + p) / p) * b.coupling);
}

inline double pohozaev_P(const RadialGrid& grid, const ModelParams& model,
                         const PotentialSpec& pot, const FieldPair& pair) {
    const auto b = breakdown(grid, model, pot, pair);
    const double N = grid.dimension, p = model.p();
    return 0.5 * (N - 2.0) * b.kin + 0.5 * N * (b.potA + b.potB) +
           0.5 * b.gradA + 0.5 * (N - 2.0) * b.quasi -
           (2.0 * N / p) * b.coupling;
}

// Gateaux pairing <I'(pair), test>: the weak form of the two equations
// applied to the test fields.
inline double pairing(const RadialGrid& grid, const ModelParams& model,
                      const PotentialSpec& pot, const FieldPair& pair,
                      const FieldPair& test) {
    detail::require_pair(grid, pair);
    detail::require_pair(grid, test);
    const int n = grid.node_count;
    const Samples du = radial_derivative(grid, pair.u);
    const Samples dv = radial_derivative(grid, pair.v);
    const Samples dp1 = radial_derivative(grid, test.u);
    const Samples dp2 = radial_derivative(grid, test.v);
    const double p = model.p();
    const double cu = 2.0 * model.alpha / p;
    const double cv = 2.0 * model.beta / p;

    Samples integrand(n);
    for (int i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        const double u = pair.u[i], v = pair.v[i];
        const double p1 = test.u[i], p2 = test.v[i];
        integrand[i] =
            (1.0 + u * u) * du[i] * dp1[i] + (1.0 + v * v) * dv[i] * dp2[i] +
            u * du[i] * du[i] * p1 + v * dv[i] * dv[i] * p2 +
            pot.value_at(r) * u * p1 + model.coupling_B * v * p2 -
            cu * sgnpow(u, model.alpha - 1.0) * std::pow(std::abs(v), model.beta) * p1 -
            cv * sgnpow(v, model.beta - 1.0) * std::pow(std::abs(u), model.alpha) * p2;
    }
    return integrate(grid, integrand);
}

// Strong-form residuals of the Euler-Lagrange equations, realized as the
// exact weighted gradient of the discrete energy: the divergence term is
// assembled in conservative form D^T (w (1+u^2) Du) / w so that
// integrate(R . phi) reproduces pairing(pair, phi) identically for test
// fields supported away from the boundary.
inline ElResidual el_residual(const RadialGrid& grid, const ModelParams& model,
                              const PotentialSpec& pot, const FieldPair& pair) {
    detail::require_pair(grid, pair);
    const int n = grid.node_count;
    const Samples du = radial_derivative(grid, pair.u);
    const Samples dv = radial_derivative(grid, pair.v);
    const double p = model.p();
    const double cu = 2.0 * model.alpha / p;
    const double cv = 2.0 * model.beta / p;

    Samples flux_u(n), flux_v(n);
    for (int i = 0; i < n; ++i) {
        flux_u[i] = grid.weights[i] * (1.0 + pair.u[i] * pair.u[i]) * du[i];
        flux_v[i] = grid.weights[i] * (1.0 + pair.v[i] * pair.v[i]) * dv[i];
    }
    const Samples div_u = derivative_transpose(grid, flux_u);
    const Samples div_v = derivative_transpose(grid, flux_v);

    ElResidual res;
    res.ru.resize(n);
    res.rv.resize(n);
    for (int i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        const double u = pair.u[i], v = pair.v[i];
        res.ru[i] = div_u[i] / grid.weights[i] + u * du[i] * du[i] +
                    pot.value_at(r) * u -
                    cu * sgnpow(u, model.alpha - 1.0) *
                        std::pow(std::abs(v), model.beta);
        res.rv[i] = div_v[i] / grid.weights[i] + v * dv[i] * dv[i] +
                    model.coupling_B * v -
                    cv * sgnpow(v, model.beta - 1.0) *
                        std::pow(std::abs(u), model.alpha);
    }
    res.ru.back() = 0.0;
    res.rv.back() = 0.0;

    Samples sq(n);
    for (int i = 0; i < n; ++i) {
        sq[i] = res.ru[i] * res.ru[i] + res.rv[i] * res.rv[i];
    }
    res.norm = std::sqrt(integrate(grid, sq));
    return res;
}

// The quadratic pair functional int |grad u|^2 + |grad v|^2 + u^2 + v^2.
// Kept as the integral itself (no square root), matching the convention the
// solver tolerances are stated in.
inline double pair_norm(const RadialGrid& grid, const FieldPair& pair) {
    detail::require_pair(grid, pair);
    const int n = grid.node_count;
    const Samples du = radial_derivative(grid, pair.u);
    const Samples dv = radial_derivative(grid, pair.v);
    Samples integrand(n);
    for (int i = 0; i < n; ++i) {
        integrand[i] = du[i] * du[i] + dv[i] * dv[i] +
                       pair.u[i] * pair.u[i] + pair.v[i] * pair.v[i];
    }
    return integrate(grid, integrand);
}

}  // namespace qlgs
