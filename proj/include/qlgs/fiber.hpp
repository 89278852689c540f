#pragma once

// The scaling fiber through a pair: u_t(x) = t u(x/t) and the induced map
// t -> I(u_t, v_t).  Every term of the energy picks up a known power of t,
// except the external-potential term, where A must be re-evaluated at the
// dilated radius; only that one integral is recomputed per t.  The fiber
// derivative has a single positive root t_bar (the maximizer), and scaling
// the pair to it projects onto the constraint manifold G = 0.

#include <qlgs/functionals.hpp>
#include <qlgs/pchip.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace qlgs {

namespace detail {

inline void require_scale(double t) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("scaling parameter t must be > 0, got " +
                                    std::to_string(t));
    }
}

// the t-independent integrals of the fiber expansion
struct FiberTerms {
    double kin = 0.0;
    double potB = 0.0;
    double quasi = 0.0;
    double coupling = 0.0;
};

inline FiberTerms fiber_terms(const RadialGrid& grid, const ModelParams& model,
                              const FieldPair& pair) {
    require_pair(grid, pair);
    const int n = grid.node_count;
    const Samples du = radial_derivative(grid, pair.u);
    const Samples dv = radial_derivative(grid, pair.v);
    Samples kin(n), potB(n), quasi(n), coupling(n);
    for (int i = 0; i < n; ++i) {
        const double u = pair.u[i], v = pair.v[i];
        const double du2 = du[i] * du[i], dv2 = dv[i] * dv[i];
        kin[i] = du2 + dv2;
        potB[i] = model.coupling_B * v * v;
        quasi[i] = u * u * du2 + v * v * dv2;
        coupling[i] = std::pow(std::abs(u), model.alpha) *
                      std::pow(std::abs(v), model.beta);
    }
    FiberTerms terms;
    terms.kin = integrate(grid, kin);
    terms.potB = integrate(grid, potB);
    terms.quasi = integrate(grid, quasi);
    terms.coupling = integrate(grid, coupling);
    return terms;
}

// int A(t r) u^2, the one integral that changes with t
inline double potA_scaled(const RadialGrid& grid, const PotentialSpec& pot,
                          const Samples& u, double t) {
    Samples integrand(grid.node_count);
    for (int i = 0; i < grid.node_count; ++i) {
        integrand[i] = pot.value_at(t * grid.nodes[i]) * u[i] * u[i];
    }
    return integrate(grid, integrand);
}

// int (t r) A'(t r) u^2, its companion in the fiber derivative
inline double gradA_scaled(const RadialGrid& grid, const PotentialSpec& pot,
                           const Samples& u, double t) {
    Samples integrand(grid.node_count);
    for (int i = 0; i < grid.node_count; ++i) {
        const double tr = t * grid.nodes[i];
        integrand[i] = tr * pot.slope_at(tr) * u[i] * u[i];
    }
    return integrate(grid, integrand);
}

inline double fiber_eval_terms(const RadialGrid& grid, const ModelParams& model,
                               const PotentialSpec& pot, const FieldPair& pair,
                               const FiberTerms& terms, double t) {
    const double N = grid.dimension, p = model.p();
    const double qa = potA_scaled(grid, pot, pair.u, t);
    return 0.5 * std::pow(t, N) * terms.kin +
           0.5 * std::pow(t, N + 2.0) * (terms.quasi + terms.potB + qa) -
           (2.0 / p) * std::pow(t, N + p) * terms.coupling;
}

inline double fiber_prime_terms(const RadialGrid& grid, const ModelParams& model,
                                const PotentialSpec& pot, const FieldPair& pair,
                                const FiberTerms& terms, double t) {
    const double N = grid.dimension, p = model.p();
    const double qa = potA_scaled(grid, pot, pair.u, t);
    const double qs = gradA_scaled(grid, pot, pair.u, t);
    return 0.5 * N * std::pow(t, N - 1.0) * terms.kin +
           0.5 * (N + 2.0) * std::pow(t, N + 1.0) * (qa + terms.potB + terms.quasi) +
           0.5 * std::pow(t, N + 1.0) * qs -
           (2.0 * (N + p) / p) * std::pow(t, N + p - 1.0) * terms.coupling;
}

}  // namespace detail

// Dilated pair t u(r/t): monotone cubic interpolation of the stored samples,
// with an even-extension knot at r = 0 (quadratic through the first two
// nodes) and zero beyond the dilated support.
inline FieldPair scale_pair(const RadialGrid& grid, const FieldPair& pair,
                            double t) {
    detail::require_pair(grid, pair);
    detail::require_scale(t);
    const int n = grid.node_count;
    Samples knots(n + 1), ku(n + 1), kv(n + 1);
    knots[0] = 0.0;
    ku[0] = (4.0 * pair.u[0] - pair.u[1]) / 3.0;
    kv[0] = (4.0 * pair.v[0] - pair.v[1]) / 3.0;
    for (int i = 0; i < n; ++i) {
        knots[i + 1] = grid.nodes[i];
        ku[i + 1] = pair.u[i];
        kv[i + 1] = pair.v[i];
    }
    const Pchip pu(knots, ku), pv(std::move(knots), std::move(kv));

    FieldPair out;
    out.u.resize(n);
    out.v.resize(n);
    for (int i = 0; i < n; ++i) {
        const double q = grid.nodes[i] / t;
        if (q > grid.r_max) {
            out.u[i] = 0.0;
            out.v[i] = 0.0;
        } else {
            out.u[i] = t * pu(q);
            out.v[i] = t * pv(q);
        }
    }
    out.u.back() = 0.0;
    out.v.back() = 0.0;
    return out;
}

// h(t) = I(u_t, v_t) without forming the dilated pair.
inline double fiber_eval(const RadialGrid& grid, const ModelParams& model,
                         const PotentialSpec& pot, const FieldPair& pair,
                         double t) {
    detail::require_scale(t);
    if (t == 1.0) return energy_I(grid, model, pot, pair);
    return detail::fiber_eval_terms(grid, model, pot, pair,
                                    detail::fiber_terms(grid, model, pair), t);
}

// h'(t); at t = 1 this coincides with constraint_G term by term.
inline double fiber_prime(const RadialGrid& grid, const ModelParams& model,
                          const PotentialSpec& pot, const FieldPair& pair,
                          double t) {
    detail::require_scale(t);
    return detail::fiber_prime_terms(grid, model, pot, pair,
                                     detail::fiber_terms(grid, model, pair), t);
}

// Unique maximizer of the fiber map: bracket the sign change of h' starting
// from t = 1, then bisect to relative 1e-12.
inline double fiber_max(const RadialGrid& grid, const ModelParams& model,
                        const PotentialSpec& pot, const FieldPair& pair) {
    const auto terms = detail::fiber_terms(grid, model, pair);
    if (terms.coupling <= 0.0) {
        throw std::runtime_error("no fiber maximizer: coupling vanishes");
    }
    auto prime = [&](double t) {
        return detail::fiber_prime_terms(grid, model, pot, pair, terms, t);
    };
    double lo = 1.0, hi = 1.0;
    if (prime(1.0) > 0.0) {
        while (prime(hi) > 0.0) {
            hi *= 2.0;
            if (hi > 1e8) {
                throw std::runtime_error(
                    "no fiber maximizer: derivative stays positive up to t = 1e8");
            }
        }
        lo = hi / 2.0;
    } else {
        while (prime(lo) <= 0.0) {
            lo *= 0.5;
            if (lo < 1e-8) {
                throw std::runtime_error(
                    "no fiber maximizer: derivative stays nonpositive down to "
                    "t = 1e-8");
            }
        }
        hi = lo * 2.0;
    }
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (prime(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Projection onto the constraint manifold: rescale to the fiber maximizer,
// repeating to absorb interpolation error, until the maximizer of the
// current pair is 1 within 1e-9.  Profiles whose maximizer presses against
// the domain truncation converge only geometrically here; the loop then
// returns its best effort and the caller's next projection continues the
// polish (the descent loop re-projects every accepted iterate).
inline FieldPair project(const RadialGrid& grid, const ModelParams& model,
                         const PotentialSpec& pot, const FieldPair& pair) {
    FieldPair cur = pair;
    for (int it = 0; it < 40; ++it) {
        const double t = fiber_max(grid, model, pot, cur);
        if (std::abs(t - 1.0) <= 1e-9) break;
        cur = scale_pair(grid, cur, t);
    }
    return cur;
}

// Sampled fiber map on a geometric t-ladder, with the located maximizer.
struct FiberCurve {
    Samples t_values;
    Samples h_values;
    Samples h_prime_values;
    double t_bar = 0.0;
    double s_exponent = 0.0;    // N + p, the dilation power of the coupling
};

inline FiberCurve fiber_curve(const RadialGrid& grid, const ModelParams& model,
                              const PotentialSpec& pot, const FieldPair& pair,
                              double t_lo, double t_hi, int count) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
        throw std::invalid_argument("fiber_curve: need 0 < t_lo < t_hi");
    }
    if (count < 2) {
        throw std::invalid_argument("fiber_curve: need at least two samples");
    }
    const auto terms = detail::fiber_terms(grid, model, pair);
    FiberCurve curve;
    curve.s_exponent = grid.dimension + model.p();
    curve.t_bar = fiber_max(grid, model, pot, pair);
    curve.t_values.resize(count);
    curve.h_values.resize(count);
    curve.h_prime_values.resize(count);
    const double step = std::log(t_hi / t_lo) / (count - 1);
    for (int k = 0; k < count; ++k) {
        const double t = t_lo * std::exp(k * step);
        curve.t_values[k] = t;
        curve.h_values[k] = detail::fiber_eval_terms(grid, model, pot, pair, terms, t);
        curve.h_prime_values[k] =
            detail::fiber_prime_terms(grid, model, pot, pair, terms, t);
    }
    return curve;
}

}  // namespace qlgs
