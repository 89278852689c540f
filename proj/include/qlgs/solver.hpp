#pragma once

// Ground-state solver: minimizes the energy over the constraint manifold
// {G = 0} by projected, preconditioned descent on the reduced functional,
// with a damped Newton refinement of the Euler-Lagrange system once the
// residual is small.  Deterministic multi-start over closed-form seeds.

#include <qlgs/fiber.hpp>
#include <qlgs/functionals.hpp>
#include <qlgs/grid.hpp>
#include <qlgs/model.hpp>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qlgs {

struct SolveOptions {
    int max_outer = 2000;      // outer descent iteration budget per seed
    double descent_tol = 1e-6; // stop when el_norm <= descent_tol * pair_norm
    double step0 = 0.5;        // initial descent step per iteration
    double backtrack = 0.5;    // step reduction factor on Armijo failure
    double armijo = 1e-4;      // sufficient-decrease constant
    int seed_count = 3;        // number of deterministic starts
    bool positivity = true;    // clamp iterates to their absolute value
};

inline void validate_options(const SolveOptions& o) {
    if (o.max_outer <= 0)
        throw std::invalid_argument("max_outer must be positive, got " + std::to_string(o.max_outer));
    if (!(o.descent_tol > 0.0))
        throw std::invalid_argument("descent_tol must be positive");
    if (!(o.step0 > 0.0))
        throw std::invalid_argument("step0 must be positive");
    if (!(o.backtrack > 0.0 && o.backtrack < 1.0))
        throw std::invalid_argument("backtrack factor must lie in (0, 1)");
    if (!(o.armijo > 0.0 && o.armijo < 1.0))
        throw std::invalid_argument("armijo constant must lie in (0, 1)");
    if (o.seed_count <= 0)
        throw std::invalid_argument("seed_count must be positive, got " + std::to_string(o.seed_count));
}

struct SolveReport {
    FieldPair pair;                    // best iterate found (on M when converged)
    double m_value = 0.0;              // energy at the returned pair
    double g_residual = 0.0;           // constraint value G at the returned pair
    double p_residual = 0.0;           // Pohozaev-type residual P at the returned pair
    double el_norm = 0.0;              // weighted L2 norm of the EL residual
    int iterations = 0;                // outer iterations used by the winning seed
    std::vector<double> t_bar_history; // projection scale of each accepted iterate
    bool converged = false;
    int seed_index = -1;               // winning seed (-1 if nothing ran)
    std::string notes;                 // warnings (failed potential scans, downgrades)
};

// Deterministic Gaussian starts u = v = c exp(-r^2 / (2 sigma^2)).  Seed 0 is
// the canonical c = sigma = 1 profile; seeds 1 and 2 bracket it; further
// seeds draw (c, sigma) from [0.5, 2]^2 with the same generator used by
// seeded_pair, so distinct seeds give distinct starts.
inline FieldPair initial_pair(const RadialGrid& grid, const ModelParams& /*model*/, int seed) {
    if (seed < 0) throw std::invalid_argument("seed must be nonnegative, got " + std::to_string(seed));
    double c = 1.0, sigma = 1.0;
    if (seed == 1) {
        c = 0.5;
        sigma = 2.0;
    } else if (seed == 2) {
        c = 2.0;
        sigma = 0.5;
    } else if (seed >= 3) {
        detail::SplitMix rng(static_cast<unsigned long long>(seed));
        c = rng.uniform(0.5, 2.0);
        sigma = rng.uniform(0.5, 2.0);
    }
    FieldPair pair;
    pair.u.resize(grid.node_count);
    for (int i = 0; i < grid.node_count; ++i) {
        const double r = grid.nodes[i];
        pair.u[i] = c * std::exp(-r * r / (2.0 * sigma * sigma));
    }
    pair.u.back() = 0.0;
    pair.v = pair.u;
    return pair;
}

// Value of the reduced functional J(u, v) = max_t h(t): the energy of the
// fiber maximizer through (u, v).  Agrees with energy_I on the manifold.
inline double reduced_value(const RadialGrid& grid, const ModelParams& model,
                            const PotentialSpec& pot, const FieldPair& pair) {
    const double t = fiber_max(grid, model, pot, pair);
    return fiber_eval(grid, model, pot, pair, t);
}

namespace detail {

// Symmetric positive definite tridiagonal preconditioner: the weighted
// compact-stencil operator W(-Lap + 1) on interior nodes, with zero flux
// across the innermost face (even extension through r = 0).  Factors are
// the face areas omega r^{N-1} / dr at the half-integer radii.
struct Tridiag {
    Samples diag; // node_count entries; the Dirichlet node row is identity-like
    Samples off;  // node_count - 1 entries (symmetric off-diagonal)
};

inline Tridiag precond_factor(const RadialGrid& g) {
    const int M = g.node_count;
    const double omega = g.weights[0] / (std::pow(g.nodes[0], g.dimension - 1) * g.dr);
    Tridiag t;
    t.diag.resize(M);
    t.off.assign(M - 1, 0.0);
    for (int i = 0; i < M; ++i) {
        const double fhi = omega * std::pow((i + 1.5) * g.dr, g.dimension - 1) / g.dr;
        const double flo = (i == 0) ? 0.0 : omega * std::pow((i + 0.5) * g.dr, g.dimension - 1) / g.dr;
        t.diag[i] = flo + fhi + g.weights[i];
        if (i + 1 < M) t.off[i] = -fhi;
    }
    return t;
}

// Thomas algorithm for a symmetric tridiagonal solve.
inline Samples thomas(const Tridiag& t, const Samples& rhs) {
    const int n = static_cast<int>(rhs.size());
    Samples c(n, 0.0), d(n, 0.0), x(n, 0.0);
    c[0] = t.off.empty() ? 0.0 : t.off[0] / t.diag[0];
    d[0] = rhs[0] / t.diag[0];
    for (int i = 1; i < n; ++i) {
        const double denom = t.diag[i] - t.off[i - 1] * c[i - 1];
        if (i < n - 1) c[i] = t.off[i] / denom;
        d[i] = (rhs[i] - t.off[i - 1] * d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

// Sparsity of the derivative operator as (row, col, coeff) triplets.
inline std::vector<Eigen::Triplet<double>> derivative_triplets(const RadialGrid& g) {
    const int M = g.node_count;
    const int q = g.deriv_order / 2;
    const int k = 2 * q + 1;
    const int K = q + 2;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(M) * k);
    for (int i = 0; i < q; ++i)
        for (int c = 0; c < K; ++c) trip.emplace_back(i, c, g.inner_rows[i][c]);
    for (int i = q; i < M - q; ++i)
        for (int c = 0; c < k; ++c) trip.emplace_back(i, i - q + c, g.central[c]);
    for (int i = 0; i < q; ++i)
        for (int c = 0; c < k; ++c) trip.emplace_back(M - q + i, M - k + c, g.outer_rows[i][c]);
    return trip;
}

// |x|^e with the e < 0 singularity at x = 0 suppressed.
inline double powsafe(double x, double e) {
    const double a = std::abs(x);
    if (a == 0.0) return 0.0;
    return std::pow(a, e);
}

// One diagonal block of the EL Jacobian (the Hessian of the energy in the
// field c, weighted by the quadrature weights), restricted to interior
// nodes.  Apt is the nodal potential, ddiag the coupling contribution.
inline void jacobian_block(const RadialGrid& g,
                           const std::vector<Eigen::Triplet<double>>& dtrip,
                           const Samples& c, const Samples& dc,
                           const Samples& apt, const Samples& ddiag,
                           int row_off, int col_off,
                           std::vector<Eigen::Triplet<double>>& out) {
    const int M = g.node_count;
    const int nd = M - 1;
    const Samples& w = g.weights;

    // rows of D grouped by row index for the D^T diag(a) D product
    std::vector<std::vector<std::pair<int, double>>> rows(M);
    for (const auto& t : dtrip) rows[t.row()].emplace_back(t.col(), t.value());

    for (int i = 0; i < M; ++i) {
        const double a = w[i] * (1.0 + c[i] * c[i]); // D^T diag(w(1+c^2)) D
        const double b = w[i] * 2.0 * c[i] * dc[i];  // D^T diag(b) and diag(b) D
        for (const auto& [c1, w1] : rows[i]) {
            if (c1 >= nd) continue;
            // diag(b) D contribution: row i, col c1
            if (i < nd) out.emplace_back(row_off + i, col_off + c1, b * w1);
            // D^T diag(b) contribution: row c1, col i
            if (i < nd) out.emplace_back(row_off + c1, col_off + i, b * w1);
            for (const auto& [c2, w2] : rows[i]) {
                if (c2 >= nd) continue;
                out.emplace_back(row_off + c1, col_off + c2, a * w1 * w2);
            }
        }
    }
    for (int i = 0; i < nd; ++i) {
        const double diag = w[i] * (dc[i] * dc[i] + apt[i] + ddiag[i]);
        out.emplace_back(row_off + i, col_off + i, diag);
    }
}

struct NewtonResult {
    FieldPair pair;
    double el_rel = 0.0;
    bool ok = false;
};

// Damped Newton iteration on the weighted EL residual over interior nodes,
// using the analytic Jacobian (the energy Hessian).  Used as an endgame
// refinement once descent has brought the relative residual down.
inline NewtonResult newton_refine(const RadialGrid& g, const ModelParams& md,
                                  const PotentialSpec& pot, FieldPair pair,
                                  double target_rel, int max_iter = 40) {
    const int M = g.node_count;
    const int nd = M - 1;
    const Samples& w = g.weights;
    const double cu = 2.0 * md.alpha / md.p();
    const double cv = 2.0 * md.beta / md.p();
    const auto dtrip = derivative_triplets(g);

    Samples apot(M), bpot(M, md.coupling_B);
    for (int i = 0; i < M; ++i) apot[i] = pot.value_at(g.nodes[i]);

    auto weighted_residual = [&](const FieldPair& p) {
        const ElResidual res = el_residual(g, md, pot, p);
        Eigen::VectorXd f(2 * nd);
        for (int i = 0; i < nd; ++i) {
            f[i] = w[i] * res.ru[i];
            f[nd + i] = w[i] * res.rv[i];
        }
        return std::make_pair(f, res.norm);
    };

    auto rel_norm = [&](const FieldPair& p, double norm) {
        return norm / pair_norm(g, p);
    };

    auto [f, norm] = weighted_residual(pair);
    double el_rel = rel_norm(pair, norm);

    for (int it = 0; it < max_iter; ++it) {
        if (el_rel <= target_rel) return {pair, el_rel, true};

        Samples du = radial_derivative(g, pair.u);
        Samples dv = radial_derivative(g, pair.v);
        Samples ddu(M), ddv(M), cross(M);
        for (int i = 0; i < M; ++i) {
            const double au = std::abs(pair.u[i]), av = std::abs(pair.v[i]);
            ddu[i] = -cu * (md.alpha - 1.0) * powsafe(au, md.alpha - 2.0) * std::pow(av, md.beta);
            ddv[i] = -cv * (md.beta - 1.0) * powsafe(av, md.beta - 2.0) * std::pow(au, md.alpha);
            cross[i] = -w[i] * cu * md.beta * sgnpow(pair.u[i], md.alpha - 1.0) *
                       sgnpow(pair.v[i], md.beta - 1.0);
        }

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(dtrip.size() * 16);
        jacobian_block(g, dtrip, pair.u, du, apot, ddu, 0, 0, trip);
        jacobian_block(g, dtrip, pair.v, dv, bpot, ddv, nd, nd, trip);
        for (int i = 0; i < nd; ++i) {
            trip.emplace_back(i, nd + i, cross[i]);
            trip.emplace_back(nd + i, i, cross[i]);
        }

        Eigen::SparseMatrix<double> J(2 * nd, 2 * nd);
        J.setFromTriplets(trip.begin(), trip.end());
        J.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) return {pair, el_rel, false};
        Eigen::VectorXd step = lu.solve(f);
        if (lu.info() != Eigen::Success) return {pair, el_rel, false};

        const double fn = f.norm();
        double lam = 1.0;
        bool moved = false;
        while (lam > 1e-8) {
            FieldPair trial = pair;
            for (int i = 0; i < nd; ++i) {
                trial.u[i] = pair.u[i] - lam * step[i];
                trial.v[i] = pair.v[i] - lam * step[nd + i];
            }
            auto [f2, norm2] = weighted_residual(trial);
            if (f2.norm() < fn) {
                pair = trial;
                f = f2;
                norm = norm2;
                el_rel = rel_norm(pair, norm);
                moved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!moved) break;
    }
    return {pair, el_rel, el_rel <= target_rel};
}

} // namespace detail

struct DescentOutcome {
    FieldPair pair;     // accepted trial, projected back onto M
    double step = 0.0;  // accepted step length (0 when stalled)
    double value = 0.0; // reduced functional at the accepted pair
    double t_bar = 1.0; // fiber maximizer of the raw accepted trial
    bool stalled = false;
};

// One projected, preconditioned descent step with Armijo backtracking.
// pre: pair lies on the manifold.  reference_coupling, when positive, arms
// the degeneracy guard against collapse toward the excluded origin.
inline DescentOutcome descent_step(const RadialGrid& grid, const ModelParams& model,
                                   const PotentialSpec& pot, const FieldPair& pair,
                                   const SolveOptions& opts,
                                   double reference_coupling = 0.0) {
    detail::require_pair(grid, pair);
    const int M = grid.node_count;

    const ElResidual res = el_residual(grid, model, pot, pair);
    const auto tri = detail::precond_factor(grid);
    Samples rhs_u(M), rhs_v(M);
    for (int i = 0; i < M; ++i) {
        rhs_u[i] = grid.weights[i] * res.ru[i];
        rhs_v[i] = grid.weights[i] * res.rv[i];
    }
    const Samples du = detail::thomas(tri, rhs_u);
    const Samples dv = detail::thomas(tri, rhs_v);

    double slope = 0.0;
    for (int i = 0; i < M; ++i)
        slope += grid.weights[i] * (res.ru[i] * du[i] + res.rv[i] * dv[i]);

    const double J = reduced_value(grid, model, pot, pair);

    double step = opts.step0;
    while (step >= 1e-12) {
        FieldPair raw;
        raw.u.resize(M);
        raw.v.resize(M);
        for (int i = 0; i < M; ++i) {
            double tu = pair.u[i] - step * du[i];
            double tv = pair.v[i] - step * dv[i];
            if (opts.positivity) {
                tu = std::abs(tu);
                tv = std::abs(tv);
            }
            raw.u[i] = tu;
            raw.v[i] = tv;
        }
        raw.u.back() = 0.0;
        raw.v.back() = 0.0;

        if (reference_coupling > 0.0) {
            const double coup = breakdown(grid, model, pot, raw).coupling;
            if (coup < 1e-14 * reference_coupling)
                throw std::runtime_error(
                    "pair degenerated toward the excluded point (0,0)");
        }

        FieldPair proj;
        try {
            proj = project(grid, model, pot, raw);
        } catch (const std::runtime_error&) {
            step *= opts.backtrack;
            continue;
        }
        const double Jt = reduced_value(grid, model, pot, proj);
        if (Jt <= J - opts.armijo * step * slope) {
            DescentOutcome out;
            out.pair = std::move(proj);
            out.step = step;
            out.value = Jt;
            out.t_bar = fiber_max(grid, model, pot, raw);
            return out;
        }
        step *= opts.backtrack;
    }

    DescentOutcome out;
    out.pair = pair;
    out.value = J;
    out.stalled = true;
    return out;
}

namespace detail {

struct SeedRun {
    SolveReport report;
    double el_rel = std::numeric_limits<double>::infinity();
};

inline SeedRun solve_seed(const RadialGrid& grid, const ModelParams& model,
                          const PotentialSpec& pot, const SolveOptions& opts,
                          int seed) {
    SeedRun run;
    SolveReport& rep = run.report;
    rep.seed_index = seed;

    FieldPair raw = initial_pair(grid, model, seed);
    rep.t_bar_history.push_back(fiber_max(grid, model, pot, raw));
    FieldPair pair = project(grid, model, pot, raw);
    const double coupling0 = breakdown(grid, model, pot, pair).coupling;

    FieldPair best = pair;
    double best_rel = std::numeric_limits<double>::infinity();
    double endgame_rel = 1e-3;
    int iterations = 0;

    for (int it = 0; it < opts.max_outer; ++it) {
        iterations = it;
        const ElResidual res = el_residual(grid, model, pot, pair);
        const double pn = pair_norm(grid, pair);
        const double el_rel = res.norm / pn;
        if (el_rel < best_rel) {
            best_rel = el_rel;
            best = pair;
        }
        if (res.norm <= opts.descent_tol * pn) {
            rep.converged = true;
            break;
        }

        if (el_rel <= endgame_rel) {
            auto nr = newton_refine(grid, model, pot, pair, 0.01 * opts.descent_tol);
            bool accepted = false;
            if (nr.ok) {
                double num = 0.0, den = 0.0;
                for (int i = 0; i < grid.node_count; ++i) {
                    const double eu = nr.pair.u[i] - pair.u[i];
                    const double ev = nr.pair.v[i] - pair.v[i];
                    num += grid.weights[i] * (eu * eu + ev * ev);
                    den += grid.weights[i] *
                           (pair.u[i] * pair.u[i] + pair.v[i] * pair.v[i]);
                }
                const double dist = std::sqrt(num / den);
                if (dist <= 0.02) {
                    FieldPair polished = nr.pair;
                    if (opts.positivity) {
                        for (auto& x : polished.u) x = std::abs(x);
                        for (auto& x : polished.v) x = std::abs(x);
                    }
                    polished.u.back() = 0.0;
                    polished.v.back() = 0.0;
                    FieldPair proj;
                    bool projected = true;
                    double t_bar = 1.0;
                    try {
                        t_bar = fiber_max(grid, model, pot, polished);
                        proj = project(grid, model, pot, polished);
                    } catch (const std::runtime_error&) {
                        projected = false;
                    }
                    if (projected) {
                        const ElResidual res2 = el_residual(grid, model, pot, proj);
                        const double pn2 = pair_norm(grid, proj);
                        if (res2.norm <= opts.descent_tol * pn2) {
                            pair = proj;
                            rep.t_bar_history.push_back(t_bar);
                            if (res2.norm / pn2 < best_rel) {
                                best_rel = res2.norm / pn2;
                                best = pair;
                            }
                            rep.converged = true;
                            iterations = it + 1;
                            accepted = true;
                        }
                    }
                }
            }
            if (accepted) break;
            endgame_rel *= 0.5;
        }

        const DescentOutcome out = descent_step(grid, model, pot, pair, opts, coupling0);
        if (out.stalled) break;
        pair = out.pair;
        rep.t_bar_history.push_back(out.t_bar);
    }

    if (!rep.converged) {
        // return the best iterate seen rather than wherever descent stalled
        pair = best;
    }

    const ElResidual res = el_residual(grid, model, pot, pair);
    run.el_rel = res.norm / pair_norm(grid, pair);
    rep.pair = pair;
    rep.m_value = energy_I(grid, model, pot, pair);
    rep.g_residual = constraint_G(grid, model, pot, pair);
    rep.p_residual = pohozaev_P(grid, model, pot, pair);
    rep.el_norm = res.norm;
    rep.iterations = iterations;
    return run;
}

} // namespace detail

// Multi-start ground-state search.  Runs seed_count deterministic starts and
// returns the lowest converged energy (ties broken by seed order); when no
// start converges, returns the best iterate with converged = false.
inline SolveReport solve(const RadialGrid& grid, const ModelParams& model,
                         const PotentialSpec& pot, const SolveOptions& opts = {}) {
    validate_options(opts);

    std::string notes;
    {
        const CheckResult a1 = check_A1(pot, grid);
        if (!a1.pass)
            notes += "warning: potential failed the A1 positivity/range scan (worst " +
                     std::to_string(a1.worst_value) + " at r = " +
                     std::to_string(a1.worst_location) + ")\n";
        const CheckResult a3 = check_A3(pot, model, grid);
        if (!a3.pass)
            notes += "warning: potential failed the A3 concavity scan (worst excess " +
                     std::to_string(a3.worst_value) + " at s = " +
                     std::to_string(a3.worst_location) + ")\n";
    }

    // Starts are independent: a seed whose projection or descent breaks down
    // (fiber bracketing failure, degeneracy collapse) is recorded as a failed
    // start and the reducer picks among the rest.
    bool have_converged = false;
    bool have_any = false;
    detail::SeedRun winner;
    std::string first_error;
    for (int seed = 0; seed < opts.seed_count; ++seed) {
        detail::SeedRun run;
        try {
            run = detail::solve_seed(grid, model, pot, opts, seed);
        } catch (const std::exception& e) {
            if (first_error.empty()) first_error = e.what();
            notes += "warning: seed " + std::to_string(seed) + " failed: " + e.what() + "\n";
            continue;
        }
        if (run.report.converged) {
            if (!have_converged || run.report.m_value < winner.report.m_value) {
                winner = std::move(run);
                have_converged = true;
            }
        } else if (!have_converged) {
            if (!have_any || run.el_rel < winner.el_rel) winner = std::move(run);
        }
        have_any = true;
    }
    if (!have_any)
        throw std::runtime_error("every start failed before producing an iterate; first error: " +
                                 first_error);

    SolveReport rep = std::move(winner.report);
    if (rep.converged) {
        const EnergyBreakdown b = breakdown(grid, model, pot, rep.pair);
        const bool finite = std::isfinite(b.kin) && std::isfinite(b.potA) &&
                            std::isfinite(b.potB) && std::isfinite(b.quasi) &&
                            std::isfinite(b.gradA) && std::isfinite(b.coupling);
        if (!finite || !(rep.m_value > 0.0)) {
            rep.converged = false;
            notes += "warning: converged iterate failed the energy sanity check "
                     "(nonpositive or non-finite energy); reporting it unconverged\n";
        }
    }
    rep.notes = notes;
    return rep;
}

} // namespace qlgs
