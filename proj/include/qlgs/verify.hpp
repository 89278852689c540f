#pragma once

// Independent oracles and property checks: the termwise algebraic identity
// behind the constraint, a dense finite-difference Newton solve of the
// Euler-Lagrange system (deliberately ignorant of the variational
// machinery), the Hoelder/Young inequality chain, and the constant-potential
// comparison of ground-state energies.

#include <qlgs/functionals.hpp>
#include <qlgs/grid.hpp>
#include <qlgs/model.hpp>
#include <qlgs/solver.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlgs {

struct VerifyReport {
    double identity_max_rel_err = 0.0;
    double holder_worst_slack = 0.0;
    double oracle_energy = 0.0;
    double oracle_el_norm = 0.0;
    double comparison_margin = 0.0; // m(constant floor) - m(variable potential)
    std::vector<std::string> notes;

    // Thresholds mirror the per-check acceptance bounds; any note records a
    // skipped or failed stage and therefore fails the report.
    bool pass() const {
        return notes.empty() && identity_max_rel_err <= 1e-10 &&
               holder_worst_slack >= -1e-12 && oracle_el_norm <= 1e-8 &&
               comparison_margin <= 1e-4;
    }
};

// Max relative error of G = P + <I'(u,v),(u,v)> over seeded smooth pairs.
inline double identity_check(int trials, const RadialGrid& grid,
                             const ModelParams& model, const PotentialSpec& pot) {
    if (trials < 1)
        throw std::invalid_argument("identity_check needs at least one trial");
    double worst = 0.0;
    for (int seed = 0; seed < trials; ++seed) {
        const FieldPair pair = seeded_pair(grid, static_cast<unsigned long long>(seed));
        const double G = constraint_G(grid, model, pot, pair);
        const double P = pohozaev_P(grid, model, pot, pair);
        const double pr = pairing(grid, model, pot, pair, pair);
        const double rel = std::abs(G - P - pr) /
                           (std::abs(G) + std::abs(P) + std::abs(pr) + 1e-30);
        worst = std::max(worst, rel);
    }
    return worst;
}

namespace detail {

// Most negative normalized margin of the two-step chain
//   coupling <= (int |u|^p)^(a/p) (int |v|^p)^(b/p) <= (a/p) int |u|^p + (b/p) int |v|^p
inline double chain_slack(const RadialGrid& grid, const ModelParams& model,
                          const FieldPair& pair) {
    const double p = model.p();
    Samples cu(grid.node_count), up(grid.node_count), vp(grid.node_count);
    for (int i = 0; i < grid.node_count; ++i) {
        const double au = std::abs(pair.u[i]);
        const double av = std::abs(pair.v[i]);
        cu[i] = std::pow(au, model.alpha) * std::pow(av, model.beta);
        up[i] = std::pow(au, p);
        vp[i] = std::pow(av, p);
    }
    const double coupling = integrate(grid, cu);
    const double iu = integrate(grid, up);
    const double iv = integrate(grid, vp);
    const double holder = std::pow(iu, model.alpha / p) * std::pow(iv, model.beta / p);
    const double young = (model.alpha / p) * iu + (model.beta / p) * iv;
    const double scale = std::max({coupling, holder, young, 1e-300});
    return std::min((holder - coupling) / scale, (young - holder) / scale);
}

} // namespace detail

// Scans seeded pairs plus the two analytic equality cases (u = v rendering
// Hoelder tight; matched p-integrals rendering Young tight); returns the
// most negative normalized margin seen.
inline double holder_chain_check(int trials, const RadialGrid& grid,
                                 const ModelParams& model) {
    if (trials < 1)
        throw std::invalid_argument("holder_chain_check needs at least one trial");
    double worst = std::numeric_limits<double>::infinity();
    for (int seed = 0; seed < trials; ++seed) {
        const FieldPair pair = seeded_pair(grid, static_cast<unsigned long long>(seed));
        worst = std::min(worst, detail::chain_slack(grid, model, pair));
    }

    FieldPair equal = seeded_pair(grid, 0);
    equal.v = equal.u;
    worst = std::min(worst, detail::chain_slack(grid, model, equal));

    FieldPair matched = seeded_pair(grid, 1);
    {
        const double p = model.p();
        Samples up(grid.node_count), vp(grid.node_count);
        for (int i = 0; i < grid.node_count; ++i) {
            up[i] = std::pow(std::abs(matched.u[i]), p);
            vp[i] = std::pow(std::abs(matched.v[i]), p);
        }
        const double factor = std::pow(integrate(grid, up) / integrate(grid, vp), 1.0 / p);
        for (auto& x : matched.v) x *= factor;
    }
    worst = std::min(worst, detail::chain_slack(grid, model, matched));
    return worst;
}

struct OracleResult {
    FieldPair pair;
    double el_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

// Damped Newton on the nodewise Euler-Lagrange residual with a dense
// finite-difference Jacobian.  Slow but entirely independent of the fiber
// and descent machinery, which is the point of an oracle.
inline OracleResult newton_oracle(const RadialGrid& grid, const ModelParams& model,
                                  const PotentialSpec& pot, const FieldPair& start,
                                  double tol = 1e-8, int max_iter = 60) {
    if (grid.node_count > 128)
        throw std::invalid_argument(
            "newton_oracle requires a small grid (node count <= 128 for dense "
            "linear algebra), got " + std::to_string(grid.node_count));
    detail::require_pair(grid, start);
    if (breakdown(grid, model, pot, start).coupling <= 0.0)
        throw std::invalid_argument("newton_oracle start has vanishing coupling");

    const int M = grid.node_count;
    const int nd = M - 1;
    const int n = 2 * nd;

    auto assemble = [&](const Eigen::VectorXd& x) {
        FieldPair p;
        p.u.assign(M, 0.0);
        p.v.assign(M, 0.0);
        for (int i = 0; i < nd; ++i) {
            p.u[i] = x[i];
            p.v[i] = x[nd + i];
        }
        return p;
    };
    auto eval = [&](const Eigen::VectorXd& x) {
        const ElResidual res = el_residual(grid, model, pot, assemble(x));
        Eigen::VectorXd r(n);
        for (int i = 0; i < nd; ++i) {
            r[i] = res.ru[i];
            r[nd + i] = res.rv[i];
        }
        return std::make_pair(r, res.norm);
    };

    Eigen::VectorXd x(n);
    for (int i = 0; i < nd; ++i) {
        x[i] = start.u[i];
        x[nd + i] = start.v[i];
    }

    OracleResult out;
    auto [r, el] = eval(x);
    for (int it = 0; it < max_iter; ++it) {
        if (el <= tol) break;

        const double scale = std::max(x.cwiseAbs().maxCoeff(), 1.0);
        const double h = 1e-7 * scale;
        Eigen::MatrixXd J(n, n);
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd xp = x;
            xp[j] += h;
            J.col(j) = (eval(xp).first - r) / h;
        }

        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) {
            J += 1e-10 * Eigen::MatrixXd::Identity(n, n);
            lu.compute(J);
            if (!lu.isInvertible()) break;
        }
        const Eigen::VectorXd dx = lu.solve(r);

        const double rn = r.norm();
        double lam = 1.0;
        bool moved = false;
        while (lam > 1e-6) {
            const Eigen::VectorXd xn = x - lam * dx;
            auto [r2, el2] = eval(xn);
            if (r2.norm() < rn) {
                x = xn;
                r = r2;
                el = el2;
                ++out.iterations;
                moved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!moved) break;
    }

    out.pair = assemble(x);
    out.el_norm = el;
    out.converged = el <= tol;
    return out;
}

struct ComparisonResult {
    double margin = 0.0;   // m(constant floor) - m(variable potential)
    bool conclusive = false;
};

// Solves the problem twice, once with the potential frozen at its floor A0,
// and returns the energy gap.  The constant problem can only be easier, so
// the margin should not exceed solver tolerance.
inline ComparisonResult constant_comparison(const ModelParams& model,
                                            const PotentialSpec& potA,
                                            const RadialGrid& grid,
                                            const SolveOptions& options = {}) {
    const PotentialSpec flat =
        make_potential("constant", potA.A0, potA.A0, potA.clamp_radius);
    const SolveReport floor_rep = solve(grid, model, flat, options);
    const SolveReport var_rep = solve(grid, model, potA, options);
    if (!floor_rep.converged || !var_rep.converged) return {};
    return {floor_rep.m_value - var_rep.m_value, true};
}

// Assembles the full report: identity and inequality scans on the given
// grid, the independent Newton solve on a dedicated coarse grid (dense
// algebra), and the constant-potential comparison on the given grid.
//
// The oracle is warm-started from the manifold solver's best iterate on the
// same coarse grid.  That solve is allowed to stop short of full tolerance:
// coarse grids admit spurious manifold minima a few residual decades up, and
// the cross-validation only needs the 1% energy agreement.
inline VerifyReport run_verify(const RadialGrid& grid, const ModelParams& model,
                               const PotentialSpec& pot, const SolveOptions& options = {}) {
    VerifyReport rep;
    rep.identity_max_rel_err = identity_check(100, grid, model, pot);
    rep.holder_worst_slack = holder_chain_check(100, grid, model);

    const RadialGrid coarse = make_grid(model.dimension, 11.5, 96, 6);
    SolveOptions coarse_opts = options;
    coarse_opts.max_outer = std::min(coarse_opts.max_outer, 400);
    const SolveReport sol = solve(coarse, model, pot, coarse_opts);

    const OracleResult oracle = newton_oracle(coarse, model, pot, sol.pair);
    rep.oracle_el_norm = oracle.el_norm;
    rep.oracle_energy = energy_I(coarse, model, pot, oracle.pair);
    if (!oracle.converged)
        rep.notes.push_back("newton oracle did not reach tolerance");
    else if (std::abs(rep.oracle_energy - sol.m_value) > 0.01 * std::abs(sol.m_value))
        rep.notes.push_back("oracle and solver energies disagree beyond 1%");

    const ComparisonResult cmp = constant_comparison(model, pot, grid, options);
    if (!cmp.conclusive)
        rep.notes.push_back("constant-potential comparison inconclusive (a solve failed)");
    else
        rep.comparison_margin = cmp.margin;
    return rep;
}

} // namespace qlgs
