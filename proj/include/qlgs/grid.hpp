#pragma once
// Radial reduction of integrals over R^N and discrete differentiation of
// sampled radial profiles. A RadialGrid carries uniform nodes on (0, r_max],
// shell quadrature weights, and the stencil rows of a banded derivative
// operator whose accuracy order is selectable.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlgs {

using Samples = std::vector<double>;

namespace detail {

/// Finite-difference weights for the first derivative at x0 from arbitrary
/// nodes xs (Fornberg's recurrence).
inline Samples fd_weights(double x0, const Samples& xs) {
    const int n = static_cast<int>(xs.size());
    std::vector<double> c0(n, 0.0), c1v(n, 0.0);
    c0[0] = 1.0;
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                c1v[i] = c1 * (c0[i - 1] - c5 * c1v[i - 1]) / c2;
                c0[i] = -c1 * c5 * c0[i - 1] / c2;
            }
            c1v[j] = (c4 * c1v[j] - c0[j]) / c3;
            c0[j] = c4 * c0[j] / c3;
        }
        c1 = c2;
    }
    return c1v;
}

/// Solves a small dense system in place by Gaussian elimination with
/// partial pivoting. Used only to build edge stencil rows.
inline Samples solve_small(std::vector<Samples> a, Samples b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (a[col][col] == 0.0) throw std::runtime_error("singular stencil system");
        for (int r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Samples x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

/// Derivative weights at node index i (0-based, nodes r = dr, 2dr, ...)
/// from an interpolant in even powers r^(2j) through the first K nodes.
/// Smooth radial profiles are even in r, so this closure is exact for them
/// through degree 2(K-1) and needs no ghost values below the first node.
inline Samples even_row(int i, int K, double dr) {
    const double xK = K * dr;
    std::vector<Samples> vt(K, Samples(K));
    for (int j = 0; j < K; ++j)
        for (int l = 0; l < K; ++l) {
            double s = (l + 1) * dr / xK;
            vt[j][l] = std::pow(s * s, j);   // transpose of the Vandermonde in s^2
        }
    Samples rhs(K, 0.0);
    double si = (i + 1) * dr / xK;
    for (int j = 1; j < K; ++j) rhs[j] = 2.0 * j * std::pow(si, 2 * j - 1);
    Samples row = solve_small(std::move(vt), std::move(rhs));
    for (double& c : row) c /= xK;
    return row;
}

} // namespace detail

/// Uniform radial grid on (0, r_max] with shell quadrature weights
/// w_i = omega_{N-1} r_i^{N-1} dr and banded derivative stencils.
/// Nodes are r_i = i*dr for i = 1..M; r = 0 is not a node.
struct RadialGrid {
    int dimension = 3;
    double r_max = 0.0;
    int node_count = 0;
    int deriv_order = 4;    // 2, 4, or 6
    double dr = 0.0;
    Samples nodes;
    Samples weights;

    // derivative operator rows: central stencil for the interior, dedicated
    // rows at both edges (even-interpolant inner closure, one-sided outer)
    Samples central;                    // 2q+1 coefficients, offsets -q..q
    std::vector<Samples> inner_rows;    // rows 0..q-1 over columns 0..K-1
    std::vector<Samples> outer_rows;    // rows M-q..M-1 over the last 2q+1 columns
};

/// Builds a uniform radial grid. deriv_order selects the stencil accuracy
/// of radial_derivative (2, 4, or 6; 4 is the default used throughout).
inline RadialGrid make_grid(int N, double r_max, int M, int deriv_order = 4) {
    if (N < 3) throw std::invalid_argument("dimension must be at least 3, got " + std::to_string(N));
    if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
    if (M < 8) throw std::invalid_argument("node count must be at least 8, got " + std::to_string(M));
    if (deriv_order != 2 && deriv_order != 4 && deriv_order != 6)
        throw std::invalid_argument("derivative order must be 2, 4, or 6");

    RadialGrid g;
    g.dimension = N;
    g.r_max = r_max;
    g.node_count = M;
    g.deriv_order = deriv_order;
    g.dr = r_max / M;
    g.nodes.resize(M);
    g.weights.resize(M);
    const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
    for (int i = 0; i < M; ++i) {
        g.nodes[i] = (i + 1) * g.dr;
        g.weights[i] = omega * std::pow(g.nodes[i], N - 1) * g.dr;
    }

    const int q = deriv_order / 2;
    const int k = 2 * q + 1;
    if (M < 2 * k) throw std::invalid_argument("node count too small for the requested stencil order");

    Samples xs(k);
    for (int j = 0; j < k; ++j) xs[j] = (j - q) * g.dr;
    g.central = detail::fd_weights(0.0, xs);

    const int K = q + 2;
    g.inner_rows.resize(q);
    for (int i = 0; i < q; ++i) g.inner_rows[i] = detail::even_row(i, K, g.dr);

    g.outer_rows.resize(q);
    Samples xtail(k);
    for (int j = 0; j < k; ++j) xtail[j] = (M - k + 1 + j) * g.dr;
    for (int i = 0; i < q; ++i)
        g.outer_rows[i] = detail::fd_weights((M - q + 1 + i) * g.dr, xtail);

    return g;
}

/// Weighted sum realizing the volume integral of a radial integrand.
/// Summation is left to right for reproducibility.
inline double integrate(const RadialGrid& g, const Samples& samples) {
    if (static_cast<int>(samples.size()) != g.node_count)
        throw std::invalid_argument("sample count does not match the grid");
    double acc = 0.0;
    for (int i = 0; i < g.node_count; ++i) {
        if (!std::isfinite(samples[i]))
            throw std::domain_error("non-finite sample at node " + std::to_string(i) +
                                    " (r = " + std::to_string(g.nodes[i]) + ")");
        acc += g.weights[i] * samples[i];
    }
    return acc;
}

/// Applies the derivative operator to nodal samples of a radial profile.
inline Samples radial_derivative(const RadialGrid& g, const Samples& samples) {
    if (static_cast<int>(samples.size()) != g.node_count)
        throw std::invalid_argument("sample count does not match the grid");
    const int M = g.node_count;
    const int q = g.deriv_order / 2;
    const int k = 2 * q + 1;
    const int K = q + 2;
    Samples out(M, 0.0);
    for (int i = 0; i < q; ++i) {
        double s = 0.0;
        for (int c = 0; c < K; ++c) s += g.inner_rows[i][c] * samples[c];
        out[i] = s;
    }
    for (int i = q; i < M - q; ++i) {
        double s = 0.0;
        for (int c = 0; c < k; ++c) s += g.central[c] * samples[i - q + c];
        out[i] = s;
    }
    for (int i = 0; i < q; ++i) {
        double s = 0.0;
        for (int c = 0; c < k; ++c) s += g.outer_rows[i][c] * samples[M - k + c];
        out[M - q + i] = s;
    }
    return out;
}

/// Applies the exact transpose of radial_derivative. Together they give the
/// discrete summation-by-parts adjoint used for conservative residuals.
inline Samples derivative_transpose(const RadialGrid& g, const Samples& y) {
    if (static_cast<int>(y.size()) != g.node_count)
        throw std::invalid_argument("sample count does not match the grid");
    const int M = g.node_count;
    const int q = g.deriv_order / 2;
    const int k = 2 * q + 1;
    const int K = q + 2;
    Samples out(M, 0.0);
    for (int i = 0; i < q; ++i)
        for (int c = 0; c < K; ++c) out[c] += g.inner_rows[i][c] * y[i];
    for (int i = q; i < M - q; ++i)
        for (int c = 0; c < k; ++c) out[i - q + c] += g.central[c] * y[i];
    for (int i = 0; i < q; ++i)
        for (int c = 0; c < k; ++c) out[M - k + c] += g.outer_rows[i][c] * y[M - q + i];
    return out;
}

} // namespace qlgs
