#pragma once

// Model parameters and potential hypotheses for the coupled quasilinear
// system.  A model is the exponent/coupling tuple (N, alpha, beta, B); a
// potential is a radial profile A(r) together with its declared range
// [A0, Ainf] and a clamp radius beyond which it is frozen at Ainf.  The
// check_A* routines test the three structural hypotheses the variational
// argument needs: range, decay of the radial slope, and concavity of the
// induced scaling transform.

#include <qlgs/grid.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace qlgs {

struct ModelParams {
    int dimension = 3;      // N >= 3
    double alpha = 2.0;     // > 1
    double beta = 2.0;      // > 1
    double coupling_B = 1.0;    // > 0, weight of the second equation

    double p() const { return alpha + beta; }
    // supercritical threshold for the quasilinear pair, 4N/(N-2)
    double p_max() const {
        return 4.0 * dimension / (dimension - 2.0);
    }
};

inline ModelParams make_model(int dimension, double alpha, double beta,
                              double coupling_B) {
    if (dimension < 3) {
        throw std::invalid_argument("dimension must be at least 3, got " +
                                    std::to_string(dimension));
    }
    if (!(alpha > 1.0)) {
        throw std::invalid_argument("alpha must be > 1, got " +
                                    std::to_string(alpha));
    }
    if (!(beta > 1.0)) {
        throw std::invalid_argument("beta must be > 1, got " +
                                    std::to_string(beta));
    }
    if (!(coupling_B > 0.0)) {
        throw std::invalid_argument("coupling weight B must be > 0, got " +
                                    std::to_string(coupling_B));
    }
    ModelParams m{dimension, alpha, beta, coupling_B};
    const double p = m.p();
    if (!(p > 2.0) || !(p < m.p_max())) {
        throw std::invalid_argument(
            "alpha + beta = " + std::to_string(p) +
            " is outside the admissible range (2, " + std::to_string(m.p_max()) +
            ") for dimension " + std::to_string(dimension));
    }
    return m;
}

// Radial potential with declared floor/ceiling.  The evaluators already
// include the clamp: value_at(r) == Ainf and slope_at(r) == 0 for
// r > clamp_radius.  Custom profiles can be formed by replacing the
// evaluators; the declared A0/Ainf are what the checks test against.
struct PotentialSpec {
    std::string name;
    double A0 = 1.0;
    double Ainf = 1.0;
    double clamp_radius = 0.0;
    std::function<double(double)> value_at;
    std::function<double(double)> slope_at;
};

inline PotentialSpec make_potential(const std::string& name, double A0,
                                    double Ainf, double clamp_radius) {
    if (!(A0 > 0.0)) {
        throw std::invalid_argument("potential floor A0 must be > 0, got " +
                                    std::to_string(A0));
    }
    if (!(Ainf >= A0)) {
        throw std::invalid_argument(
            "potential ceiling Ainf must be >= A0, got Ainf = " +
            std::to_string(Ainf) + ", A0 = " + std::to_string(A0));
    }
    if (!(clamp_radius > 0.0)) {
        throw std::invalid_argument("clamp radius must be > 0, got " +
                                    std::to_string(clamp_radius));
    }
    PotentialSpec pot;
    pot.name = name;
    pot.A0 = A0;
    pot.Ainf = Ainf;
    pot.clamp_radius = clamp_radius;
    const double depth = Ainf - A0;
    const double rc = clamp_radius;
    if (name == "constant") {
        if (Ainf != A0) {
            throw std::invalid_argument(
                "constant potential requires Ainf == A0");
        }
        pot.value_at = [A0](double) { return A0; };
        pot.slope_at = [](double) { return 0.0; };
    } else if (name == "gauss-well") {
        pot.value_at = [Ainf, depth, rc](double r) {
            if (r > rc) return Ainf;
            return Ainf - depth * std::exp(-r * r);
        };
        pot.slope_at = [depth, rc](double r) {
            if (r > rc) return 0.0;
            return depth * 2.0 * r * std::exp(-r * r);
        };
    } else if (name == "rational-well") {
        pot.value_at = [Ainf, depth, rc](double r) {
            if (r > rc) return Ainf;
            return Ainf - depth / (1.0 + r * r);
        };
        pot.slope_at = [depth, rc](double r) {
            if (r > rc) return 0.0;
            const double d = 1.0 + r * r;
            return depth * 2.0 * r / (d * d);
        };
    } else {
        throw std::invalid_argument("unknown potential \"" + name +
                                    "\"; registered names are constant, "
                                    "gauss-well, rational-well");
    }
    return pot;
}

// Result of a single hypothesis check.  worst_value/worst_location describe
// the most critical sample even when the check passes.
struct CheckResult {
    bool pass = false;
    double worst_value = 0.0;
    double worst_location = 0.0;
    std::string note;
};

// Range check: A0 <= A(r) <= Ainf at every grid node and at r = 0, with a
// tolerance of 1e-12 * Ainf for roundoff at the declared endpoints.
inline CheckResult check_A1(const PotentialSpec& pot, const RadialGrid& grid) {
    const double eps = 1e-12 * pot.Ainf;
    CheckResult res;
    double worst = -1.0;
    auto visit = [&](double r) {
        const double v = pot.value_at(r);
        const double offense = std::max(pot.A0 - v, v - pot.Ainf);
        if (offense > worst) {
            worst = offense;
            res.worst_value = v;
            res.worst_location = r;
        }
    };
    visit(0.0);
    for (double r : grid.nodes) visit(r);
    res.pass = worst <= eps;
    if (!res.pass) {
        res.note = "value " + std::to_string(res.worst_value) + " at r = " +
                   std::to_string(res.worst_location) +
                   " leaves the declared range [" + std::to_string(pot.A0) +
                   ", " + std::to_string(pot.Ainf) + "]";
    }
    return res;
}

// Slope-decay check: sup_r |r * A'(r)| over the grid nodes must not exceed
// the supplied bound.
inline CheckResult check_A2(const PotentialSpec& pot, const RadialGrid& grid,
                            double bound) {
    CheckResult res;
    double sup = 0.0;
    for (double r : grid.nodes) {
        const double v = std::abs(r * pot.slope_at(r));
        if (v >= sup) {
            if (v > sup) res.worst_location = r;
            sup = v;
        }
    }
    res.worst_value = sup;
    res.pass = sup <= bound;
    if (!res.pass) {
        res.note = "sup |r A'(r)| = " + std::to_string(sup) + " at r = " +
                   std::to_string(res.worst_location) + " exceeds bound " +
                   std::to_string(bound);
    }
    return res;
}

// Concavity check for the scaling transform.  For every node r the map
//   phi_r(s) = s^theta * A(s^(1/(N+p)) * r),  theta = (N+2)/(N+p),
// must be concave on the dilation range.  We sample a geometric ladder of s
// values on [1e-3, 1e3] and test each interior point against the chord of
// its neighbours; a chord excess beyond 1e-10 * max|phi_r| flags a failure.
inline CheckResult check_A3(const PotentialSpec& pot, const ModelParams& model,
                            const RadialGrid& grid, int s_samples = 400) {
    if (s_samples < 16) {
        throw std::invalid_argument("s_samples must be at least 16, got " +
                                    std::to_string(s_samples));
    }
    const double np = model.dimension + model.p();
    const double theta = (model.dimension + 2.0) / np;
    const double s_lo = 1e-3, s_hi = 1e3;
    std::vector<double> s(s_samples), phi(s_samples);
    const double ratio = std::log(s_hi / s_lo) / (s_samples - 1);
    for (int k = 0; k < s_samples; ++k) {
        s[k] = s_lo * std::exp(k * ratio);
    }

    CheckResult res;
    double worst_rel = -1.0;
    bool clamped = false;
    for (double r : grid.nodes) {
        double scale = 0.0;
        for (int k = 0; k < s_samples; ++k) {
            const double rr = std::pow(s[k], 1.0 / np) * r;
            if (rr > pot.clamp_radius) clamped = true;
            phi[k] = std::pow(s[k], theta) * pot.value_at(rr);
            scale = std::max(scale, std::abs(phi[k]));
        }
        for (int k = 1; k + 1 < s_samples; ++k) {
            const double lam = (s[k] - s[k - 1]) / (s[k + 1] - s[k - 1]);
            const double chord = (1.0 - lam) * phi[k - 1] + lam * phi[k + 1];
            const double excess = (chord - phi[k]) / scale;
            if (excess > worst_rel) {
                worst_rel = excess;
                res.worst_location = r;
                res.note = "chord excess " + std::to_string(excess) +
                           " at r = " + std::to_string(r) +
                           ", s = " + std::to_string(s[k]);
            }
        }
    }
    res.worst_value = worst_rel;
    res.pass = worst_rel <= 1e-10;
    if (res.pass) res.note.clear();
    if (clamped) {
        if (!res.note.empty()) res.note += "; ";
        res.note += "ladder sampled beyond the clamp radius, where the "
                    "potential is held at its ceiling";
    }
    return res;
}

}  // namespace qlgs
