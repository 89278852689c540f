#pragma once

// Shape-preserving cubic interpolation with Fritsch-Carlson slopes: the
// interpolant is monotone wherever the data are, which keeps rescaled
// radial profiles free of overshoot near steep shoulders.

#include <qlgs/grid.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qlgs {

class Pchip {
  public:
    Pchip(Samples knots, Samples values)
        : x_(std::move(knots)), y_(std::move(values)) {
        const std::size_t n = x_.size();
        if (n != y_.size()) {
            throw std::invalid_argument("pchip: knot and value counts differ");
        }
        if (n < 2) {
            throw std::invalid_argument("pchip: need at least two knots");
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!(x_[i] < x_[i + 1])) {
                throw std::invalid_argument(
                    "pchip: knots must be strictly increasing");
            }
        }
        d_.assign(n, 0.0);
        if (n == 2) {
            d_[0] = d_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return;
        }
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;    // local extremum or flat: zero slope
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    // Evaluate at q; queries outside the knot range clamp to the end values.
    double operator()(double q) const {
        if (q <= x_.front()) return y_.front();
        if (q >= x_.back()) return y_.back();
        const auto it = std::upper_bound(x_.begin(), x_.end(), q);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (q - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[i] +
               (t3 - 2.0 * t2 + t) * h * d_[i] +
               (-2.0 * t3 + 3.0 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
    }

  private:
    // shape-preserving three-point rule for the boundary slope
    static double edge_slope(double h0, double h1, double del0, double del1) {
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0) {
            d = 0.0;
        } else if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0)) {
            d = 3.0 * del0;
        }
        return d;
    }

    Samples x_, y_, d_;
};

}  // namespace qlgs
