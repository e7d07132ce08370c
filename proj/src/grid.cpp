#include "ddm/grid.hpp"

#include <cmath>

namespace ddm {

namespace {

// Legendre polynomial value and derivative at x via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

} // namespace

QuadratureRule::QuadratureRule(int order_per_axis) : order(order_per_axis) {
    if (order < 1 || order > 16)
        throw ConfigError("QuadratureRule: order per axis must be in [1,16]");
    points.resize(order);
    weights.resize(order);
    const int n = order;
    for (int k = 0; k < (n + 1) / 2; ++k) {
        // Newton from the Chebyshev-like initial guess on [-1,1].
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 64; ++it) {
            const auto [p, d] = legendre(n, x);
            dp = d;
            const double dx = p / d;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1,1] -> [0,1]; weights halve so they sum to 1.
        points[k] = 0.5 * (1.0 - x);
        points[n - 1 - k] = 0.5 * (1.0 + x);
        weights[k] = 0.5 * w;
        weights[n - 1 - k] = 0.5 * w;
    }
}

} // namespace ddm
