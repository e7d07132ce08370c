#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ddm/geometry.hpp"
#include "ddm/sparse.hpp"
#include "ddm/time_integration.hpp"
#include "ddm/vec2.hpp"

namespace ddm {

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(N), scaled by the region area
    long long samples = 0;
    std::uint64_t seed = 0;
};

/// Uniform Monte-Carlo estimate of the integral of f (optionally times the
/// phase-field weight) over a rectangle. Sampling is sharded with seeds
/// derived deterministically from the master seed, so the estimate is
/// bitwise reproducible for a given seed and any worker count.
/// Throws NumericalError (carrying the offending point) on non-finite samples.
McEstimate mc_weighted_integral(const std::function<double(Vec2)>& integrand, const Rect& region,
                                const PhaseField* pf, long long samples, std::uint64_t seed,
                                int workers = 1);

/// Max over the points of the relative error between the analytic gradient
/// and a central finite difference with the given step.
double fd_gradient_check(const std::function<double(Vec2)>& field,
                         const std::function<Vec2(Vec2)>& gradient,
                         std::span<const Vec2> points, double step);

/// Dense-factorization reference for the BE+BDF2 recursion; validates the
/// sparse CG path. Guarded to systems of dimension <= 5000.
std::vector<double> dense_reference_solve(const SparseSymmetricMatrix& M,
                                          const SparseSymmetricMatrix& K,
                                          const std::function<std::vector<double>(double)>& load_at,
                                          const TimeGrid& tg, std::span<const double> u0);

} // namespace ddm
