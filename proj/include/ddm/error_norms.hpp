#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ddm/geometry.hpp"
#include "ddm/grid.hpp"
#include "ddm/vec2.hpp"

namespace ddm {

struct NormOptions {
    int quadrature_order = 4;
    int workers = 1;
    /// Cells crossed by the boundary are split into sub x sub subcells so the
    /// cut indicator is resolved well below the measured error scales.
    int cut_subdivision = 4;
};

struct ErrorReport {
    double epsilon = 0.0;
    double l2_error = 0.0;
    double h1_error = 0.0;
    std::int64_t l2_quad_points = 0;
    std::int64_t h1_quad_points = 0;
    double wall_seconds = 0.0;
};

struct SweepRow {
    double epsilon = 0.0;
    double l2_error = 0.0;
    std::optional<double> l2_rate;
    double h1_error = 0.0;
    std::optional<double> h1_rate;
    double runtime_seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

using ScalarFn = std::function<double(double, Vec2)>;
using GradientFn = std::function<Vec2(double, Vec2)>;

/// || u_h - u ||_{L2(D; w)}: quadrature restricted to D by the indicator
/// d(x) < 0, weighted by the true (unfloored) phase-field weight. u_h is
/// evaluated by bilinear interpolation of the nodal vector.
double weighted_l2_error(const StructuredGrid& grid, const PhaseField& pf,
                         std::span<const double> u_h, const ScalarFn& exact, double t,
                         const NormOptions& opts = {});

/// Full weighted H1 norm: sqrt(L2^2 + integral of w |grad u_h - grad u|^2).
double weighted_h1_error(const StructuredGrid& grid, const PhaseField& pf,
                         std::span<const double> u_h, const ScalarFn& exact,
                         const GradientFn& exact_gradient, double t,
                         const NormOptions& opts = {});

/// Single pass computing both norms plus quadrature-point counts.
ErrorReport compute_error_report(const StructuredGrid& grid, const PhaseField& pf,
                                 std::span<const double> u_h, const ScalarFn& exact,
                                 const GradientFn& exact_gradient, double t,
                                 const NormOptions& opts = {});

/// CR_k = log2(e_k / e_{k+1}); NaN marks undefined rates (non-positive input).
std::vector<double> convergence_rates(std::span<const double> errors);

} // namespace ddm
