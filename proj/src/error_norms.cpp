#include "ddm/error_norms.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "ddm/parallel.hpp"

namespace ddm {

namespace {

struct CellAccum {
    double l2 = 0.0;
    double semi = 0.0;
    std::int64_t points = 0;
};

// Quadrature over one (sub)rectangle of a cell. Nodal values enter through
// the bilinear basis on the *parent* cell.
void accumulate_patch(const PhaseField& pf, const double nodal[4], Vec2 cell_origin, double hx,
                      double hy, double sub_x0, double sub_y0, double sub_w, double sub_h,
                      const QuadratureRule& rule, const ScalarFn& exact,
                      const GradientFn* exact_gradient, double t, CellAccum& acc) {
    const auto& dom = pf.domain();
    for (int m = 0; m < rule.order; ++m) {
        for (int l = 0; l < rule.order; ++l) {
            const double xi = sub_x0 + rule.points[l] * sub_w;  // in [0,1] of the parent cell
            const double eta = sub_y0 + rule.points[m] * sub_h;
            const Vec2 x{cell_origin.x + xi * hx, cell_origin.y + eta * hy};
            acc.points += 1;
            const double d = dom.signed_distance(x);
            if (!(d < 0.0)) continue; // indicator restricts to D
            const double w = pf.weight_from_distance(d);
            const double meas = rule.weights[l] * rule.weights[m] * sub_w * sub_h * hx * hy;
            const double phi[4] = {(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), xi * eta,
                                   (1.0 - xi) * eta};
            const double uh = nodal[0] * phi[0] + nodal[1] * phi[1] + nodal[2] * phi[2] +
                              nodal[3] * phi[3];
            const double diff = uh - exact(t, x);
            acc.l2 += meas * w * diff * diff;
            if (exact_gradient) {
                const double gx = (-(1.0 - eta) * nodal[0] + (1.0 - eta) * nodal[1] +
                                   eta * nodal[2] - eta * nodal[3]) / hx;
                const double gy = (-(1.0 - xi) * nodal[0] - xi * nodal[1] + xi * nodal[2] +
                                   (1.0 - xi) * nodal[3]) / hy;
                const Vec2 ge = (*exact_gradient)(t, x);
                const double dx = gx - ge.x, dy = gy - ge.y;
                acc.semi += meas * w * (dx * dx + dy * dy);
            }
        }
    }
}

// Both norms in one sweep; per-cell partials are reduced serially in cell
// order so results do not depend on the worker count.
CellAccum weighted_error_pass(const StructuredGrid& grid, const PhaseField& pf,
                              std::span<const double> u_h, const ScalarFn& exact,
                              const GradientFn* exact_gradient, double t,
                              const NormOptions& opts) {
    if (!exact) throw ConfigError("weighted error norm: exact solution required");
    if (static_cast<int>(u_h.size()) != grid.num_nodes())
        throw ConfigError("weighted error norm: nodal vector size mismatch");
    const QuadratureRule rule(opts.quadrature_order);
    const double hx = grid.hx(), hy = grid.hy();
    const int nxp1 = grid.nx + 1;
    const auto& dom = pf.domain();
    const double half_diag = 0.5 * std::hypot(hx, hy);
    const int sub = std::max(1, opts.cut_subdivision);

    std::vector<CellAccum> per_cell(static_cast<std::size_t>(grid.num_cells()));
    parallel_ranges(grid.num_cells(), opts.workers, [&](std::int64_t lo, std::int64_t hi, int) {
        for (std::int64_t c = lo; c < hi; ++c) {
            const int ci = static_cast<int>(c) % grid.nx;
            const int cj = static_cast<int>(c) / grid.nx;
            const Vec2 origin = grid.cell_origin(ci, cj);
            const double nodal[4] = {
                u_h[static_cast<std::size_t>(cj) * nxp1 + ci],
                u_h[static_cast<std::size_t>(cj) * nxp1 + ci + 1],
                u_h[(static_cast<std::size_t>(cj) + 1) * nxp1 + ci + 1],
                u_h[(static_cast<std::size_t>(cj) + 1) * nxp1 + ci]};
            CellAccum acc;
            const double d_center =
                dom.signed_distance(origin + Vec2{0.5 * hx, 0.5 * hy});
            if (d_center >= half_diag) {
                // Entirely outside D: indicator kills the cell, but count it.
                per_cell[static_cast<std::size_t>(c)] = acc;
                continue;
            }
            const bool cut = std::abs(d_center) < half_diag;
            if (!cut) {
                accumulate_patch(pf, nodal, origin, hx, hy, 0.0, 0.0, 1.0, 1.0, rule, exact,
                                 exact_gradient, t, acc);
            } else {
                const double s = 1.0 / sub;
                for (int sj = 0; sj < sub; ++sj)
                    for (int si = 0; si < sub; ++si)
                        accumulate_patch(pf, nodal, origin, hx, hy, si * s, sj * s, s, s, rule,
                                         exact, exact_gradient, t, acc);
            }
            per_cell[static_cast<std::size_t>(c)] = acc;
        }
    });

    CellAccum total;
    for (const auto& acc : per_cell) {
        total.l2 += acc.l2;
        total.semi += acc.semi;
        total.points += acc.points;
    }
    return total;
}

} // namespace

double weighted_l2_error(const StructuredGrid& grid, const PhaseField& pf,
                         std::span<const double> u_h, const ScalarFn& exact, double t,
                         const NormOptions& opts) {
    const CellAccum acc = weighted_error_pass(grid, pf, u_h, exact, nullptr, t, opts);
    return std::sqrt(acc.l2);
}

double weighted_h1_error(const StructuredGrid& grid, const PhaseField& pf,
                         std::span<const double> u_h, const ScalarFn& exact,
                         const GradientFn& exact_gradient, double t, const NormOptions& opts) {
    if (!exact_gradient) throw ConfigError("weighted_h1_error: exact gradient required");
    const CellAccum acc = weighted_error_pass(grid, pf, u_h, exact, &exact_gradient, t, opts);
    return std::sqrt(acc.l2 + acc.semi);
}

ErrorReport compute_error_report(const StructuredGrid& grid, const PhaseField& pf,
                                 std::span<const double> u_h, const ScalarFn& exact,
                                 const GradientFn& exact_gradient, double t,
                                 const NormOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const CellAccum acc = weighted_error_pass(grid, pf, u_h, exact, &exact_gradient, t, opts);
    ErrorReport rep;
    rep.epsilon = pf.epsilon();
    rep.l2_error = std::sqrt(acc.l2);
    rep.h1_error = std::sqrt(acc.l2 + acc.semi);
    rep.l2_quad_points = acc.points;
    rep.h1_quad_points = acc.points;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!std::isfinite(rep.l2_error) || !std::isfinite(rep.h1_error))
        throw NumericalError("error norms: non-finite result");
    return rep;
}

std::vector<double> convergence_rates(std::span<const double> errors) {
    if (errors.size() < 2) throw ConfigError("convergence_rates: need at least 2 entries");
    std::vector<double> rates;
    rates.reserve(errors.size() - 1);
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        if (errors[k] <= 0.0 || errors[k + 1] <= 0.0)
            rates.push_back(std::numeric_limits<double>::quiet_NaN());
        else
            rates.push_back(std::log2(errors[k] / errors[k + 1]));
    }
    return rates;
}

} // namespace ddm
