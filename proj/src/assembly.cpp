#include "ddm/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ddm/parallel.hpp"

namespace ddm {

namespace {

void check_options(const AssemblyOptions& opts) {
    if (opts.quadrature_order < 2 || opts.quadrature_order > 6)
        throw ConfigError("assembly: quadrature order must be in [2,6]");
    if (opts.floor_delta < 0.0) throw ConfigError("assembly: floor must be non-negative");
}

// Local corner order is cyclic: (0,0), (1,0), (1,1), (0,1).
constexpr int kDi[4] = {0, 1, 1, 0};
constexpr int kDj[4] = {0, 0, 1, 1};

struct QuadPoint {
    double w;        // tensor weight (reference measure, sums to 1)
    double xi, eta;  // position on [0,1]^2
    double phi[4];
    double dphi_dx[4], dphi_dy[4]; // physical gradients for the given cell size
};

std::vector<QuadPoint> tensor_rule(const QuadratureRule& rule, double hx, double hy) {
    std::vector<QuadPoint> qps;
    qps.reserve(static_cast<std::size_t>(rule.order) * rule.order);
    for (int m = 0; m < rule.order; ++m) {
        for (int l = 0; l < rule.order; ++l) {
            QuadPoint q;
            q.xi = rule.points[l];
            q.eta = rule.points[m];
            q.w = rule.weights[l] * rule.weights[m];
            q.phi[0] = (1.0 - q.xi) * (1.0 - q.eta);
            q.phi[1] = q.xi * (1.0 - q.eta);
            q.phi[2] = q.xi * q.eta;
            q.phi[3] = (1.0 - q.xi) * q.eta;
            const double gx[4] = {-(1.0 - q.eta), (1.0 - q.eta), q.eta, -q.eta};
            const double gy[4] = {-(1.0 - q.xi), -q.xi, q.xi, (1.0 - q.xi)};
            for (int a = 0; a < 4; ++a) {
                q.dphi_dx[a] = gx[a] / hx;
                q.dphi_dy[a] = gy[a] / hy;
            }
            qps.push_back(q);
        }
    }
    return qps;
}

enum CellClass : unsigned char { kSlow = 0, kFastInterior = 1, kFastExterior = 2 };

// Distance threshold beyond which the weight saturates (to 1 inside, to the
// floor outside) to the resolution of the floor itself; 19/3*eps caps it at
// the point where tanh rounds to +-1 in double precision.
double band_halfwidth(double epsilon, double delta) {
    double s_sat = 19.0;
    if (delta > 0.0 && delta < 0.5) s_sat = std::min(s_sat, 0.5 * std::log((1.0 - delta) / delta));
    if (delta >= 0.5) s_sat = 0.0;
    return s_sat / 3.0 * epsilon;
}

std::vector<unsigned char> classify_cells(const StructuredGrid& grid, const PhaseField& pf,
                                          double delta, int workers) {
    const double half_diag = 0.5 * std::hypot(grid.hx(), grid.hy());
    const double t_band = band_halfwidth(pf.epsilon(), delta) + half_diag;
    std::vector<unsigned char> cls(static_cast<std::size_t>(grid.num_cells()));
    const auto& dom = pf.domain();
    parallel_ranges(grid.num_cells(), workers, [&](std::int64_t lo, std::int64_t hi, int) {
        for (std::int64_t c = lo; c < hi; ++c) {
            const int ci = static_cast<int>(c) % grid.nx;
            const int cj = static_cast<int>(c) / grid.nx;
            const Vec2 center = grid.cell_origin(ci, cj) + Vec2{0.5 * grid.hx(), 0.5 * grid.hy()};
            const double d = dom.signed_distance(center);
            if (d <= -t_band)
                cls[c] = kFastInterior;
            else if (d >= t_band)
                cls[c] = kFastExterior;
            else
                cls[c] = kSlow;
        }
    });
    return cls;
}

// Per-worker block of node rows with the 9-point stencil laid out densely.
struct RowBlock {
    int row_begin = 0, row_end = 0; // node-row range [begin, end]
    int nxp1 = 0;
    std::vector<double> a; // (row_end-row_begin+1) * nxp1 * 9

    void init(int begin, int end, int nxp1_) {
        row_begin = begin;
        row_end = end;
        nxp1 = nxp1_;
        a.assign(static_cast<std::size_t>(end - begin + 1) * nxp1 * 9, 0.0);
    }
    double* row(int i, int j) {
        return a.data() + (static_cast<std::size_t>(j - row_begin) * nxp1 + i) * 9;
    }
    const double* row(int i, int j) const {
        return a.data() + (static_cast<std::size_t>(j - row_begin) * nxp1 + i) * 9;
    }
};

// Scatter a symmetric 4x4 element matrix for cell (ci,cj).
void scatter_element(RowBlock& blk, int ci, int cj, const double e[4][4]) {
    for (int a = 0; a < 4; ++a) {
        double* row = blk.row(ci + kDi[a], cj + kDj[a]);
        for (int b = 0; b < 4; ++b) {
            const int slot = (kDj[b] - kDj[a] + 1) * 3 + (kDi[b] - kDi[a] + 1);
            row[slot] += e[a][b];
        }
    }
}

SparseSymmetricMatrix blocks_to_csr(const StructuredGrid& grid,
                                    const std::vector<RowBlock>& blocks) {
    const int nxp1 = grid.nx + 1;
    const int nyp1 = grid.ny + 1;
    const int n = nxp1 * nyp1;
    std::vector<std::int64_t> row_ptr(static_cast<std::size_t>(n) + 1, 0);
    for (int j = 0; j < nyp1; ++j) {
        const int span_j = (j > 0 ? 1 : 0) + 1 + (j < nyp1 - 1 ? 1 : 0);
        for (int i = 0; i < nxp1; ++i) {
            const int span_i = (i > 0 ? 1 : 0) + 1 + (i < nxp1 - 1 ? 1 : 0);
            row_ptr[static_cast<std::size_t>(j) * nxp1 + i + 1] = span_i * span_j;
        }
    }
    for (int r = 0; r < n; ++r) row_ptr[r + 1] += row_ptr[r];

    std::vector<int> cols(static_cast<std::size_t>(row_ptr[n]));
    std::vector<double> vals(static_cast<std::size_t>(row_ptr[n]));
    for (int j = 0; j < nyp1; ++j) {
        for (int i = 0; i < nxp1; ++i) {
            std::int64_t k = row_ptr[static_cast<std::size_t>(j) * nxp1 + i];
            for (int dj = -1; dj <= 1; ++dj) {
                if (j + dj < 0 || j + dj >= nyp1) continue;
                for (int di = -1; di <= 1; ++di) {
                    if (i + di < 0 || i + di >= nxp1) continue;
                    const int slot = (dj + 1) * 3 + (di + 1);
                    double v = 0.0;
                    for (const RowBlock& blk : blocks)
                        if (j >= blk.row_begin && j <= blk.row_end) v += blk.row(i, j)[slot];
                    cols[k] = (j + dj) * nxp1 + (i + di);
                    vals[k] = v;
                    ++k;
                }
            }
        }
    }
    SparseSymmetricMatrix out(n, std::move(row_ptr), std::move(cols), std::move(vals));
    out.set_grid_stencil(nxp1);
    return out;
}

// Splits cell rows into contiguous chunks and runs the cell kernel on each;
// merge order is ascending, which reproduces the serial summation order for
// every matrix entry regardless of the worker count.
template <typename CellKernel>
SparseSymmetricMatrix assemble_matrix(const StructuredGrid& grid, int workers,
                                      CellKernel&& kernel) {
    const int chunks = std::max(1, std::min(workers, grid.ny));
    std::vector<RowBlock> blocks(static_cast<std::size_t>(chunks));
    parallel_ranges(grid.ny, chunks, [&](std::int64_t lo, std::int64_t hi, int c) {
        RowBlock& blk = blocks[static_cast<std::size_t>(c)];
        blk.init(static_cast<int>(lo), static_cast<int>(hi), grid.nx + 1);
        for (int cj = static_cast<int>(lo); cj < static_cast<int>(hi); ++cj)
            for (int ci = 0; ci < grid.nx; ++ci) kernel(ci, cj, blk);
    });
    return blocks_to_csr(grid, blocks);
}

} // namespace

SparseSymmetricMatrix assemble_weighted_mass(const StructuredGrid& grid, const PhaseField& pf,
                                             const AssemblyOptions& opts) {
    check_options(opts);
    const QuadratureRule rule(opts.quadrature_order);
    const double hx = grid.hx(), hy = grid.hy();
    const double cell_area = hx * hy;
    const auto qps = tensor_rule(rule, hx, hy);
    const auto cls = classify_cells(grid, pf, opts.floor_delta, opts.workers);
    const auto& dom = pf.domain();

    // Constant-weight element mass, computed with the same rule.
    double ref[4][4] = {};
    for (const auto& q : qps)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) ref[a][b] += q.w * q.phi[a] * q.phi[b];

    return assemble_matrix(grid, opts.workers, [&](int ci, int cj, RowBlock& blk) {
        const unsigned char c = cls[static_cast<std::size_t>(cj) * grid.nx + ci];
        double e[4][4];
        if (c != kSlow) {
            const double w = (c == kFastInterior) ? 1.0 : opts.floor_delta;
            if (w == 0.0) return;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) e[a][b] = w * cell_area * ref[a][b];
        } else {
            const Vec2 origin = grid.cell_origin(ci, cj);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) e[a][b] = 0.0;
            for (const auto& q : qps) {
                const Vec2 x{origin.x + q.xi * hx, origin.y + q.eta * hy};
                const double w = pf.floored_weight_from_distance(dom.signed_distance(x));
                const double scale = q.w * cell_area * w;
                for (int a = 0; a < 4; ++a) {
                    const double pa = scale * q.phi[a];
                    for (int b = a; b < 4; ++b) e[a][b] += pa * q.phi[b];
                }
            }
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < a; ++b) e[a][b] = e[b][a];
        }
        scatter_element(blk, ci, cj, e);
    });
}

SparseSymmetricMatrix assemble_weighted_stiffness(const StructuredGrid& grid, const PhaseField& pf,
                                                  const ProblemSpec& spec,
                                                  const AssemblyOptions& opts, double /*t*/) {
    check_options(opts);
    const QuadratureRule rule(opts.quadrature_order);
    const double hx = grid.hx(), hy = grid.hy();
    const double cell_area = hx * hy;
    const auto qps = tensor_rule(rule, hx, hy);
    const auto cls = classify_cells(grid, pf, opts.floor_delta, opts.workers);
    const auto& dom = pf.domain();

    // Unit-coefficient element stiffness for the constant fast paths.
    double ref[4][4] = {};
    for (const auto& q : qps)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                ref[a][b] += q.w * (q.dphi_dx[a] * q.dphi_dx[b] + q.dphi_dy[a] * q.dphi_dy[b]);

    const bool const_a = spec.diffusion_constant;
    const double a_const = spec.diffusion_value;

    return assemble_matrix(grid, opts.workers, [&](int ci, int cj, RowBlock& blk) {
        const unsigned char c = cls[static_cast<std::size_t>(cj) * grid.nx + ci];
        const Vec2 origin = grid.cell_origin(ci, cj);
        double e[4][4];
        if (c != kSlow && const_a) {
            const double w = (c == kFastInterior) ? 1.0 : opts.floor_delta;
            if (w == 0.0) return;
            const double s = w * a_const * cell_area;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) e[a][b] = s * ref[a][b];
        } else {
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) e[a][b] = 0.0;
            for (const auto& q : qps) {
                const Vec2 x{origin.x + q.xi * hx, origin.y + q.eta * hy};
                double w;
                if (c == kFastInterior)
                    w = 1.0;
                else if (c == kFastExterior)
                    w = opts.floor_delta;
                else
                    w = pf.floored_weight_from_distance(dom.signed_distance(x));
                if (w == 0.0) continue;
                const double scale = q.w * cell_area * w * spec.diffusion(x);
                for (int a = 0; a < 4; ++a) {
                    for (int b = a; b < 4; ++b)
                        e[a][b] += scale * (q.dphi_dx[a] * q.dphi_dx[b] + q.dphi_dy[a] * q.dphi_dy[b]);
                }
            }
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < a; ++b) e[a][b] = e[b][a];
        }
        scatter_element(blk, ci, cj, e);
    });
}

namespace {

// Shared load pass. FBar/GBar evaluate the extended source and boundary data
// at a fixed time (or as spatial profiles for the separable cache).
template <typename FBar, typename GBar>
std::vector<double> load_pass(const StructuredGrid& grid, const PhaseField& pf,
                              const AssemblyOptions& opts, FBar&& f_bar, GBar&& g_bar) {
    const QuadratureRule rule(opts.quadrature_order);
    const double hx = grid.hx(), hy = grid.hy();
    const double cell_area = hx * hy;
    const auto qps = tensor_rule(rule, hx, hy);
    const auto cls = classify_cells(grid, pf, opts.floor_delta, opts.workers);
    const auto& dom = pf.domain();
    const int n = grid.num_nodes();
    const int nxp1 = grid.nx + 1;

    const int chunks = std::max(1, std::min(opts.workers, grid.ny));
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(chunks));
    parallel_ranges(grid.ny, chunks, [&](std::int64_t lo, std::int64_t hi, int c) {
        auto& out = partial[static_cast<std::size_t>(c)];
        out.assign(static_cast<std::size_t>(n), 0.0);
        for (int cj = static_cast<int>(lo); cj < static_cast<int>(hi); ++cj) {
            for (int ci = 0; ci < grid.nx; ++ci) {
                const unsigned char cc = cls[static_cast<std::size_t>(cj) * grid.nx + ci];
                const Vec2 origin = grid.cell_origin(ci, cj);
                double fe[4] = {0.0, 0.0, 0.0, 0.0};
                if (cc == kFastExterior && opts.floor_delta == 0.0) continue;
                for (const auto& q : qps) {
                    const Vec2 x{origin.x + q.xi * hx, origin.y + q.eta * hy};
                    double integrand;
                    if (cc == kFastInterior) {
                        integrand = f_bar(x);
                    } else if (cc == kFastExterior) {
                        integrand = opts.floor_delta * f_bar(x);
                    } else {
                        const auto dp = dom.distance_and_projection(x);
                        const double w = pf.floored_weight_from_distance(dp.distance);
                        const double gmag = pf.gradient_magnitude_from_distance(dp.distance);
                        integrand = w * f_bar(x);
                        if (gmag > 0.0)
                            integrand += gmag * g_bar(x, dp.distance, dp.point, dp.normal);
                    }
                    const double scale = q.w * cell_area * integrand;
                    for (int a = 0; a < 4; ++a) fe[a] += scale * q.phi[a];
                }
                for (int a = 0; a < 4; ++a)
                    out[static_cast<std::size_t>(cj + kDj[a]) * nxp1 + ci + kDi[a]] += fe[a];
            }
        }
    });

    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (const auto& part : partial)
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] += part[static_cast<std::size_t>(i)];
    return out;
}

} // namespace

std::vector<double> assemble_load(const StructuredGrid& grid, const PhaseField& pf,
                                  const ProblemSpec& spec, const AssemblyOptions& opts, double t) {
    check_options(opts);
    const ExtensionMode mode = spec.neumann_mode;
    const double eps = pf.epsilon();
    return load_pass(
        grid, pf, opts, [&](Vec2 x) { return spec.source(t, x); },
        [&](Vec2 x, double d, Vec2 p, Vec2 n) {
            switch (mode) {
            case ExtensionMode::analytic_global: return spec.neumann(t, x, n);
            case ExtensionMode::closest_point_constant: return spec.neumann(t, p, n);
            default: return (d > -eps && d < eps) ? spec.neumann(t, p, n) : 0.0;
            }
        });
}

LoadAssembler::LoadAssembler(const StructuredGrid& grid, const PhaseField& pf,
                             const ProblemSpec& spec, const AssemblyOptions& opts)
    : grid_(&grid), pf_(&pf), spec_(&spec), opts_(opts) {
    check_options(opts);
    separable_ = spec.separable();
    if (!separable_) return;
    const ExtensionMode mode = spec.neumann_mode;
    const double eps = pf.epsilon();
    profile_ = load_pass(
        grid, pf, opts, [&](Vec2 x) { return spec.source_profile(x); },
        [&](Vec2 x, double d, Vec2 p, Vec2 n) {
            switch (mode) {
            case ExtensionMode::analytic_global: return spec.neumann_profile(x, n);
            case ExtensionMode::closest_point_constant: return spec.neumann_profile(p, n);
            default: return (d > -eps && d < eps) ? spec.neumann_profile(p, n) : 0.0;
            }
        });
}

void LoadAssembler::assemble(double t, std::span<double> out) const {
    if (separable_) {
        const double th = spec_->time_factor(t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = th * profile_[i];
        return;
    }
    const auto full = assemble_load(*grid_, *pf_, *spec_, opts_, t);
    std::copy(full.begin(), full.end(), out.begin());
}

std::vector<double> LoadAssembler::assemble(double t) const {
    std::vector<double> out(static_cast<std::size_t>(grid_->num_nodes()));
    assemble(t, out);
    return out;
}

} // namespace ddm
