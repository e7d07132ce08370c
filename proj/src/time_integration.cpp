#include "ddm/time_integration.hpp"

#include <algorithm>
#include <cmath>

namespace ddm {

std::vector<double> initialize(const StructuredGrid& grid, const ProblemSpec& spec,
                               const ImplicitDomain& domain) {
    std::vector<double> u(static_cast<std::size_t>(grid.num_nodes()));
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i)
            u[static_cast<std::size_t>(grid.node_index(i, j))] =
                extend_field(spec, domain, FieldId::initial, 0.0, grid.node(i, j));
    return u;
}

std::vector<double> step_be(const SparseSymmetricMatrix& M, const SparseSymmetricMatrix& K,
                            std::span<const double> u_n, std::span<const double> load, double dtau,
                            const SolveOptions& opts, SolveStats* stats) {
    const int n = M.dim();
    const auto A = SparseSymmetricMatrix::scaled_sum(1.0 / dtau, M, 1.0, K);
    std::vector<double> b(static_cast<std::size_t>(n));
    M.multiply(u_n, b, opts.workers);
    for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] =
        b[static_cast<std::size_t>(i)] / dtau + load[static_cast<std::size_t>(i)];
    std::vector<double> u(u_n.begin(), u_n.end());
    const SolveStats s = solve_spd(A, b, u, opts, /*use_initial_guess=*/true);
    if (stats) *stats = s;
    return u;
}

std::vector<double> step_bdf2(const SparseSymmetricMatrix& M, const SparseSymmetricMatrix& K,
                              std::span<const double> u_n, std::span<const double> u_nm1,
                              std::span<const double> load, double dtau, const SolveOptions& opts,
                              SolveStats* stats) {
    const int n = M.dim();
    const auto A = SparseSymmetricMatrix::scaled_sum(1.5 / dtau, M, 1.0, K);
    std::vector<double> tmp(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        tmp[static_cast<std::size_t>(i)] =
            2.0 * u_n[static_cast<std::size_t>(i)] - 0.5 * u_nm1[static_cast<std::size_t>(i)];
    M.multiply(tmp, b, opts.workers);
    for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] =
        b[static_cast<std::size_t>(i)] / dtau + load[static_cast<std::size_t>(i)];
    // Linear predictor as the CG starting guess.
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        u[static_cast<std::size_t>(i)] =
            2.0 * u_n[static_cast<std::size_t>(i)] - u_nm1[static_cast<std::size_t>(i)];
    const SolveStats s = solve_spd(A, b, u, opts, /*use_initial_guess=*/true);
    if (stats) *stats = s;
    return u;
}

TransientSolution run_transient(const StructuredGrid& grid, const PhaseField& pf,
                                const ProblemSpec& spec, const TimeGrid& tg,
                                const TransientOptions& opts, std::vector<double> snapshot_times) {
    const int n = grid.num_nodes();
    const double dt = tg.dtau();

    const LoadAssembler load(grid, pf, spec, opts.assembly);
    const SparseSymmetricMatrix M = assemble_weighted_mass(grid, pf, opts.assembly);
    const SparseSymmetricMatrix K = assemble_weighted_stiffness(grid, pf, spec, opts.assembly);
    const auto A_be = SparseSymmetricMatrix::scaled_sum(1.0 / dt, M, 1.0, K);
    const auto A_bdf2 = SparseSymmetricMatrix::scaled_sum(1.5 / dt, M, 1.0, K);

    // Map requested snapshot times onto step indices; t = T is always kept.
    std::vector<int> snap_steps;
    for (double t : snapshot_times) {
        int s = static_cast<int>(std::lround(t / dt));
        s = std::clamp(s, 0, tg.num_steps);
        snap_steps.push_back(s);
    }
    snap_steps.push_back(tg.num_steps);
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    TransientSolution sol;
    std::vector<double> u_prev = initialize(grid, spec, pf.domain());
    std::vector<double> u_prev2, u_prev3;
    std::size_t snap_cursor = 0;
    if (snap_steps[snap_cursor] == 0) {
        sol.snapshot_times.push_back(0.0);
        sol.snapshots.push_back(u_prev);
        ++snap_cursor;
    }

    std::vector<double> b(static_cast<std::size_t>(n)), tmp(static_cast<std::size_t>(n));
    std::vector<double> load_vec(static_cast<std::size_t>(n));
    std::vector<double> u(static_cast<std::size_t>(n));

    for (int step = 1; step <= tg.num_steps; ++step) {
        const double t_next = step * dt;
        load.assemble(t_next, load_vec);
        SolveStats stats;
        try {
            if (step == 1) {
                M.multiply(u_prev, b, opts.solver.workers);
                for (int i = 0; i < n; ++i)
                    b[static_cast<std::size_t>(i)] =
                        b[static_cast<std::size_t>(i)] / dt + load_vec[static_cast<std::size_t>(i)];
                u = u_prev;
                stats = solve_spd(A_be, b, u, opts.solver, true);
            } else {
                for (int i = 0; i < n; ++i)
                    tmp[static_cast<std::size_t>(i)] = 2.0 * u_prev[static_cast<std::size_t>(i)] -
                                                       0.5 * u_prev2[static_cast<std::size_t>(i)];
                M.multiply(tmp, b, opts.solver.workers);
                for (int i = 0; i < n; ++i)
                    b[static_cast<std::size_t>(i)] =
                        b[static_cast<std::size_t>(i)] / dt + load_vec[static_cast<std::size_t>(i)];
                if (u_prev3.empty()) {
                    for (int i = 0; i < n; ++i)
                        u[static_cast<std::size_t>(i)] =
                            2.0 * u_prev[static_cast<std::size_t>(i)] -
                            u_prev2[static_cast<std::size_t>(i)];
                } else {
                    // quadratic extrapolation as the CG starting guess
                    for (int i = 0; i < n; ++i)
                        u[static_cast<std::size_t>(i)] =
                            3.0 * (u_prev[static_cast<std::size_t>(i)] -
                                   u_prev2[static_cast<std::size_t>(i)]) +
                            u_prev3[static_cast<std::size_t>(i)];
                }
                stats = solve_spd(A_bdf2, b, u, opts.solver, true);
            }
        } catch (SolverError& e) {
            e.step_index = step;
            throw SolverError(std::string(e.what()) + " at time step " + std::to_string(step),
                              e.final_residual, e.iterations);
        }
        sol.solver_iterations.push_back(stats.iterations);
        u_prev3 = std::move(u_prev2);
        u_prev2 = std::move(u_prev);
        u_prev = u;
        if (snap_cursor < snap_steps.size() && snap_steps[snap_cursor] == step) {
            sol.snapshot_times.push_back(t_next);
            sol.snapshots.push_back(u_prev);
            ++snap_cursor;
        }
    }
    return sol;
}

} // namespace ddm
