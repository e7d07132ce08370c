#pragma once

#include <span>
#include <vector>

#include "ddm/assembly.hpp"
#include "ddm/geometry.hpp"
#include "ddm/grid.hpp"
#include "ddm/problem.hpp"
#include "ddm/sparse.hpp"

namespace ddm {

struct TimeGrid {
    double final_time = 0.5;
    int num_steps = 2;

    TimeGrid() = default;
    TimeGrid(double T, int steps) : final_time(T), num_steps(steps) {
        if (!(T > 0.0)) throw ConfigError("TimeGrid: final time must be positive");
        if (steps < 2) throw ConfigError("TimeGrid: need at least 2 steps");
    }
    double dtau() const { return final_time / num_steps; }
};

struct TransientOptions {
    AssemblyOptions assembly;
    SolveOptions solver;
};

struct TransientSolution {
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> snapshots; // nodal vectors, one per snapshot time
    std::vector<int> solver_iterations;         // per time step

    const std::vector<double>& final_state() const { return snapshots.back(); }
};

/// Nodal interpolation of the extended initial value at all grid nodes.
std::vector<double> initialize(const StructuredGrid& grid, const ProblemSpec& spec,
                               const ImplicitDomain& domain);

/// One backward-Euler step: solves (M/dt + K) u = M u_n / dt + F.
std::vector<double> step_be(const SparseSymmetricMatrix& M, const SparseSymmetricMatrix& K,
                            std::span<const double> u_n, std::span<const double> load, double dtau,
                            const SolveOptions& opts, SolveStats* stats = nullptr);

/// One BDF2 step: solves (3M/(2dt) + K) u = (4 u_n - u_nm1) M / (2dt) + F.
std::vector<double> step_bdf2(const SparseSymmetricMatrix& M, const SparseSymmetricMatrix& K,
                              std::span<const double> u_n, std::span<const double> u_nm1,
                              std::span<const double> load, double dtau, const SolveOptions& opts,
                              SolveStats* stats = nullptr);

/// Full transient solve: assembles M and K once, rebuilds only the load each
/// step (a scaled cached vector for separable problems), backward Euler for
/// the first step and BDF2 afterwards. Snapshots always include t = T.
TransientSolution run_transient(const StructuredGrid& grid, const PhaseField& pf,
                                const ProblemSpec& spec, const TimeGrid& tg,
                                const TransientOptions& opts,
                                std::vector<double> snapshot_times = {});

} // namespace ddm
