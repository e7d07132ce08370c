#pragma once

#include <span>
#include <vector>

#include "ddm/geometry.hpp"
#include "ddm/grid.hpp"
#include "ddm/problem.hpp"
#include "ddm/sparse.hpp"

namespace ddm {

struct AssemblyOptions {
    int quadrature_order = 4; // Gauss points per axis, in [2,6]
    double floor_delta = 1e-8; // assembly weight floor (never applied to norms)
    int workers = 1;
    bool bitwise_reproducible = false; // assembly is bitwise-stable regardless; kept for config parity
};

/// Weighted mass matrix: M_ij = sum_cells sum_qp wq*|cell|*max(w,delta)*phi_i*phi_j.
/// Cells saturated to w==1 / w<=delta (within the floor) use constant-weight
/// fast paths that are exact to rounding.
SparseSymmetricMatrix assemble_weighted_mass(const StructuredGrid& grid, const PhaseField& pf,
                                             const AssemblyOptions& opts);

/// Weighted stiffness: K_ij = sum wq*|cell|*A*max(w,delta)*grad(phi_i).grad(phi_j).
/// A is time-independent; t is accepted for interface stability and ignored.
SparseSymmetricMatrix assemble_weighted_stiffness(const StructuredGrid& grid, const PhaseField& pf,
                                                  const ProblemSpec& spec,
                                                  const AssemblyOptions& opts, double t = 0.0);

/// Load vector: F_i = sum wq*|cell|*( f_bar*max(w,delta) + g_bar*|grad w| )*phi_i.
/// The boundary term uses the true |grad w| and is skipped on fast-path cells
/// (where it is below the floor's resolution).
std::vector<double> assemble_load(const StructuredGrid& grid, const PhaseField& pf,
                                  const ProblemSpec& spec, const AssemblyOptions& opts, double t);

/// Caches the time-independent structure of the load. For problems with a
/// separable time factor the per-step load is a single scaled vector; other
/// problems fall back to a full assembly pass per step.
class LoadAssembler {
public:
    LoadAssembler(const StructuredGrid& grid, const PhaseField& pf, const ProblemSpec& spec,
                  const AssemblyOptions& opts);

    void assemble(double t, std::span<double> out) const;
    std::vector<double> assemble(double t) const;
    bool separable() const { return separable_; }

private:
    const StructuredGrid* grid_;
    const PhaseField* pf_;
    const ProblemSpec* spec_;
    AssemblyOptions opts_;
    bool separable_ = false;
    std::vector<double> profile_; // out = time_factor(t) * profile_
};

} // namespace ddm
