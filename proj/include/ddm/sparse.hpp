#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ddm/errors.hpp"

namespace ddm {

/// Symmetric sparse matrix in CSR form (both triangles stored, columns
/// ascending within each row). Immutable after construction apart from
/// in-place value edits through mutable_values().
class SparseSymmetricMatrix {
public:
    SparseSymmetricMatrix() = default;
    SparseSymmetricMatrix(int dim, std::vector<std::int64_t> row_ptr, std::vector<int> cols,
                          std::vector<double> vals);

    int dim() const { return dim_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(vals_.size()); }
    std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
    std::span<const int> cols() const { return cols_; }
    std::span<const double> values() const { return vals_; }
    std::span<double> mutable_values() { return vals_; }

    /// y = A x. Row-parallel; bitwise identical for any worker count.
    void multiply(std::span<const double> x, std::span<double> y, int workers = 1) const;

    std::vector<double> diagonal() const;
    /// max_ij |a_ij - a_ji| (brute transpose walk; test use only).
    double symmetry_error() const;
    double max_abs_value() const;

    /// "row col value" per line, 17 significant digits.
    void write_coordinate(std::ostream& os) const;

    /// a*A + b*B for matrices with identical sparsity patterns.
    static SparseSymmetricMatrix scaled_sum(double a, const SparseSymmetricMatrix& A, double b,
                                            const SparseSymmetricMatrix& B);

    /// Marks the matrix as a 9-point grid stencil with the given row stride
    /// and builds a diagonal-major value layout that multiply() can stream.
    void set_grid_stencil(int stride);
    bool has_grid_stencil() const { return stencil_stride_ > 0; }

private:
    int dim_ = 0;
    std::vector<std::int64_t> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> vals_;
    int stencil_stride_ = 0;
    std::vector<double> diag_vals_; // 9 x dim, diagonal-major; zeros off the grid
};

enum class PreconditionerKind { none, jacobi };

struct SolveOptions {
    double tol = 1e-10; // on the relative residual |b - Ax| / |b|
    int max_iter = 20000;
    PreconditionerKind preconditioner = PreconditionerKind::jacobi;
    int workers = 1;
};

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
    double min_ritz_value = 0.0; // smallest p'Ap / p'p observed
};

/// Preconditioned conjugate gradients for SPD systems. x carries the initial
/// guess when use_initial_guess is set, and receives the solution.
/// Deterministic for a fixed reduction order (all reductions are serial).
/// Throws SolverError when max_iter is exceeded and NumericalError on
/// NaN/Inf breakdown.
SolveStats solve_spd(const SparseSymmetricMatrix& A, std::span<const double> b,
                     std::span<double> x, const SolveOptions& opts,
                     bool use_initial_guess = false);

} // namespace ddm
