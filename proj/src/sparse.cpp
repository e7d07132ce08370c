#include "ddm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ddm/parallel.hpp"

namespace ddm {

SparseSymmetricMatrix::SparseSymmetricMatrix(int dim, std::vector<std::int64_t> row_ptr,
                                             std::vector<int> cols, std::vector<double> vals)
    : dim_(dim), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
    if (row_ptr_.size() != static_cast<std::size_t>(dim_) + 1 || cols_.size() != vals_.size())
        throw ConfigError("SparseSymmetricMatrix: inconsistent CSR arrays");
}

void SparseSymmetricMatrix::set_grid_stencil(int stride) {
    if (stride < 2 || dim_ < 2 * stride) return;
    const int offs[9] = {-stride - 1, -stride, -stride + 1, -1, 0, 1,
                         stride - 1,  stride,  stride + 1};
    std::vector<double> dv(static_cast<std::size_t>(9) * dim_, 0.0);
    for (int r = 0; r < dim_; ++r) {
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int off = cols_[k] - r;
            int slot = -1;
            for (int s = 0; s < 9; ++s)
                if (offs[s] == off) { slot = s; break; }
            if (slot < 0) return; // not a 9-point stencil; keep the CSR path
            dv[static_cast<std::size_t>(slot) * dim_ + r] = vals_[k];
        }
    }
    stencil_stride_ = stride;
    diag_vals_ = std::move(dv);
}

void SparseSymmetricMatrix::multiply(std::span<const double> x, std::span<double> y,
                                     int workers) const {
    if (stencil_stride_ > 0) {
        const int s = stencil_stride_;
        const int n = dim_;
        const int offs[9] = {-s - 1, -s, -s + 1, -1, 0, 1, s - 1, s, s + 1};
        const double* dv = diag_vals_.data();
        auto kernel = [&](std::int64_t lo, std::int64_t hi, int) {
            std::int64_t r = lo;
            // guarded edge rows
            for (; r < hi && r < s + 1; ++r) {
                double acc = 0.0;
                for (int k = 0; k < 9; ++k) {
                    const std::int64_t c = r + offs[k];
                    if (c >= 0 && c < n) acc += dv[static_cast<std::size_t>(k) * n + r] * x[c];
                }
                y[static_cast<std::size_t>(r)] = acc;
            }
            const std::int64_t mid_end = std::min<std::int64_t>(hi, n - s - 1);
            const double* d0 = dv;
            const double* d1 = dv + static_cast<std::size_t>(n);
            const double* d2 = dv + 2 * static_cast<std::size_t>(n);
            const double* d3 = dv + 3 * static_cast<std::size_t>(n);
            const double* d4 = dv + 4 * static_cast<std::size_t>(n);
            const double* d5 = dv + 5 * static_cast<std::size_t>(n);
            const double* d6 = dv + 6 * static_cast<std::size_t>(n);
            const double* d7 = dv + 7 * static_cast<std::size_t>(n);
            const double* d8 = dv + 8 * static_cast<std::size_t>(n);
            const double* xp = x.data();
            for (; r < mid_end; ++r) {
                y[static_cast<std::size_t>(r)] =
                    d0[r] * xp[r - s - 1] + d1[r] * xp[r - s] + d2[r] * xp[r - s + 1] +
                    d3[r] * xp[r - 1] + d4[r] * xp[r] + d5[r] * xp[r + 1] +
                    d6[r] * xp[r + s - 1] + d7[r] * xp[r + s] + d8[r] * xp[r + s + 1];
            }
            for (; r < hi; ++r) {
                double acc = 0.0;
                for (int k = 0; k < 9; ++k) {
                    const std::int64_t c = r + offs[k];
                    if (c >= 0 && c < n) acc += dv[static_cast<std::size_t>(k) * n + r] * x[c];
                }
                y[static_cast<std::size_t>(r)] = acc;
            }
        };
        if (workers <= 1)
            kernel(0, n, 0);
        else
            parallel_ranges(n, workers, kernel);
        return;
    }
    parallel_ranges(dim_, workers, [&](std::int64_t lo, std::int64_t hi, int) {
        for (std::int64_t r = lo; r < hi; ++r) {
            double acc = 0.0;
            for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                acc += vals_[k] * x[static_cast<std::size_t>(cols_[k])];
            y[static_cast<std::size_t>(r)] = acc;
        }
    });
}

std::vector<double> SparseSymmetricMatrix::diagonal() const {
    std::vector<double> d(dim_, 0.0);
    for (int r = 0; r < dim_; ++r)
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (cols_[k] == r) d[r] = vals_[k];
    return d;
}

double SparseSymmetricMatrix::symmetry_error() const {
    double err = 0.0;
    for (int r = 0; r < dim_; ++r) {
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int c = cols_[k];
            double transposed = 0.0;
            for (std::int64_t m = row_ptr_[c]; m < row_ptr_[c + 1]; ++m)
                if (cols_[m] == r) { transposed = vals_[m]; break; }
            err = std::max(err, std::abs(vals_[k] - transposed));
        }
    }
    return err;
}

double SparseSymmetricMatrix::max_abs_value() const {
    double m = 0.0;
    for (double v : vals_) m = std::max(m, std::abs(v));
    return m;
}

void SparseSymmetricMatrix::write_coordinate(std::ostream& os) const {
    os.precision(17);
    for (int r = 0; r < dim_; ++r)
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            os << r << ' ' << cols_[k] << ' ' << vals_[k] << '\n';
}

SparseSymmetricMatrix SparseSymmetricMatrix::scaled_sum(double a, const SparseSymmetricMatrix& A,
                                                        double b, const SparseSymmetricMatrix& B) {
    if (A.dim_ != B.dim_ || A.vals_.size() != B.vals_.size())
        throw ConfigError("scaled_sum: sparsity patterns differ");
    std::vector<double> vals(A.vals_.size());
    for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = a * A.vals_[k] + b * B.vals_[k];
    SparseSymmetricMatrix out(A.dim_, A.row_ptr_, A.cols_, std::move(vals));
    if (A.stencil_stride_ > 0 && A.stencil_stride_ == B.stencil_stride_) {
        out.stencil_stride_ = A.stencil_stride_;
        out.diag_vals_.resize(A.diag_vals_.size());
        for (std::size_t k = 0; k < out.diag_vals_.size(); ++k)
            out.diag_vals_[k] = a * A.diag_vals_[k] + b * B.diag_vals_[k];
    }
    return out;
}

namespace {

// Four fixed accumulator lanes: fast and still a deterministic reduction order.
double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3)) + tail;
}

} // namespace

namespace {

// z = inv_diag .* r (identity when inv_diag is empty); returns (r.z, r.r)
// with the same fixed 4-lane reduction order as dot().
std::pair<double, double> precondition_pass(std::span<const double> r,
                                            std::span<const double> inv_diag,
                                            std::span<double> z) {
    const std::size_t n = r.size();
    double rz0 = 0.0, rz1 = 0.0, rz2 = 0.0, rz3 = 0.0;
    double rr0 = 0.0, rr1 = 0.0, rr2 = 0.0, rr3 = 0.0;
    const bool jac = !inv_diag.empty();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double r0 = r[i], r1 = r[i + 1], r2 = r[i + 2], r3 = r[i + 3];
        const double z0 = jac ? inv_diag[i] * r0 : r0;
        const double z1 = jac ? inv_diag[i + 1] * r1 : r1;
        const double z2 = jac ? inv_diag[i + 2] * r2 : r2;
        const double z3 = jac ? inv_diag[i + 3] * r3 : r3;
        z[i] = z0;
        z[i + 1] = z1;
        z[i + 2] = z2;
        z[i + 3] = z3;
        rz0 += r0 * z0;
        rz1 += r1 * z1;
        rz2 += r2 * z2;
        rz3 += r3 * z3;
        rr0 += r0 * r0;
        rr1 += r1 * r1;
        rr2 += r2 * r2;
        rr3 += r3 * r3;
    }
    double rz_t = 0.0, rr_t = 0.0;
    for (; i < n; ++i) {
        const double ri = r[i];
        const double zi = jac ? inv_diag[i] * ri : ri;
        z[i] = zi;
        rz_t += ri * zi;
        rr_t += ri * ri;
    }
    return {((rz0 + rz1) + (rz2 + rz3)) + rz_t, ((rr0 + rr1) + (rr2 + rr3)) + rr_t};
}

} // namespace

SolveStats solve_spd(const SparseSymmetricMatrix& A, std::span<const double> b,
                     std::span<double> x, const SolveOptions& opts, bool use_initial_guess) {
    const int n = A.dim();
    if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
        throw ConfigError("solve_spd: dimension mismatch");

    const double bnorm = std::sqrt(dot(b, b));
    if (!std::isfinite(bnorm)) throw NumericalError("solve_spd: non-finite right-hand side");
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {0, 0.0, 0.0};
    }

    std::vector<double> inv_diag;
    if (opts.preconditioner == PreconditionerKind::jacobi) {
        inv_diag = A.diagonal();
        for (double& d : inv_diag) {
            if (!(d > 0.0)) throw NumericalError("solve_spd: non-positive diagonal entry");
            d = 1.0 / d;
        }
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    if (!use_initial_guess) std::fill(x.begin(), x.end(), 0.0);
    A.multiply(x, r, opts.workers);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];

    auto [rz, rr] = precondition_pass(r, inv_diag, z);
    std::copy(z.begin(), z.end(), p.begin());
    double rnorm = std::sqrt(rr);
    double min_ritz = std::numeric_limits<double>::infinity();

    int it = 0;
    while (rnorm / bnorm > opts.tol) {
        if (it >= opts.max_iter)
            throw SolverError("solve_spd: max_iter exceeded", rnorm / bnorm, it);
        A.multiply(p, q, opts.workers);
        // fused pq = p.q, pp = p.p
        double pq, pp;
        {
            double a0 = 0, a1 = 0, a2 = 0, a3 = 0, c0 = 0, c1 = 0, c2 = 0, c3 = 0;
            int i = 0;
            for (; i + 4 <= n; i += 4) {
                a0 += p[i] * q[i];
                a1 += p[i + 1] * q[i + 1];
                a2 += p[i + 2] * q[i + 2];
                a3 += p[i + 3] * q[i + 3];
                c0 += p[i] * p[i];
                c1 += p[i + 1] * p[i + 1];
                c2 += p[i + 2] * p[i + 2];
                c3 += p[i + 3] * p[i + 3];
            }
            double at = 0, ct = 0;
            for (; i < n; ++i) {
                at += p[i] * q[i];
                ct += p[i] * p[i];
            }
            pq = ((a0 + a1) + (a2 + a3)) + at;
            pp = ((c0 + c1) + (c2 + c3)) + ct;
        }
        if (!std::isfinite(pq) || !std::isfinite(rz))
            throw NumericalError("solve_spd: NaN/Inf encountered");
        if (pq <= 0.0)
            throw NumericalError("solve_spd: non-positive curvature (matrix not SPD?)");
        min_ritz = std::min(min_ritz, pq / pp);
        const double alpha = rz / pq;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        const auto [rz_next, rr_next] = precondition_pass(r, inv_diag, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rnorm = std::sqrt(rr_next);
        if (!std::isfinite(rnorm)) throw NumericalError("solve_spd: NaN/Inf residual");
        ++it;
    }
    return {it, rnorm / bnorm, min_ritz == std::numeric_limits<double>::infinity() ? 0.0 : min_ritz};
}

} // namespace ddm
