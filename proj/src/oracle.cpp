#include "ddm/oracle.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ddm/parallel.hpp"

namespace ddm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double u01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

} // namespace

McEstimate mc_weighted_integral(const std::function<double(Vec2)>& integrand, const Rect& region,
                                const PhaseField* pf, long long samples, std::uint64_t seed,
                                int workers) {
    if (samples < 10000) throw ConfigError("mc_weighted_integral: need at least 1e4 samples");

    const int shards = 64;
    struct ShardAccum {
        double sum = 0.0, sum_sq = 0.0;
        bool bad = false;
        Vec2 bad_point;
    };
    std::vector<ShardAccum> acc(shards);
    std::vector<long long> shard_begin(shards + 1);
    for (int s = 0; s <= shards; ++s) shard_begin[s] = samples * s / shards;

    parallel_ranges(shards, workers, [&](std::int64_t lo, std::int64_t hi, int) {
        for (std::int64_t s = lo; s < hi; ++s) {
            std::mt19937_64 eng(splitmix64(seed ^ (0x517cc1b727220a95ULL * (s + 1))));
            ShardAccum a;
            const long long count = shard_begin[s + 1] - shard_begin[s];
            for (long long k = 0; k < count; ++k) {
                const double ux = u01(eng);
                const double uy = u01(eng);
                const Vec2 x{region.x0 + ux * region.width(), region.y0 + uy * region.height()};
                double v = integrand(x);
                if (pf) v *= pf->weight(x);
                if (!std::isfinite(v)) {
                    a.bad = true;
                    a.bad_point = x;
                    break;
                }
                a.sum += v;
                a.sum_sq += v * v;
            }
            acc[static_cast<std::size_t>(s)] = a;
        }
    });

    double sum = 0.0, sum_sq = 0.0;
    for (const auto& a : acc) {
        if (a.bad)
            throw NumericalError("mc_weighted_integral: non-finite integrand at (" +
                                 std::to_string(a.bad_point.x) + ", " +
                                 std::to_string(a.bad_point.y) + ")");
        sum += a.sum;
        sum_sq += a.sum_sq;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    McEstimate est;
    est.value = mean * region.area();
    est.std_error = std::sqrt(var / n) * region.area();
    est.samples = samples;
    est.seed = seed;
    return est;
}

double fd_gradient_check(const std::function<double(Vec2)>& field,
                         const std::function<Vec2(Vec2)>& gradient,
                         std::span<const Vec2> points, double step) {
    if (!(step > 0.0)) throw ConfigError("fd_gradient_check: step must be positive");
    double worst = 0.0;
    for (const Vec2 p : points) {
        const double fx =
            (field({p.x + step, p.y}) - field({p.x - step, p.y})) / (2.0 * step);
        const double fy =
            (field({p.x, p.y + step}) - field({p.x, p.y - step})) / (2.0 * step);
        const Vec2 g = gradient(p);
        const double scale = std::max(g.norm(), 1e-300);
        const double err = std::hypot(fx - g.x, fy - g.y) / scale;
        worst = std::max(worst, err);
    }
    return worst;
}

namespace {

// Dense Cholesky, lower triangle.
class DenseCholesky {
public:
    explicit DenseCholesky(const SparseSymmetricMatrix& A) : n_(A.dim()) {
        a_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
        const auto rp = A.row_ptr();
        const auto cols = A.cols();
        const auto vals = A.values();
        for (int r = 0; r < n_; ++r)
            for (std::int64_t k = rp[r]; k < rp[r + 1]; ++k)
                a_[static_cast<std::size_t>(r) * n_ + cols[k]] = vals[k];
        for (int j = 0; j < n_; ++j) {
            double d = a_[static_cast<std::size_t>(j) * n_ + j];
            for (int k = 0; k < j; ++k) {
                const double l = a_[static_cast<std::size_t>(j) * n_ + k];
                d -= l * l;
            }
            if (!(d > 0.0)) throw NumericalError("dense_reference_solve: matrix not SPD");
            const double dj = std::sqrt(d);
            a_[static_cast<std::size_t>(j) * n_ + j] = dj;
            for (int i = j + 1; i < n_; ++i) {
                double s = a_[static_cast<std::size_t>(i) * n_ + j];
                for (int k = 0; k < j; ++k)
                    s -= a_[static_cast<std::size_t>(i) * n_ + k] *
                         a_[static_cast<std::size_t>(j) * n_ + k];
                a_[static_cast<std::size_t>(i) * n_ + j] = s / dj;
            }
        }
    }

    std::vector<double> solve(std::span<const double> b) const {
        std::vector<double> y(b.begin(), b.end());
        for (int i = 0; i < n_; ++i) {
            double s = y[static_cast<std::size_t>(i)];
            for (int k = 0; k < i; ++k)
                s -= a_[static_cast<std::size_t>(i) * n_ + k] * y[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(i)] = s / a_[static_cast<std::size_t>(i) * n_ + i];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = y[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < n_; ++k)
                s -= a_[static_cast<std::size_t>(k) * n_ + i] * y[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(i)] = s / a_[static_cast<std::size_t>(i) * n_ + i];
        }
        return y;
    }

private:
    int n_;
    std::vector<double> a_;
};

} // namespace

std::vector<double> dense_reference_solve(const SparseSymmetricMatrix& M,
                                          const SparseSymmetricMatrix& K,
                                          const std::function<std::vector<double>(double)>& load_at,
                                          const TimeGrid& tg, std::span<const double> u0) {
    const int n = M.dim();
    if (n > 5000)
        throw ConfigError("dense_reference_solve: dimension exceeds the dense feasibility guard");
    if (static_cast<int>(u0.size()) != n)
        throw ConfigError("dense_reference_solve: initial vector size mismatch");
    const double dt = tg.dtau();
    const DenseCholesky be(SparseSymmetricMatrix::scaled_sum(1.0 / dt, M, 1.0, K));
    const DenseCholesky bdf2(SparseSymmetricMatrix::scaled_sum(1.5 / dt, M, 1.0, K));

    std::vector<double> u_prev(u0.begin(), u0.end());
    std::vector<double> u_prev2, b(static_cast<std::size_t>(n)), tmp(static_cast<std::size_t>(n));
    for (int step = 1; step <= tg.num_steps; ++step) {
        const std::vector<double> load = load_at(step * dt);
        if (step == 1) {
            M.multiply(u_prev, b);
            for (int i = 0; i < n; ++i)
                b[static_cast<std::size_t>(i)] =
                    b[static_cast<std::size_t>(i)] / dt + load[static_cast<std::size_t>(i)];
            u_prev2 = u_prev;
            u_prev = be.solve(b);
        } else {
            for (int i = 0; i < n; ++i)
                tmp[static_cast<std::size_t>(i)] = 2.0 * u_prev[static_cast<std::size_t>(i)] -
                                                   0.5 * u_prev2[static_cast<std::size_t>(i)];
            M.multiply(tmp, b);
            for (int i = 0; i < n; ++i)
                b[static_cast<std::size_t>(i)] =
                    b[static_cast<std::size_t>(i)] / dt + load[static_cast<std::size_t>(i)];
            u_prev2 = u_prev;
            u_prev = bdf2.solve(b);
        }
    }
    return u_prev;
}

} // namespace ddm
