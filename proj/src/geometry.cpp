#include "ddm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ddm {

namespace {

constexpr double kTieTolerance = 1e-12;

double point_segment_dist_sq(Vec2 x, Vec2 a, Vec2 b, double& t_out) {
    const Vec2 ab = b - a;
    const double len_sq = ab.norm_sq();
    double t = len_sq > 0.0 ? (x - a).dot(ab) / len_sq : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    t_out = t;
    const Vec2 p = a + t * ab;
    return (x - p).norm_sq();
}

} // namespace

ImplicitDomain ImplicitDomain::circle(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw ConfigError("make_circle: radius must be positive");
    ImplicitDomain d;
    d.kind_ = DomainKind::circle;
    d.center_ = center;
    d.radius_ = radius;
    d.inscribed_radius_ = radius;
    d.min_curvature_radius_ = radius;
    d.diameter_ = 2.0 * radius;
    // Sampled loop kept for uniformity with the polyline-backed shapes.
    const int n = 1024;
    d.loop_.reserve(n + 1);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * k / n;
        d.loop_.push_back(center + radius * Vec2{std::cos(th), std::sin(th)});
    }
    d.loop_.push_back(d.loop_.front());
    return d;
}

ImplicitDomain ImplicitDomain::flower(double r0, double amplitude, int frequency,
                                      int boundary_vertices) {
    if (!(r0 > 0.0)) throw ConfigError("make_flower: r0 must be positive");
    if (amplitude < 0.0 || amplitude >= r0)
        throw ConfigError("make_flower: requires r0 > amplitude >= 0");
    if (frequency < 1) throw ConfigError("make_flower: frequency must be >= 1");
    if (boundary_vertices < 16) throw ConfigError("make_flower: too few boundary vertices");

    ImplicitDomain d;
    d.kind_ = DomainKind::flower;
    d.flower_r0_ = r0;
    d.flower_amplitude_ = amplitude;
    d.flower_frequency_ = frequency;
    d.loop_.reserve(boundary_vertices + 1);
    for (int k = 0; k < boundary_vertices; ++k) {
        const double th = 2.0 * M_PI * k / boundary_vertices;
        const double r = r0 - amplitude * std::sin(frequency * th);
        d.loop_.push_back({r * std::cos(th), r * std::sin(th)});
    }
    d.loop_.push_back(d.loop_.front());
    d.inscribed_radius_ = r0 - amplitude;

    // Minimum radius of curvature of r(theta), sampled densely.
    double min_rho = std::numeric_limits<double>::infinity();
    const int ns = 200000;
    for (int k = 0; k < ns; ++k) {
        const double th = 2.0 * M_PI * k / ns;
        const double r = r0 - amplitude * std::sin(frequency * th);
        const double rp = -amplitude * frequency * std::cos(frequency * th);
        const double rpp = amplitude * frequency * frequency * std::sin(frequency * th);
        const double num = std::abs(r * r + 2.0 * rp * rp - r * rpp);
        const double den = std::pow(r * r + rp * rp, 1.5);
        if (num > 0.0) min_rho = std::min(min_rho, den / num);
    }
    d.min_curvature_radius_ = min_rho;
    d.build_polyline_index();
    return d;
}

ImplicitDomain ImplicitDomain::polyline(std::vector<Vec2> vertices) {
    if (vertices.size() < 4) throw ConfigError("polyline domain: need at least 3 distinct vertices");
    ImplicitDomain d;
    d.kind_ = DomainKind::polyline;
    d.loop_ = std::move(vertices);
    double span = 0.0;
    for (const auto& p : d.loop_) span = std::max(span, (p - d.loop_.front()).norm());
    if ((d.loop_.back() - d.loop_.front()).norm() > kTieTolerance * std::max(span, 1.0))
        throw ConfigError("polyline domain: loop must be closed (first == last)");
    d.loop_.back() = d.loop_.front();

    // Inscribed radius from the vertex centroid; a curvature scale is not
    // defined for generic polylines, so reuse the same estimate.
    Vec2 c{0.0, 0.0};
    const std::size_t n = d.loop_.size() - 1;
    for (std::size_t k = 0; k < n; ++k) c += d.loop_[k];
    c = c / static_cast<double>(n);
    double rmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) rmin = std::min(rmin, (d.loop_[k] - c).norm());
    d.inscribed_radius_ = rmin;
    d.min_curvature_radius_ = rmin;
    d.build_polyline_index();
    return d;
}

void ImplicitDomain::build_polyline_index() {
    const int nseg = static_cast<int>(loop_.size()) - 1;
    seg_normal_.resize(nseg);
    vertex_normal_.resize(nseg);
    double xmin = loop_[0].x, xmax = loop_[0].x, ymin = loop_[0].y, ymax = loop_[0].y;
    for (const auto& p : loop_) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    diameter_ = std::hypot(xmax - xmin, ymax - ymin);
    for (int s = 0; s < nseg; ++s) {
        const Vec2 t = loop_[s + 1] - loop_[s];
        // CCW loop: outward normal is the tangent rotated clockwise.
        seg_normal_[s] = Vec2{t.y, -t.x}.normalized();
    }
    for (int v = 0; v < nseg; ++v) {
        const int prev = (v + nseg - 1) % nseg;
        vertex_normal_[v] = (seg_normal_[prev] + seg_normal_[v]).normalized();
    }

    // Uniform buckets over the inflated bounding box.
    const double pad = 0.05 * std::max(diameter_, 1e-12);
    bucket_box_ = {xmin - pad, xmax + pad, ymin - pad, ymax + pad};
    const int target = std::max(16, 2 * static_cast<int>(std::sqrt(static_cast<double>(nseg))));
    bucket_nx_ = target;
    bucket_ny_ = target;
    bucket_w_ = bucket_box_.width() / bucket_nx_;
    bucket_h_ = bucket_box_.height() / bucket_ny_;
    buckets_.assign(static_cast<std::size_t>(bucket_nx_) * bucket_ny_, {});
    auto bucket_of = [&](Vec2 p) {
        int bi = static_cast<int>((p.x - bucket_box_.x0) / bucket_w_);
        int bj = static_cast<int>((p.y - bucket_box_.y0) / bucket_h_);
        bi = std::clamp(bi, 0, bucket_nx_ - 1);
        bj = std::clamp(bj, 0, bucket_ny_ - 1);
        return std::pair<int, int>{bi, bj};
    };
    for (int s = 0; s < nseg; ++s) {
        const auto [ai, aj] = bucket_of(loop_[s]);
        const auto [bi, bj] = bucket_of(loop_[s + 1]);
        for (int j = std::min(aj, bj); j <= std::max(aj, bj); ++j)
            for (int i = std::min(ai, bi); i <= std::max(ai, bi); ++i)
                buckets_[static_cast<std::size_t>(j) * bucket_nx_ + i].push_back(s);
    }
}

// Expanding-ring scan around x. visit(s) is called at least once for every
// segment whose distance to x can be below the evolving bound returned by
// bound(); the lower-bound argument lets the scan terminate early.
template <typename Visit, typename Bound>
static void scan_rings(const Rect& box, int bnx, int bny, double bw, double bh,
                       const std::vector<std::vector<int>>& buckets, Vec2 x,
                       Visit&& visit, Bound&& bound) {
    const Vec2 xc{std::clamp(x.x, box.x0, box.x1), std::clamp(x.y, box.y0, box.y1)};
    const double off = (x - xc).norm();
    int bi = static_cast<int>((xc.x - box.x0) / bw);
    int bj = static_cast<int>((xc.y - box.y0) / bh);
    bi = std::clamp(bi, 0, bnx - 1);
    bj = std::clamp(bj, 0, bny - 1);
    const int max_ring = bnx + bny;
    const double cell = std::min(bw, bh);
    for (int r = 0; r <= max_ring; ++r) {
        if (r > 1) {
            const double lb = (r - 1) * cell - off;
            if (lb > 0.0 && lb > bound()) break;
        }
        const int ilo = std::max(0, bi - r), ihi = std::min(bnx - 1, bi + r);
        const int jlo = std::max(0, bj - r), jhi = std::min(bny - 1, bj + r);
        if (ilo > ihi || jlo > jhi) continue;
        for (int j = jlo; j <= jhi; ++j) {
            for (int i = ilo; i <= ihi; ++i) {
                if (r > 0 && std::abs(i - bi) != r && std::abs(j - bj) != r) continue;
                for (int s : buckets[static_cast<std::size_t>(j) * bnx + i]) visit(s);
            }
        }
    }
}

ImplicitDomain::SegmentHit ImplicitDomain::nearest_segment(Vec2 x) const {
    SegmentHit best{std::numeric_limits<double>::infinity(), -1, 0.0, false};
    auto visit = [&](int s) {
        double t;
        const double dsq = point_segment_dist_sq(x, loop_[s], loop_[s + 1], t);
        if (dsq < best.dist_sq || (dsq == best.dist_sq && s < best.segment)) {
            best = {dsq, s, t, false};
        }
    };
    scan_rings(bucket_box_, bucket_nx_, bucket_ny_, bucket_w_, bucket_h_, buckets_, x, visit,
               [&] { return std::sqrt(best.dist_sq); });
    return best;
}

bool ImplicitDomain::inside(Vec2 x) const {
    if (kind_ == DomainKind::circle) return (x - center_).norm() < radius_;
    if (kind_ == DomainKind::flower) {
        const double th = std::atan2(x.y, x.x);
        const double r = flower_r0_ - flower_amplitude_ * std::sin(flower_frequency_ * th);
        return x.norm_sq() < r * r;
    }
    // Even-odd crossing test.
    bool in = false;
    const int nseg = static_cast<int>(loop_.size()) - 1;
    for (int s = 0; s < nseg; ++s) {
        const Vec2 a = loop_[s], b = loop_[s + 1];
        if ((a.y > x.y) != (b.y > x.y)) {
            const double xi = a.x + (x.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (x.x < xi) in = !in;
        }
    }
    return in;
}

double ImplicitDomain::signed_distance(Vec2 x) const {
    if (kind_ == DomainKind::circle) return (x - center_).norm() - radius_;
    const SegmentHit hit = nearest_segment(x);
    const double d = std::sqrt(hit.dist_sq);
    if (d == 0.0) return 0.0;
    return inside(x) ? -d : d;
}

ClosestPoint ImplicitDomain::closest_point(Vec2 x) const {
    if (kind_ == DomainKind::circle) {
        const Vec2 rel = x - center_;
        const double r = rel.norm();
        if (r < kTieTolerance * std::max(radius_, 1.0)) {
            // Center of the circle: every boundary point minimizes. Lowest
            // parameter angle wins.
            return {center_ + Vec2{radius_, 0.0}, Vec2{1.0, 0.0}, true};
        }
        const Vec2 n = rel / r;
        return {center_ + radius_ * n, n, false};
    }

    const SegmentHit hit = nearest_segment(x);
    const int nseg = static_cast<int>(loop_.size()) - 1;
    const double d = std::sqrt(hit.dist_sq);
    const double window = kTieTolerance * std::max(diameter_, 1.0);

    // Medial-axis detection: another minimizer within the tie window that is
    // not a neighbor of the winning segment.
    bool tie = false;
    auto visit = [&](int s) {
        const int gap = std::abs(s - hit.segment);
        if (gap <= 1 || gap >= nseg - 1) return;
        double t;
        const double dsq = point_segment_dist_sq(x, loop_[s], loop_[s + 1], t);
        if (std::sqrt(dsq) - d <= window) tie = true;
    };
    scan_rings(bucket_box_, bucket_nx_, bucket_ny_, bucket_w_, bucket_h_, buckets_, x, visit,
               [&] { return tie ? -1.0 : d + window; });

    const Vec2 a = loop_[hit.segment], b = loop_[hit.segment + 1];
    const Vec2 p = a + hit.t * (b - a);
    Vec2 n;
    constexpr double t_edge = 1e-9;
    if (hit.t <= t_edge) {
        n = vertex_normal_[hit.segment];
    } else if (hit.t >= 1.0 - t_edge) {
        n = vertex_normal_[(hit.segment + 1) % nseg];
    } else {
        n = seg_normal_[hit.segment];
    }
    return {p, n, tie};
}

ImplicitDomain::DistanceProjection ImplicitDomain::distance_and_projection(Vec2 x) const {
    if (kind_ == DomainKind::circle) {
        const Vec2 rel = x - center_;
        const double r = rel.norm();
        if (r < kTieTolerance * std::max(radius_, 1.0))
            return {-radius_, center_ + Vec2{radius_, 0.0}, Vec2{1.0, 0.0}};
        const Vec2 n = rel / r;
        return {r - radius_, center_ + radius_ * n, n};
    }
    const SegmentHit hit = nearest_segment(x);
    const int nseg = static_cast<int>(loop_.size()) - 1;
    const Vec2 a = loop_[hit.segment], b = loop_[hit.segment + 1];
    const Vec2 p = a + hit.t * (b - a);
    Vec2 n;
    constexpr double t_edge = 1e-9;
    if (hit.t <= t_edge) {
        n = vertex_normal_[hit.segment];
    } else if (hit.t >= 1.0 - t_edge) {
        n = vertex_normal_[(hit.segment + 1) % nseg];
    } else {
        n = seg_normal_[hit.segment];
    }
    double d = std::sqrt(hit.dist_sq);
    if (d != 0.0 && inside(x)) d = -d;
    return {d, p, n};
}

double PhaseField::weight_from_distance(double d) const {
    return 0.5 * (1.0 + std::tanh(-3.0 * d / epsilon_));
}

double PhaseField::gradient_magnitude_from_distance(double d) const {
    const double s = std::abs(3.0 * d / epsilon_);
    const double e = std::exp(-2.0 * s);
    const double sech = 2.0 * std::exp(-s) / (1.0 + e);
    return 1.5 / epsilon_ * sech * sech;
}

WeightGradient PhaseField::weight_gradient(Vec2 x) const {
    const double d = domain_->signed_distance(x);
    const double mag = gradient_magnitude_from_distance(d);
    const ClosestPoint cp = domain_->closest_point(x);
    return {Vec2{-cp.normal.x * mag, -cp.normal.y * mag}, mag};
}

} // namespace ddm
