#pragma once

#include <memory>
#include <vector>

#include "ddm/errors.hpp"
#include "ddm/vec2.hpp"

namespace ddm {

enum class DomainKind { circle, flower, polyline };

enum class BandLabel { deep_interior, band, deep_exterior };

/// Result of a closest-boundary-point query.
struct ClosestPoint {
    Vec2 point;              // point on the boundary
    Vec2 normal;             // outward unit normal at that point
    bool medial_tie = false; // projection was not unique; deterministic tie-break applied
};

/// Implicit representation of the physical domain via signed distance.
/// Sign convention: negative strictly inside, positive strictly outside,
/// zero on the boundary. Immutable after construction; all queries are
/// pure functions and safe for concurrent use.
class ImplicitDomain {
public:
    /// Exact circle: d(x) = |x - center| - radius.
    static ImplicitDomain circle(Vec2 center, double radius);

    /// Star-shaped domain r < r0 - amplitude*sin(frequency*theta), backed by
    /// a closed boundary polyline (distance queries are exact point-segment
    /// distances against it).
    static ImplicitDomain flower(double r0, double amplitude, int frequency,
                                 int boundary_vertices = 4096);

    /// Generic closed simple polyline (counter-clockwise orientation).
    static ImplicitDomain polyline(std::vector<Vec2> vertices);

    DomainKind kind() const { return kind_; }

    double signed_distance(Vec2 x) const;
    ClosestPoint closest_point(Vec2 x) const;

    /// Signed distance plus boundary projection from one traversal. Skips the
    /// medial-tie scan of closest_point; assembly-path workhorse.
    struct DistanceProjection {
        double distance;
        Vec2 point;
        Vec2 normal;
    };
    DistanceProjection distance_and_projection(Vec2 x) const;

    /// Sampled boundary loop (closed: back() == front()).
    const std::vector<Vec2>& boundary_polyline() const { return loop_; }

    /// Radius of the largest inscribed disk (used to cap epsilon).
    double inscribed_radius() const { return inscribed_radius_; }
    /// Minimum boundary radius of curvature (closest-point uniqueness scale).
    double min_curvature_radius() const { return min_curvature_radius_; }
    /// Diameter of the boundary's bounding box.
    double diameter() const { return diameter_; }

    // circle accessors (valid when kind() == circle)
    Vec2 center() const { return center_; }
    double radius() const { return radius_; }

private:
    ImplicitDomain() = default;
    void build_polyline_index();
    bool inside(Vec2 x) const;

    struct SegmentHit {
        double dist_sq;
        int segment;
        double t; // parameter along the segment in [0,1]
        bool tie;
    };
    SegmentHit nearest_segment(Vec2 x) const;

    DomainKind kind_ = DomainKind::circle;
    Vec2 center_{0.0, 0.0};
    double radius_ = 0.0;
    double flower_r0_ = 0.0, flower_amplitude_ = 0.0;
    int flower_frequency_ = 0;

    std::vector<Vec2> loop_;          // closed polyline, back() == front()
    std::vector<Vec2> seg_normal_;    // outward unit normal per segment
    std::vector<Vec2> vertex_normal_; // averaged outward normal per vertex

    // uniform bucket grid over the polyline for nearest-segment queries
    Rect bucket_box_;
    int bucket_nx_ = 0, bucket_ny_ = 0;
    double bucket_w_ = 0.0, bucket_h_ = 0.0;
    std::vector<std::vector<int>> buckets_;

    double inscribed_radius_ = 0.0;
    double min_curvature_radius_ = 0.0;
    double diameter_ = 0.0;
};

/// Gradient of the phase-field weight at a point.
struct WeightGradient {
    Vec2 vector;      // equals -normal * magnitude
    double magnitude; // (3/(2*eps)) * sech^2(3*d/eps)
};

/// The diffuse-interface weight w(x) = (1 + tanh(-3*d(x)/eps)) / 2 plus the
/// assembly floor delta. The raw profile is never clamped; the floored value
/// max(w, delta) is a separate accessor used only during system assembly.
class PhaseField {
public:
    PhaseField(const ImplicitDomain& domain, double epsilon, double floor_delta = 0.0)
        : domain_(&domain), epsilon_(epsilon), floor_(floor_delta) {
        if (!(epsilon > 0.0)) throw ConfigError("PhaseField: epsilon must be positive");
        if (floor_delta < 0.0) throw ConfigError("PhaseField: floor must be non-negative");
    }

    const ImplicitDomain& domain() const { return *domain_; }
    double epsilon() const { return epsilon_; }
    double floor_delta() const { return floor_; }

    double weight_from_distance(double d) const;
    double weight(Vec2 x) const { return weight_from_distance(domain_->signed_distance(x)); }
    double floored_weight_from_distance(double d) const {
        const double w = weight_from_distance(d);
        return w > floor_ ? w : floor_;
    }
    double floored_weight(Vec2 x) const {
        return floored_weight_from_distance(domain_->signed_distance(x));
    }

    double gradient_magnitude_from_distance(double d) const;
    WeightGradient weight_gradient(Vec2 x) const;

    BandLabel classify_distance(double d) const {
        if (d <= -epsilon_) return BandLabel::deep_interior;
        if (d >= epsilon_) return BandLabel::deep_exterior;
        return BandLabel::band;
    }
    BandLabel classify(Vec2 x) const { return classify_distance(domain_->signed_distance(x)); }

private:
    const ImplicitDomain* domain_;
    double epsilon_;
    double floor_;
};

} // namespace ddm
