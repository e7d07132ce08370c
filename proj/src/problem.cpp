#include "ddm/problem.hpp"

#include <cmath>

namespace ddm {

namespace {

const double kPi2 = M_PI * M_PI;

double decay(double t) { return std::exp(-kPi2 * t); }

ProblemSpec make_example1() {
    ProblemSpec s;
    s.id = "example1";
    s.diffusion = [](Vec2) { return 3.0; };
    s.diffusion_constant = true;
    s.diffusion_value = 3.0;
    s.kappa = 1.0 / 3.0;

    auto f_profile = [](Vec2 p) {
        const double q1 = p.x * p.x + 2.0 * p.x;
        const double q2 = p.y * p.y - 2.0 * p.y;
        return -(kPi2 * q1 * q2 + 6.0 * q1 + 6.0 * q2);
    };
    auto g_profile = [](Vec2 p, Vec2 n) {
        const double q1 = p.x * p.x + 2.0 * p.x;
        const double q2 = p.y * p.y - 2.0 * p.y;
        const double dq1 = 2.0 * p.x + 2.0;
        const double dq2 = 2.0 * p.y - 2.0;
        return 3.0 * (dq1 * q2 * n.x + q1 * dq2 * n.y);
    };

    s.time_factor = decay;
    s.source_profile = f_profile;
    s.neumann_profile = g_profile;
    s.neumann_mode = ExtensionMode::closest_point_constant;
    s.source = [f_profile](double t, Vec2 p) { return decay(t) * f_profile(p); };
    s.neumann = [g_profile](double t, Vec2 p, Vec2 n) { return decay(t) * g_profile(p, n); };
    s.initial = [](Vec2 p) { return (p.x * p.x + 2.0 * p.x) * (p.y * p.y - 2.0 * p.y); };
    s.exact = ProblemSpec::ExactSolution{
        [](double t, Vec2 p) {
            return decay(t) * (p.x * p.x + 2.0 * p.x) * (p.y * p.y - 2.0 * p.y);
        },
        [](double t, Vec2 p) {
            const double th = decay(t);
            return Vec2{th * (2.0 * p.x + 2.0) * (p.y * p.y - 2.0 * p.y),
                        th * (p.x * p.x + 2.0 * p.x) * (2.0 * p.y - 2.0)};
        }};
    return s;
}

ProblemSpec make_example2() {
    ProblemSpec s;
    s.id = "example2";
    s.diffusion = [](Vec2 p) { return p.x * p.x + p.y * p.y + 3.0; };
    s.kappa = 0.25;

    auto f_profile = [](Vec2 p) {
        const double a = p.x * p.x + p.y * p.y + 3.0;
        const double p1 = 2.0 * p.x * p.x - 4.0 * p.x;
        const double p2 = 2.0 * p.y * p.y - 4.0 * p.y;
        return -(kPi2 * p1 * p2 + (4.0 * a + 2.0 * p.x * (4.0 * p.x - 4.0)) * p2 +
                 (4.0 * a + 2.0 * p.y * (4.0 * p.y - 4.0)) * p1);
    };
    auto g_profile = [](Vec2 p, Vec2 n) {
        const double a = p.x * p.x + p.y * p.y + 3.0;
        const double p1 = 2.0 * p.x * p.x - 4.0 * p.x;
        const double p2 = 2.0 * p.y * p.y - 4.0 * p.y;
        const double dp1 = 4.0 * p.x - 4.0;
        const double dp2 = 4.0 * p.y - 4.0;
        return a * (dp1 * p2 * n.x + p1 * dp2 * n.y);
    };

    s.time_factor = decay;
    s.source_profile = f_profile;
    s.neumann_profile = g_profile;
    s.neumann_mode = ExtensionMode::closest_point_constant;
    s.source = [f_profile](double t, Vec2 p) { return decay(t) * f_profile(p); };
    s.neumann = [g_profile](double t, Vec2 p, Vec2 n) { return decay(t) * g_profile(p, n); };
    s.initial = [](Vec2 p) {
        return (2.0 * p.x * p.x - 4.0 * p.x) * (2.0 * p.y * p.y - 4.0 * p.y);
    };
    s.exact = ProblemSpec::ExactSolution{
        [](double t, Vec2 p) {
            return decay(t) * (2.0 * p.x * p.x - 4.0 * p.x) * (2.0 * p.y * p.y - 4.0 * p.y);
        },
        [](double t, Vec2 p) {
            const double th = decay(t);
            return Vec2{th * (4.0 * p.x - 4.0) * (2.0 * p.y * p.y - 4.0 * p.y),
                        th * (2.0 * p.x * p.x - 4.0 * p.x) * (4.0 * p.y - 4.0)};
        }};
    return s;
}

} // namespace

ProblemSpec problem_catalog(const std::string& id) {
    if (id == "example1") return make_example1();
    if (id == "example2") return make_example2();
    throw ConfigError("unknown problem id: " + id);
}

double extend_boundary_data(const ProblemSpec& spec, const PhaseField& pf, double t, Vec2 x) {
    if (pf.classify(x) != BandLabel::band) return 0.0;
    const ClosestPoint cp = pf.domain().closest_point(x);
    return spec.neumann(t, cp.point, cp.normal);
}

double extend_field(const ProblemSpec& spec, const ImplicitDomain& domain, FieldId field,
                    double t, Vec2 x) {
    ExtensionMode mode;
    switch (field) {
    case FieldId::source: mode = spec.source_mode; break;
    case FieldId::initial: mode = spec.initial_mode; break;
    case FieldId::diffusion: mode = spec.diffusion_mode; break;
    default: throw ConfigError("extend_field: unknown field id");
    }
    Vec2 at = x;
    if (mode != ExtensionMode::analytic_global && domain.signed_distance(x) > 0.0)
        at = domain.closest_point(x).point;
    switch (field) {
    case FieldId::source: return spec.source(t, at);
    case FieldId::initial: return spec.initial(at);
    case FieldId::diffusion: return spec.diffusion(at);
    }
    throw ConfigError("extend_field: unknown field id");
}

double neumann_extension(const ProblemSpec& spec, const PhaseField& pf, double t, Vec2 x) {
    switch (spec.neumann_mode) {
    case ExtensionMode::analytic_global: {
        const ClosestPoint cp = pf.domain().closest_point(x);
        return spec.neumann(t, x, cp.normal);
    }
    case ExtensionMode::closest_point_constant: {
        const ClosestPoint cp = pf.domain().closest_point(x);
        return spec.neumann(t, cp.point, cp.normal);
    }
    case ExtensionMode::zero_outside_band:
        return extend_boundary_data(spec, pf, t, x);
    }
    throw ConfigError("neumann_extension: unknown extension mode");
}

void validate_problem(const ProblemSpec& spec, const ImplicitDomain& domain, double epsilon) {
    if (!spec.diffusion || !spec.source || !spec.neumann || !spec.initial)
        throw ConfigError("problem spec is missing a required field");
    if (!(spec.kappa > 0.0)) throw ConfigError("problem spec: kappa must be positive");

    // kappa <= A <= 1/kappa sampled over the extended domain D_eps.
    const double pad = domain.diameter() * 0.75 + epsilon;
    Vec2 c{0.0, 0.0};
    const auto& loop = domain.boundary_polyline();
    for (std::size_t k = 0; k + 1 < loop.size(); ++k) c += loop[k];
    c = c / static_cast<double>(loop.size() - 1);
    const int ns = 64;
    for (int j = 0; j <= ns; ++j) {
        for (int i = 0; i <= ns; ++i) {
            const Vec2 p{c.x - pad + 2.0 * pad * i / ns, c.y - pad + 2.0 * pad * j / ns};
            if (domain.signed_distance(p) >= epsilon) continue;
            const double a = spec.diffusion(p);
            if (!(a >= spec.kappa && a <= 1.0 / spec.kappa))
                throw ConfigError("problem spec: diffusion bounds violated on D_eps at (" +
                                  std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
        }
    }

    // Manufactured-solution self-check: g = (A grad u).n on the boundary.
    if (spec.exact) {
        const double times[] = {0.0, 0.37};
        const std::size_t step = std::max<std::size_t>(1, (loop.size() - 1) / 200);
        for (double t : times) {
            for (std::size_t k = 0; k + 1 < loop.size(); k += step) {
                const ClosestPoint cp = domain.closest_point(loop[k]);
                const Vec2 gu = spec.exact->gradient(t, cp.point);
                const double lhs = spec.neumann(t, cp.point, cp.normal);
                const double rhs = spec.diffusion(cp.point) * gu.dot(cp.normal);
                if (std::abs(lhs - rhs) > 1e-10)
                    throw ConfigError("problem spec: Neumann data incompatible with exact solution");
            }
        }
    }
}

} // namespace ddm
