#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ddm/geometry.hpp"
#include "ddm/vec2.hpp"

namespace ddm {

/// How a data field is carried from D / its boundary onto the covering box.
enum class ExtensionMode {
    analytic_global,        // evaluate the given closed form everywhere
    closest_point_constant, // constant along boundary normals outside D
    zero_outside_band,      // boundary data: closest-point value in the band, 0 elsewhere
};

enum class FieldId { source, initial, diffusion };

/// Data of the parabolic model problem u_t = div(A grad u) + f with
/// (A grad u).n = g on the boundary, plus an optional exact solution for
/// manufactured-solution error studies.
struct ProblemSpec {
    std::string id;

    std::function<double(Vec2)> diffusion; // A(x), time-independent
    double kappa = 1.0;                    // kappa <= A <= 1/kappa on the extended domain
    bool diffusion_constant = false;
    double diffusion_value = 0.0;

    std::function<double(double, Vec2)> source;        // f(t, x)
    std::function<double(double, Vec2, Vec2)> neumann;  // g(t, x, outward normal)
    std::function<double(Vec2)> initial;               // u0(x)

    struct ExactSolution {
        std::function<double(double, Vec2)> value;
        std::function<Vec2(double, Vec2)> gradient;
    };
    std::optional<ExactSolution> exact;

    ExtensionMode source_mode = ExtensionMode::analytic_global;
    ExtensionMode neumann_mode = ExtensionMode::analytic_global;
    ExtensionMode initial_mode = ExtensionMode::analytic_global;
    ExtensionMode diffusion_mode = ExtensionMode::analytic_global;

    /// Separable time dependence: source(t,x) == time_factor(t)*source_profile(x)
    /// and neumann(t,x,n) == time_factor(t)*neumann_profile(x,n). Lets the
    /// load assembler precompute its spatial parts once per run.
    std::function<double(double)> time_factor;
    std::function<double(Vec2)> source_profile;
    std::function<double(Vec2, Vec2)> neumann_profile;

    bool separable() const {
        return static_cast<bool>(time_factor) && static_cast<bool>(source_profile) &&
               static_cast<bool>(neumann_profile);
    }
};

/// Built-in problem catalog. Known ids: "example1" (A = 3), "example2"
/// (A = x^2 + y^2 + 3). Throws ConfigError for unknown ids.
ProblemSpec problem_catalog(const std::string& id);

/// Boundary-data extension: g(t, p(x)) for x in the band, 0 elsewhere.
double extend_boundary_data(const ProblemSpec& spec, const PhaseField& pf, double t, Vec2 x);

/// Field extension per the spec's mode: analytic_global evaluates the closed
/// form at x; closest_point_constant is the identity inside D and the
/// closest-point value outside.
double extend_field(const ProblemSpec& spec, const ImplicitDomain& domain, FieldId field,
                    double t, Vec2 x);

/// The g-bar evaluator used by the diffuse boundary term, honoring
/// spec.neumann_mode (analytic_global keeps the closed form with the extended
/// normal; the banded modes reduce to extend_boundary_data).
double neumann_extension(const ProblemSpec& spec, const PhaseField& pf, double t, Vec2 x);

/// Checks kappa <= A <= 1/kappa on sampled points of the extended domain and,
/// when an exact solution is present, the compatibility g = (A grad u).n on
/// sampled boundary points. Throws ConfigError on violation.
void validate_problem(const ProblemSpec& spec, const ImplicitDomain& domain, double epsilon);

} // namespace ddm
