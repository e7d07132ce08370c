#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "ddm/error_norms.hpp"
#include "ddm/geometry.hpp"
#include "ddm/grid.hpp"
#include "ddm/problem.hpp"
#include "ddm/sparse.hpp"
#include "ddm/time_integration.hpp"

namespace ddm {

struct DomainConfig {
    DomainKind kind = DomainKind::circle;
    Vec2 center{0.0, 0.0};
    double radius = 0.25;
    double r0 = 0.175;
    double amplitude = 0.03;
    int frequency = 4;
    int boundary_vertices = 4096;

    ImplicitDomain build() const;
};

/// Declarative description of one experiment, parsed from a flat dotted-key
/// config file (see configs/ and the README for the schema).
struct ExperimentConfig {
    std::string problem_id = "example1";
    DomainConfig domain;
    Rect bounds{-0.5, 0.5, -0.5, 0.5};
    int nx = 256, ny = 256;
    double final_time = 0.5;
    int num_steps = 256;
    std::vector<double> epsilons;
    double floor_delta = 1e-8;
    int quadrature_order = 4;
    std::string solver_type = "cg";
    PreconditionerKind preconditioner = PreconditionerKind::jacobi;
    double solver_tol = 1e-10;
    int solver_max_iter = 20000;
    std::string output_dir = "out";
    std::set<std::string> output_formats = {"csv"};
    bool bitwise_reproducible = false;
    int workers = 0; // 0 = hardware default
    bool dump_matrices = false;

    int effective_workers() const;
    AssemblyOptions assembly_options() const;
    SolveOptions solve_options() const;
    NormOptions norm_options() const;
};

/// Parses `key = value` lines; '#' starts a comment. Fractions like 1/8 are
/// accepted wherever a real number is. The DDMLAB_OUTPUT_DIR environment
/// variable overrides output.dir.
ExperimentConfig parse_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");

/// Range/consistency checks; throws ConfigError. Emits resolution warnings to
/// stderr (epsilon barely resolved, epsilon above the curvature scale).
void validate_config(const ExperimentConfig& cfg);

struct RunOutcome {
    ErrorReport report;
    TransientSolution solution;
    StructuredGrid grid;
};

/// Full pipeline for one epsilon: geometry, extension, assembly, transient
/// solve, weighted error norms at t = T. Writes field dumps if the config
/// asks for VTK output.
RunOutcome run_single(const ExperimentConfig& cfg, double epsilon);

/// Runs every epsilon of the sweep, emitting CSV rows incrementally (partial
/// results are flushed if a later epsilon fails). Returns the table.
SweepResult run_sweep(const ExperimentConfig& cfg);

enum class FieldKind { omega, solution, error };

/// Writes the requested nodal field for one epsilon in the configured
/// formats; returns the list of files written.
std::vector<std::filesystem::path> dump_field(const ExperimentConfig& cfg, double epsilon,
                                              FieldKind what);

// --- CSV helpers (sweep tables) ---
std::string sweep_to_csv(const SweepResult& result);
SweepResult sweep_from_csv(const std::string& text);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

} // namespace ddm
