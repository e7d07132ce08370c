#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ddm/experiment.hpp"
#include "ddm/parallel.hpp"

namespace ddm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& raw, const std::string& key) {
    const std::string v = trim(raw);
    const auto slash = v.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            const double num = std::stod(v.substr(0, slash));
            const double den = std::stod(v.substr(slash + 1), &used);
            if (den == 0.0) throw std::invalid_argument("zero denominator");
            return num / den;
        }
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse number '" + v + "' for key " + key);
    }
}

int parse_int(const std::string& raw, const std::string& key) {
    const std::string v = trim(raw);
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse integer '" + v + "' for key " + key);
    }
}

bool parse_bool(const std::string& raw, const std::string& key) {
    const std::string v = trim(raw);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: cannot parse boolean '" + v + "' for key " + key);
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(raw);
    while (is >> item) {
        while (!item.empty() && item.back() == ',') item.pop_back();
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

ImplicitDomain DomainConfig::build() const {
    switch (kind) {
    case DomainKind::circle: return ImplicitDomain::circle(center, radius);
    case DomainKind::flower:
        return ImplicitDomain::flower(r0, amplitude, frequency, boundary_vertices);
    default:
        throw ConfigError("domain.kind=polyline is only constructible in code in v1");
    }
}

int ExperimentConfig::effective_workers() const {
    return workers > 0 ? workers : default_worker_count();
}

AssemblyOptions ExperimentConfig::assembly_options() const {
    AssemblyOptions a;
    a.quadrature_order = quadrature_order;
    a.floor_delta = floor_delta;
    a.workers = effective_workers();
    a.bitwise_reproducible = bitwise_reproducible;
    return a;
}

SolveOptions ExperimentConfig::solve_options() const {
    SolveOptions s;
    s.tol = solver_tol;
    s.max_iter = solver_max_iter;
    s.preconditioner = preconditioner;
    s.workers = effective_workers();
    return s;
}

NormOptions ExperimentConfig::norm_options() const {
    NormOptions n;
    n.quadrature_order = quadrature_order;
    n.workers = effective_workers();
    return n;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    cfg.epsilons.clear();
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config " + origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (val.empty())
            throw ConfigError("config " + origin + ": empty value for key " + key);

        if (key == "problem.id") {
            cfg.problem_id = val;
        } else if (key == "domain.kind") {
            if (val == "circle") cfg.domain.kind = DomainKind::circle;
            else if (val == "flower") cfg.domain.kind = DomainKind::flower;
            else if (val == "polyline") cfg.domain.kind = DomainKind::polyline;
            else throw ConfigError("config: unknown domain.kind '" + val + "'");
        } else if (key == "domain.center_x") {
            cfg.domain.center.x = parse_real(val, key);
        } else if (key == "domain.center_y") {
            cfg.domain.center.y = parse_real(val, key);
        } else if (key == "domain.radius") {
            cfg.domain.radius = parse_real(val, key);
        } else if (key == "domain.r0") {
            cfg.domain.r0 = parse_real(val, key);
        } else if (key == "domain.amplitude") {
            cfg.domain.amplitude = parse_real(val, key);
        } else if (key == "domain.frequency") {
            cfg.domain.frequency = parse_int(val, key);
        } else if (key == "domain.boundary_vertices") {
            cfg.domain.boundary_vertices = parse_int(val, key);
        } else if (key == "grid.x0") {
            cfg.bounds.x0 = parse_real(val, key);
        } else if (key == "grid.x1") {
            cfg.bounds.x1 = parse_real(val, key);
        } else if (key == "grid.y0") {
            cfg.bounds.y0 = parse_real(val, key);
        } else if (key == "grid.y1") {
            cfg.bounds.y1 = parse_real(val, key);
        } else if (key == "grid.nx") {
            cfg.nx = parse_int(val, key);
        } else if (key == "grid.ny") {
            cfg.ny = parse_int(val, key);
        } else if (key == "time.T") {
            cfg.final_time = parse_real(val, key);
        } else if (key == "time.steps") {
            cfg.num_steps = parse_int(val, key);
        } else if (key == "sweep.epsilons") {
            for (const auto& item : split_list(val))
                cfg.epsilons.push_back(parse_real(item, key));
        } else if (key == "assembly.floor") {
            cfg.floor_delta = parse_real(val, key);
        } else if (key == "assembly.quadrature_order") {
            cfg.quadrature_order = parse_int(val, key);
        } else if (key == "solver.type") {
            cfg.solver_type = val;
        } else if (key == "solver.preconditioner") {
            if (val == "none") cfg.preconditioner = PreconditionerKind::none;
            else if (val == "jacobi") cfg.preconditioner = PreconditionerKind::jacobi;
            else throw ConfigError("config: unknown solver.preconditioner '" + val + "'");
        } else if (key == "solver.tol") {
            cfg.solver_tol = parse_real(val, key);
        } else if (key == "solver.max_iter") {
            cfg.solver_max_iter = parse_int(val, key);
        } else if (key == "output.dir") {
            cfg.output_dir = val;
        } else if (key == "output.format") {
            cfg.output_formats.clear();
            for (const auto& item : split_list(val)) cfg.output_formats.insert(item);
        } else if (key == "run.bitwise_reproducible") {
            cfg.bitwise_reproducible = parse_bool(val, key);
        } else if (key == "run.workers") {
            cfg.workers = parse_int(val, key);
        } else if (key == "debug.dump_matrices") {
            cfg.dump_matrices = parse_bool(val, key);
        } else {
            throw ConfigError("config " + origin + ": unknown key '" + key + "'");
        }
    }
    if (const char* env = std::getenv("DDMLAB_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path.filename().string());
}

void validate_config(const ExperimentConfig& cfg) {
    problem_catalog(cfg.problem_id); // known id?
    if (cfg.nx < 2 || cfg.ny < 2) throw ConfigError("config: grid.nx and grid.ny must be >= 2");
    if (!(cfg.bounds.x1 > cfg.bounds.x0) || !(cfg.bounds.y1 > cfg.bounds.y0))
        throw ConfigError("config: empty grid bounds");
    if (!(cfg.final_time > 0.0)) throw ConfigError("config: time.T must be positive");
    if (cfg.num_steps < 2) throw ConfigError("config: time.steps must be >= 2");
    if (cfg.epsilons.empty()) throw ConfigError("config: sweep.epsilons must not be empty");
    if (cfg.quadrature_order < 2 || cfg.quadrature_order > 6)
        throw ConfigError("config: assembly.quadrature_order must be in [2,6]");
    if (cfg.floor_delta < 0.0) throw ConfigError("config: assembly.floor must be >= 0");
    if (cfg.solver_type != "cg") throw ConfigError("config: solver.type must be 'cg'");
    if (!(cfg.solver_tol > 0.0)) throw ConfigError("config: solver.tol must be positive");
    if (cfg.solver_max_iter < 1) throw ConfigError("config: solver.max_iter must be >= 1");
    if (cfg.workers < 0) throw ConfigError("config: run.workers must be >= 0");
    for (const auto& f : cfg.output_formats)
        if (f != "csv" && f != "vtk" && f != "none")
            throw ConfigError("config: unknown output format '" + f + "'");

    const ImplicitDomain domain = cfg.domain.build();
    const double h = std::min((cfg.bounds.x1 - cfg.bounds.x0) / cfg.nx,
                              (cfg.bounds.y1 - cfg.bounds.y0) / cfg.ny);
    for (double eps : cfg.epsilons) {
        if (!(eps > 0.0)) throw ConfigError("config: epsilon must be positive");
        if (eps > domain.inscribed_radius())
            throw ConfigError("config: epsilon " + std::to_string(eps) +
                              " exceeds the domain feature size (inscribed radius " +
                              std::to_string(domain.inscribed_radius()) + ")");
        if (eps > 0.5 * domain.min_curvature_radius())
            std::cerr << "ddmlab: warning: epsilon " << eps
                      << " exceeds half the minimum curvature radius ("
                      << domain.min_curvature_radius()
                      << "); closest-point projections may be non-unique in the band\n";
        if (h > eps / 4.0)
            throw ConfigError("config: grid does not resolve epsilon (need min(h) <= eps/4)");
        if (h > eps / 8.0)
            std::cerr << "ddmlab: warning: min(h) > eps/8 at epsilon " << eps
                      << "; band resolution is marginal\n";
    }
}

} // namespace ddm
