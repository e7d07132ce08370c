#include "ddm/experiment.hpp"

#include <chrono>
#include <thread>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ddm/assembly.hpp"
#include "ddm/io.hpp"

namespace ddm {

namespace {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_eps(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", eps);
    return buf;
}

std::string domain_name(const DomainConfig& d) {
    switch (d.kind) {
    case DomainKind::circle: return "circle";
    case DomainKind::flower: return "flower";
    default: return "polyline";
    }
}

std::filesystem::path ensure_output_dir(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir.string());
    return dir;
}

std::vector<NamedField> collect_fields(const ExperimentConfig& cfg, const StructuredGrid& grid,
                                       const PhaseField& pf, const ProblemSpec& spec,
                                       const std::vector<double>* u_final, double t) {
    std::vector<NamedField> fields;
    NamedField omega{"omega", std::vector<double>(static_cast<std::size_t>(grid.num_nodes()))};
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i)
            omega.values[static_cast<std::size_t>(grid.node_index(i, j))] =
                pf.weight(grid.node(i, j));
    fields.push_back(std::move(omega));
    if (u_final) {
        fields.push_back({"solution", *u_final});
        if (spec.exact) {
            NamedField exact{"exact",
                             std::vector<double>(static_cast<std::size_t>(grid.num_nodes()))};
            NamedField err{"error",
                           std::vector<double>(static_cast<std::size_t>(grid.num_nodes()))};
            for (int j = 0; j <= grid.ny; ++j) {
                for (int i = 0; i <= grid.nx; ++i) {
                    const auto k = static_cast<std::size_t>(grid.node_index(i, j));
                    exact.values[k] = spec.exact->value(t, grid.node(i, j));
                    err.values[k] = (*u_final)[k] - exact.values[k];
                }
            }
            fields.push_back(std::move(exact));
            fields.push_back(std::move(err));
        }
    }
    (void)cfg;
    return fields;
}

} // namespace

RunOutcome run_single(const ExperimentConfig& cfg, double epsilon) {
    validate_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    const ImplicitDomain domain = cfg.domain.build();
    const ProblemSpec spec = problem_catalog(cfg.problem_id);
    validate_problem(spec, domain, epsilon);
    const PhaseField pf(domain, epsilon, cfg.floor_delta);
    const StructuredGrid grid(cfg.bounds, cfg.nx, cfg.ny);
    const TimeGrid tg(cfg.final_time, cfg.num_steps);

    TransientOptions topts;
    topts.assembly = cfg.assembly_options();
    topts.solver = cfg.solve_options();

    if (cfg.dump_matrices) {
        const auto dir = ensure_output_dir(cfg);
        const auto M = assemble_weighted_mass(grid, pf, topts.assembly);
        const auto K = assemble_weighted_stiffness(grid, pf, spec, topts.assembly);
        std::ofstream mos(dir / ("mass_eps" + format_eps(epsilon) + ".coord"));
        std::ofstream kos(dir / ("stiffness_eps" + format_eps(epsilon) + ".coord"));
        if (!mos || !kos) throw IoError("cannot open matrix dump files");
        M.write_coordinate(mos);
        K.write_coordinate(kos);
    }

    RunOutcome out{ErrorReport{}, run_transient(grid, pf, spec, tg, topts), grid};

    if (spec.exact) {
        out.report = compute_error_report(grid, pf, out.solution.final_state(),
                                          spec.exact->value, spec.exact->gradient,
                                          cfg.final_time, cfg.norm_options());
    }
    out.report.epsilon = epsilon;

    if (cfg.output_formats.count("vtk")) {
        const auto dir = ensure_output_dir(cfg);
        const auto fields =
            collect_fields(cfg, grid, pf, spec, &out.solution.final_state(), cfg.final_time);
        const std::string base = cfg.problem_id + "_" + domain_name(cfg.domain) + "_eps" +
                                 format_eps(epsilon);
        write_vtk_structured_points(dir / (base + "_fields.vtk"), grid, fields, base);
    }

    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.epsilons.size() < 2)
        throw ConfigError("run_sweep: need at least 2 epsilon values in a halving sequence");
    for (std::size_t k = 0; k + 1 < cfg.epsilons.size(); ++k) {
        const double expected = 0.5 * cfg.epsilons[k];
        if (std::abs(cfg.epsilons[k + 1] - expected) > 1e-9 * cfg.epsilons[k])
            throw ConfigError("run_sweep: sweep.epsilons must halve at each entry");
    }

    const bool write_csv = cfg.output_formats.count("csv") > 0;
    std::filesystem::path csv_path;
    std::ofstream csv;
    if (write_csv) {
        const auto dir = ensure_output_dir(cfg);
        csv_path = dir / ("sweep_" + cfg.problem_id + "_" + domain_name(cfg.domain) + ".csv");
        csv.open(csv_path);
        if (!csv) throw IoError("cannot open sweep CSV: " + csv_path.string());
        csv << "epsilon,l2_error,l2_rate,h1_error,h1_rate,runtime_s\n" << std::flush;
    }

    // The per-epsilon runs are independent; process them in concurrent
    // windows, two in flight, with the arithmetic inside each run kept
    // worker-count independent. Rows are emitted in sweep order and partial
    // results are flushed if a later epsilon fails.
    const int total = static_cast<int>(cfg.epsilons.size());
    const int concurrency = std::min({cfg.effective_workers(), total, 2});
    ExperimentConfig inner = cfg;
    inner.workers = std::max(1, cfg.effective_workers() / concurrency);
    inner.output_formats.erase("csv"); // the sweep owns the CSV

    SweepResult result;
    auto emit_row = [&](double eps, const ErrorReport& rep) {
        SweepRow row;
        row.epsilon = eps;
        row.l2_error = rep.l2_error;
        row.h1_error = rep.h1_error;
        row.runtime_seconds = cfg.bitwise_reproducible ? 0.0 : rep.wall_seconds;
        if (!result.rows.empty()) {
            const SweepRow& prev = result.rows.back();
            if (prev.l2_error > 0.0 && row.l2_error > 0.0)
                row.l2_rate = std::log2(prev.l2_error / row.l2_error);
            if (prev.h1_error > 0.0 && row.h1_error > 0.0)
                row.h1_rate = std::log2(prev.h1_error / row.h1_error);
        }
        result.rows.push_back(row);
        if (write_csv) {
            csv << format_g17(row.epsilon) << ',' << format_g17(row.l2_error) << ','
                << (row.l2_rate ? format_g17(*row.l2_rate) : "") << ','
                << format_g17(row.h1_error) << ','
                << (row.h1_rate ? format_g17(*row.h1_rate) : "") << ','
                << format_g17(row.runtime_seconds) << '\n'
                << std::flush;
            if (!csv) throw IoError("sweep CSV write failed: " + csv_path.string());
        }
    };

    for (int base = 0; base < total; base += concurrency) {
        const int count = std::min(concurrency, total - base);
        std::vector<ErrorReport> reports(static_cast<std::size_t>(count));
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
        std::vector<std::thread> pool;
        for (int k = 0; k < count; ++k) {
            pool.emplace_back([&, k] {
                try {
                    reports[static_cast<std::size_t>(k)] =
                        run_single(inner, cfg.epsilons[static_cast<std::size_t>(base + k)]).report;
                } catch (...) {
                    errors[static_cast<std::size_t>(k)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (int k = 0; k < count; ++k) {
            if (errors[static_cast<std::size_t>(k)])
                std::rethrow_exception(errors[static_cast<std::size_t>(k)]);
            emit_row(cfg.epsilons[static_cast<std::size_t>(base + k)],
                     reports[static_cast<std::size_t>(k)]);
        }
    }
    return result;
}

std::vector<std::filesystem::path> dump_field(const ExperimentConfig& cfg, double epsilon,
                                              FieldKind what) {
    validate_config(cfg);
    const ImplicitDomain domain = cfg.domain.build();
    const ProblemSpec spec = problem_catalog(cfg.problem_id);
    const PhaseField pf(domain, epsilon, cfg.floor_delta);
    const StructuredGrid grid(cfg.bounds, cfg.nx, cfg.ny);

    std::vector<NamedField> fields;
    if (what == FieldKind::omega) {
        fields = collect_fields(cfg, grid, pf, spec, nullptr, cfg.final_time);
    } else {
        const RunOutcome run = run_single(cfg, epsilon);
        fields = collect_fields(cfg, grid, pf, spec, &run.solution.final_state(), cfg.final_time);
        if (what == FieldKind::error && !spec.exact)
            throw ConfigError("dump_field: error dump requires an exact solution");
    }

    const char* what_name = what == FieldKind::omega   ? "omega"
                            : what == FieldKind::solution ? "solution"
                                                          : "error";
    const std::string base = cfg.problem_id + "_" + domain_name(cfg.domain) + "_eps" +
                             format_eps(epsilon) + "_" + what_name;
    std::vector<std::filesystem::path> written;
    if (cfg.output_formats.count("none") && cfg.output_formats.size() == 1) return written;
    const auto dir = ensure_output_dir(cfg);
    if (cfg.output_formats.count("vtk")) {
        const auto p = dir / (base + ".vtk");
        write_vtk_structured_points(p, grid, fields, base);
        written.push_back(p);
    }
    if (cfg.output_formats.count("csv")) {
        const auto p = dir / (base + ".csv");
        write_field_csv(p, grid, fields);
        written.push_back(p);
    }
    return written;
}

std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "epsilon,l2_error,l2_rate,h1_error,h1_rate,runtime_s\n";
    for (const auto& row : result.rows) {
        os << format_g17(row.epsilon) << ',' << format_g17(row.l2_error) << ','
           << (row.l2_rate ? format_g17(*row.l2_rate) : "") << ',' << format_g17(row.h1_error)
           << ',' << (row.h1_rate ? format_g17(*row.h1_rate) : "") << ','
           << format_g17(row.runtime_seconds) << '\n';
    }
    return os.str();
}

SweepResult sweep_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw IoError("sweep CSV: empty input");
    if (line.rfind("epsilon,", 0) != 0) throw IoError("sweep CSV: missing header");
    SweepResult result;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < 6) cells.emplace_back();
        SweepRow row;
        row.epsilon = std::stod(cells[0]);
        row.l2_error = std::stod(cells[1]);
        if (!cells[2].empty()) row.l2_rate = std::stod(cells[2]);
        row.h1_error = std::stod(cells[3]);
        if (!cells[4].empty()) row.h1_rate = std::stod(cells[4]);
        row.runtime_seconds = std::stod(cells[5]);
        result.rows.push_back(row);
    }
    return result;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << sweep_to_csv(result);
    if (!os) throw IoError("write failed: " + path.string());
}

} // namespace ddm
