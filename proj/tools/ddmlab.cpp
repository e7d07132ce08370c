/// ddmlab command-line front end: run | sweep | field | verify.
/// Exit codes: 0 success, 1 configuration error, 2 solver/verification
/// failure, 3 I/O failure.

#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "ddm/assembly.hpp"
#include "ddm/experiment.hpp"
#include "ddm/oracle.hpp"
#include "ddm/parallel.hpp"

namespace {

std::string format_rate(const std::optional<double>& rate) {
    if (!rate) return "-";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", *rate);
    return buf;
}

void print_report(const ddm::SweepResult& result) {
    std::printf("%-12s %-14s %-8s %-14s %-8s %s\n", "epsilon", "l2_error", "l2_rate", "h1_error",
                "h1_rate", "runtime_s");
    for (const auto& row : result.rows) {
        std::printf("%-12g %-14.6e %-8s %-14.6e %-8s %.2f\n", row.epsilon, row.l2_error,
                    format_rate(row.l2_rate).c_str(), row.h1_error,
                    format_rate(row.h1_rate).c_str(), row.runtime_seconds);
    }
}

int run_verify(long long samples, std::uint64_t seed, int workers) {
    using namespace ddm;
    bool all_ok = true;
    auto check = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
        all_ok = all_ok && ok;
    };

    const auto domain = ImplicitDomain::circle({0.0, 0.0}, 0.25);
    const Rect box{-0.5, 0.5, -0.5, 0.5};
    const PhaseField pf(domain, 1.0 / 32.0);

    { // diffuse area vs. analytic disk area
        const auto est = mc_weighted_integral([](Vec2) { return 1.0; }, box, &pf, samples, seed,
                                              workers);
        const double target = M_PI / 16.0;
        const bool ok = std::abs(est.value - target) <= 3.0 * est.std_error + 1e-4;
        char buf[160];
        std::snprintf(buf, sizeof buf, "MC integral of omega = %.6f (pi/16 = %.6f, se = %.2e)",
                      est.value, target, est.std_error);
        check("mc_diffuse_area", ok, buf);
    }
    { // co-area boundary measure vs. circumference
        const auto est = mc_weighted_integral(
            [&](Vec2 x) {
                return pf.gradient_magnitude_from_distance(domain.signed_distance(x));
            },
            box, nullptr, samples, seed + 1, workers);
        const double target = M_PI / 2.0;
        const bool ok = std::abs(est.value - target) <= 3.0 * est.std_error + 1e-3;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "MC integral of |grad omega| = %.6f (pi/2 = %.6f, se = %.2e)", est.value,
                      target, est.std_error);
        check("mc_coarea_perimeter", ok, buf);
    }
    { // analytic phase-field gradient vs. finite differences
        std::vector<Vec2> pts;
        for (int k = 0; k < 500; ++k) {
            const double th = 2.0 * M_PI * k / 500.0;
            const double r = 0.25 + 0.8 * pf.epsilon() * std::sin(7.0 * th);
            pts.push_back({r * std::cos(th), r * std::sin(th)});
        }
        const double err = fd_gradient_check(
            [&](Vec2 x) { return pf.weight(x); },
            [&](Vec2 x) { return pf.weight_gradient(x).vector; }, pts, 1e-7);
        char buf[120];
        std::snprintf(buf, sizeof buf, "max relative error %.2e (tolerance 1e-5)", err);
        check("fd_gradient", err <= 1e-5, buf);
    }
    { // sparse transient path vs. dense factorization on a small grid
        const StructuredGrid grid(box, 8, 8);
        const PhaseField pf8(domain, 0.2, 1e-8);
        const auto spec = problem_catalog("example1");
        const TimeGrid tg(0.1, 8);
        TransientOptions topts;
        topts.solver.tol = 1e-13;
        const auto sparse_run = run_transient(grid, pf8, spec, tg, topts);
        AssemblyOptions aopts;
        const auto M = assemble_weighted_mass(grid, pf8, aopts);
        const auto K = assemble_weighted_stiffness(grid, pf8, spec, aopts);
        const LoadAssembler load(grid, pf8, spec, aopts);
        const auto u0 = initialize(grid, spec, domain);
        const auto dense = dense_reference_solve(
            M, K, [&](double t) { return load.assemble(t); }, tg, u0);
        double num = 0.0, den = 0.0;
        const auto& us = sparse_run.final_state();
        for (std::size_t i = 0; i < dense.size(); ++i) {
            num += (us[i] - dense[i]) * (us[i] - dense[i]);
            den += dense[i] * dense[i];
        }
        const double rel = std::sqrt(num / den);
        char buf[120];
        std::snprintf(buf, sizeof buf, "relative difference %.2e (tolerance 1e-8)", rel);
        check("dense_oracle", rel <= 1e-8, buf);
    }
    { // diffuse volume integral decay in epsilon
        const StructuredGrid grid(box, 256, 256);
        AssemblyOptions aopts;
        aopts.floor_delta = 0.0;
        std::vector<double> devs;
        for (double eps : {0.125, 0.0625, 0.03125}) {
            const PhaseField pfe(domain, eps);
            const auto M = assemble_weighted_mass(grid, pfe, aopts);
            double total = 0.0;
            for (double v : M.values()) total += v;
            devs.push_back(std::abs(total - M_PI / 16.0));
        }
        const double rate = std::log2(devs.front() / devs.back()) / 2.0;
        char buf[120];
        std::snprintf(buf, sizeof buf, "observed rate %.2f (threshold 1.5)", rate);
        check("diffuse_volume_decay", rate >= 1.5, buf);
    }

    std::printf("%s\n", all_ok ? "verify: all checks passed" : "verify: FAILURES present");
    return all_ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ddmlab - diffuse domain solver laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    double epsilon = -1.0;
    std::string what = "omega";
    long long samples = 10000000;
    std::uint64_t seed = 20240815;
    int workers = 0;

    auto* run_cmd = app.add_subcommand("run", "run a single-epsilon experiment");
    run_cmd->add_option("--config", config_path, "experiment config file")->required();
    run_cmd->add_option("--epsilon", epsilon, "override epsilon (default: first sweep entry)");

    auto* sweep_cmd = app.add_subcommand("sweep", "run the full epsilon sweep");
    sweep_cmd->add_option("--config", config_path, "experiment config file")->required();

    auto* field_cmd = app.add_subcommand("field", "dump a nodal field");
    field_cmd->add_option("--config", config_path, "experiment config file")->required();
    field_cmd->add_option("--epsilon", epsilon, "epsilon (default: first sweep entry)");
    field_cmd->add_option("--what", what, "omega | solution | error");

    auto* verify_cmd = app.add_subcommand("verify", "independent brute-force checks");
    verify_cmd->add_option("--samples", samples, "Monte-Carlo sample count");
    verify_cmd->add_option("--seed", seed, "Monte-Carlo seed");
    verify_cmd->add_option("--workers", workers, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto cfg = ddm::parse_config_file(config_path);
            ddm::validate_config(cfg);
            const double eps = epsilon > 0.0 ? epsilon : cfg.epsilons.front();
            const auto outcome = ddm::run_single(cfg, eps);
            ddm::SweepResult table;
            table.rows.push_back({eps, outcome.report.l2_error, std::nullopt,
                                  outcome.report.h1_error, std::nullopt,
                                  outcome.report.wall_seconds});
            print_report(table);
            if (cfg.output_formats.count("csv")) {
                const std::filesystem::path dir(cfg.output_dir);
                ddm::write_sweep_csv(dir / ("run_" + cfg.problem_id + ".csv"), table);
            }
        } else if (sweep_cmd->parsed()) {
            auto cfg = ddm::parse_config_file(config_path);
            const auto result = ddm::run_sweep(cfg);
            print_report(result);
        } else if (field_cmd->parsed()) {
            auto cfg = ddm::parse_config_file(config_path);
            ddm::validate_config(cfg);
            const double eps = epsilon > 0.0 ? epsilon : cfg.epsilons.front();
            ddm::FieldKind kind;
            if (what == "omega") kind = ddm::FieldKind::omega;
            else if (what == "solution") kind = ddm::FieldKind::solution;
            else if (what == "error") kind = ddm::FieldKind::error;
            else throw ddm::ConfigError("field --what must be omega|solution|error");
            const auto files = ddm::dump_field(cfg, eps, kind);
            for (const auto& f : files) std::cout << f.string() << '\n';
        } else if (verify_cmd->parsed()) {
            const int w = workers > 0 ? workers : ddm::default_worker_count();
            return run_verify(samples, seed, w);
        }
    } catch (const ddm::ConfigError& e) {
        std::cerr << "ddmlab: config error: " << e.what() << '\n';
        return 1;
    } catch (const ddm::SolverError& e) {
        std::cerr << "ddmlab: solver failure: " << e.what() << '\n';
        return 2;
    } catch (const ddm::NumericalError& e) {
        std::cerr << "ddmlab: numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const ddm::IoError& e) {
        std::cerr << "ddmlab: I/O failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "ddmlab: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
