#include "ldg/app.hpp"

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldg/asymptotics.hpp"
#include "ldg/config.hpp"
#include "ldg/errors.hpp"
#include "ldg/export.hpp"
#include "ldg/solve.hpp"

namespace ldg {

namespace {

struct CliState {
    std::string config_path;
    std::string out_dir = ".";
    std::string field_path;
    std::string format = "csv";
    int threads = 0;     // 0: take from config
    long long seed = -1;  // <0: take from config
};

void add_common_flags(CLI::App* cmd, CliState& st, bool need_field) {
    cmd->add_option("--config", st.config_path, "configuration file")->required();
    cmd->add_option("--out", st.out_dir, "output directory");
    cmd->add_option("--threads", st.threads, "worker threads (overrides config)");
    cmd->add_option("--seed", st.seed, "random seed (overrides config)");
    cmd->add_option("--format", st.format, "field format: csv or vtk-structured-points");
    if (need_field) cmd->add_option("--field", st.field_path, "field CSV to read")->required();
}

RunConfig load_config(const CliState& st) {
    RunConfig cfg = parse_config(read_text_file(st.config_path));
    if (st.threads > 0) cfg.threads = st.threads;
    if (st.seed >= 0) cfg.seed = static_cast<std::uint64_t>(st.seed);
    set_thread_count(cfg.threads);
    return cfg;
}

std::string out_path(const CliState& st, const std::string& name) {
    std::filesystem::path dir(st.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory: " + st.out_dir);
    return (dir / name).string();
}

int do_solve(const CliState& st) {
    RunConfig cfg = load_config(st);
    MaterialParams p = to_material_params(cfg);
    double h = cfg.box / (cfg.nx - 1);
    Grid3 g = make_grid(cfg.nx, cfg.ny, cfg.nz, h);

    // Initial guess: uniaxial lift of the relaxed director field.
    SolverOptions opts = to_solver_options(cfg);
    SolverOptions dopts = opts;
    if (dopts.tol_residual <= 0) dopts.tol_residual = 1e-8 * cfg.a2 * p.s_plus;
    auto [nsol, nrep] = minimize_director(scenario_initial_director(cfg.scenario, g), dopts);
    QField f0 = limiting_map(nsol, p);
    auto [sol, rep] = minimize_q(f0, p, opts);

    write_text_file(out_path(st, "solve_report.json"), solve_report_to_json(rep, cfg));
    std::string ext = st.format == "csv" ? "field.csv" : "field.vtk";
    export_field(sol, p, out_path(st, ext), st.format);
    std::cout << "solve: converged=" << (rep.converged ? "yes" : "no")
              << " iterations=" << rep.iterations << " energy=" << rep.final_energy
              << " residual=" << rep.final_residual << "\n";
    if (!rep.converged) {
        std::cerr << "error: solver: did not reach the residual tolerance\n";
        return 4;
    }
    return 0;
}

int do_sweep(const CliState& st) {
    RunConfig cfg = load_config(st);
    SweepConfig sw = to_sweep_config(cfg);
    auto exporter = [&](std::size_t k, const ConvergenceRecord&, const QField& f,
                        const MaterialParams& p) {
        export_field_vtk(f, p, out_path(st, "field_L" + std::to_string(k) + ".vtk"));
    };
    ConvergenceReport rep = run_sweep(sw, exporter);
    write_text_file(out_path(st, "sweep_report.json"), report_to_json(rep, cfg));
    std::cout << "sweep: records=" << rep.records.size()
              << " complete=" << (rep.complete ? "yes" : "no")
              << " slope(beta)=" << rep.slope_max_beta_K
              << " slope(|Q| dev)=" << rep.slope_qnorm_dev << "\n";
    if (!rep.complete) {
        std::cerr << "error: solver: at least one ladder solve did not converge\n";
        return 4;
    }
    return 0;
}

int do_analyze(const CliState& st) {
    RunConfig cfg = load_config(st);
    MaterialParams p = to_material_params(cfg);
    QField f = import_field_csv(st.field_path);

    nlohmann::json j;
    j["schema_version"] = 1;
    j["provenance"] = {{"config_hash", config_hash(cfg)}, {"version", kVersion}};
    j["total_energy"] = total_energy(f, p);
    j["elastic_energy"] = elastic_energy(f, p);
    j["bulk_energy"] = bulk_energy(f, p);
    j["residual_max_norm"] = el_residual(f, p).max_norm;
    j["max_q_norm"] = max_q_norm(f);
    double max_beta = parallel_max(f.v.size(), [&](std::size_t i) { return biaxiality(f.v[i]); });
    j["max_beta"] = max_beta;
    auto gaps = eigen_gap_map(f);
    double min_gap = gaps.empty() ? 0.0 : gaps[0];
    for (double v : gaps) min_gap = std::min(min_gap, v);
    j["min_eigen_gap"] = min_gap;
    auto [om_star, om_lambda] = region_measures(f, p, cfg.lambda);
    j["omega_star_measure"] = om_star;
    j["omega_lambda_measure"] = om_lambda;
    j["boundary_normal_deriv_sq"] = boundary_normal_energy(f);
    write_text_file(out_path(st, "analysis.json"), j.dump(2) + "\n");
    std::cout << "analyze: energy=" << total_energy(f, p) << " max_beta=" << max_beta << "\n";
    return 0;
}

int do_export(const CliState& st) {
    RunConfig cfg = load_config(st);
    MaterialParams p = to_material_params(cfg);
    QField f = import_field_csv(st.field_path);
    std::string name = st.format == "csv" ? "field.csv" : "field.vtk";
    export_field(f, p, out_path(st, name), st.format);
    std::cout << "export: wrote " << name << "\n";
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Landau-de Gennes Q-tensor laboratory"};
    app.require_subcommand(1);
    CliState st;
    CLI::App* solve = app.add_subcommand("solve", "minimize the Q-tensor energy at fixed L");
    CLI::App* sweep = app.add_subcommand("sweep", "run the decreasing-L convergence experiment");
    CLI::App* analyze = app.add_subcommand("analyze", "diagnostics for an exported field");
    CLI::App* exportc = app.add_subcommand("export", "convert a field CSV to another format");
    add_common_flags(solve, st, false);
    add_common_flags(sweep, st, false);
    add_common_flags(analyze, st, true);
    add_common_flags(exportc, st, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (solve->parsed()) return do_solve(st);
        if (sweep->parsed()) return do_sweep(st);
        if (analyze->parsed()) return do_analyze(st);
        if (exportc->parsed()) return do_export(st);
        std::cerr << "error: usage: no subcommand\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 3;
    } catch (const validation_error& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ldg
