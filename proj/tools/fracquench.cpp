#include "fracquench/runio.hpp"
#include "fracquench/verify.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void on_interrupt(int)
{
    g_interrupted = 1;
}

std::filesystem::path resolve_out_dir(const std::string& flag_value,
                                      const std::string& config_value)
{
    if (!flag_value.empty())
        return flag_value;
    if (!config_value.empty())
        return config_value;
    std::string stamp = fq::timestamp_now();
    for (char& c : stamp)
        if (c == ':')
            c = '-';
    return std::filesystem::path("runs") / stamp;
}

fq::SolveConfig with_u0(const fq::RunConfig& rc)
{
    fq::SolveConfig cfg = rc.solve;
    if (rc.u0_amplitude != 0.0) {
        const fq::BasisPtr basis = fq::build_basis(cfg.domain, cfg.params);
        cfg.u0_coeffs = fq::u0_from_amplitude(rc.u0_amplitude, basis);
    }
    return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& payload)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    out << payload;
}

int cmd_solve(const std::string& config_path, const std::string& out_flag, long seed)
{
    const fq::RunConfig rc = fq::parse_config(config_path);
    const std::filesystem::path dir = resolve_out_dir(out_flag, rc.out_dir);
    std::filesystem::create_directories(dir);

    fq::RunManifest manifest;
    manifest.config_echo = fq::config_echo(rc);
    manifest.started = fq::timestamp_now();
    manifest.seed = seed;

    fq::HistoryStepper stepper(with_u0(rc));
    while (stepper.advance() && !g_interrupted) {
    }
    const fq::Trajectory& traj = stepper.trajectory();
    const fq::QuenchReport rep = stepper.report();

    fq::emit_plotdata(traj, dir, rc.solve.snapshot_every);
    write_text(dir / "report.json", fq::report_document(rc, traj, rep));

    manifest.finished = fq::timestamp_now();
    manifest.status = g_interrupted ? "interrupted" : fq::to_string(traj.status);
    manifest.output_hash = fq::hash_run_outputs(dir);
    fq::write_manifest(dir, manifest);

    std::printf("status: %s\n", manifest.status.c_str());
    std::printf("t_final: %.17g  max_u: %.17g  steps: %zu\n", traj.times.back(),
                traj.max_values.back(), traj.times.size() - 1);
    if (rep.t_q_bracket)
        std::printf("T_q bracket: [%.17g, %.17g]\n", rep.t_q_bracket->first,
                    rep.t_q_bracket->second);
    std::printf("out_dir: %s\n", dir.string().c_str());
    return g_interrupted ? 130 : 0;
}

int cmd_steady(const std::string& config_path, const std::string& out_flag, long seed,
               double tol)
{
    const fq::RunConfig rc = fq::parse_config(config_path);
    const std::filesystem::path dir = resolve_out_dir(out_flag, rc.out_dir);
    std::filesystem::create_directories(dir);

    fq::RunManifest manifest;
    manifest.config_echo = fq::config_echo(rc);
    manifest.started = fq::timestamp_now();
    manifest.seed = seed;

    const fq::SteadyResult res =
        fq::steady_solve(rc.solve.domain, rc.solve.params, rc.solve.reaction, tol);

    nlohmann::json doc;
    doc["status"] = fq::to_string(res.status);
    doc["iterations"] = res.iterations;
    doc["residual"] = res.residual;
    doc["heuristic_stop"] = res.heuristic_stop;
    doc["sup_norm"] = fq::sup_norm(res.v);
    doc["config"] = nlohmann::json::parse(fq::config_echo(rc));
    write_text(dir / "report.json", doc.dump(2) + "\n");

    if (res.status == fq::SteadyResult::Status::converged) {
        const fq::SpectralBasis& b = *res.v.basis();
        const Eigen::ArrayXd grid = fq::to_grid(res.v);
        std::string csv = b.dim() == 1 ? "x,u\n" : "x,y,u\n";
        const int nn = b.modes_per_dim();
        for (Eigen::Index g = 0; g < grid.size(); ++g) {
            if (b.dim() == 1) {
                csv += fq::csv_number(b.collocation(0)(g));
            } else {
                csv += fq::csv_number(b.collocation(0)(g % nn)) + ","
                       + fq::csv_number(b.collocation(1)(g / nn));
            }
            csv += "," + fq::csv_number(grid(g)) + "\n";
        }
        write_text(dir / "steady.csv", csv);
    }

    manifest.finished = fq::timestamp_now();
    manifest.status = fq::to_string(res.status);
    manifest.output_hash = fq::hash_run_outputs(dir);
    fq::write_manifest(dir, manifest);

    std::printf("status: %s  iterations: %d  residual: %.6e\n", fq::to_string(res.status),
                res.iterations, res.residual);
    std::printf("out_dir: %s\n", dir.string().c_str());
    return 0;
}

int cmd_critical(const std::string& config_path, const std::string& out_flag, long seed,
                 double lo, double hi, double tol)
{
    const fq::RunConfig rc = fq::parse_config(config_path);
    const std::filesystem::path dir = resolve_out_dir(out_flag, rc.out_dir);
    std::filesystem::create_directories(dir);

    fq::RunManifest manifest;
    manifest.config_echo = fq::config_echo(rc);
    manifest.started = fq::timestamp_now();
    manifest.seed = seed;

    const fq::CriticalSizeResult res = fq::critical_size(
        rc.solve.domain, rc.solve.params, rc.solve.reaction, lo, hi, tol, &rc.solve);

    nlohmann::json doc;
    doc["lo"] = res.lo;
    doc["hi"] = res.hi;
    doc["modes_per_dim"] = res.modes_per_dim;
    doc["lo_time_check"] = fq::to_string(res.lo_time_check);
    doc["hi_time_check"] = fq::to_string(res.hi_time_check);
    nlohmann::json evals = nlohmann::json::array();
    for (const auto& [scale, cls] : res.evaluations)
        evals.push_back({ { "scale", scale }, { "classification", fq::to_string(cls) } });
    doc["evaluations"] = evals;
    doc["config"] = nlohmann::json::parse(fq::config_echo(rc));
    write_text(dir / "critical.json", doc.dump(2) + "\n");

    manifest.finished = fq::timestamp_now();
    manifest.status = "done";
    manifest.output_hash = fq::hash_run_outputs(dir);
    fq::write_manifest(dir, manifest);

    std::printf("critical scale bracket: [%.17g, %.17g]\n", res.lo, res.hi);
    std::printf("out_dir: %s\n", dir.string().c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_path,
              const std::string& out_flag, long seed)
{
    const fq::RunConfig rc = fq::parse_config(config_path);

    std::ifstream in(grid_path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open grid file " + grid_path);
    nlohmann::json grid;
    in >> grid;
    const auto axis = [&](const char* key) {
        if (!grid.contains(key) || !grid[key].is_array() || grid[key].empty())
            throw std::invalid_argument(std::string("grid: key '") + key
                                        + "' must be a non-empty array");
        return grid[key].get<std::vector<double>>();
    };
    const std::vector<double> alphas = axis("alpha");
    const std::vector<double> ss = axis("s");
    const std::vector<double> scales = axis("scale");

    const std::filesystem::path dir = resolve_out_dir(out_flag, rc.out_dir);
    std::filesystem::create_directories(dir);

    fq::RunManifest manifest;
    manifest.config_echo = fq::config_echo(rc);
    manifest.started = fq::timestamp_now();
    manifest.seed = seed;

    const std::vector<fq::SweepCell> cells = fq::sweep(alphas, ss, scales, rc.solve);
    write_text(dir / "phase.csv", fq::sweep_csv(cells));

    int errors = 0;
    for (const auto& cell : cells)
        if (!cell.error.empty())
            ++errors;

    manifest.finished = fq::timestamp_now();
    manifest.status = errors == 0 ? "done" : "done_with_errors";
    manifest.output_hash = fq::hash_run_outputs(dir);
    fq::write_manifest(dir, manifest);

    std::printf("%zu cells, %d errors\n", cells.size(), errors);
    std::printf("out_dir: %s\n", dir.string().c_str());
    return errors == 0 ? 0 : 1;
}

int cmd_verify(const std::string& suite, bool quick, unsigned seed)
{
    fq::VerifyOptions options;
    options.quick = quick;
    options.seed = seed;
    const std::vector<fq::CheckResult> results =
        suite.empty() ? fq::verify_all(options) : fq::verify_suite(suite, options);
    std::fputs(fq::format_check_table(results).c_str(), stdout);
    return fq::all_pass(results) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    std::signal(SIGINT, on_interrupt);

    CLI::App app { "Quenching simulator for time-space fractional reaction-diffusion problems" };
    app.require_subcommand(1);
    app.set_version_flag("--version", fq::kToolVersion);

    std::string config_path, out_dir, grid_path, suite;
    long seed = 0;
    double ml_alpha = 0.5, ml_beta = 1.0;
    std::vector<double> ml_z;
    double lo = 0.5, hi = 4.0, tol = 0.01, steady_tol = 1e-8;
    bool quick = false;

    CLI::App* ml = app.add_subcommand("ml", "Evaluate the Mittag-Leffler function");
    ml->add_option("--alpha", ml_alpha, "order alpha in (0, 1]")->required();
    ml->add_option("--beta", ml_beta, "order beta > 0");
    ml->add_option("--z", ml_z, "argument; repeatable")->required();

    CLI::App* solve = app.add_subcommand("solve", "Run the time solver from a config file");
    solve->add_option("--config", config_path, "config file")->required();
    solve->add_option("--out-dir", out_dir, "output directory");
    solve->add_option("--seed", seed, "seed recorded in the manifest");

    CLI::App* steady = app.add_subcommand("steady", "Solve the stationary problem");
    steady->add_option("--config", config_path, "config file")->required();
    steady->add_option("--tol", steady_tol, "iteration tolerance");
    steady->add_option("--out-dir", out_dir, "output directory");
    steady->add_option("--seed", seed, "seed recorded in the manifest");

    CLI::App* critical = app.add_subcommand("critical", "Bisect the critical domain scale");
    critical->add_option("--config", config_path, "config file")->required();
    critical->add_option("--lo", lo, "scale classified global")->required();
    critical->add_option("--hi", hi, "scale classified quenching")->required();
    critical->add_option("--tol", tol, "bracket width target");
    critical->add_option("--out-dir", out_dir, "output directory");
    critical->add_option("--seed", seed, "seed recorded in the manifest");

    CLI::App* sweep = app.add_subcommand("sweep", "Classify over an (alpha, s, scale) grid");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--grid", grid_path, "grid file with alpha/s/scale arrays")->required();
    sweep->add_option("--out-dir", out_dir, "output directory");
    sweep->add_option("--seed", seed, "seed recorded in the manifest");

    CLI::App* verify = app.add_subcommand("verify", "Run invariant suites");
    verify->add_option("suite", suite,
                       "special_fn, operators, solver or quench_analysis (default: all)");
    verify->add_flag("--quick", quick, "reduced sample counts");
    verify->add_option("--seed", seed, "seed for randomized test fields");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ml->parsed()) {
            const fq::MittagLefflerEvaluator e(ml_alpha, ml_beta);
            for (const double z : ml_z)
                std::printf("%.15g\n", e(z));
            return 0;
        }
        if (solve->parsed())
            return cmd_solve(config_path, out_dir, seed);
        if (steady->parsed())
            return cmd_steady(config_path, out_dir, seed, steady_tol);
        if (critical->parsed())
            return cmd_critical(config_path, out_dir, seed, lo, hi, tol);
        if (sweep->parsed())
            return cmd_sweep(config_path, grid_path, out_dir, seed);
        if (verify->parsed())
            return cmd_verify(suite, quick, static_cast<unsigned>(seed));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
