#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "ecgl/config.hpp"
#include "ecgl/io.hpp"
#include "ecgl/spectral.hpp"

namespace fs = std::filesystem;
using namespace ecgl;

namespace {

struct Cli {
    std::string config_path;
    std::string out_dir;
    std::string checkpoint_path; // resume only
    int jobs = 1;
    bool quiet = false;
    std::string command_line;
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void info(const Cli& cli, const std::string& msg) {
    if (!cli.quiet) std::cout << msg << "\n";
}

fs::path prepare_out(const RunConfig& cfg, const Cli& cli) {
    fs::path dir = cli.out_dir.empty() ? fs::path(cfg.output.directory) : fs::path(cli.out_dir);
    fs::create_directories(dir);
    return dir;
}

void finish(const RunConfig& cfg, const Cli& cli, const fs::path& dir, const Timer& timer) {
    write_manifest((dir / "manifest.json").string(), emit_config(cfg), cli.command_line,
                   timer.seconds());
}

// Single trajectory: family datum, diagnostics at record cadence, CSV +
// checkpoints.  Returns the terminal state.
RunState run_single(const RunConfig& cfg, const fs::path& dir, const Cli& cli,
                    const GroundStateRefs& refs, const ComplexField& u0,
                    const std::string& csv_name) {
    const ZParameter z(cfg.theta);
    TimeSeriesWriter csv((dir / csv_name).string());

    DiagnosticsRecord last;
    bool have_last = false;
    auto observer = [&](const RunState& s) {
        if (!s.u.finite()) return;
        if (have_last && s.t <= last.t) return;
        last = record(s.u, s.t, have_last ? &last : nullptr);
        have_last = true;
        csv.write(last);
        if (cfg.output.checkpoint_cadence > 0 &&
            s.step_index % cfg.output.checkpoint_cadence == 0 && s.step_index > 0) {
            Checkpoint cp{cfg.grid.d, cfg.grid.n_per_axis, cfg.grid.half_length, cfg.theta, s};
            write_checkpoint((dir / ("step_" + std::to_string(s.step_index) + ".ckpt")).string(),
                             cp);
        }
    };

    RunState final = integrate(u0, z, cfg.stepper, refs.grad_norm_sq_W, observer,
                               cfg.output.record_cadence);
    Checkpoint cp{cfg.grid.d, cfg.grid.n_per_axis, cfg.grid.half_length, cfg.theta, final};
    write_checkpoint((dir / "final.ckpt").string(), cp);
    info(cli, std::string("terminal status: ") + to_string(final.status) +
                  " at t = " + std::to_string(final.t));
    return final;
}

int cmd_thresholds(const RunConfig& cfg, const Cli&) {
    const auto refs = compute_thresholds(cfg.grid.d);
    std::printf("d = %d\n", refs.d);
    std::printf("grad_norm_sq_W = %.12f\n", refs.grad_norm_sq_W);
    std::printf("energy_W       = %.12f\n", refs.energy_W);
    std::printf("quadrature error estimate = %.3e (levels %d)\n", refs.quadrature_error,
                refs.quadrature_levels);
    return 0;
}

int cmd_run(const RunConfig& cfg, const Cli& cli) {
    Timer timer;
    const auto dir = prepare_out(cfg, cli);
    const auto refs = compute_thresholds(cfg.grid.d);
    auto grid = std::make_shared<Grid>(cfg.grid.d, cfg.grid.n_per_axis, cfg.grid.half_length);
    ComplexField u0 = make_initial(cfg.experiment.family, cfg.experiment.fparams,
                                   cfg.experiment.amplitudes.at(0), grid);
    RunState final = run_single(cfg, dir, cli, refs, u0, "run.csv");
    finish(cfg, cli, dir, timer);
    return final.status == RunStatus::StepFailure ? 3 : 0;
}

int cmd_resume(const RunConfig& cfg, const Cli& cli) {
    Timer timer;
    if (cli.checkpoint_path.empty()) {
        std::cerr << "resume: --checkpoint PATH is required\n";
        return 2;
    }
    const auto dir = prepare_out(cfg, cli);
    const auto cp = read_checkpoint(cli.checkpoint_path);
    if (cp.state.status != RunStatus::Running) {
        info(cli, std::string("checkpoint already terminal: ") + to_string(cp.state.status));
        return 0;
    }
    const auto refs = compute_thresholds(cp.d);

    RunConfig eff = cfg;
    eff.grid.d = cp.d;
    eff.grid.n_per_axis = cp.n_per_axis;
    eff.grid.half_length = cp.half_length;
    eff.theta = cp.theta;

    const ZParameter z(cp.theta);
    TimeSeriesWriter csv((dir / "resumed.csv").string());
    DiagnosticsRecord last;
    bool have_last = false;
    const double t0 = cp.state.t;
    auto observer = [&](const RunState& s) {
        if (!s.u.finite()) return;
        if (have_last && t0 + s.t <= last.t) return;
        last = record(s.u, t0 + s.t, have_last ? &last : nullptr);
        have_last = true;
        csv.write(last);
    };

    // integrate restarts indices; time offset keeps the physical clock.
    StepperConfig scfg = eff.stepper;
    scfg.max_time = std::max(scfg.max_time - cp.state.t, scfg.dt);
    RunState final = integrate(cp.state.u, z, scfg, refs.grad_norm_sq_W, observer,
                               eff.output.record_cadence);
    final.t += cp.state.t;
    final.t_event += cp.state.t;
    Checkpoint out_cp{eff.grid.d, eff.grid.n_per_axis, eff.grid.half_length, eff.theta, final};
    write_checkpoint((dir / "final.ckpt").string(), out_cp);
    info(cli, std::string("terminal status: ") + to_string(final.status) +
                  " at t = " + std::to_string(final.t));
    finish(eff, cli, dir, timer);
    return final.status == RunStatus::StepFailure ? 3 : 0;
}

int cmd_sweep(const RunConfig& cfg, const Cli& cli) {
    Timer timer;
    const auto dir = prepare_out(cfg, cli);
    const auto refs = compute_thresholds(cfg.grid.d);
    auto grid = std::make_shared<Grid>(cfg.grid.d, cfg.grid.n_per_axis, cfg.grid.half_length);

    const auto result = run_dichotomy_sweep(cfg.experiment, grid, cfg.stepper, refs,
                                            cli.jobs, cfg.output.record_cadence);

    std::ofstream summary(dir / "sweep.csv");
    summary << "amplitude,theta,energy0_over_ew,kinetic0_over_kw,classifiable,subcritical,"
               "trusted,outcome,t_event,delta_bar,delta_3,i_second_min,trapping_ok,"
               "consistent\n";
    int bad = -1;
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& c = result.cells[i];
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%s,%.17g,%.17g,%.17g,%.17g,%d,%d",
                      c.amplitude, c.theta, c.energy0_over_ew, c.kinetic0_over_kw,
                      c.classifiable, c.subcritical, c.trusted, to_string(c.outcome),
                      c.t_event, c.measured_delta_bar, c.measured_delta_3, c.i_second_min,
                      c.trapping_ok, c.consistent);
        summary << buf << "\n";
        write_time_series((dir / ("cell_" + std::to_string(i) + ".csv")).string(), c.records);
        if (c.trusted && !c.consistent && bad < 0) bad = static_cast<int>(i);
    }
    finish(cfg, cli, dir, timer);
    if (bad >= 0) {
        const auto& c = result.cells[bad];
        std::cerr << "dichotomy misclassification in cell " << bad << " (amplitude "
                  << c.amplitude << ", theta " << c.theta << "): outcome "
                  << to_string(c.outcome) << "\n";
        return 3;
    }
    info(cli, "sweep consistent: " + std::to_string(result.cells.size()) + " cells");
    return 0;
}

int cmd_inviscid(const RunConfig& cfg, const Cli& cli) {
    Timer timer;
    const auto dir = prepare_out(cfg, cli);
    const auto refs = compute_thresholds(cfg.grid.d);
    auto grid = std::make_shared<Grid>(cfg.grid.d, cfg.grid.n_per_axis, cfg.grid.half_length);

    const auto result = run_inviscid_limit(cfg.experiment, grid, cfg.stepper, refs,
                                           cfg.output.record_cadence);
    std::ofstream out(dir / "inviscid.csv");
    out << "m,theta,cos_theta,err_l2,err_h1,energy_final\n";
    for (const auto& r : result.rows) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g", r.m, r.theta,
                      r.cos_theta, r.err_l2, r.err_h1, r.energy_final);
        out << buf << "\n";
    }
    info(cli, "defect bound at finest theta: " + std::to_string(result.defect_bound));
    finish(cfg, cli, dir, timer);
    if (!result.monotone_last3) {
        std::cerr << "inviscid: error not monotone over the last three refinements\n";
        return 3;
    }
    return 0;
}

int cmd_decay(const RunConfig& cfg, const Cli& cli) {
    Timer timer;
    const auto dir = prepare_out(cfg, cli);
    const auto refs = compute_thresholds(cfg.grid.d);
    auto grid = std::make_shared<Grid>(cfg.grid.d, cfg.grid.n_per_axis, cfg.grid.half_length);

    const auto result = run_decay_study(cfg.experiment, grid, cfg.stepper, refs,
                                        cfg.output.record_cadence);
    write_time_series((dir / "decay.csv").string(), result.records);
    info(cli, std::string("status: ") + to_string(result.status) +
                  ", final H1 = " + std::to_string(result.final_h1) +
                  ", fitted rate = " + std::to_string(result.fitted_rate));
    finish(cfg, cli, dir, timer);
    if (result.status == RunStatus::MaxTimeReached && !result.h1_below_threshold) {
        std::cerr << "decay: non-conclusive (horizon reached before the threshold)\n";
        return 3;
    }
    return result.h1_below_threshold ? 0 : 3;
}

int cmd_gronwall(const RunConfig& cfg, const Cli& cli) {
    Timer timer;
    const auto dir = prepare_out(cfg, cli);
    const auto refs = compute_thresholds(cfg.grid.d);
    auto grid = std::make_shared<Grid>(cfg.grid.d, cfg.grid.n_per_axis, cfg.grid.half_length);

    const auto result = run_weak_strong_gronwall(cfg.experiment, grid, cfg.stepper, refs,
                                                 cfg.output.record_cadence);
    std::ofstream out(dir / "gronwall.csv");
    out << "t,ratio_h1_sq\n";
    for (std::size_t i = 0; i < result.t_series.size(); ++i) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", result.t_series[i],
                      result.ratio_series[i]);
        out << buf << "\n";
    }
    info(cli, "fitted Gronwall constant: " + std::to_string(result.c_hat) +
                  ", zero-perturbation residual: " + std::to_string(result.w_final_h1_zero));
    finish(cfg, cli, dir, timer);
    if (!result.ratio_bounded || result.w_final_h1_zero > 1e-12) {
        std::cerr << "gronwall: stability assertion failed\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-critical Ginzburg-Landau / NLS pseudospectral toolbox"};
    app.require_subcommand(1);

    Cli cli;
    for (int i = 0; i < argc; ++i) cli.command_line += std::string(i ? " " : "") + argv[i];

    app.add_option("--config", cli.config_path, "JSON config file")->required();
    app.add_option("--out", cli.out_dir, "output directory (overrides config)");
    app.add_option("--jobs", cli.jobs, "worker threads for sweeps")->default_val(1);
    app.add_flag("--quiet", cli.quiet, "suppress progress output");

    auto* sub_run = app.add_subcommand("run", "integrate a single trajectory");
    auto* sub_sweep = app.add_subcommand("sweep", "dichotomy sweep over (amplitude, theta)");
    auto* sub_inviscid = app.add_subcommand("inviscid", "Re z -> 0 convergence table");
    auto* sub_decay = app.add_subcommand("decay", "asymptotic decay study");
    auto* sub_gronwall = app.add_subcommand("gronwall", "weak-strong stability study");
    auto* sub_thresholds = app.add_subcommand("thresholds", "print ground-state thresholds");
    auto* sub_resume = app.add_subcommand("resume", "continue from a checkpoint");
    sub_resume->add_option("--checkpoint", cli.checkpoint_path, "checkpoint file")
        ->required();
    // global flags remain usable after the subcommand name
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    RunConfig cfg;
    try {
        cfg = parse_config(cli.config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (sub_thresholds->parsed()) return cmd_thresholds(cfg, cli);
        if (sub_run->parsed()) return cmd_run(cfg, cli);
        if (sub_sweep->parsed()) return cmd_sweep(cfg, cli);
        if (sub_inviscid->parsed()) return cmd_inviscid(cfg, cli);
        if (sub_decay->parsed()) return cmd_decay(cfg, cli);
        if (sub_gronwall->parsed()) return cmd_gronwall(cfg, cli);
        if (sub_resume->parsed()) return cmd_resume(cfg, cli);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
