// patchlv: numerical laboratory for a two-patch competition model with
// dispersal. Subcommands simulate the system, certify persistence and
// contraction conditions, measure pairwise attraction, and search for
// almost-periods; artifacts are CSV files, SVG plots, and text reports.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "patchlv/patchlv.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes (0 = success; hypotheses that fail to hold are still success —
// that is a scientific result, not a tool failure).
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;       // unreadable/ill-formed config or usage
constexpr int kExitValidation = 3;   // inadmissible parameters, states, or ranges
constexpr int kExitIntegration = 4;  // step-size underflow or non-finite dynamics
constexpr int kExitCheck = 5;        // condition-check machinery failed

struct RunContext {
    patchlv::Scenario scenario;
    fs::path out_dir;
};

void write_artifact(const fs::path& path, const std::string& content) {
    patchlv::write_text_file(path.string(), content);
    std::cout << "wrote " << path.string() << "\n";
}

/// Resolution order for the output directory: --out flag, PATCHLV_OUT
/// environment variable, then the scenario's output_dir.
fs::path resolve_out_dir(const std::string& flag_value, const patchlv::Scenario& sc) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("PATCHLV_OUT"); env != nullptr && *env != '\0') return env;
    return sc.output_dir;
}

void require_valid(const patchlv::Scenario& sc) {
    const std::vector<std::string> issues = patchlv::validate_params(sc.params);
    if (!issues.empty()) {
        std::string msg = "inadmissible parameters:";
        for (const auto& issue : issues) msg += "\n  " + issue;
        throw std::domain_error(msg);
    }
    for (std::size_t i = 0; i < sc.initial_states.size(); ++i) {
        if (!patchlv::is_strictly_positive(sc.initial_states[i]))
            throw std::domain_error("initial_states[" + std::to_string(i) +
                                    "]: must be strictly positive and finite");
    }
    patchlv::validate_options(sc.integration);
}

int run_simulate(const RunContext& ctx) {
    const patchlv::Scenario& sc = ctx.scenario;
    for (std::size_t i = 0; i < sc.initial_states.size(); ++i) {
        const patchlv::Trajectory<4> traj = patchlv::integrate(
            sc.params, sc.initial_states[i], 0.0, sc.simulate.t_end, sc.integration);
        const std::string csv = patchlv::to_trajectory_csv(traj);
        const std::string name = "traj_" + std::to_string(i);
        write_artifact(ctx.out_dir / (name + ".csv"), csv);
        write_artifact(ctx.out_dir / (name + ".svg"),
                       patchlv::trajectory_plot_svg(patchlv::parse_csv(csv),
                                                    "trajectory from initial state " +
                                                        std::to_string(i)));
    }
    return kExitOk;
}

int run_check(const RunContext& ctx) {
    const patchlv::Scenario& sc = ctx.scenario;
    const patchlv::DispersalReport dispersal = patchlv::check_dispersal_bound(sc.params);

    std::string text = patchlv::format_dispersal_report(dispersal);
    std::vector<patchlv::InequalityRecord> rows(dispersal.inequalities.begin(),
                                                dispersal.inequalities.end());

    if (dispersal.all_hold) {
        patchlv::RegionEstimate region;
        try {
            region = patchlv::estimate_ultimate_bounds(
                sc.params, sc.region.seed, sc.region.ensemble_size, sc.region.ic_box,
                sc.region.burn_in, sc.region.horizon, sc.region.margin, sc.integration);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(std::string("region estimation failed: ") + e.what());
        }
        const patchlv::ConditionReport cond = patchlv::check_contraction(sc.params, region);
        text += patchlv::format_condition_report(cond);
        rows.insert(rows.end(), cond.inequalities.begin(), cond.inequalities.end());
    } else {
        text += "contraction check skipped: dispersal bounds do not hold\n";
    }

    std::cout << text;
    write_artifact(ctx.out_dir / "conditions.csv", patchlv::to_inequalities_csv(rows));
    write_artifact(ctx.out_dir / "conditions.txt", text);
    return kExitOk;
}

int run_attract(const RunContext& ctx) {
    const patchlv::Scenario& sc = ctx.scenario;
    if (sc.initial_states.size() < 2)
        throw std::domain_error("attract: need at least two initial states");

    std::vector<patchlv::Trajectory<4>> trajs;
    std::vector<patchlv::CsvTable> tables;
    trajs.reserve(sc.initial_states.size());
    for (std::size_t i = 0; i < sc.initial_states.size(); ++i) {
        trajs.push_back(patchlv::integrate(sc.params, sc.initial_states[i], 0.0,
                                           sc.attract.t_end, sc.integration));
        const std::string csv = patchlv::to_trajectory_csv(trajs.back());
        write_artifact(ctx.out_dir / ("attract_traj_" + std::to_string(i) + ".csv"), csv);
        tables.push_back(patchlv::parse_csv(csv));
    }
    write_artifact(ctx.out_dir / "attract_overlay.svg",
                   patchlv::overlay_plot_svg(tables, "trajectories merging"));

    const double dt =
        sc.integration.h_init * static_cast<double>(sc.integration.record_stride);
    const patchlv::ConvergenceReport rep =
        patchlv::attractivity_from_trajectories(trajs, sc.attract.eps, dt);
    const std::string text = patchlv::format_convergence_report(rep);
    std::cout << text;

    const std::string diff_csv = patchlv::to_diff_csv(rep);
    write_artifact(ctx.out_dir / "diffs.csv", diff_csv);
    write_artifact(ctx.out_dir / "diffs.svg",
                   patchlv::diff_plot_svg(patchlv::parse_csv(diff_csv),
                                          "pairwise sup-norm differences"));
    write_artifact(ctx.out_dir / "attract.txt", text);
    return kExitOk;
}

int run_almost_period(const RunContext& ctx) {
    const patchlv::Scenario& sc = ctx.scenario;
    const double t_end = sc.scan.window_end + std::max(sc.scan.shift_max, 0.0);
    const patchlv::Trajectory<4> traj =
        patchlv::integrate(sc.params, sc.initial_states.front(), 0.0, t_end, sc.integration);
    const patchlv::AlmostPeriodScan scan = patchlv::almost_period_scan(
        traj, sc.scan.window_start, sc.scan.window_end, sc.scan.shift_min, sc.scan.shift_max,
        sc.scan.shift_step, sc.scan.epsilon);

    const std::string text = patchlv::format_scan_report(scan);
    std::cout << text;

    const std::string csv = patchlv::to_scan_csv(scan);
    write_artifact(ctx.out_dir / "scan.csv", csv);
    write_artifact(ctx.out_dir / "scan.svg",
                   patchlv::scan_plot_svg(patchlv::parse_csv(csv), "almost-period defect"));
    write_artifact(ctx.out_dir / "scan.txt", text);
    return kExitOk;
}

int run_example51(const RunContext& ctx, const std::string& stage) {
    patchlv::save_scenario((ctx.out_dir / "example51.json").string(), ctx.scenario);
    std::cout << "wrote " << (ctx.out_dir / "example51.json").string() << "\n";

    bool ran = false;
    int status = kExitOk;
    const auto run_stage = [&](const std::string& name, int (*fn)(const RunContext&)) {
        if (stage != "all" && stage != name) return;
        std::cout << "== " << name << " ==\n";
        ran = true;
        if (status == kExitOk) status = fn(ctx);
    };
    run_stage("simulate", run_simulate);
    run_stage("check", run_check);
    run_stage("attract", run_attract);
    run_stage("almost-period", run_almost_period);
    if (!ran) throw patchlv::ConfigError(
        "example51: unknown stage '" + stage +
        "' (expected all, simulate, check, attract, or almost-period)");
    return status;
}

/// Maps thrown errors onto the exit-code contract.
int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const patchlv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const patchlv::StepUnderflow& e) {
        std::cerr << "integration error: " << e.what() << "\n";
        return kExitIntegration;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "check error: " << e.what() << "\n";
        return kExitCheck;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patchlv: two-patch competition model laboratory"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 success (including hypotheses reported as not holding),\n"
        "2 config error, 3 validation failure, 4 integration failure,\n"
        "5 condition-check failure.\n"
        "Output directory resolution: --out, then $PATCHLV_OUT, then the\n"
        "scenario's output_dir (default \"out\").");

    std::string config_path;
    std::string out_flag;
    std::optional<std::uint64_t> seed_flag;
    std::string stage = "all";

    const auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("-c,--config", config_path, "scenario config (JSON)")
                ->required()
                ->check(CLI::ExistingFile);
        cmd->add_option("-o,--out", out_flag, "output directory (overrides $PATCHLV_OUT)");
        cmd->add_option("-s,--seed", seed_flag,
                        "override the region-estimator seed (default 42)");
        return cmd;
    };

    CLI::App* sim = add_common(app.add_subcommand("simulate", "integrate each initial state and "
                                                              "export trajectory CSVs and plots"),
                               true);
    CLI::App* chk = add_common(
        app.add_subcommand("check", "verify dispersal bounds, estimate the attracting box, and "
                                    "evaluate the contraction margins"),
        true);
    CLI::App* att = add_common(app.add_subcommand("attract", "measure pairwise convergence of "
                                                             "trajectories (needs >= 2 initial "
                                                             "states)"),
                               true);
    CLI::App* scn = add_common(app.add_subcommand("almost-period", "scan time shifts for near "
                                                                   "repeats of the converged "
                                                                   "trajectory"),
                               true);
    CLI::App* exa = add_common(app.add_subcommand("example51", "run the built-in quasi-periodic "
                                                               "benchmark scenario end-to-end"),
                               false);
    exa->add_option("stage", stage,
                    "stage to run: all, simulate, check, attract, almost-period")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    return guarded([&]() -> int {
        RunContext ctx;
        if (exa->parsed()) {
            ctx.scenario = patchlv::example51_scenario();
        } else {
            ctx.scenario = patchlv::load_scenario(config_path);
        }
        if (seed_flag) ctx.scenario.region.seed = *seed_flag;
        require_valid(ctx.scenario);

        ctx.out_dir = resolve_out_dir(out_flag, ctx.scenario);
        fs::create_directories(ctx.out_dir);

        if (sim->parsed()) return run_simulate(ctx);
        if (chk->parsed()) return run_check(ctx);
        if (att->parsed()) return run_attract(ctx);
        if (scn->parsed()) return run_almost_period(ctx);
        return run_example51(ctx, stage);
    });
}
