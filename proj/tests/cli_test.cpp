#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>

#include <patchlv/csv.hpp>
#include <patchlv/scenario.hpp>

#include "test_support.hpp"

using namespace patchlv;
using testsupport::cli_binary;
using testsupport::run_command;

namespace fs = std::filesystem;

namespace {

/// Small constant-coefficient system that settles fast: strong self-limitation,
/// weak cross-competition and dispersal, shared equilibrium at 0.4.
Scenario small_scenario() {
    Scenario sc;
    sc.params.r1 = sc.params.r2 = sc.params.s1 = sc.params.s2 = constant_coeff(1.0);
    sc.params.a11 = sc.params.a22 = sc.params.b11 = sc.params.b22 = constant_coeff(2.0);
    sc.params.a12 = sc.params.a21 = sc.params.b12 = sc.params.b21 = constant_coeff(0.5);
    sc.params.D1 = sc.params.D2 = constant_coeff(0.1);
    sc.initial_states = {{0.5, 0.5, 0.5, 0.5}, {0.6, 0.4, 0.5, 0.5}};
    sc.integration.h_init = 0.01;
    sc.integration.record_stride = 10;
    sc.simulate.t_end = 2.0;
    sc.region.ensemble_size = 2;
    sc.region.ic_box = {0.5, 1.5};
    sc.region.burn_in = 5.0;
    sc.region.horizon = 15.0;
    sc.attract.t_end = 20.0;
    sc.scan.window_start = 5.0;
    sc.scan.window_end = 8.0;
    sc.scan.shift_min = 1.0;
    sc.scan.shift_max = 3.0;
    sc.scan.shift_step = 0.1;
    return sc;
}

struct CliCase {
    fs::path dir;
    std::string config;
    std::string out;

    explicit CliCase(const std::string& stem, const Scenario& sc = small_scenario())
        : dir(testsupport::make_temp_dir(stem)) {
        config = (dir / "config.json").string();
        out = (dir / "out").string();
        save_scenario(config, sc);
    }

    std::string cmd(const std::string& args) const {
        return cli_binary() + " " + args + " --config " + config + " --out " + out;
    }
};

}  // namespace

TEST_CASE("help and usage errors", "[cli]") {
    const auto help = run_command(cli_binary() + " --help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("simulate") != std::string::npos);
    CHECK(help.output.find("example51") != std::string::npos);
    CHECK(help.output.find("Exit codes") != std::string::npos);

    CHECK(run_command(cli_binary()).exit_code == 2);                    // missing subcommand
    CHECK(run_command(cli_binary() + " simulate").exit_code == 2);      // missing --config
    CHECK(run_command(cli_binary() + " frobnicate").exit_code == 2);    // unknown subcommand
}

TEST_CASE("config problems exit with code 2", "[cli]") {
    const auto dir = testsupport::make_temp_dir("cli_badcfg");
    CHECK(run_command(cli_binary() + " simulate --config " + (dir / "absent.json").string())
              .exit_code == 2);

    const std::string broken = (dir / "broken.json").string();
    write_text_file(broken, "{ definitely not json");
    const auto res = run_command(cli_binary() + " simulate --config " + broken);
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("config error") != std::string::npos);

    CHECK(run_command(cli_binary() + " example51 bogus --out " + (dir / "out").string())
              .exit_code == 2);
}

TEST_CASE("inadmissible parameters exit with code 3", "[cli]") {
    Scenario sc = small_scenario();
    sc.params.r1 = QuasiPeriodicCoefficient{1.0, {{5.0, 1.0, PhaseKind::sine}}};
    const CliCase tc("cli_invalid", sc);
    const auto res = run_command(tc.cmd("simulate"));
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("inadmissible") != std::string::npos);
    CHECK(res.output.find("r1") != std::string::npos);
}

TEST_CASE("nonpositive initial states exit with code 3", "[cli]") {
    Scenario sc = small_scenario();
    sc.initial_states[1] = State{1.0, 0.0, 1.0, 1.0};
    const CliCase tc("cli_badic", sc);
    const auto res = run_command(tc.cmd("simulate"));
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("initial_states[1]") != std::string::npos);
}

TEST_CASE("simulate writes a CSV and plot per initial state", "[cli]") {
    const CliCase tc("cli_simulate");
    const auto res = run_command(tc.cmd("simulate"));
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("wrote") != std::string::npos);

    for (const char* name : {"traj_0.csv", "traj_0.svg", "traj_1.csv", "traj_1.svg"})
        REQUIRE(fs::exists(fs::path(tc.out) / name));

    const CsvTable table = parse_csv(read_text_file((fs::path(tc.out) / "traj_0.csv").string()));
    expect_columns(table, {"t", "x1", "y1", "x2", "y2"}, "traj_0");
    CHECK(table.rows.front()[0] == 0.0);
    CHECK(table.rows.back()[0] == 2.0);
    for (const auto& row : table.rows)
        for (std::size_t i = 1; i < row.size(); ++i) REQUIRE(row[i] > 0.0);
}

TEST_CASE("a zero-length simulation still exports the starting state", "[cli]") {
    Scenario sc = small_scenario();
    sc.simulate.t_end = 0.0;
    sc.initial_states = {{0.5, 0.5, 0.5, 0.5}};
    const CliCase tc("cli_zero", sc);
    REQUIRE(run_command(tc.cmd("simulate")).exit_code == 0);
    const CsvTable table = parse_csv(read_text_file((fs::path(tc.out) / "traj_0.csv").string()));
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0][0] == 0.0);
    CHECK(table.rows[0][1] == 0.5);
}

TEST_CASE("check certifies the small system and writes condition artifacts", "[cli]") {
    const CliCase tc("cli_check");
    const auto res = run_command(tc.cmd("check"));
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("all hold: yes") != std::string::npos);
    CHECK(res.output.find("attracting box") != std::string::npos);
    CHECK(res.output.find("eta = min(P1..P4)") != std::string::npos);
    CHECK(res.output.find("holds: yes") != std::string::npos);

    const std::string csv = read_text_file((fs::path(tc.out) / "conditions.csv").string());
    // Header plus four dispersal rows plus four contraction rows.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
    CHECK(csv.find("supD2<infs2,") != std::string::npos);
    CHECK(csv.find("P4,") != std::string::npos);
    CHECK(fs::exists(fs::path(tc.out) / "conditions.txt"));
}

TEST_CASE("check reports failed dispersal bounds and skips contraction", "[cli]") {
    Scenario sc = small_scenario();
    sc.params.D1 = constant_coeff(5.0);
    const CliCase tc("cli_checkfail", sc);
    const auto res = run_command(tc.cmd("check"));
    REQUIRE(res.exit_code == 0);  // a negative scientific result is not a tool failure
    CHECK(res.output.find("all hold: no") != std::string::npos);
    CHECK(res.output.find("contraction check skipped") != std::string::npos);

    const std::string csv = read_text_file((fs::path(tc.out) / "conditions.csv").string());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // dispersal rows only
}

TEST_CASE("an untenable region margin exits with code 5", "[cli]") {
    Scenario sc = small_scenario();
    sc.region.margin = 1.0;  // widened lower bounds collapse to zero
    const CliCase tc("cli_margin", sc);
    const auto res = run_command(tc.cmd("check"));
    CHECK(res.exit_code == 5);
    CHECK(res.output.find("check error") != std::string::npos);
    CHECK(res.output.find("region estimation failed") != std::string::npos);
}

TEST_CASE("runaway dispersal stiffness exits with code 4", "[cli]") {
    Scenario sc = small_scenario();
    sc.params.D1 = constant_coeff(1e8);
    sc.initial_states = {{1.0, 1.5, 2.0, 0.5}};
    const CliCase tc("cli_stiff", sc);
    const auto res = run_command(tc.cmd("simulate"));
    CHECK(res.exit_code == 4);
    CHECK(res.output.find("integration error") != std::string::npos);
}

TEST_CASE("attract needs at least two initial states", "[cli]") {
    Scenario sc = small_scenario();
    sc.initial_states = {{0.5, 0.5, 0.5, 0.5}};
    const CliCase tc("cli_attract1", sc);
    const auto res = run_command(tc.cmd("attract"));
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("two initial states") != std::string::npos);
}

TEST_CASE("attract reports convergence and exports curves", "[cli]") {
    const CliCase tc("cli_attract");
    const auto res = run_command(tc.cmd("attract"));
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("pair 0-1: below eps from t = ") != std::string::npos);

    for (const char* name : {"attract_traj_0.csv", "attract_traj_1.csv", "attract_overlay.svg",
                             "diffs.csv", "diffs.svg", "attract.txt"})
        REQUIRE(fs::exists(fs::path(tc.out) / name));

    const CsvTable diffs = parse_csv(read_text_file((fs::path(tc.out) / "diffs.csv").string()));
    expect_columns(diffs, {"t", "d_0_1"}, "diffs");
    CHECK(diffs.rows.front()[1] > diffs.rows.back()[1]);  // separation shrinks
}

TEST_CASE("almost-period scanning on a settled system accepts shifts", "[cli]") {
    const CliCase tc("cli_scan");
    const auto res = run_command(tc.cmd("almost-period"));
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("almost-period scan") != std::string::npos);
    CHECK(res.output.find("accepted shifts (by defect):") != std::string::npos);

    for (const char* name : {"scan.csv", "scan.svg", "scan.txt"})
        REQUIRE(fs::exists(fs::path(tc.out) / name));
    const CsvTable scan = parse_csv(read_text_file((fs::path(tc.out) / "scan.csv").string()));
    expect_columns(scan, {"T", "defect", "accepted"}, "scan");
    REQUIRE(scan.rows.size() == 21);
    CHECK(scan.rows.front()[0] == 1.0);
    CHECK(scan.rows.back()[0] == 3.0);
}

TEST_CASE("output directory resolution prefers --out, then PATCHLV_OUT", "[cli]") {
    const CliCase tc("cli_outdir");
    const std::string env_dir = (tc.dir / "from_env").string();
    const std::string flag_dir = (tc.dir / "from_flag").string();

    // --out wins over the environment.
    auto res = run_command("PATCHLV_OUT=" + env_dir + " " + cli_binary() +
                           " simulate --config " + tc.config + " --out " + flag_dir);
    REQUIRE(res.exit_code == 0);
    CHECK(fs::exists(fs::path(flag_dir) / "traj_0.csv"));
    CHECK_FALSE(fs::exists(fs::path(env_dir) / "traj_0.csv"));

    // The environment wins over the scenario's output_dir.
    res = run_command("PATCHLV_OUT=" + env_dir + " " + cli_binary() + " simulate --config " +
                      tc.config);
    REQUIRE(res.exit_code == 0);
    CHECK(fs::exists(fs::path(env_dir) / "traj_0.csv"));
}

TEST_CASE("the scenario's output_dir is the fallback", "[cli]") {
    Scenario sc = small_scenario();
    const auto dir = testsupport::make_temp_dir("cli_fallback");
    sc.output_dir = (dir / "scenario_out").string();
    const std::string config = (dir / "config.json").string();
    save_scenario(config, sc);
    const auto res = run_command(cli_binary() + " simulate --config " + config);
    REQUIRE(res.exit_code == 0);
    CHECK(fs::exists(fs::path(sc.output_dir) / "traj_0.csv"));
}

TEST_CASE("the seed flag steers the region ensemble", "[cli]") {
    const CliCase tc("cli_seed");
    const std::string out1 = (tc.dir / "seed1").string();
    const std::string out2 = (tc.dir / "seed2").string();
    const std::string out1b = (tc.dir / "seed1b").string();
    REQUIRE(run_command(cli_binary() + " check --config " + tc.config + " --seed 1 --out " +
                        out1).exit_code == 0);
    REQUIRE(run_command(cli_binary() + " check --config " + tc.config + " --seed 2 --out " +
                        out2).exit_code == 0);
    REQUIRE(run_command(cli_binary() + " check --config " + tc.config + " --seed 1 --out " +
                        out1b).exit_code == 0);
    const std::string a = read_text_file(out1 + "/conditions.csv");
    const std::string b = read_text_file(out2 + "/conditions.csv");
    const std::string a_again = read_text_file(out1b + "/conditions.csv");
    CHECK(a != b);        // different ensembles, different box, different margins
    CHECK(a == a_again);  // bit-identical rerun
}

TEST_CASE("the built-in benchmark runs its simulate stage end-to-end", "[cli]") {
    const auto dir = testsupport::make_temp_dir("cli_example");
    const std::string out = (dir / "out").string();
    const auto res = run_command(cli_binary() + " example51 simulate --out " + out);
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("== simulate ==") != std::string::npos);

    REQUIRE(fs::exists(fs::path(out) / "example51.json"));
    const Scenario sc = load_scenario((fs::path(out) / "example51.json").string());
    CHECK(sc.params.r1.constant == 5.0);
    CHECK(sc.initial_states.size() == 3);

    for (const char* name : {"traj_0.csv", "traj_1.csv", "traj_2.csv", "traj_0.svg"})
        REQUIRE(fs::exists(fs::path(out) / name));
}
