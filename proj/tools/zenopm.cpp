#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zenopm/kvconfig.hpp"
#include "zenopm/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zeno protective-measurement simulator and analysis harness"};
    app.require_subcommand(1);

    std::string scenario_path, manifest_path, expectations_path, out_dir = "out";
    std::uint64_t seed = 0;
    bool full = false;

    CLI::App* run = app.add_subcommand("run", "Run a scenario file and write its artifacts");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_flag("--full", full, "lab-scale averaging times");

    CLI::App* verify =
        app.add_subcommand("verify", "Check a manifest against a tolerance-tagged expectations file");
    verify->add_option("manifest", manifest_path, "manifest.json from a run")->required();
    verify->add_option("expectations", expectations_path, "expectations file")->required();

    std::string sweep_param = "loops";
    std::vector<double> sweep_values;
    double sweep_theta = 0.0;
    CLI::App* sweep = app.add_subcommand("sweep", "Sweep loops or theta for one polarization arm");
    sweep->add_option("scenario", scenario_path, "base scenario file")->required();
    sweep->add_option("--param", sweep_param, "loops or theta")->required();
    sweep->add_option("--values", sweep_values, "comma separated values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--theta", sweep_theta, "fixed theta for loop sweeps");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--seed", seed, "override the scenario seed");
    sweep->add_flag("--full", full, "lab-scale averaging times");

    CLI::App* plots = app.add_subcommand("emit-plots", "Write plot-ready CSVs from a manifest");
    plots->add_option("manifest", manifest_path, "manifest.json from a run")->required();
    plots->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (run->parsed()) {
            const zenopm::Scenario sc = zenopm::load_scenario(scenario_path);
            zenopm::RunScenarioOptions opts;
            opts.full = full;
            opts.seed_override = seed;
            const zenopm::Manifest m = zenopm::run_scenario(sc, out_dir, opts);
            std::cout << "wrote " << m.artifacts.size() + 1 << " artifacts to " << out_dir
                      << "\n";
            return kExitOk;
        }
        if (verify->parsed()) {
            const zenopm::Manifest m = zenopm::load_manifest(manifest_path);
            const zenopm::KvConfig exp = zenopm::KvConfig::parse_file(expectations_path);
            const zenopm::VerifyReport report = zenopm::verify_manifest(m, exp);
            for (const std::string& line : report.lines) std::cout << line << "\n";
            std::cout << (report.passed() ? "PASS" : "FAIL") << " (" << report.checked - report.failed
                      << "/" << report.checked << " checks)\n";
            return report.passed() ? kExitOk : kExitVerifyFailed;
        }
        if (sweep->parsed()) {
            const zenopm::Scenario sc = zenopm::load_scenario(scenario_path);
            zenopm::SweepRequest req;
            req.param = sweep_param;
            req.values = sweep_values;
            req.theta = sweep_theta;
            zenopm::RunScenarioOptions opts;
            opts.full = full;
            opts.seed_override = seed;
            zenopm::run_sweep(sc, req, out_dir, opts);
            std::cout << "sweep written to " << out_dir << "\n";
            return kExitOk;
        }
        if (plots->parsed()) {
            const zenopm::Manifest m = zenopm::load_manifest(manifest_path);
            const std::string dir =
                manifest_path.find('/') == std::string::npos
                    ? std::string(".")
                    : manifest_path.substr(0, manifest_path.find_last_of('/'));
            const std::vector<std::string> files = zenopm::emit_plots(m, dir, out_dir);
            std::cout << "wrote " << files.size() << " plot files to " << out_dir << "\n";
            return kExitOk;
        }
    } catch (const zenopm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}
