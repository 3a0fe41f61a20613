#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "zenopm/kvconfig.hpp"
#include "zenopm/plant.hpp"
#include "zenopm/spgd.hpp"

namespace zenopm {

enum class ScenarioKind { PmTable, StabOnOff };

/// One declarative experiment: a plant, a controller and a measurement plan.
/// Re-running the same file with the same seed reproduces every output byte.
struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::PmTable;
    std::uint64_t seed = 1;

    int loops = 13;
    double tau_loop_ns = 0.483;
    double pulse_fwhm_ns = 2.5;
    std::vector<double> theta_list;

    DetectionConfig det;
    DriftConfig drift;
    SpgdConfig spgd;

    double warmup_s = 30.0;
    double collect_s = 150.0;       // per polarization arm
    double full_collect_s = 150.0;  // used with --full
    long long min_photons = 30000;
    double stab_duration_s = 600.0;  // StabOnOff traces
};

Scenario load_scenario(const std::string& path);

struct ManifestEntry {
    std::string path;  // relative to the manifest directory
    std::string fnv1a64;
};

struct Manifest {
    std::string scenario_name;
    std::string kind;
    std::uint64_t seed = 0;
    bool full = false;
    std::vector<ManifestEntry> artifacts;
    std::map<std::string, double> metrics;
};

struct RunScenarioOptions {
    bool full = false;                 // lab-scale averaging times
    std::uint64_t seed_override = 0;   // 0 keeps the scenario seed
    bool quiet = false;
};

Manifest run_scenario(const Scenario& scenario, const std::string& out_dir,
                      const RunScenarioOptions& opts = {});

void write_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);

struct VerifyReport {
    int checked = 0;
    int failed = 0;
    std::vector<std::string> lines;
    bool passed() const { return failed == 0 && checked > 0; }
};

/// Compare manifest metrics against tolerance-tagged expectations:
///   expect.some.metric = <target> <tolerance>
///   expect.other.metric = "<=" <bound>   (likewise ">=")
/// The expectations' "scenario" key must match the manifest.
VerifyReport verify_manifest(const Manifest& m, const KvConfig& expectations);

struct SweepRequest {
    std::string param;           // "loops" or "theta"
    std::vector<double> values;
    double theta = 0.0;          // fixed theta for loop sweeps (0 -> first arm)
};

Manifest run_sweep(const Scenario& base, const SweepRequest& req, const std::string& out_dir,
                   const RunScenarioOptions& opts = {});

/// Plot-ready CSV files regenerated from a manifest's stored artifacts.
std::vector<std::string> emit_plots(const Manifest& m, const std::string& manifest_dir,
                                    const std::string& out_dir);

std::uint64_t fnv1a64_bytes(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t value);

}  // namespace zenopm
