#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "zenopm/scenario.hpp"

using namespace zenopm;
namespace fs = std::filesystem;

namespace {

const char* kTinyScenario = R"(
name = tiny
kind = pm_table
seed = 99

[zeno]
loops = 2
tau_loop_ns = 0.483
pulse_fwhm_ns = 2.5
theta_list = 1.570796326795, 0.785398163397

[plant]
rep_rate_hz = 50000
drift_scale_rad_per_sqrt_s = 0.0447

[spgd]
perturb_volts = 0.2
gain_per_count = 0.0075
gain_max = 2.0

[run]
warmup_s = 2
collect_s = 2
min_photons = 1000
)";

fs::path fresh_dir(const char* tag) {
    const fs::path p = fs::temp_directory_path() / (std::string("zenopm_test_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Scenario tiny_scenario(const fs::path& dir) {
    const fs::path file = dir / "tiny.scn";
    std::ofstream(file) << kTinyScenario;
    return load_scenario(file.string());
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("sections prefix keys and comments vanish") {
        const KvConfig cfg = KvConfig::parse_string("a = 1 # tail\n[s]\nb = 2.5\nlist = 1, 2, 3\n");
        CHECK(cfg.get_int("a") == 1);
        CHECK(cfg.get_double("s.b") == 2.5);
        CHECK(cfg.get_double_list("s.list").size() == 3);
    }
    SUBCASE("malformed lines are reported with their location") {
        CHECK_THROWS_AS(KvConfig::parse_string("nonsense line\n"), ConfigError);
        CHECK_THROWS_AS(KvConfig::parse_string("[open\n"), ConfigError);
        CHECK_THROWS_AS(KvConfig::parse_string("a = 1\na = 2\n"), ConfigError);
        CHECK_THROWS_AS(KvConfig::parse_string("a = x\n").get_double("a"), ConfigError);
    }
    SUBCASE("unknown scenario kind is a config error") {
        const fs::path dir = fresh_dir("badkind");
        std::ofstream(dir / "bad.scn") << "name = bad\nkind = nonsense\n";
        CHECK_THROWS_AS(load_scenario((dir / "bad.scn").string()), ConfigError);
    }
}

TEST_CASE("checksums") {
    CHECK(fnv1a64_bytes("", 0) == 0xcbf29ce484222325ull);
    // reference value of the 64-bit FNV-1a test vector "a"
    CHECK(fnv1a64_bytes("a", 1) == 0xaf63dc4c8601ec8cull);
    CHECK(to_hex(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
}

TEST_CASE("a tiny scenario runs, verifies and reproduces itself") {
    const fs::path dir = fresh_dir("tiny");
    const Scenario sc = tiny_scenario(dir);

    RunScenarioOptions opts;
    opts.quiet = true;
    const Manifest m1 = run_scenario(sc, (dir / "out1").string(), opts);
    const Manifest m2 = run_scenario(sc, (dir / "out2").string(), opts);

    SUBCASE("artifacts exist and the manifest reloads") {
        CHECK(m1.artifacts.size() >= 7);  // 3 per arm + table
        for (const ManifestEntry& e : m1.artifacts) {
            CHECK(fs::exists(dir / "out1" / e.path));
        }
        const Manifest loaded = load_manifest((dir / "out1" / "manifest.json").string());
        CHECK(loaded.scenario_name == "tiny");
        CHECK(loaded.metrics.at("arm0.photons") >= 1000.0);
    }

    SUBCASE("equal seeds give identical artifact checksums") {
        REQUIRE(m1.artifacts.size() == m2.artifacts.size());
        for (std::size_t i = 0; i < m1.artifacts.size(); ++i) {
            CHECK(m1.artifacts[i].path == m2.artifacts[i].path);
            CHECK(m1.artifacts[i].fnv1a64 == m2.artifacts[i].fnv1a64);
        }
    }

    SUBCASE("a seed override changes the records") {
        RunScenarioOptions other = opts;
        other.seed_override = 777;
        const Manifest m3 = run_scenario(sc, (dir / "out3").string(), other);
        bool any_differ = false;
        for (std::size_t i = 0; i < m1.artifacts.size(); ++i) {
            if (m1.artifacts[i].fnv1a64 != m3.artifacts[i].fnv1a64) any_differ = true;
        }
        CHECK(any_differ);
    }

    SUBCASE("verification passes against generous expectations and fails on zero tolerance") {
        const KvConfig good = KvConfig::parse_string(
            "scenario = tiny\n[expect]\narm0.t_m_ns = 0.0 0.2\narm1.t_m_ns = 0.483 0.2\n"
            "arm0.photons = >= 1000\n");
        CHECK(verify_manifest(m1, good).passed());

        const KvConfig zero_tol =
            KvConfig::parse_string("scenario = tiny\n[expect]\narm0.t_m_ns = 0.0 0\n");
        CHECK_FALSE(verify_manifest(m1, zero_tol).passed());

        const KvConfig wrong_name =
            KvConfig::parse_string("scenario = other\n[expect]\narm0.t_m_ns = 0.0 1\n");
        const VerifyReport r = verify_manifest(m1, wrong_name);
        CHECK_FALSE(r.passed());
        REQUIRE(!r.lines.empty());
        CHECK(r.lines[0].find("other") != std::string::npos);

        const KvConfig missing =
            KvConfig::parse_string("scenario = tiny\n[expect]\nno.such.metric = 1 1\n");
        CHECK_FALSE(verify_manifest(m1, missing).passed());
    }

    SUBCASE("plots regenerate from the stored artifacts") {
        const std::vector<std::string> files =
            emit_plots(m1, (dir / "out1").string(), (dir / "plots").string());
        CHECK(files.size() == 2 * sc.theta_list.size() + 1);
        for (const std::string& f : files) CHECK(fs::exists(f));
    }
}

TEST_CASE("an empty arm list still yields a stabilization trace") {
    const fs::path dir = fresh_dir("noarms");
    std::ofstream(dir / "na.scn") << R"(
name = noarms
kind = pm_table
seed = 5

[zeno]
loops = 2

[run]
warmup_s = 1
collect_s = 2
)";
    RunScenarioOptions opts;
    opts.quiet = true;
    const Manifest m = run_scenario(load_scenario((dir / "na.scn").string()),
                                    (dir / "out").string(), opts);
    bool has_trace = false;
    bool has_pm = false;
    for (const ManifestEntry& e : m.artifacts) {
        if (e.path == "trace_on.csv") has_trace = true;
        if (e.path.find("_arrivals") != std::string::npos) has_pm = true;
    }
    CHECK(has_trace);
    CHECK_FALSE(has_pm);
    CHECK(m.metrics.count("stab_on.std_over_mean_10s") == 1);
}

TEST_CASE("sweeps cover the loop axis") {
    const fs::path dir = fresh_dir("sweep");
    const Scenario sc = tiny_scenario(dir);
    SweepRequest req;
    req.param = "loops";
    req.values = {1.0, 2.0, 3.0};
    req.theta = 0.785398163397;
    RunScenarioOptions opts;
    opts.quiet = true;
    const Manifest m = run_sweep(sc, req, (dir / "out").string(), opts);
    CHECK(m.metrics.at("sweep0.value") == 1.0);
    CHECK(m.metrics.at("sweep2.value") == 3.0);
    // mean delay grows with the loop count at fixed polarization
    const double d1 = m.metrics.at("sweep0.t_m_ns");
    const double d3 = m.metrics.at("sweep2.t_m_ns");
    CHECK(d3 > d1);
    CHECK(fs::exists(dir / "out" / "sweep.csv"));
}

TEST_CASE("bundled scenario files parse") {
    for (const char* name :
         {"table2_13loops.scn", "table2_8loops.scn", "fig3_stab_onoff.scn", "mini_smoke.scn"}) {
        const Scenario sc = load_scenario(std::string(ZENOPM_SCENARIO_DIR "/") + name);
        CHECK(!sc.name.empty());
        CHECK(sc.loops >= 1);
    }
}
