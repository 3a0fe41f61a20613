#include "zenopm/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "zenopm/analysis.hpp"

namespace zenopm {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// checksums

std::uint64_t fnv1a64_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open artifact for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

// ---------------------------------------------------------------------------
// scenario files

namespace {

ScenarioKind parse_kind(const std::string& raw) {
    if (raw == "pm_table") return ScenarioKind::PmTable;
    if (raw == "stab_onoff") return ScenarioKind::StabOnOff;
    throw ConfigError("unknown scenario kind: " + raw);
}

DriftKind parse_drift_kind(const std::string& raw) {
    if (raw == "random_walk") return DriftKind::RandomWalk;
    if (raw == "ornstein_uhlenbeck") return DriftKind::OrnsteinUhlenbeck;
    throw ConfigError("unknown drift kind: " + raw);
}

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    const KvConfig cfg = KvConfig::parse_file(path);
    Scenario s;
    s.name = cfg.get_string("name");
    s.kind = parse_kind(cfg.get_string("kind", "pm_table"));
    s.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));

    s.loops = static_cast<int>(cfg.get_int("zeno.loops", 13));
    s.tau_loop_ns = cfg.get_double("zeno.tau_loop_ns", 0.483);
    s.pulse_fwhm_ns = cfg.get_double("zeno.pulse_fwhm_ns", 2.5);
    if (cfg.has("zeno.theta_list")) s.theta_list = cfg.get_double_list("zeno.theta_list");

    s.det.rep_rate_hz = cfg.get_double("plant.rep_rate_hz", 34e3);
    s.det.photons_per_pulse = cfg.get_double("plant.photons_per_pulse", 1e9);
    s.det.loss_per_loop_db = cfg.get_double("plant.loss_per_loop_db", 7.0);
    s.det.detected_target_per_pulse = cfg.get_double("plant.detected_target_per_pulse", 0.1);
    s.det.dark_rate_hz = cfg.get_double("plant.dark_rate_hz", 25.0);
    s.det.spcm_jitter_sigma_ns = cfg.get_double("plant.spcm_jitter_sigma_ns", 0.0425);
    s.det.tdc_bin_ns = cfg.get_double("plant.tdc_bin_ns", 0.02);
    s.det.counter_integration_s = cfg.get_double("plant.counter_integration_s", 0.2);
    s.drift.kind = parse_drift_kind(cfg.get_string("plant.drift_kind", "random_walk"));
    s.drift.scale_rad_per_sqrt_s = cfg.get_double("plant.drift_scale_rad_per_sqrt_s", 0.0447);
    s.drift.step_rate_hz = cfg.get_double("plant.drift_step_rate_hz", 5.0);
    s.drift.ou_relaxation_s = cfg.get_double("plant.drift_ou_relaxation_s", 60.0);

    s.spgd.perturb_volts = cfg.get_double("spgd.perturb_volts", 0.2);
    s.spgd.gain_per_count = cfg.get_double("spgd.gain_per_count", 0.0075);
    s.spgd.gain_max = cfg.get_double("spgd.gain_max", 2.0);
    // the controller integrates on the plant's counter unless overridden
    s.spgd.probe_integration_s =
        cfg.get_double("spgd.probe_integration_s", s.det.counter_integration_s);

    s.warmup_s = cfg.get_double("run.warmup_s", 30.0);
    s.collect_s = cfg.get_double("run.collect_s", 150.0);
    s.full_collect_s = cfg.get_double("run.full_collect_s", 150.0);
    s.min_photons = cfg.get_int("run.min_photons", 30000);
    s.stab_duration_s = cfg.get_double("run.stab_duration_s", 600.0);
    return s;
}

// ---------------------------------------------------------------------------
// artifact writers

namespace {

class ArtifactWriter {
public:
    ArtifactWriter(fs::path dir, Manifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {}

    void write(const std::string& rel_path, const std::string& content) {
        const fs::path full = dir_ / rel_path;
        {
            std::ofstream out(full, std::ios::binary);
            if (!out) throw ConfigError("cannot write artifact: " + full.string());
            out << content;
        }
        manifest_.artifacts.push_back({rel_path, to_hex(fnv1a64_file(full.string()))});
    }

private:
    fs::path dir_;
    Manifest& manifest_;
};

std::string arrivals_csv(const StabilizationTrace& trace) {
    std::string out = "pulse_index,arrival_ns\n";
    for (std::size_t i = 0; i < trace.arrivals_ns.size(); ++i) {
        char line[64];
        std::snprintf(line, sizeof(line), "%lld,%.3f\n",
                      static_cast<long long>(trace.arrival_pulse[i]), trace.arrivals_ns[i]);
        out += line;
    }
    return out;
}

std::string trace_csv(const StabilizationTrace& trace) {
    std::string out = "time_s,counts,v1,v2,v3,v4,transmission\n";
    for (const ProbeSample& p : trace.probes) {
        char line[192];
        std::snprintf(line, sizeof(line), "%.3f,%lld,%.6f,%.6f,%.6f,%.6f,%.9f\n", p.time_s,
                      p.counts, p.v[0], p.v[1], p.v[2], p.v[3], p.transmission);
        out += line;
    }
    return out;
}

std::string stokes_csv(const StabilizationTrace& trace) {
    std::string out = "time_s,s1,s2,s3\n";
    for (const ProbeSample& p : trace.probes) {
        char line[128];
        std::snprintf(line, sizeof(line), "%.3f,%.9f,%.9f,%.9f\n", p.time_s, p.protected_stokes.s1,
                      p.protected_stokes.s2, p.protected_stokes.s3);
        out += line;
    }
    return out;
}

std::string histogram_csv(const ArrivalHistogram& h) {
    std::string out = "center_ns,value\n";
    for (std::size_t i = 0; i < h.size(); ++i) {
        char line[64];
        std::snprintf(line, sizeof(line), "%.3f,%.9g\n", h.center(i), h.count(i));
        out += line;
    }
    return out;
}

std::string fidelity_hist_csv(const std::vector<double>& fidelities) {
    // fixed 0.90..1.00 grid; everything below lands in the first bin
    constexpr int kBins = 100;
    constexpr double kLo = 0.90, kWidth = 0.001;
    std::vector<long long> counts(kBins, 0);
    for (double f : fidelities) {
        int k = static_cast<int>(std::floor((f - kLo) / kWidth));
        k = std::max(0, std::min(kBins - 1, k));
        ++counts[static_cast<std::size_t>(k)];
    }
    std::string out = "fidelity_lo,fidelity_hi,count\n";
    for (int i = 0; i < kBins; ++i) {
        char line[96];
        std::snprintf(line, sizeof(line), "%.3f,%.3f,%lld\n", kLo + i * kWidth,
                      kLo + (i + 1) * kWidth, counts[static_cast<std::size_t>(i)]);
        out += line;
    }
    return out;
}

json pm_result_json(const PmResult& r, double theta) {
    json j;
    j["theta_rad"] = theta;
    j["loops"] = r.loops;
    j["tau_loop_ns"] = r.tau_loop_ns;
    j["tau_max_ns"] = r.tau_max_ns;
    j["t_m_ns"] = r.t_m_ns;
    j["t_std_ns"] = r.t_std_ns;
    j["expectation"] = r.expectation;
    j["expectation_clipped"] = r.expectation_clipped;
    j["sigma_pm"] = r.sigma_pm;
    j["sigma_sm"] = r.sigma_sm;
    j["ratio"] = r.ratio;
    j["counts_used"] = r.counts_used;
    return j;
}

struct ArmOutput {
    StabilizationTrace trace;
    PmResult result;
    bool min_rate_warning = false;
};

ArmOutput run_pm_arm(const Scenario& sc, double theta, int loops, std::uint64_t plant_seed,
                     std::uint64_t spgd_seed, double collect_s) {
    PlantConfig pc;
    pc.prepared = PolarizationState(theta, 0.0);
    pc.loops = loops;
    pc.tau_loop_ns = sc.tau_loop_ns;
    pc.pulse_fwhm_ns = sc.pulse_fwhm_ns;
    pc.det = sc.det;
    pc.det.record_window_hi_ns = 0.0;  // derived from loops at construction
    pc.drift = sc.drift;
    pc.seed = plant_seed;
    Plant plant(pc);

    SpgdConfig spgd = sc.spgd;
    spgd.seed = spgd_seed;
    SpgdController controller(spgd, pc.bank, neutral_voltages(pc.bank));

    RunOptions opts;
    opts.warmup_s = sc.warmup_s;
    opts.collect_arrivals = true;
    opts.min_photons = sc.min_photons;

    ArmOutput out;
    out.trace = run_stabilized(plant, controller, collect_s, opts);
    out.min_rate_warning = out.trace.min_rate_warning;
    out.result =
        analyze_arrivals(out.trace.arrivals_ns, loops, sc.tau_loop_ns, sc.det.tdc_bin_ns);
    return out;
}

void add_pm_metrics(Manifest& m, const std::string& prefix, const PmResult& r, double theta) {
    m.metrics[prefix + ".theta_rad"] = theta;
    m.metrics[prefix + ".t_m_ns"] = r.t_m_ns;
    m.metrics[prefix + ".t_std_ns"] = r.t_std_ns;
    m.metrics[prefix + ".expectation"] = r.expectation;
    m.metrics[prefix + ".sigma_pm"] = r.sigma_pm;
    m.metrics[prefix + ".sigma_sm"] = r.sigma_sm;
    m.metrics[prefix + ".ratio"] = r.ratio;
    m.metrics[prefix + ".photons"] = static_cast<double>(r.counts_used);
}

std::string table_csv_header() {
    return "arm,theta_rad,loops,photons,t_m_ns,t_std_ns,expectation,sigma_pm,sigma_sm,ratio\n";
}

std::string table_csv_row(int arm, double theta, const PmResult& r) {
    char line[256];
    std::snprintf(line, sizeof(line), "%d,%.10f,%d,%lld,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", arm,
                  theta, r.loops, r.counts_used, r.t_m_ns, r.t_std_ns, r.expectation, r.sigma_pm,
                  r.sigma_sm, r.ratio);
    return line;
}

std::vector<double> probe_counts(const StabilizationTrace& trace) {
    std::vector<double> out;
    out.reserve(trace.probes.size());
    for (const ProbeSample& p : trace.probes) out.push_back(static_cast<double>(p.counts));
    return out;
}

double ten_second_std_over_mean(const StabilizationTrace& trace) {
    const std::size_t per_bin =
        std::max<std::size_t>(1, static_cast<std::size_t>(10.0 / trace.probe_integration_s));
    const std::vector<double> counts = probe_counts(trace);
    if (counts.size() < 2 * per_bin) return std_over_mean(counts);  // trace shorter than two bins
    return std_over_mean(bin_series(counts, per_bin));
}

}  // namespace

// ---------------------------------------------------------------------------
// scenario execution

Manifest run_scenario(const Scenario& scenario, const std::string& out_dir,
                      const RunScenarioOptions& opts) {
    fs::create_directories(out_dir);
    Manifest m;
    m.scenario_name = scenario.name;
    m.kind = scenario.kind == ScenarioKind::PmTable ? "pm_table" : "stab_onoff";
    m.seed = opts.seed_override != 0 ? opts.seed_override : scenario.seed;
    m.full = opts.full;
    ArtifactWriter writer(out_dir, m);

    const double collect_s = opts.full ? scenario.full_collect_s : scenario.collect_s;
    bool min_rate_warning = false;

    if (scenario.kind == ScenarioKind::PmTable) {
        std::string table = table_csv_header();
        for (std::size_t arm = 0; arm < scenario.theta_list.size(); ++arm) {
            const double theta = scenario.theta_list[arm];
            const std::uint64_t plant_seed = m.seed + 1000 + 10 * arm;
            const ArmOutput out = run_pm_arm(scenario, theta, scenario.loops, plant_seed,
                                             plant_seed + 1, collect_s);
            min_rate_warning = min_rate_warning || out.min_rate_warning;

            const std::string tag = "arm" + std::to_string(arm);
            writer.write(tag + "_arrivals.csv", arrivals_csv(out.trace));
            const ArrivalHistogram hist =
                ArrivalHistogram::from_samples(out.trace.arrivals_ns, scenario.det.tdc_bin_ns);
            writer.write(tag + "_hist.csv", histogram_csv(hist.windowed().normalized()));
            writer.write(tag + "_result.json", pm_result_json(out.result, theta).dump(2) + "\n");
            table += table_csv_row(static_cast<int>(arm), theta, out.result);
            add_pm_metrics(m, tag, out.result, theta);
            if (!opts.quiet) {
                std::cerr << scenario.name << " " << tag << ": t_m=" << out.result.t_m_ns
                          << " ns, sigma_pm=" << out.result.sigma_pm << "\n";
            }
        }
        writer.write("table.csv", table);
        if (scenario.theta_list.empty()) {
            // nothing to measure; still produce the stabilization trace
            PlantConfig pc;
            pc.prepared = PolarizationState::diagonal();
            pc.loops = scenario.loops;
            pc.tau_loop_ns = scenario.tau_loop_ns;
            pc.pulse_fwhm_ns = scenario.pulse_fwhm_ns;
            pc.det = scenario.det;
            pc.det.record_window_hi_ns = 0.0;
            pc.drift = scenario.drift;
            pc.seed = m.seed + 1000;
            Plant plant(pc);
            SpgdConfig spgd = scenario.spgd;
            spgd.seed = pc.seed + 1;
            SpgdController controller(spgd, pc.bank, neutral_voltages(pc.bank));
            RunOptions ro;
            ro.warmup_s = scenario.warmup_s;
            StabilizationTrace trace = run_stabilized(plant, controller, collect_s, ro);
            min_rate_warning = min_rate_warning || trace.min_rate_warning;
            writer.write("trace_on.csv", trace_csv(trace));
            m.metrics["stab_on.std_over_mean_10s"] = ten_second_std_over_mean(trace);
        }
    } else {
        const double theta =
            scenario.theta_list.empty() ? std::numbers::pi / 4.0 : scenario.theta_list[0];
        PlantConfig pc;
        pc.prepared = PolarizationState(theta, 0.0);
        pc.loops = scenario.loops;
        pc.tau_loop_ns = scenario.tau_loop_ns;
        pc.pulse_fwhm_ns = scenario.pulse_fwhm_ns;
        pc.det = scenario.det;
        pc.det.record_window_hi_ns = 0.0;
        pc.drift = scenario.drift;
        pc.seed = m.seed + 2000;

        // closed loop
        Plant plant_on(pc);
        SpgdConfig spgd = scenario.spgd;
        spgd.seed = pc.seed + 1;
        SpgdController controller(spgd, pc.bank, neutral_voltages(pc.bank));
        RunOptions ro;
        ro.warmup_s = scenario.warmup_s;
        StabilizationTrace on = run_stabilized(plant_on, controller, scenario.stab_duration_s, ro);
        min_rate_warning = min_rate_warning || on.min_rate_warning;

        // frozen voltages, fresh plant, same drift statistics
        PlantConfig pc_off = pc;
        pc_off.seed = pc.seed + 5000;
        Plant plant_off(pc_off);
        StabilizationTrace off = run_open_loop(plant_off, neutral_voltages(pc.bank),
                                               scenario.stab_duration_s,
                                               scenario.spgd.probe_integration_s);

        writer.write("trace_on.csv", trace_csv(on));
        writer.write("trace_off.csv", trace_csv(off));
        writer.write("stokes_on.csv", stokes_csv(on));

        std::vector<StokesVector> samples;
        samples.reserve(on.probes.size());
        for (const ProbeSample& p : on.probes) samples.push_back(p.protected_stokes);
        const FidelityStats fid = fidelity_stats(samples);
        writer.write("fidelity_hist.csv", fidelity_hist_csv(fid.fidelities));

        // same statistic against the prepared state rather than the sample mean
        const StokesVector target = to_stokes(pc.prepared);
        double mean_vs_target = 0.0;
        double n99 = 0.0;
        for (const StokesVector& s : samples) {
            const double f = fidelity(target, s);
            mean_vs_target += f;
            if (f >= 0.99) n99 += 1.0;
        }
        mean_vs_target /= static_cast<double>(samples.size());

        const double on_svm = ten_second_std_over_mean(on);
        const double off_svm = ten_second_std_over_mean(off);
        m.metrics["stab_on.std_over_mean_10s"] = on_svm;
        m.metrics["stab_off.std_over_mean_10s"] = off_svm;
        m.metrics["stab.off_over_on"] = off_svm / on_svm;
        m.metrics["fid.mean"] = fid.mean_fidelity;
        m.metrics["fid.frac_ge_099"] = fid.frac_ge_099;
        m.metrics["fid.frac_ge_098"] = fid.frac_ge_098;
        m.metrics["fid.mean_vs_target"] = mean_vs_target;
        m.metrics["fid.frac_ge_099_vs_target"] = n99 / static_cast<double>(samples.size());
        if (!opts.quiet) {
            std::cerr << scenario.name << ": on=" << on_svm << " off=" << off_svm
                      << " fid=" << fid.mean_fidelity << "\n";
        }
    }

    m.metrics["warnings.min_rate"] = min_rate_warning ? 1.0 : 0.0;
    if (min_rate_warning && !opts.quiet) {
        std::cerr << scenario.name
                  << ": warning: peak rate below 500 counts/s, stabilization may not hold\n";
    }

    write_manifest(m, (fs::path(out_dir) / "manifest.json").string());
    return m;
}

Manifest run_sweep(const Scenario& base, const SweepRequest& req, const std::string& out_dir,
                   const RunScenarioOptions& opts) {
    if (req.param != "loops" && req.param != "theta") {
        throw ConfigError("sweep parameter must be loops or theta");
    }
    if (req.values.empty()) throw ConfigError("sweep has no values");
    fs::create_directories(out_dir);

    Manifest m;
    m.scenario_name = base.name + "_sweep_" + req.param;
    m.kind = "sweep";
    m.seed = opts.seed_override != 0 ? opts.seed_override : base.seed;
    m.full = opts.full;
    ArtifactWriter writer(out_dir, m);

    const double collect_s = opts.full ? base.full_collect_s : base.collect_s;
    const double theta_fixed = req.theta != 0.0
                                   ? req.theta
                                   : (base.theta_list.empty() ? std::numbers::pi / 4.0
                                                              : base.theta_list[0]);

    std::string table = "param,value," + table_csv_header().substr(std::string("arm,").size());
    for (std::size_t i = 0; i < req.values.size(); ++i) {
        const double value = req.values[i];
        const int loops = req.param == "loops" ? static_cast<int>(std::llround(value)) : base.loops;
        const double theta = req.param == "theta" ? value : theta_fixed;
        const std::uint64_t plant_seed = m.seed + 3000 + 10 * i;
        const ArmOutput out =
            run_pm_arm(base, theta, loops, plant_seed, plant_seed + 1, collect_s);
        const std::string row = table_csv_row(static_cast<int>(i), theta, out.result);
        table += req.param + "," + format_double("%.6f", value) + "," +
                 row.substr(row.find(',') + 1);
        add_pm_metrics(m, "sweep" + std::to_string(i), out.result, theta);
        m.metrics["sweep" + std::to_string(i) + ".value"] = value;
        if (!opts.quiet) {
            std::cerr << m.scenario_name << " " << req.param << "=" << value
                      << ": t_m=" << out.result.t_m_ns << " ns\n";
        }
    }
    writer.write("sweep.csv", table);
    write_manifest(m, (fs::path(out_dir) / "manifest.json").string());
    return m;
}

// ---------------------------------------------------------------------------
// manifest io

void write_manifest(const Manifest& m, const std::string& path) {
    json j;
    j["scenario"] = m.scenario_name;
    j["kind"] = m.kind;
    j["seed"] = m.seed;
    j["full"] = m.full;
    json arts = json::array();
    for (const ManifestEntry& e : m.artifacts) {
        arts.push_back({{"path", e.path}, {"fnv1a64", e.fnv1a64}});
    }
    j["artifacts"] = arts;
    j["metrics"] = m.metrics;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open manifest: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed manifest " + path + ": " + e.what());
    }
    Manifest m;
    try {
        m.scenario_name = j.at("scenario").get<std::string>();
        m.kind = j.value("kind", "pm_table");
        m.seed = j.value("seed", 0ull);
        m.full = j.value("full", false);
        for (const json& a : j.at("artifacts")) {
            m.artifacts.push_back({a.at("path").get<std::string>(),
                                   a.at("fnv1a64").get<std::string>()});
        }
        for (auto it = j.at("metrics").begin(); it != j.at("metrics").end(); ++it) {
            m.metrics[it.key()] = it.value().get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError("manifest " + path + " is missing fields: " + e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------
// verification

VerifyReport verify_manifest(const Manifest& m, const KvConfig& expectations) {
    VerifyReport report;
    const std::string expected_name = expectations.get_string("scenario");
    if (expected_name != m.scenario_name) {
        report.checked = 1;
        report.failed = 1;
        report.lines.push_back("[FAIL] scenario name: manifest has '" + m.scenario_name +
                               "', expectations are for '" + expected_name + "'");
        return report;
    }

    for (const std::string& key : expectations.keys_with_prefix("expect.")) {
        const std::string metric = key.substr(std::string("expect.").size());
        ++report.checked;
        auto it = m.metrics.find(metric);
        if (it == m.metrics.end()) {
            ++report.failed;
            report.lines.push_back("[FAIL] " + metric + ": missing from manifest");
            continue;
        }
        const double value = it->second;

        std::istringstream spec(expectations.get_string(key));
        std::string first;
        spec >> first;
        bool ok = false;
        std::string detail;
        if (first == "<=" || first == ">=") {
            double bound = 0.0;
            if (!(spec >> bound)) {
                throw ConfigError("expectation " + key + " needs a bound");
            }
            ok = first == "<=" ? value <= bound : value >= bound;
            detail = format_double("%.6g", value) + " " + first + " " + format_double("%.6g", bound);
        } else {
            char* end = nullptr;
            const double target = std::strtod(first.c_str(), &end);
            double tol = 0.0;
            if (end == first.c_str() || *end != '\0' || !(spec >> tol)) {
                throw ConfigError("expectation " + key + " needs 'target tolerance' or '<=/>= bound'");
            }
            ok = std::abs(value - target) <= tol;
            detail = format_double("%.6g", value) + " vs " + format_double("%.6g", target) +
                     " +- " + format_double("%.6g", tol);
        }
        if (!ok) ++report.failed;
        report.lines.push_back(std::string(ok ? "[ ok ] " : "[FAIL] ") + metric + ": " + detail);
    }
    return report;
}

// ---------------------------------------------------------------------------
// plot emission

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open artifact: " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty artifact: " + path);
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string counts_10s_csv(const CsvTable& trace) {
    double interval_s = 0.2;
    if (trace.rows.size() >= 2 && trace.rows[1].at(0) > trace.rows[0].at(0)) {
        interval_s = trace.rows[1].at(0) - trace.rows[0].at(0);
    }
    const std::size_t per_bin =
        std::max<std::size_t>(1, static_cast<std::size_t>(10.0 / interval_s));
    std::vector<double> counts;
    counts.reserve(trace.rows.size());
    for (const auto& r : trace.rows) counts.push_back(r.at(1));
    const std::vector<double> binned = bin_series(counts, per_bin);
    std::string out = "bin_start_s,counts_10s\n";
    for (std::size_t i = 0; i < binned.size(); ++i) {
        char line[64];
        std::snprintf(line, sizeof(line), "%.1f,%.0f\n", 10.0 * static_cast<double>(i), binned[i]);
        out += line;
    }
    return out;
}

}  // namespace

std::vector<std::string> emit_plots(const Manifest& m, const std::string& manifest_dir,
                                    const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const fs::path p = fs::path(out_dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw ConfigError("cannot write plot file: " + p.string());
        out << content;
        written.push_back(p.string());
    };

    if (m.kind == "stab_onoff") {
        const CsvTable off = read_csv((fs::path(manifest_dir) / "trace_off.csv").string());
        const CsvTable on = read_csv((fs::path(manifest_dir) / "trace_on.csv").string());
        emit("fig3a_counts_off.csv", counts_10s_csv(off));
        emit("fig3b_counts_on.csv", counts_10s_csv(on));
        const CsvTable stokes = read_csv((fs::path(manifest_dir) / "stokes_on.csv").string());
        std::vector<StokesVector> samples;
        samples.reserve(stokes.rows.size());
        for (const auto& r : stokes.rows) samples.push_back({r.at(1), r.at(2), r.at(3)});
        emit("fig4_fidelity_hist.csv", fidelity_hist_csv(fidelity_stats(samples).fidelities));
        return written;
    }

    // pm_table / sweep: histograms per arm
    std::string means = "arm,t_m_ns\n";
    for (const ManifestEntry& e : m.artifacts) {
        const std::string suffix = "_arrivals.csv";
        if (e.path.size() <= suffix.size() ||
            e.path.compare(e.path.size() - suffix.size(), suffix.size(), suffix) != 0) {
            continue;
        }
        const std::string arm = e.path.substr(0, e.path.size() - suffix.size());
        const CsvTable tab = read_csv((fs::path(manifest_dir) / e.path).string());
        std::vector<double> times;
        times.reserve(tab.rows.size());
        for (const auto& r : tab.rows) times.push_back(r.at(1));
        const ArrivalHistogram raw = ArrivalHistogram::from_samples(times, 0.02);
        emit("fig5_hist_" + arm + ".csv", histogram_csv(raw.rebinned(10)));
        const ArrivalHistogram win = raw.windowed().normalized();
        emit("fig6_prob_" + arm + ".csv", histogram_csv(win));
        char line[64];
        std::snprintf(line, sizeof(line), "%s,%.4f\n", arm.c_str(), win.moments().mean_ns);
        means += line;
    }
    emit("fig6_means.csv", means);
    return written;
}

}  // namespace zenopm
