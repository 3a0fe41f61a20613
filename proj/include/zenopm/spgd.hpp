#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zenopm/plant.hpp"

namespace zenopm {

/// Controller constants. C, gamma and G_max have no analytic values; the
/// bundled scenario files carry values tuned against the default plant.
struct SpgdConfig {
    double perturb_volts = 0.2;      // C
    double gain_per_count = 0.0075;  // gamma
    double gain_max = 2.0;           // G_max
    double probe_integration_s = 0.2;
    std::uint64_t seed = 2;
};

struct SpgdIteration {
    int index = 0;
    Voltages v_before{};
    Voltages v_after{};
    Voltages delta{};  // the +-C perturbation of this iteration
    double f_plus = 0.0;
    double f_minus = 0.0;
    double gain = 0.0;  // after the clamp
};

/// Two-probe random-perturbation gradient climber over four squeezer
/// voltages. Each iteration measures the objective exactly twice, applies a
/// clamped multiplicative gain, and unwinds any voltage that leaves its
/// limits by a full 2pi-equivalent step.
class SpgdController {
public:
    SpgdController(SpgdConfig cfg, SqueezerBank bank, Voltages start);

    SpgdIteration step(const std::function<double(const Voltages&)>& objective);

    const Voltages& voltages() const { return v_; }
    int iterations() const { return iter_; }
    const std::vector<SpgdIteration>& history() const { return history_; }
    const SpgdConfig& config() const { return cfg_; }

private:
    SpgdConfig cfg_;
    SqueezerBank bank_;
    Voltages v_;
    std::mt19937_64 rng_;
    int iter_ = 0;
    std::vector<SpgdIteration> history_;
};

struct ProbeSample {
    double time_s = 0.0;
    long long counts = 0;
    Voltages v{};
    double transmission = 0.0;  // per-loop, plant truth
    StokesVector protected_stokes;
};

struct StabilizationTrace {
    std::vector<ProbeSample> probes;
    std::vector<long long> arrival_pulse;  // parallel to arrivals_ns
    std::vector<double> arrivals_ns;
    double probe_integration_s = 0.2;
    bool min_rate_warning = false;
};

struct RunOptions {
    double warmup_s = 0.0;          // settle time, probes not recorded
    bool collect_arrivals = false;  // time-tag the same photons the loop uses
    long long min_photons = 0;      // extend past duration until reached
    double hard_cap_s = 3600.0;     // safety stop for infeasible configs
};

/// Closed loop: every controller probe is a live counter reading of the
/// plant; the photons that stabilize the polarization are the photons that
/// are measured. No reference channel exists.
StabilizationTrace run_stabilized(Plant& plant, SpgdController& controller,
                                  double duration_s, const RunOptions& opts = {});

/// Counter trace at frozen voltages, same cadence as the closed loop.
StabilizationTrace run_open_loop(Plant& plant, const Voltages& v, double duration_s,
                                 double interval_s);

}  // namespace zenopm
