#include "zenopm/spgd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zenopm {

SpgdController::SpgdController(SpgdConfig cfg, SqueezerBank bank, Voltages start)
    : cfg_(cfg), bank_(bank), v_(start), rng_(cfg.seed) {
    bank_.validate();
    bank_.check_in_range(v_);
    if (!(cfg_.perturb_volts > 0.0) || !(cfg_.gain_per_count > 0.0) || !(cfg_.gain_max > 0.0)) {
        throw std::invalid_argument("SPGD constants must be positive");
    }
    if (!(cfg_.probe_integration_s > 0.0)) {
        throw std::invalid_argument("probe integration time must be positive");
    }
}

SpgdIteration SpgdController::step(const std::function<double(const Voltages&)>& objective) {
    SpgdIteration it;
    it.index = iter_;
    it.v_before = v_;

    // Random +-C perturbation from the controller's own stream. Taking one
    // engine word per channel keeps the draw sequence platform-independent.
    for (std::size_t j = 0; j < 4; ++j) {
        it.delta[j] = (rng_() & 1u) ? cfg_.perturb_volts : -cfg_.perturb_volts;
    }
    const Voltages& delta = it.delta;

    Voltages plus = v_, minus = v_;
    for (std::size_t j = 0; j < 4; ++j) {
        plus[j] += delta[j];
        minus[j] -= delta[j];
    }
    // Objective failures propagate before any state is touched.
    it.f_plus = objective(plus);
    it.f_minus = objective(minus);

    const double raw_gain = cfg_.gain_per_count * (it.f_plus - it.f_minus);
    it.gain = std::clamp(raw_gain, -cfg_.gain_max, cfg_.gain_max);

    for (std::size_t j = 0; j < 4; ++j) {
        double vj = v_[j] + it.gain * delta[j];
        const double wrap = bank_.wrap_volts(static_cast<int>(j));
        while (vj > bank_.v_max) vj -= wrap;
        while (vj < bank_.v_min) vj += wrap;
        v_[j] = vj;
    }

    it.v_after = v_;
    ++iter_;
    history_.push_back(it);
    return it;
}

namespace {

ProbeSample make_sample(const Plant& plant, const Voltages& v) {
    ProbeSample s;
    s.time_s = plant.time_s();
    s.v = v;
    s.transmission = plant.loop_transmission(v);
    s.protected_stokes = to_stokes(plant.protected_state(v));
    return s;
}

}  // namespace

StabilizationTrace run_stabilized(Plant& plant, SpgdController& controller,
                                  double duration_s, const RunOptions& opts) {
    if (!(duration_s >= 0.0)) throw std::invalid_argument("duration must be non-negative");
    StabilizationTrace trace;
    trace.probe_integration_s = controller.config().probe_integration_s;
    trace.min_rate_warning = !plant.meets_min_rate();

    const double t0 = plant.time_s();
    const double collect_from = t0 + opts.warmup_s;
    const double collect_until = collect_from + duration_s;
    long long photons = 0;

    while (true) {
        const bool collecting = plant.time_s() >= collect_from;
        if (collecting && plant.time_s() >= collect_until && photons >= opts.min_photons) break;
        if (plant.time_s() - t0 > opts.hard_cap_s) break;

        controller.step([&](const Voltages& v) -> double {
            ProbeSample sample = make_sample(plant, v);
            if (opts.collect_arrivals) {
                ArrivalBatch batch =
                    plant.record_interval(v, controller.config().probe_integration_s);
                sample.counts = batch.clicks;
                if (collecting) {
                    photons += static_cast<long long>(batch.times_ns.size());
                    trace.arrivals_ns.insert(trace.arrivals_ns.end(), batch.times_ns.begin(),
                                             batch.times_ns.end());
                    trace.arrival_pulse.insert(trace.arrival_pulse.end(),
                                               batch.pulse_index.begin(),
                                               batch.pulse_index.end());
                }
            } else {
                sample.counts =
                    plant.count_interval(v, controller.config().probe_integration_s);
            }
            if (collecting) trace.probes.push_back(sample);
            return static_cast<double>(sample.counts);
        });
    }
    return trace;
}

StabilizationTrace run_open_loop(Plant& plant, const Voltages& v, double duration_s,
                                 double interval_s) {
    if (!(interval_s > 0.0)) throw std::invalid_argument("interval must be positive");
    StabilizationTrace trace;
    trace.probe_integration_s = interval_s;
    trace.min_rate_warning = !plant.meets_min_rate();
    const double t_end = plant.time_s() + duration_s;
    while (plant.time_s() < t_end) {
        ProbeSample sample = make_sample(plant, v);
        sample.counts = plant.count_interval(v, interval_s);
        trace.probes.push_back(sample);
    }
    return trace;
}

}  // namespace zenopm
