#include "zenopm/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zenopm {

namespace {
constexpr double kPi = std::numbers::pi;
}

SqueezerBank SqueezerBank::standard() {
    SqueezerBank b;
    const StokesVector s1{1.0, 0.0, 0.0};
    const StokesVector s2{0.0, 1.0, 0.0};
    for (int j = 0; j < 4; ++j) {
        b.squeezer[static_cast<std::size_t>(j)] = {(j % 2 == 0) ? s1 : s2, kPi / 10.0, 0.0};
    }
    return b;
}

PolRotation SqueezerBank::rotation(int j, double volts) const {
    const Squeezer& s = squeezer.at(static_cast<std::size_t>(j));
    return {s.axis, s.gain_rad_per_volt * volts + s.offset_rad};
}

double SqueezerBank::wrap_volts(int j) const {
    return 2.0 * kPi / squeezer.at(static_cast<std::size_t>(j)).gain_rad_per_volt;
}

void SqueezerBank::validate() const {
    if (!(v_max > v_min)) throw std::invalid_argument("squeezer voltage limits are inverted");
    for (int j = 0; j < 4; ++j) {
        const Squeezer& s = squeezer[static_cast<std::size_t>(j)];
        if (!(s.gain_rad_per_volt > 0.0)) {
            throw std::invalid_argument("squeezer gain must be positive");
        }
        if (std::abs(s.axis.norm() - 1.0) > 1e-9) {
            throw std::invalid_argument("squeezer axis must be a unit vector");
        }
        if (wrap_volts(j) > v_max - v_min) {
            throw std::invalid_argument("voltage span must cover a full 2pi turn");
        }
    }
}

void SqueezerBank::check_in_range(const Voltages& v) const {
    for (int j = 0; j < 4; ++j) {
        const double vj = v[static_cast<std::size_t>(j)];
        if (!(vj >= v_min && vj <= v_max)) {
            throw std::out_of_range("squeezer voltage outside its limits");
        }
    }
}

Voltages neutral_voltages(const SqueezerBank& bank) {
    Voltages v{};
    for (int j = 0; j < 4; ++j) {
        const Squeezer& s = bank.squeezer[static_cast<std::size_t>(j)];
        // smallest whole number of turns that lands inside the limits
        const double turn = 2.0 * kPi / s.gain_rad_per_volt;
        double volts = (-s.offset_rad / s.gain_rad_per_volt);
        while (volts < bank.v_min) volts += turn;
        while (volts > bank.v_max) volts -= turn;
        // start away from the lower rail when possible
        if (volts + turn <= bank.v_max && volts < bank.v_min + turn) volts += turn;
        v[static_cast<std::size_t>(j)] = volts;
    }
    return v;
}

Plant::Plant(PlantConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.bank.validate();
    if (cfg_.loops < 1) throw std::invalid_argument("loop count must be >= 1");
    if (!(cfg_.tau_loop_ns > 0.0)) throw std::invalid_argument("tau_loop must be positive");
    const DetectionConfig& d = cfg_.det;
    if (!(d.rep_rate_hz > 0.0) || d.dark_rate_hz < 0.0 || d.photons_per_pulse <= 0.0 ||
        d.detected_target_per_pulse <= 0.0 || d.detected_target_per_pulse > 0.1) {
        throw std::invalid_argument("detection rates out of range");
    }
    pulse_ = PulseShape::from_intensity_fwhm_ns(cfg_.pulse_fwhm_ns);
    tau_tilde_ = pulse_.tau_tilde(cfg_.tau_loop_ns);
    eta_loop_ = std::pow(10.0, -d.loss_per_loop_db / 10.0);
    const double mu_after_loss = d.photons_per_pulse * std::pow(eta_loop_, cfg_.loops);
    attenuation_ = std::min(1.0, d.detected_target_per_pulse / mu_after_loss);
    mu_det_peak_ = mu_after_loss * attenuation_;
    if (cfg_.det.record_window_hi_ns == 0.0) {
        cfg_.det.record_window_hi_ns = cfg_.loops * cfg_.tau_loop_ns + 5.0;
    }
}

PolarizationState Plant::chain_state(const Voltages& v) const {
    PolarizationState s = apply_rotation(cfg_.epc, cfg_.prepared);
    s = apply_rotation(PolRotation::about_s1(drift_phase_), s);
    for (int j = 0; j < 4; ++j) {
        s = apply_rotation(cfg_.bank.rotation(j, v[static_cast<std::size_t>(j)]), s);
    }
    return s;
}

double Plant::polarization_overlap2(const Voltages& v) const {
    cfg_.bank.check_in_range(v);
    return std::norm(projector_overlap(cfg_.prepared, chain_state(v)));
}

double Plant::loop_transmission(const Voltages& v) const {
    return eta_loop_ * polarization_overlap2(v);
}

PolarizationState Plant::protected_state(const Voltages& v) const {
    cfg_.bank.check_in_range(v);
    return chain_state(v);
}

PolarizationState Plant::projection_state(const Voltages& v) const {
    cfg_.bank.check_in_range(v);
    PolarizationState s = cfg_.prepared;
    for (int j = 3; j >= 0; --j) {
        s = apply_rotation(cfg_.bank.rotation(j, v[static_cast<std::size_t>(j)]).inverse(), s);
    }
    s = apply_rotation(PolRotation::about_s1(drift_phase_).inverse(), s);
    s = apply_rotation(cfg_.epc.inverse(), s);
    return s;
}

double Plant::count_mean(const Voltages& v, double seconds) const {
    const double per_pulse = mu_det_peak_ * std::pow(polarization_overlap2(v), cfg_.loops);
    return cfg_.det.rep_rate_hz * seconds * per_pulse + cfg_.det.dark_rate_hz * seconds;
}

double Plant::detected_rate_at_peak_hz() const {
    return cfg_.det.rep_rate_hz * mu_det_peak_;
}

bool Plant::meets_min_rate(double min_cps) const {
    return detected_rate_at_peak_hz() >= min_cps;
}

void Plant::advance(double seconds) {
    if (seconds < 0.0) throw std::invalid_argument("cannot advance time backwards");
    if (seconds == 0.0) return;
    const DriftConfig& d = cfg_.drift;
    const int n = std::max(1, static_cast<int>(std::llround(seconds * d.step_rate_hz)));
    const double dt = seconds / n;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        if (d.kind == DriftKind::RandomWalk) {
            drift_phase_ += d.scale_rad_per_sqrt_s * std::sqrt(dt) * gauss(rng_);
        } else {
            const double a = std::exp(-dt / d.ou_relaxation_s);
            const double sigma_st = d.scale_rad_per_sqrt_s * std::sqrt(d.ou_relaxation_s / 2.0);
            drift_phase_ = a * drift_phase_ + sigma_st * std::sqrt(1.0 - a * a) * gauss(rng_);
        }
    }
    time_s_ += seconds;
}

long long Plant::count_interval(const Voltages& v, double seconds) {
    if (!(seconds > 0.0)) throw std::invalid_argument("integration time must be positive");
    const double mean = count_mean(v, seconds);
    long long c = 0;
    if (mean > 0.0) {
        std::poisson_distribution<long long> poisson(mean);
        c = poisson(rng_);
    }
    advance(seconds);
    return c;
}

ArrivalBatch Plant::record_interval(const Voltages& v, double seconds) {
    if (!(seconds > 0.0)) throw std::invalid_argument("integration time must be positive");
    const DetectionConfig& d = cfg_.det;
    ArrivalBatch batch;

    const long long n_pulses =
        std::max<long long>(1, static_cast<long long>(d.rep_rate_hz * seconds));
    const long long pulse0 = static_cast<long long>(time_s_ * d.rep_rate_hz);

    const double signal_mean = cfg_.det.rep_rate_hz * seconds * mu_det_peak_ *
                               std::pow(polarization_overlap2(v), cfg_.loops);
    long long n_signal = 0;
    if (signal_mean > 0.0) {
        std::poisson_distribution<long long> poisson(signal_mean);
        n_signal = poisson(rng_);
    }

    if (n_signal > 0) {
        // Arrival shape from the exact pointer propagation of the state the
        // loop actually projects onto, so residual controller error shows up
        // in the record.
        const ZenoConfig zc{tau_tilde_, cfg_.loops, projection_state(v)};
        const std::vector<IntensityComponent> comps = intensity_mixture(propagate(zc));
        std::vector<double> cdf;
        cdf.reserve(comps.size());
        double acc = 0.0;
        for (const IntensityComponent& c : comps) {
            acc += c.mass;
            cdf.push_back(acc);
        }
        const double origin_shift = 0.5 * cfg_.loops * tau_tilde_;  // V mean arrival -> 0
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_int_distribution<long long> slot(0, n_pulses - 1);
        batch.times_ns.reserve(static_cast<std::size_t>(n_signal));
        batch.pulse_index.reserve(static_cast<std::size_t>(n_signal));
        for (long long i = 0; i < n_signal; ++i) {
            const double u = uni(rng_) * acc;
            const std::size_t k = static_cast<std::size_t>(
                std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            const double t_tilde =
                comps[std::min(k, comps.size() - 1)].center + gauss(rng_) / std::numbers::sqrt2;
            double t_ns = pulse_.to_ns(t_tilde + origin_shift);
            if (d.spcm_jitter_sigma_ns > 0.0) t_ns += d.spcm_jitter_sigma_ns * gauss(rng_);
            t_ns = std::llround(t_ns / d.tdc_bin_ns) * d.tdc_bin_ns;
            batch.pulse_index.push_back(pulse0 + slot(rng_));
            batch.times_ns.push_back(t_ns);
        }
    }

    long long n_dark = 0;
    if (d.dark_rate_hz > 0.0) {
        std::poisson_distribution<long long> poisson(d.dark_rate_hz * seconds);
        n_dark = poisson(rng_);
    }
    if (n_dark > 0) {
        // Dark clicks are uncorrelated with the pulse train; only the slice
        // of the repetition period inside the capture window is time-tagged.
        const double window_ns = d.record_window_hi_ns - d.record_window_lo_ns;
        const double p_window = std::min(1.0, window_ns * 1e-9 * d.rep_rate_hz);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::uniform_int_distribution<long long> slot(0, n_pulses - 1);
        for (long long i = 0; i < n_dark; ++i) {
            if (uni(rng_) < p_window) {
                const double t_ns = d.record_window_lo_ns + uni(rng_) * window_ns;
                batch.pulse_index.push_back(pulse0 + slot(rng_));
                batch.times_ns.push_back(std::llround(t_ns / d.tdc_bin_ns) * d.tdc_bin_ns);
            }
        }
    }

    // time-ordered record, the way a tagger streams it
    std::vector<std::size_t> order(batch.times_ns.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (batch.pulse_index[a] != batch.pulse_index[b]) {
            return batch.pulse_index[a] < batch.pulse_index[b];
        }
        return batch.times_ns[a] < batch.times_ns[b];
    });
    ArrivalBatch sorted;
    sorted.clicks = n_signal + n_dark;
    sorted.pulse_index.reserve(order.size());
    sorted.times_ns.reserve(order.size());
    for (std::size_t i : order) {
        sorted.pulse_index.push_back(batch.pulse_index[i]);
        sorted.times_ns.push_back(batch.times_ns[i]);
    }

    advance(seconds);
    return sorted;
}

std::vector<double> Plant::arrival_record(const Voltages& v, double seconds) {
    return record_interval(v, seconds).times_ns;
}

}  // namespace zenopm
