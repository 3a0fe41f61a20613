#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "zenopm/polarization.hpp"
#include "zenopm/zeno.hpp"

namespace zenopm {

using Voltages = std::array<double, 4>;

struct Squeezer {
    StokesVector axis{1.0, 0.0, 0.0};
    double gain_rad_per_volt = 0.0;  // retardance slope
    double offset_rad = 0.0;
};

/// Four-squeezer polarization controller. Axes alternate between two
/// non-parallel Poincare axes so the bank spans full SU(2) control.
struct SqueezerBank {
    std::array<Squeezer, 4> squeezer;
    double v_min = 0.0;
    double v_max = 150.0;

    /// S1, S2, S1, S2 axes at pi rad per 10 V, zero offset, 0..150 V.
    static SqueezerBank standard();

    PolRotation rotation(int j, double volts) const;
    double wrap_volts(int j) const;  // voltage step worth one full turn
    void validate() const;
    void check_in_range(const Voltages& v) const;
};

enum class DriftKind { RandomWalk, OrnsteinUhlenbeck };

/// Environmentally driven birefringent phase of the delay fiber, modeled as
/// a retardance about S1. The magnitude is not pinned by any measurement;
/// the default random-walk scale is chosen so an unstabilized trace drifts
/// visibly over tens to hundreds of seconds while a tuned controller can
/// still hold the count spread near 1%.
struct DriftConfig {
    DriftKind kind = DriftKind::RandomWalk;
    double step_rate_hz = 5.0;
    double scale_rad_per_sqrt_s = 0.0447;
    double ou_relaxation_s = 60.0;
};

struct DetectionConfig {
    double photons_per_pulse = 1e9;
    double loss_per_loop_db = 7.0;
    double rep_rate_hz = 34e3;
    double detected_target_per_pulse = 0.1;  // attenuator ceiling
    double spcm_jitter_sigma_ns = 0.0425;
    double tdc_bin_ns = 0.02;
    double dark_rate_hz = 25.0;
    double counter_integration_s = 0.2;
    // TDC capture window around the pulse; 0 for the upper edge means
    // loops * tau_loop + 5 ns, set at construction.
    double record_window_lo_ns = -5.0;
    double record_window_hi_ns = 0.0;
};

struct PlantConfig {
    PolarizationState prepared;  // state entering the delay fiber each loop
    int loops = 13;
    double tau_loop_ns = 0.483;
    double pulse_fwhm_ns = 2.5;
    SqueezerBank bank = SqueezerBank::standard();
    DriftConfig drift;
    DetectionConfig det;
    PolRotation epc = PolRotation::identity();  // static prep-side misalignment
    std::uint64_t seed = 1;
};

struct ArrivalBatch {
    std::vector<long long> pulse_index;  // parallel to times_ns
    std::vector<double> times_ns;        // TDC-quantized, in the capture window
    long long clicks = 0;                // every detector click, tagged or not
};

/// Hidden ground truth of the loop apparatus: squeezers, drifting delay
/// fiber, per-loop loss and photon counting. One instance owns one logical
/// timeline; identical seeds and call sequences reproduce identical records.
class Plant {
public:
    explicit Plant(PlantConfig cfg);

    /// |<psi0| R_ps(V) R_drift(t) R_epc |psi0>|^2 at the current drift phase.
    double polarization_overlap2(const Voltages& v) const;

    /// Per-loop power transmission: eta_loop * polarization_overlap2.
    double loop_transmission(const Voltages& v) const;

    /// Poisson counter reading over an integration interval. Advances time.
    long long count_interval(const Voltages& v, double seconds);

    /// Counter plus time-tagged arrivals over an interval. Advances time.
    ArrivalBatch record_interval(const Voltages& v, double seconds);
    std::vector<double> arrival_record(const Voltages& v, double seconds);

    /// State after the full intra-loop chain, as seen by a monitoring
    /// polarization analyzer.
    PolarizationState protected_state(const Voltages& v) const;

    /// State the per-loop projection acts on in the preparation frame;
    /// equals |psi0> exactly when the controller compensates the drift.
    PolarizationState projection_state(const Voltages& v) const;

    double count_mean(const Voltages& v, double seconds) const;
    double eta_loop() const { return eta_loop_; }
    double attenuation() const { return attenuation_; }
    double detected_per_pulse_at_peak() const { return mu_det_peak_; }
    double detected_rate_at_peak_hz() const;
    bool meets_min_rate(double min_cps = 500.0) const;

    double time_s() const { return time_s_; }
    double drift_phase_rad() const { return drift_phase_; }
    double tau_tilde() const { return tau_tilde_; }
    const PulseShape& pulse() const { return pulse_; }
    const PlantConfig& config() const { return cfg_; }

private:
    void advance(double seconds);
    PolarizationState chain_state(const Voltages& v) const;

    PlantConfig cfg_;
    PulseShape pulse_;
    double tau_tilde_ = 0.0;
    double eta_loop_ = 0.0;
    double attenuation_ = 1.0;
    double mu_det_peak_ = 0.0;
    double time_s_ = 0.0;
    double drift_phase_ = 0.0;
    std::mt19937_64 rng_;
};

/// Squeezer voltages whose retardances are all full turns: the controller
/// start point that exactly compensates a zero drift phase.
Voltages neutral_voltages(const SqueezerBank& bank);

}  // namespace zenopm
