#pragma once

#include <vector>

#include "zenopm/polarization.hpp"

namespace zenopm {

/// One shifted copy of the unit-width Gaussian amplitude.
struct GaussianTerm {
    double weight = 0.0;
    double center = 0.0;  // normalized time, t / tau_g
};

/// Temporal pointer amplitude psi(t) = sum_k w_k pi^{-1/4} exp(-(t - c_k)^2 / 2).
/// The repeated split-and-project dynamics is closed in this basis, so the
/// state stays an exact finite sum of shifted Gaussians.
class PointerState {
public:
    static PointerState initial();  // single term, weight 1, center 0
    static PointerState from_terms(std::vector<GaussianTerm> terms);

    const std::vector<GaussianTerm>& terms() const { return terms_; }
    double norm2() const;
    double amplitude(double t) const;

private:
    std::vector<GaussianTerm> terms_;
};

struct ZenoConfig {
    double tau_tilde = 0.32;  // delay per stage over pulse duration
    int stages = 1;
    PolarizationState state;

    bool is_weak() const { return tau_tilde < 1.0; }
};

/// One pass of differential delay followed by projection back onto the
/// prepared state. Each term splits into an H copy delayed by +tau/2
/// (slow axis) and a V copy advanced by -tau/2; the relative phase of the
/// state cancels identically in the projected weights.
PointerState zeno_stage_exact(const PointerState& p, const ZenoConfig& cfg);

/// stages applications of zeno_stage_exact to the initial single-term state.
PointerState propagate(const ZenoConfig& cfg);

/// Norm^2 of the unnormalized pointer state, in [0, 1].
double survival_probability(const PointerState& p);

struct PointerMoments {
    double mean = 0.0;    // normalized time
    double stddev = 0.0;  // of the normalized intensity
};

PointerMoments pointer_moments(const PointerState& p);

/// Gaussian decomposition of the (normalized) intensity |psi|^2: every pair
/// of amplitude terms contributes mass at the midpoint with width 1/sqrt(2).
struct IntensityComponent {
    double mass = 0.0;
    double center = 0.0;
};

std::vector<IntensityComponent> intensity_mixture(const PointerState& p);

/// Second-order small-coupling prediction: shift = stages * tau * <O> / 2 with
/// <O> = cos(2 theta); survival uses the per-stage factor
/// (1 - tau^2/8 * sin^2(2 theta)) from the pointer's unit-Gaussian momentum
/// variance of 1/2. Comparison only; the exact engine never uses this.
struct WeakPrediction {
    double shift = 0.0;
    double survival = 1.0;
};

WeakPrediction weak_prediction(const ZenoConfig& cfg);

/// Mapping between normalized pointer time and nanoseconds.
/// tau_g is defined so the intensity FWHM equals 2 sqrt(ln 2) * tau_g.
struct PulseShape {
    double tau_g_ns = 1.5;

    static PulseShape from_intensity_fwhm_ns(double fwhm_ns);
    double tau_tilde(double delay_ns) const { return delay_ns / tau_g_ns; }
    double to_ns(double t_tilde) const { return t_tilde * tau_g_ns; }
    double intensity_std_ns() const;
};

}  // namespace zenopm
