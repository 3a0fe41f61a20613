#include "zenopm/zeno.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zenopm {

namespace {

constexpr double kMergeTol = 1e-12;  // centers closer than this collapse
constexpr double kPruneTol = 1e-15;
constexpr double kQuarterPowPi = 0.7511255444649425;  // pi^{-1/4}

// Overlap of two unit-width normalized Gaussian amplitudes at distance d.
double gauss_overlap(double d) {
    return std::exp(-0.25 * d * d);
}

}  // namespace

PointerState PointerState::initial() {
    PointerState p;
    p.terms_ = {{1.0, 0.0}};
    return p;
}

PointerState PointerState::from_terms(std::vector<GaussianTerm> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const GaussianTerm& a, const GaussianTerm& b) { return a.center < b.center; });
    std::vector<GaussianTerm> merged;
    for (const GaussianTerm& t : terms) {
        if (!std::isfinite(t.weight) || !std::isfinite(t.center)) {
            throw std::invalid_argument("pointer term is not finite");
        }
        if (!merged.empty() && t.center - merged.back().center < kMergeTol) {
            merged.back().weight += t.weight;
        } else {
            merged.push_back(t);
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const GaussianTerm& t) { return std::abs(t.weight) < kPruneTol; }),
                 merged.end());
    PointerState p;
    p.terms_ = std::move(merged);
    return p;
}

double PointerState::norm2() const {
    double n = 0.0;
    for (const GaussianTerm& a : terms_) {
        for (const GaussianTerm& b : terms_) {
            n += a.weight * b.weight * gauss_overlap(a.center - b.center);
        }
    }
    return std::max(n, 0.0);
}

double PointerState::amplitude(double t) const {
    double v = 0.0;
    for (const GaussianTerm& term : terms_) {
        const double d = t - term.center;
        v += term.weight * kQuarterPowPi * std::exp(-0.5 * d * d);
    }
    return v;
}

PointerState zeno_stage_exact(const PointerState& p, const ZenoConfig& cfg) {
    if (!(cfg.tau_tilde > 0.0)) throw std::invalid_argument("tau_tilde must be positive");
    const double w_h = std::norm(cfg.state.amp_h());  // cos^2 theta
    const double w_v = std::norm(cfg.state.amp_v());  // sin^2 theta
    const double half = 0.5 * cfg.tau_tilde;

    std::vector<GaussianTerm> next;
    next.reserve(2 * p.terms().size());
    for (const GaussianTerm& t : p.terms()) {
        next.push_back({t.weight * w_h, t.center + half});  // H: slow axis, later
        next.push_back({t.weight * w_v, t.center - half});  // V: fast axis, earlier
    }
    return PointerState::from_terms(std::move(next));
}

PointerState propagate(const ZenoConfig& cfg) {
    if (cfg.stages < 0) throw std::invalid_argument("stage count must be non-negative");
    PointerState p = PointerState::initial();
    for (int i = 0; i < cfg.stages; ++i) {
        p = zeno_stage_exact(p, cfg);
    }
    return p;
}

double survival_probability(const PointerState& p) {
    return std::min(p.norm2(), 1.0);
}

std::vector<IntensityComponent> intensity_mixture(const PointerState& p) {
    double total = 0.0;
    std::vector<IntensityComponent> comps;
    comps.reserve(p.terms().size() * p.terms().size());
    for (const GaussianTerm& a : p.terms()) {
        for (const GaussianTerm& b : p.terms()) {
            const double mass = a.weight * b.weight * gauss_overlap(a.center - b.center);
            comps.push_back({mass, 0.5 * (a.center + b.center)});
            total += mass;
        }
    }
    if (total < 1e-30) throw std::invalid_argument("pointer state has been filtered out");
    for (IntensityComponent& c : comps) c.mass /= total;
    return comps;
}

PointerMoments pointer_moments(const PointerState& p) {
    const std::vector<IntensityComponent> comps = intensity_mixture(p);
    double mean = 0.0;
    double second = 0.0;
    for (const IntensityComponent& c : comps) {
        mean += c.mass * c.center;
        second += c.mass * (c.center * c.center + 0.5);  // each component has variance 1/2
    }
    const double var = std::max(second - mean * mean, 0.0);
    return {mean, std::sqrt(var)};
}

WeakPrediction weak_prediction(const ZenoConfig& cfg) {
    const double obs = std::cos(2.0 * cfg.state.theta());
    const double spread2 = 1.0 - obs * obs;  // sin^2(2 theta)
    const double per_stage = std::max(0.0, 1.0 - cfg.tau_tilde * cfg.tau_tilde / 8.0 * spread2);
    WeakPrediction w;
    w.shift = 0.5 * cfg.stages * cfg.tau_tilde * obs;
    w.survival = std::pow(per_stage, cfg.stages);
    return w;
}

PulseShape PulseShape::from_intensity_fwhm_ns(double fwhm_ns) {
    if (!(fwhm_ns > 0.0)) throw std::invalid_argument("pulse FWHM must be positive");
    return {fwhm_ns / (2.0 * std::sqrt(std::numbers::ln2))};
}

double PulseShape::intensity_std_ns() const {
    return tau_g_ns / std::numbers::sqrt2;
}

}  // namespace zenopm
