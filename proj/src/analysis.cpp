#include "zenopm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zenopm {

ArrivalHistogram ArrivalHistogram::from_samples(const std::vector<double>& times_ns,
                                                double bin_width_ns) {
    if (times_ns.empty()) throw std::invalid_argument("no arrival samples");
    if (!(bin_width_ns > 0.0)) throw std::invalid_argument("bin width must be positive");

    long long kmin = 0, kmax = 0;
    bool first = true;
    for (double t : times_ns) {
        const long long k = std::llround(t / bin_width_ns);
        if (first) {
            kmin = kmax = k;
            first = false;
        } else {
            kmin = std::min(kmin, k);
            kmax = std::max(kmax, k);
        }
    }
    ArrivalHistogram h;
    h.bin_width_ns_ = bin_width_ns;
    h.first_center_ns_ = static_cast<double>(kmin) * bin_width_ns;
    h.counts_.assign(static_cast<std::size_t>(kmax - kmin + 1), 0.0);
    for (double t : times_ns) {
        const long long k = std::llround(t / bin_width_ns);
        h.counts_[static_cast<std::size_t>(k - kmin)] += 1.0;
    }
    return h;
}

ArrivalHistogram ArrivalHistogram::from_counts(double first_center_ns, double bin_width_ns,
                                               std::vector<double> counts) {
    if (counts.empty()) throw std::invalid_argument("histogram has no bins");
    if (!(bin_width_ns > 0.0)) throw std::invalid_argument("bin width must be positive");
    for (double c : counts) {
        if (!(c >= 0.0)) throw std::invalid_argument("histogram counts must be non-negative");
    }
    ArrivalHistogram h;
    h.first_center_ns_ = first_center_ns;
    h.bin_width_ns_ = bin_width_ns;
    h.counts_ = std::move(counts);
    return h;
}

double ArrivalHistogram::center(std::size_t i) const {
    return first_center_ns_ + static_cast<double>(i) * bin_width_ns_;
}

double ArrivalHistogram::total() const {
    double t = 0.0;
    for (double c : counts_) t += c;
    return t;
}

std::size_t ArrivalHistogram::peak_bin() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts_.size(); ++i) {
        if (counts_[i] > counts_[best]) best = i;  // strict: ties keep the earlier bin
    }
    return best;
}

ArrivalHistogram ArrivalHistogram::windowed() const {
    const std::size_t pk = peak_bin();
    if (!(counts_[pk] > 0.0)) throw std::invalid_argument("cannot window an all-zero histogram");
    const double threshold = 0.005 * counts_[pk];

    std::size_t lo = pk;
    while (lo > 0 && counts_[lo - 1] >= threshold) --lo;
    std::size_t hi = pk;
    while (hi + 1 < counts_.size() && counts_[hi + 1] >= threshold) ++hi;

    ArrivalHistogram h;
    h.first_center_ns_ = center(lo);
    h.bin_width_ns_ = bin_width_ns_;
    h.counts_.assign(counts_.begin() + static_cast<std::ptrdiff_t>(lo),
                     counts_.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    h.windowed_ = true;
    h.normalized_ = normalized_;
    return h;
}

ArrivalHistogram ArrivalHistogram::normalized() const {
    const double t = total();
    if (!(t > 0.0)) throw std::invalid_argument("cannot normalize an empty histogram");
    ArrivalHistogram h = *this;
    for (double& c : h.counts_) c /= t;
    h.normalized_ = true;
    return h;
}

ArrivalHistogram ArrivalHistogram::rebinned(int merge) const {
    if (merge < 1) throw std::invalid_argument("rebin factor must be >= 1");
    if (merge == 1) return *this;
    ArrivalHistogram h;
    h.bin_width_ns_ = bin_width_ns_ * merge;
    // merged bin center = mean of the child centers
    h.first_center_ns_ = first_center_ns_ + 0.5 * (merge - 1) * bin_width_ns_;
    for (std::size_t i = 0; i + static_cast<std::size_t>(merge) <= counts_.size();
         i += static_cast<std::size_t>(merge)) {
        double s = 0.0;
        for (int j = 0; j < merge; ++j) s += counts_[i + static_cast<std::size_t>(j)];
        h.counts_.push_back(s);
    }
    if (h.counts_.empty()) throw std::invalid_argument("rebin factor exceeds histogram size");
    h.windowed_ = false;
    h.normalized_ = false;
    return h;
}

ArrivalHistogram::Moments ArrivalHistogram::moments() const {
    if (!windowed_) throw std::invalid_argument("moments require a windowed histogram");
    if (!normalized_) throw std::invalid_argument("moments require a normalized histogram");
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        mean += counts_[i] * center(i);
        second += counts_[i] * center(i) * center(i);
    }
    return {mean, std::sqrt(std::max(second - mean * mean, 0.0))};
}

double expectation_from_delay(double t_m_ns, int loops, double tau_loop_ns) {
    if (loops < 1) throw std::invalid_argument("loop count must be >= 1");
    if (!(tau_loop_ns > 0.0)) throw std::invalid_argument("tau_loop must be positive");
    return 2.0 * t_m_ns / (loops * tau_loop_ns) - 1.0;
}

double pm_uncertainty(double std_ns, int loops, double tau_loop_ns) {
    if (loops < 1) throw std::invalid_argument("loop count must be >= 1");
    if (!(tau_loop_ns > 0.0)) throw std::invalid_argument("tau_loop must be positive");
    return 2.0 * std_ns / (loops * tau_loop_ns);
}

double sm_uncertainty(double expectation, bool* clipped) {
    double o = expectation;
    bool clip = false;
    if (o > 1.0) {
        o = 1.0;
        clip = true;
    } else if (o < -1.0) {
        o = -1.0;
        clip = true;
    }
    if (clipped) *clipped = clip;
    return std::sqrt(1.0 - o * o);
}

double relative_performance(double sigma_sm, double sigma_pm) {
    if (sigma_sm == 0.0) return 0.0;  // eigenstate rows
    if (!(sigma_pm > 0.0)) throw std::invalid_argument("sigma_pm must be positive");
    return sigma_sm / sigma_pm;
}

PmResult analyze_arrivals(const std::vector<double>& times_ns, int loops,
                          double tau_loop_ns, double bin_width_ns) {
    const ArrivalHistogram windowed =
        ArrivalHistogram::from_samples(times_ns, bin_width_ns).windowed();
    const ArrivalHistogram::Moments m = windowed.normalized().moments();

    PmResult r;
    r.t_m_ns = m.mean_ns;
    r.t_std_ns = m.std_ns;
    r.loops = loops;
    r.tau_loop_ns = tau_loop_ns;
    r.tau_max_ns = loops * tau_loop_ns;
    r.counts_used = static_cast<long long>(std::llround(windowed.total()));
    r.expectation = expectation_from_delay(m.mean_ns, loops, tau_loop_ns);
    r.sigma_pm = pm_uncertainty(m.std_ns, loops, tau_loop_ns);
    r.sigma_sm = sm_uncertainty(r.expectation, &r.expectation_clipped);
    r.ratio = relative_performance(r.sigma_sm, r.sigma_pm);
    return r;
}

FidelityStats fidelity_stats(const std::vector<StokesVector>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("need at least two Stokes samples");
    StokesVector sum;
    for (const StokesVector& s : samples) {
        sum.s1 += s.s1;
        sum.s2 += s.s2;
        sum.s3 += s.s3;
    }
    const double n = static_cast<double>(samples.size());
    StokesVector mean{sum.s1 / n, sum.s2 / n, sum.s3 / n};
    const double mn = mean.norm();
    if (mn < 1e-9) throw std::invalid_argument("degenerate scatter: mean Stokes vector is zero");
    mean = {mean.s1 / mn, mean.s2 / mn, mean.s3 / mn};

    FidelityStats out;
    out.mean_vector = mean;
    out.fidelities.reserve(samples.size());
    double acc = 0.0;
    std::size_t n99 = 0, n98 = 0;
    for (const StokesVector& s : samples) {
        const double f = fidelity(mean, s);
        out.fidelities.push_back(f);
        acc += f;
        if (f >= 0.99) ++n99;
        if (f >= 0.98) ++n98;
    }
    out.mean_fidelity = acc / n;
    out.frac_ge_099 = static_cast<double>(n99) / n;
    out.frac_ge_098 = static_cast<double>(n98) / n;
    return out;
}

std::vector<double> bin_series(const std::vector<double>& values, std::size_t per_bin) {
    if (per_bin == 0) throw std::invalid_argument("per_bin must be positive");
    std::vector<double> out;
    for (std::size_t i = 0; i + per_bin <= values.size(); i += per_bin) {
        double s = 0.0;
        for (std::size_t j = 0; j < per_bin; ++j) s += values[i + j];
        out.push_back(s);
    }
    return out;
}

double std_over_mean(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("empty series");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0) throw std::invalid_argument("series mean is zero");
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return std::sqrt(var) / mean;
}

}  // namespace zenopm
