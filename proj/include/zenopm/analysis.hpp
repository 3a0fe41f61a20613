#pragma once

#include <cstddef>
#include <vector>

#include "zenopm/polarization.hpp"

namespace zenopm {

/// Binned photon arrival times. Bin centers sit on an integer grid of the
/// bin width so TDC-quantized samples never straddle an edge.
class ArrivalHistogram {
public:
    static ArrivalHistogram from_samples(const std::vector<double>& times_ns,
                                         double bin_width_ns);
    static ArrivalHistogram from_counts(double first_center_ns, double bin_width_ns,
                                        std::vector<double> counts);

    /// Truncation at the first bin below 0.5% of the peak on each side,
    /// scanning outward from the peak. Idempotent.
    ArrivalHistogram windowed() const;
    ArrivalHistogram normalized() const;
    ArrivalHistogram rebinned(int merge) const;

    struct Moments {
        double mean_ns = 0.0;
        double std_ns = 0.0;
    };
    /// Requires a windowed, normalized histogram.
    Moments moments() const;

    std::size_t size() const { return counts_.size(); }
    double bin_width_ns() const { return bin_width_ns_; }
    double center(std::size_t i) const;
    double count(std::size_t i) const { return counts_[i]; }
    const std::vector<double>& counts() const { return counts_; }
    double total() const;
    std::size_t peak_bin() const;  // ties break toward the earlier bin
    bool is_windowed() const { return windowed_; }
    bool is_normalized() const { return normalized_; }

private:
    double first_center_ns_ = 0.0;
    double bin_width_ns_ = 0.02;
    std::vector<double> counts_;
    bool windowed_ = false;
    bool normalized_ = false;
};

/// <O> = 2 t_M / (loops * tau_loop) - 1.
double expectation_from_delay(double t_m_ns, int loops, double tau_loop_ns);

/// Arrival-time spread rescaled to the [-1, 1] range of the expectation value.
double pm_uncertainty(double std_ns, int loops, double tau_loop_ns);

/// sqrt(1 - <O>^2); statistical overshoot beyond +-1 is clipped (flag reported).
double sm_uncertainty(double expectation, bool* clipped = nullptr);

/// R = sigma_SM / sigma_PM; defined as 0 when sigma_SM is 0.
double relative_performance(double sigma_sm, double sigma_pm);

struct PmResult {
    double t_m_ns = 0.0;
    double t_std_ns = 0.0;
    double expectation = 0.0;  // raw, not clipped
    double sigma_pm = 0.0;
    double sigma_sm = 0.0;
    double ratio = 0.0;
    bool expectation_clipped = false;
    int loops = 0;
    double tau_loop_ns = 0.0;
    double tau_max_ns = 0.0;
    long long counts_used = 0;
};

PmResult analyze_arrivals(const std::vector<double>& times_ns, int loops,
                          double tau_loop_ns, double bin_width_ns = 0.02);

struct FidelityStats {
    double mean_fidelity = 0.0;
    double frac_ge_099 = 0.0;
    double frac_ge_098 = 0.0;
    StokesVector mean_vector;
    std::vector<double> fidelities;
};

/// Fidelity of each sample against the normalized mean Stokes vector.
FidelityStats fidelity_stats(const std::vector<StokesVector>& samples);

/// Sum consecutive groups of per_bin values (tail remainder dropped).
std::vector<double> bin_series(const std::vector<double>& values, std::size_t per_bin);

double std_over_mean(const std::vector<double>& values);

}  // namespace zenopm
