#include <cmath>
#include <random>

#include "doctest.h"
#include "zenopm/analysis.hpp"

using namespace zenopm;

namespace {

// Reference arrival-time statistics for the photon-stabilized 8- and 13-loop
// runs: measured (t_M, std) and the derived columns they tabulate.
struct TableRow {
    int loops;
    double t_m, t_std;
    double obs, sigma_pm, sigma_sm, ratio;
};

constexpr TableRow kTable[] = {
    {8, 0.00, 0.82, -1.00, 0.42, 0.00, 0.0},
    {8, 0.99, 0.89, -0.49, 0.46, 0.87, 1.9},
    {8, 1.95, 0.92, 0.01, 0.47, 1.00, 2.1},
    {8, 2.90, 0.88, 0.50, 0.46, 0.87, 1.9},
    {8, 3.87, 0.81, 1.00, 0.42, 0.00, 0.0},
    {13, 0.00, 0.84, -1.00, 0.27, 0.00, 0.0},
    {13, 1.67, 0.97, -0.47, 0.31, 0.88, 2.8},
    {13, 3.13, 1.00, 0.00, 0.32, 1.00, 3.1},
    {13, 4.65, 0.95, 0.48, 0.30, 0.88, 2.9},
    {13, 6.25, 0.83, 0.99, 0.26, 0.14, 0.5},
};

constexpr double kTauLoop = 0.483;

}  // namespace

TEST_CASE("windowing") {
    SUBCASE("nothing below threshold leaves the histogram unchanged") {
        const ArrivalHistogram h = ArrivalHistogram::from_counts(0.0, 0.02, {5, 80, 100, 60, 4});
        const ArrivalHistogram w = h.windowed();
        REQUIRE(w.size() == h.size());
        for (std::size_t i = 0; i < h.size(); ++i) {
            CHECK(w.count(i) == h.count(i));
            CHECK(w.center(i) == h.center(i));
        }
    }
    SUBCASE("flat sub-threshold background collapses to the hot bin") {
        std::vector<double> c(41, 0.9);  // 0.1% of the peak below
        c[20] = 1000.0;
        const ArrivalHistogram w = ArrivalHistogram::from_counts(0.0, 0.02, c).windowed();
        REQUIRE(w.size() == 1);
        CHECK(w.center(0) == doctest::Approx(0.4));
        CHECK(w.count(0) == 1000.0);
    }
    SUBCASE("a bin exactly at the threshold survives") {
        // 0.005 * 1000 = 5 exactly; the rule is strictly-below
        const ArrivalHistogram w =
            ArrivalHistogram::from_counts(0.0, 0.02, {4.999, 5.0, 1000.0, 5.0, 4.999}).windowed();
        REQUIRE(w.size() == 3);
        CHECK(w.count(0) == 5.0);
        CHECK(w.count(2) == 5.0);
    }
    SUBCASE("idempotent bit-exactly") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> c(101);
            for (std::size_t i = 0; i < c.size(); ++i) {
                const double x = (static_cast<double>(i) - 50.0) / 12.0;
                c[i] = 1e4 * std::exp(-x * x) + 20.0 * u(rng);
            }
            const ArrivalHistogram w1 =
                ArrivalHistogram::from_counts(-1.0, 0.02, c).windowed();
            const ArrivalHistogram w2 = w1.windowed();
            REQUIRE(w1.size() == w2.size());
            for (std::size_t i = 0; i < w1.size(); ++i) {
                CHECK(w1.count(i) == w2.count(i));  // bitwise
                CHECK(w1.center(i) == w2.center(i));
            }
        }
    }
    SUBCASE("synthetic peak over a 0.3% background recovers the clean mean") {
        const double bw = 0.02, sigma = 1.0, mu = 3.14;
        std::vector<double> c;
        const double lo = -8.0;
        for (double t = lo; t <= 14.0; t += bw) {
            const double x = (t - mu) / sigma;
            c.push_back(1e5 * std::exp(-0.5 * x * x) + 300.0);
        }
        const ArrivalHistogram::Moments m =
            ArrivalHistogram::from_counts(lo, bw, c).windowed().normalized().moments();
        CHECK(std::abs(m.mean_ns - mu) < bw);
    }
    SUBCASE("all-zero histogram is rejected") {
        CHECK_THROWS_AS(ArrivalHistogram::from_counts(0.0, 0.02, {0, 0, 0}).windowed(),
                        std::invalid_argument);
    }
}

TEST_CASE("moments") {
    SUBCASE("symmetric two-bin histogram") {
        const ArrivalHistogram h = ArrivalHistogram::from_counts(-1.0, 2.0, {0.5, 0.5});
        const ArrivalHistogram::Moments m = h.windowed().normalized().moments();
        CHECK(std::abs(m.mean_ns) < 1e-15);
        CHECK(m.std_ns == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("single bin") {
        const ArrivalHistogram h = ArrivalHistogram::from_counts(2.74, 0.02, {42.0});
        const ArrivalHistogram::Moments m = h.windowed().normalized().moments();
        CHECK(m.mean_ns == doctest::Approx(2.74).epsilon(1e-15));
        CHECK(m.std_ns == 0.0);
    }
    SUBCASE("unwindowed or unnormalized input is rejected") {
        const ArrivalHistogram h = ArrivalHistogram::from_counts(0.0, 0.02, {1, 2, 1});
        CHECK_THROWS_AS(h.moments(), std::invalid_argument);
        CHECK_THROWS_AS(h.windowed().moments(), std::invalid_argument);
        CHECK_THROWS_AS(h.normalized().moments(), std::invalid_argument);
    }
    SUBCASE("subdividing bins keeps the mean; the variance gains the in-bin spread") {
        const ArrivalHistogram h =
            ArrivalHistogram::from_counts(0.0, 0.1, {10, 40, 120, 60, 15}).windowed().normalized();
        const ArrivalHistogram::Moments m = h.moments();
        for (int k : {2, 5}) {
            std::vector<double> sub;
            for (std::size_t i = 0; i < h.size(); ++i) {
                for (int j = 0; j < k; ++j) sub.push_back(h.count(i) / k);
            }
            const double w = 0.1 / k;
            const double first = h.center(0) - 0.05 + w / 2.0;
            ArrivalHistogram hs = ArrivalHistogram::from_counts(first, w, sub);
            const ArrivalHistogram::Moments ms = hs.windowed().normalized().moments();
            CHECK(std::abs(ms.mean_ns - m.mean_ns) < 1e-12);
            const double var_gain = 0.1 * 0.1 / 12.0 * (1.0 - 1.0 / (k * k));
            CHECK(std::abs((ms.std_ns * ms.std_ns) - (m.std_ns * m.std_ns + var_gain)) < 1e-12);
        }
    }
}

TEST_CASE("scaling chain from delays to expectation values") {
    SUBCASE("endpoints") {
        CHECK(expectation_from_delay(0.0, 13, kTauLoop) == doctest::Approx(-1.0));
        CHECK(pm_uncertainty(0.0, 13, kTauLoop) == 0.0);
        CHECK(sm_uncertainty(1.0) == 0.0);
        CHECK(sm_uncertainty(-1.0) == 0.0);
        CHECK(sm_uncertainty(0.0) == doctest::Approx(1.0));
    }
    SUBCASE("reference anchor points") {
        CHECK(expectation_from_delay(3.13, 13, kTauLoop) == doctest::Approx(0.00).epsilon(0.01));
        CHECK(expectation_from_delay(3.87, 8, kTauLoop) == doctest::Approx(1.00).epsilon(0.01));
        CHECK(pm_uncertainty(0.84, 13, kTauLoop) == doctest::Approx(0.27).epsilon(0.01));
        CHECK(pm_uncertainty(0.82, 8, kTauLoop) == doctest::Approx(0.42).epsilon(0.02));
        CHECK(sm_uncertainty(-0.47) == doctest::Approx(0.88).epsilon(0.01));
        CHECK(relative_performance(1.00, 0.32) == doctest::Approx(3.1).epsilon(0.01));
        CHECK(relative_performance(0.88, 0.31) == doctest::Approx(2.8).epsilon(0.02));
    }
    SUBCASE("clipping an overshoot") {
        bool clipped = false;
        CHECK(sm_uncertainty(1.003, &clipped) == 0.0);
        CHECK(clipped);
        clipped = false;
        sm_uncertainty(0.5, &clipped);
        CHECK(!clipped);
    }
    SUBCASE("eigenstate rows define the ratio as zero") {
        CHECK(relative_performance(0.0, 0.42) == 0.0);
        CHECK(relative_performance(0.0, 0.0) == 0.0);
        CHECK_THROWS_AS(relative_performance(0.9, 0.0), std::invalid_argument);
    }
    SUBCASE("scale invariance: ps and ns bookkeeping cancel") {
        const double t_m = 3.13, t_std = 1.00;
        const double o1 = expectation_from_delay(t_m, 13, kTauLoop);
        const double o2 = expectation_from_delay(t_m * 1000.0, 13, kTauLoop * 1000.0);
        CHECK(std::abs(o1 - o2) < 1e-12);
        const double r1 = relative_performance(sm_uncertainty(o1),
                                               pm_uncertainty(t_std, 13, kTauLoop));
        const double r2 = relative_performance(sm_uncertainty(o2),
                                               pm_uncertainty(t_std * 1000.0, 13, kTauLoop * 1000.0));
        CHECK(std::abs(r1 - r2) < 1e-12);
    }
}

TEST_CASE("full reference-table regression of the scaling arithmetic") {
    for (const TableRow& row : kTable) {
        const double obs = expectation_from_delay(row.t_m, row.loops, kTauLoop);
        const double spm = pm_uncertainty(row.t_std, row.loops, kTauLoop);
        const double ssm = sm_uncertainty(obs);
        const double r = relative_performance(ssm, spm);
        CHECK(std::abs(obs - row.obs) <= 0.01);
        CHECK(std::abs(spm - row.sigma_pm) <= 0.01);
        CHECK(std::abs(ssm - row.sigma_sm) <= 0.01);
        // the ratio column is tabulated at a tenfold coarser precision
        CHECK(std::abs(r - row.ratio) <= 0.15);
    }
}

TEST_CASE("fidelity statistics") {
    SUBCASE("identical samples") {
        const std::vector<StokesVector> s(5, StokesVector{0.0, 1.0, 0.0});
        const FidelityStats f = fidelity_stats(s);
        CHECK(f.mean_fidelity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.frac_ge_099 == 1.0);
        CHECK(f.frac_ge_098 == 1.0);
    }
    SUBCASE("degenerate scatter is rejected") {
        const std::vector<StokesVector> s{{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
        CHECK_THROWS_AS(fidelity_stats(s), std::invalid_argument);
    }
    SUBCASE("uniform cap: mean fidelity matches the cap geometry") {
        // solid-angle-uniform cap of angular radius alpha about s1:
        // cos(psi) uniform on [cos(alpha), 1] => E[F] = (3 + cos(alpha)) / 4
        const double alpha = 0.14;
        std::mt19937_64 rng(41);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<StokesVector> s;
        for (int i = 0; i < 20000; ++i) {
            const double cp = 1.0 - u(rng) * (1.0 - std::cos(alpha));
            const double sp = std::sqrt(1.0 - cp * cp);
            const double az = 2.0 * 3.14159265358979323846 * u(rng);
            s.push_back({cp, sp * std::cos(az), sp * std::sin(az)});
        }
        const FidelityStats f = fidelity_stats(s);
        const double expected = (3.0 + std::cos(alpha)) / 4.0;
        CHECK(std::abs(f.mean_fidelity - expected) < 3e-4);
        CHECK(f.frac_ge_099 == 1.0);  // min possible F is (1 + cos(0.14|up to 2x mean offset))/2 > 0.99
    }
}

TEST_CASE("trace binning helpers") {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> b = bin_series(v, 2);
    REQUIRE(b.size() == 3);
    CHECK(b[0] == 3.0);
    CHECK(b[2] == 11.0);
    CHECK(std_over_mean({5.0, 5.0, 5.0}) == 0.0);
    CHECK_THROWS_AS(std_over_mean({}), std::invalid_argument);
}
