#pragma once

#include <complex>

namespace zenopm {

/// Point on (or in) the Poincare sphere. Pure states have unit norm.
/// Convention: s1 = |cH|^2 - |cV|^2, s2 = 2 Re(cH* cV), s3 = 2 Im(cH* cV).
struct StokesVector {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;

    double norm() const;
    double dot(const StokesVector& other) const;
};

/// Pure polarization state cos(theta)|H> + e^{i phi} sin(theta)|V>.
/// Canonical form: theta in [0, pi/2], phi in (-pi, pi], global phase
/// chosen so the H amplitude is real and non-negative.
class PolarizationState {
public:
    PolarizationState() = default;  // |H>
    PolarizationState(double theta, double phi);

    static PolarizationState from_amplitudes(std::complex<double> c_h,
                                             std::complex<double> c_v);
    static PolarizationState horizontal() { return {0.0, 0.0}; }
    static PolarizationState vertical();
    static PolarizationState diagonal();

    double theta() const { return theta_; }
    double phi() const { return phi_; }
    std::complex<double> amp_h() const;
    std::complex<double> amp_v() const;

private:
    double theta_ = 0.0;
    double phi_ = 0.0;
};

/// Rotation of the Poincare sphere: retardance about a unit axis.
/// Models linear-polarizer projections, fiber squeezers and birefringent
/// phase drift, all of which act as SU(2) elements on the state.
struct PolRotation {
    StokesVector axis{1.0, 0.0, 0.0};
    double retardance = 0.0;

    static PolRotation identity() { return {}; }
    static PolRotation about_s1(double retardance);
    static PolRotation about_s2(double retardance);
    static PolRotation about_s3(double retardance);
    PolRotation inverse() const { return {axis, -retardance}; }
};

StokesVector to_stokes(const PolarizationState& p);

/// F = (1 + s1.s2) / 2. Inputs must be unit vectors to within 1e-6.
double fidelity(const StokesVector& a, const StokesVector& b);

PolarizationState apply_rotation(const PolRotation& r, const PolarizationState& p);

/// <a|b> for the canonical amplitude representatives.
std::complex<double> projector_overlap(const PolarizationState& a,
                                       const PolarizationState& b);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double x);

}  // namespace zenopm
