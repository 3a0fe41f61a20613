#include "zenopm/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zenopm {

namespace {
constexpr double kPi = std::numbers::pi;
}

double StokesVector::norm() const {
    return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
}

double StokesVector::dot(const StokesVector& other) const {
    return s1 * other.s1 + s2 * other.s2 + s3 * other.s3;
}

double wrap_angle(double x) {
    double w = std::remainder(x, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

PolarizationState::PolarizationState(double theta, double phi) {
    // Canonicalize through the amplitude map so any (theta, phi) is accepted.
    std::complex<double> c_h = std::cos(theta);
    std::complex<double> c_v = std::polar(1.0, phi) * std::sin(theta);
    *this = from_amplitudes(c_h, c_v);
}

PolarizationState PolarizationState::from_amplitudes(std::complex<double> c_h,
                                                     std::complex<double> c_v) {
    const double n2 = std::norm(c_h) + std::norm(c_v);
    if (!(n2 > 0.0)) throw std::invalid_argument("polarization amplitudes are all zero");
    const double n = std::sqrt(n2);
    c_h /= n;
    c_v /= n;

    PolarizationState p;
    p.theta_ = std::atan2(std::abs(c_v), std::abs(c_h));
    if (std::abs(c_h) < 1e-15 || std::abs(c_v) < 1e-15) {
        p.phi_ = 0.0;  // degenerate: phase has no physical meaning
    } else {
        p.phi_ = wrap_angle(std::arg(c_v) - std::arg(c_h));
    }
    return p;
}

PolarizationState PolarizationState::vertical() {
    return {kPi / 2.0, 0.0};
}

PolarizationState PolarizationState::diagonal() {
    return {kPi / 4.0, 0.0};
}

std::complex<double> PolarizationState::amp_h() const {
    return {std::cos(theta_), 0.0};
}

std::complex<double> PolarizationState::amp_v() const {
    return std::polar(std::sin(theta_), phi_);
}

PolRotation PolRotation::about_s1(double retardance) {
    return {{1.0, 0.0, 0.0}, retardance};
}

PolRotation PolRotation::about_s2(double retardance) {
    return {{0.0, 1.0, 0.0}, retardance};
}

PolRotation PolRotation::about_s3(double retardance) {
    return {{0.0, 0.0, 1.0}, retardance};
}

StokesVector to_stokes(const PolarizationState& p) {
    const std::complex<double> c_h = p.amp_h();
    const std::complex<double> c_v = p.amp_v();
    const std::complex<double> cross = std::conj(c_h) * c_v;
    return {std::norm(c_h) - std::norm(c_v), 2.0 * cross.real(), 2.0 * cross.imag()};
}

double fidelity(const StokesVector& a, const StokesVector& b) {
    if (std::abs(a.norm() - 1.0) > 1e-6 || std::abs(b.norm() - 1.0) > 1e-6) {
        throw std::invalid_argument("fidelity requires unit Stokes vectors");
    }
    const double f = 0.5 * (1.0 + a.dot(b));
    return std::clamp(f, 0.0, 1.0);
}

PolarizationState apply_rotation(const PolRotation& r, const PolarizationState& p) {
    const double an = r.axis.norm();
    if (std::abs(an - 1.0) > 1e-9) {
        throw std::invalid_argument("rotation axis must be a unit vector");
    }
    const double c = std::cos(0.5 * r.retardance);
    const double s = std::sin(0.5 * r.retardance);
    const double n1 = r.axis.s1, n2 = r.axis.s2, n3 = r.axis.s3;

    // U = cos(d/2) I - i sin(d/2) (n1 sz + n2 sx + n3 sy) in the (H, V) basis,
    // which rotates the Stokes image by +retardance about the axis.
    const std::complex<double> m00{c, -s * n1};
    const std::complex<double> m01{-s * n3, -s * n2};
    const std::complex<double> m10{s * n3, -s * n2};
    const std::complex<double> m11{c, s * n1};

    const std::complex<double> c_h = p.amp_h();
    const std::complex<double> c_v = p.amp_v();
    return PolarizationState::from_amplitudes(m00 * c_h + m01 * c_v,
                                              m10 * c_h + m11 * c_v);
}

std::complex<double> projector_overlap(const PolarizationState& a,
                                       const PolarizationState& b) {
    return std::conj(a.amp_h()) * b.amp_h() + std::conj(a.amp_v()) * b.amp_v();
}

}  // namespace zenopm
