#pragma once

#include <string>
#include <vector>

#include "catscatter/vec2.hpp"

namespace catscatter {

/// Gaussian atomic-density profile, or the analytic wide-target limit.
struct TargetProfile {
    double sigma_t = 20.0;
    Vec2 b0{};
    bool wide_limit = false;

    static TargetProfile gaussian(double sigma_t, Vec2 b0 = {}) { return {sigma_t, b0, false}; }
    static TargetProfile wide() { return {0.0, {}, true}; }

    void validate() const;
};

/// n(b) = exp(-(b - b0)^2 / (2 sigma_t^2)) / (2 pi sigma_t^2).
/// Throws WideLimitHasNoDensity in wide-limit mode.
double target_density(const TargetProfile& profile, Vec2 b);

struct Kinematics {
    double p_i = 10.0;
    double p_f = 10.0;
    double theta = 0.0;  // rad
    double phi = 0.0;    // rad

    static Kinematics elastic(double p, double theta, double phi = 0.0) { return {p, p, theta, phi}; }

    void validate() const;
};

/// Warns when p_f differs from p_i by more than 1e-9 relative.
std::vector<std::string> kinematics_warnings(const Kinematics& kin);

/// Q = p_f - p_i z: longitudinal and transverse parts.
struct MomentumTransfer {
    double qz = 0.0;
    Vec2 qperp{};

    double norm2() const noexcept { return qz * qz + qperp.norm2(); }
};

MomentumTransfer momentum_transfer(const Kinematics& kin);

/// First Born amplitude for hydrogen 1s:
/// (a/2) [1/(1 + (a/2)^2 q^2) + 1/(1 + (a/2)^2 q^2)^2].
double hydrogen_amplitude(double q, double a = 1.0);

/// hydrogen_amplitude squared, taking q^2 directly.
double hydrogen_amplitude_sq(double q2, double a = 1.0);

}  // namespace catscatter
