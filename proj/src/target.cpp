#include "catscatter/target.hpp"

#include <cmath>
#include <numbers>

#include "catscatter/error.hpp"

namespace catscatter {

void TargetProfile::validate() const
{
    if (wide_limit) return;
    if (!(std::isfinite(sigma_t) && sigma_t > 0.0)) {
        throw Error(ErrorKind::invalid_state, "sigma_t must be > 0 for a finite target");
    }
    if (!std::isfinite(b0.x) || !std::isfinite(b0.y)) {
        throw Error(ErrorKind::invalid_state, "b0 must be finite");
    }
}

double target_density(const TargetProfile& profile, Vec2 b)
{
    if (profile.wide_limit) {
        throw Error(ErrorKind::wide_limit_has_no_density,
                    "the wide-target limit is taken inside the scattering formulas");
    }
    profile.validate();
    const double s2 = profile.sigma_t * profile.sigma_t;
    return std::exp(-(b - profile.b0).norm2() / (2.0 * s2)) / (2.0 * std::numbers::pi * s2);
}

void Kinematics::validate() const
{
    if (!(std::isfinite(p_i) && p_i > 0.0) || !(std::isfinite(p_f) && p_f > 0.0)) {
        throw Error(ErrorKind::invalid_state, "p_i and p_f must be > 0");
    }
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw Error(ErrorKind::invalid_state, "theta must lie in [0, pi]");
    }
    if (!std::isfinite(phi)) throw Error(ErrorKind::invalid_state, "phi must be finite");
}

std::vector<std::string> kinematics_warnings(const Kinematics& kin)
{
    std::vector<std::string> out;
    if (std::abs(kin.p_f - kin.p_i) > 1e-9 * kin.p_i) {
        out.push_back("p_f differs from p_i: the scattering formulas assume elastic kinematics");
    }
    return out;
}

MomentumTransfer momentum_transfer(const Kinematics& kin)
{
    kin.validate();
    const double transverse = kin.p_f * std::sin(kin.theta);
    return {kin.p_f * std::cos(kin.theta) - kin.p_i,
            {transverse * std::cos(kin.phi), transverse * std::sin(kin.phi)}};
}

double hydrogen_amplitude_sq(double q2, double a)
{
    const double inv = 1.0 / (1.0 + 0.25 * a * a * q2);
    const double f = 0.5 * a * (inv + inv * inv);
    return f * f;
}

double hydrogen_amplitude(double q, double a)
{
    if (!(q >= 0.0) || !(a > 0.0)) {
        throw Error(ErrorKind::invalid_state, "hydrogen amplitude needs q >= 0 and a > 0");
    }
    const double inv = 1.0 / (1.0 + 0.25 * a * a * q * q);
    return 0.5 * a * (inv + inv * inv);
}

}  // namespace catscatter
