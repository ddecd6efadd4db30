#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catscatter/beam.hpp"
#include "catscatter/execution.hpp"
#include "catscatter/quadrature.hpp"
#include "catscatter/target.hpp"

namespace catscatter {

/// Real elastic scattering amplitude f(|q|). Hydrogen 1s is the built-in
/// case and the only one the closed-form route accepts.
class Amplitude {
public:
    static Amplitude hydrogen(double a = 1.0);
    static Amplitude custom(std::function<double(double)> f, std::string name);

    bool is_hydrogen() const noexcept { return !custom_; }
    double bohr_radius() const noexcept { return a_; }
    const std::string& name() const noexcept { return name_; }

    double operator()(double q) const;
    double squared(double q2) const;

private:
    Amplitude() = default;

    double a_ = 1.0;
    std::function<double(double)> custom_;
    std::string name_ = "hydrogen-1s";
};

struct QuadratureSettings {
    QuadratureSpec one_d = QuadratureSpec::one_d();
    QuadratureSpec two_d = QuadratureSpec::two_d();
    QuadratureSpec four_d = QuadratureSpec::four_d();
};

struct ScatteringConfig {
    std::int64_t n_e = 1;
    BeamState state = BeamState::gaussian(2.0);
    TargetProfile target = TargetProfile::wide();
    Amplitude amplitude = Amplitude::hydrogen();
    QuadratureSettings quad{};
    Execution execution = Execution::parallel;

    void validate() const;
};

enum class Method { general4d, quadrature2d, closed_form };
std::string_view to_string(Method m);

enum class Normalization {
    events,        // dnu/dOmega, events per steradian
    cross_section  // dsigma/dOmega in a^2 per steradian (wide-limit results)
};

struct EventDensity {
    double value = 0.0;
    Method method = Method::quadrature2d;
    double err_est = 0.0;
    /// Sigma^2 = sigma_t^2 + sigma_perp^2 for finite targets.
    std::optional<double> sigma_sq;
    Normalization normalization = Normalization::events;
};

/// dnu/dOmega = N_e Int d^2b d^2p n(b) W(b, p) f(|Q - p|)^2 by 4-D cubature.
/// Any beam variant; the target must be finite.
EventDensity event_density_general(const ScatteringConfig& cfg, const Kinematics& kin);

/// Gaussian (or anisotropic Gaussian) beam: analytic b-integral, 2-D p-quadrature.
EventDensity event_density_gaussian(const ScatteringConfig& cfg, const Kinematics& kin);

/// Cats and the incoherent pair: analytic b-integral, 2-D p-quadrature with
/// any amplitude.
EventDensity event_density_cat_quadrature(const ScatteringConfig& cfg, const Kinematics& kin);

/// Hydrogen closed form: 1-D x-integral after analytic p-integration.
/// Accepts cats, and the Gaussian as the r0 = 0 even cat.
EventDensity event_density_cat_closed(const ScatteringConfig& cfg, const Kinematics& kin);

enum class MethodChoice { automatic, general4d, quadrature2d, closed_form };

/// Dispatches to one of the routes above; automatic prefers the closed form
/// for hydrogen cats and the 2-D quadratures otherwise.
EventDensity event_density(const ScatteringConfig& cfg, const Kinematics& kin,
                           MethodChoice choice = MethodChoice::automatic);

/// Pieces of the closed-form integrand at integration variable x.
struct ClosedFormTerms {
    double g = 1.0;
    double x = 0.0;
    double s = 0.0;
};

ClosedFormTerms closed_form_terms(const MomentumTransfer& q, double sigma_perp, double a, double x);

/// dsigma/dOmega = 2 pi Sigma^2 dnu/dOmega / N_e; identity on wide-limit results.
double cross_section(const EventDensity& ed, std::int64_t n_e);

struct ValidityItem {
    std::string condition;
    bool satisfied = false;
    double margin = 0.0;
    std::string note;
};

/// Reports the working assumptions of the scattering formulas. Informational:
/// "much less than" requires a factor 10 separation, "at least of order" a factor 1.
std::vector<ValidityItem> validity_check(const BeamState& state, const TargetProfile& target,
                                         double a = 1.0);

}  // namespace catscatter
