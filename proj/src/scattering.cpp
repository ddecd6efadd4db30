#include "catscatter/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "catscatter/error.hpp"

namespace catscatter {

namespace {

constexpr double pi = std::numbers::pi;

// Gaussian weight exp(-2 sigma^2 p^2) is below e^-32 outside |p| <= 4/sigma.
constexpr double momentum_box_widths = 4.0;
constexpr double target_box_widths = 6.0;
constexpr double beam_box_widths = 8.0;

struct TransverseWidths {
    double x;
    double y;
};

TransverseWidths beam_widths(const BeamState& s) { return {s.sigma_x(), s.sigma_y()}; }

std::array<Interval, 2> momentum_box(const BeamState& s)
{
    const auto w = beam_widths(s);
    return {Interval{-momentum_box_widths / w.x, momentum_box_widths / w.x},
            Interval{-momentum_box_widths / w.y, momentum_box_widths / w.y}};
}

// Initial panel caps for the p-axes: resolve the Gaussian weight and any
// cos(2 r0 . p) interference fringes.
std::array<double, 2> momentum_panels(const BeamState& s, bool oscillating)
{
    const auto w = beam_widths(s);
    std::array<double, 2> caps{1.0 / w.x, 1.0 / w.y};
    if (oscillating) {
        caps[0] = std::min(caps[0], oscillation_panel_width(s.r0().x));
        caps[1] = std::min(caps[1], oscillation_panel_width(s.r0().y));
    }
    return caps;
}

double check_nonnegative(double value, double err, Method m)
{
    if (value < -err) {
        throw Error(ErrorKind::negative_total,
                    std::string(to_string(m)) + " total " + std::to_string(value) +
                        " is below -err_est " + std::to_string(-err) + "; quadrature failed");
    }
    return value;
}

// Momentum-space integrand f(|Q - p|)^2 with the 3-vector (Q_perp - p, Q_z).
double amplitude_sq_at(const Amplitude& f, const MomentumTransfer& q, double px, double py)
{
    const double dx = q.qperp.x - px;
    const double dy = q.qperp.y - py;
    return f.squared(q.qz * q.qz + dx * dx + dy * dy);
}

// b-integrated position factors for the two-packet states:
//   pair  = e^{-b0^2/2S^2} cosh(b0.r0/S^2) e^{-r0^2/2S^2}
//   inter = e^{-b0^2/2S^2}
// Both become 1 in the wide-target limit.
struct PositionFactors {
    double pair = 1.0;
    double inter = 1.0;
};

PositionFactors position_factors(const BeamState& s, const TargetProfile& t, double sigma_sq)
{
    if (t.wide_limit) return {};
    const Vec2 r0 = s.r0();
    const double two_s2 = 2.0 * sigma_sq;
    return {0.5 * (std::exp(-(t.b0 - r0).norm2() / two_s2) + std::exp(-(t.b0 + r0).norm2() / two_s2)),
            std::exp(-t.b0.norm2() / two_s2)};
}

// Sigma^2 = sigma_t^2 + sigma_perp^2; Sigma_x Sigma_y for the anisotropic beam.
double total_sigma_sq(const BeamState& s, const TargetProfile& t)
{
    const double st2 = t.sigma_t * t.sigma_t;
    if (s.variant() != BeamVariant::anisotropic_gaussian) return st2 + s.sigma_perp() * s.sigma_perp();
    return std::sqrt((st2 + s.sigma_x() * s.sigma_x()) * (st2 + s.sigma_y() * s.sigma_y()));
}

EventDensity finish(double value, double err, Method m, const TargetProfile& t,
                    std::optional<double> sigma_sq)
{
    EventDensity ed;
    ed.method = m;
    ed.err_est = std::abs(err);
    ed.value = check_nonnegative(value, ed.err_est, m);
    if (t.wide_limit) {
        ed.normalization = Normalization::cross_section;
    } else {
        ed.sigma_sq = sigma_sq;
    }
    return ed;
}

}  // namespace

Amplitude Amplitude::hydrogen(double a)
{
    if (!(a > 0.0)) throw Error(ErrorKind::invalid_state, "Bohr radius must be > 0");
    Amplitude f;
    f.a_ = a;
    return f;
}

Amplitude Amplitude::custom(std::function<double(double)> fn, std::string name)
{
    Amplitude f;
    f.custom_ = std::move(fn);
    f.name_ = std::move(name);
    return f;
}

double Amplitude::operator()(double q) const
{
    return custom_ ? custom_(q) : hydrogen_amplitude(q, a_);
}

double Amplitude::squared(double q2) const
{
    if (custom_) {
        const double v = custom_(std::sqrt(q2));
        return v * v;
    }
    return hydrogen_amplitude_sq(q2, a_);
}

void ScatteringConfig::validate() const
{
    if (n_e < 1) throw Error(ErrorKind::invalid_state, "n_e must be >= 1");
    target.validate();
    quad.one_d.validate();
    quad.two_d.validate();
    quad.four_d.validate();
}

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::general4d: return "general4d";
    case Method::quadrature2d: return "quadrature2d";
    case Method::closed_form: return "closed_form";
    }
    return "unknown";
}

EventDensity event_density_general(const ScatteringConfig& cfg, const Kinematics& kin)
{
    cfg.validate();
    if (cfg.target.wide_limit) {
        throw Error(ErrorKind::unsupported,
                    "general4d integrates n(b) explicitly and needs a finite target");
    }
    const BeamState& state = cfg.state;
    const TargetProfile& target = cfg.target;
    const MomentumTransfer q = momentum_transfer(kin);
    const Amplitude& amp = cfg.amplitude;

    // b-box: where both n(b) and the beam's position profile are non-negligible.
    const auto w = beam_widths(state);
    const Vec2 r0 = state.r0();
    const double r0_len = r0.norm();
    const double target_half = target_box_widths * target.sigma_t + r0_len;
    const std::array<double, 2> beam_half{std::abs(r0.x) + beam_box_widths * w.x,
                                          std::abs(r0.y) + beam_box_widths * w.y};
    const std::array<double, 2> centre{target.b0.x, target.b0.y};
    std::array<Interval, 4> box{};
    for (int i = 0; i < 2; ++i) {
        const double lo = std::max(centre[i] - target_half, -beam_half[i]);
        const double hi = std::min(centre[i] + target_half, beam_half[i]);
        if (!(lo < hi)) {
            // Beam and target do not overlap within truncation.
            return finish(0.0, 0.0, Method::general4d, target, total_sigma_sq(state, target));
        }
        box[i] = {lo, hi};
    }
    const auto pbox = momentum_box(state);
    box[2] = pbox[0];
    box[3] = pbox[1];

    const auto pcaps = momentum_panels(state, state.is_cat());
    NdOptions options;
    options.rule = NdRule::cubature;
    options.max_initial_panel = {w.x, w.y, pcaps[0], pcaps[1]};
    options.execution = cfg.execution;

    const double st2 = target.sigma_t * target.sigma_t;
    const double density_norm = 1.0 / (2.0 * pi * st2);
    auto integrand = [&](std::span<const double> v) {
        const Vec2 b{v[0], v[1]};
        const double density = density_norm * std::exp(-(b - target.b0).norm2() / (2.0 * st2));
        const PhasePoint pt{b, {v[2], v[3]}};
        return density * wigner(state, pt) * amplitude_sq_at(amp, q, v[2], v[3]);
    };
    const QuadResult r = integrate_nd(integrand, box, cfg.quad.four_d, options);
    const double ne = static_cast<double>(cfg.n_e);
    return finish(ne * r.value, ne * r.err_est, Method::general4d, target,
                  total_sigma_sq(state, target));
}

EventDensity event_density_gaussian(const ScatteringConfig& cfg, const Kinematics& kin)
{
    cfg.validate();
    const BeamState& state = cfg.state;
    if (state.variant() != BeamVariant::gaussian &&
        state.variant() != BeamVariant::anisotropic_gaussian) {
        throw Error(ErrorKind::unsupported, "event_density_gaussian needs a Gaussian beam, got " +
                                                std::string(to_string(state.variant())));
    }
    const TargetProfile& target = cfg.target;
    const MomentumTransfer q = momentum_transfer(kin);
    const auto w = beam_widths(state);
    const double sx2 = w.x * w.x;
    const double sy2 = w.y * w.y;

    // Per-axis analytic b-integral: the isotropic case has Sigma_x = Sigma_y.
    double prefactor = 2.0 * w.x * w.y / pi;
    std::optional<double> sigma_sq;
    if (!target.wide_limit) {
        const double st2 = target.sigma_t * target.sigma_t;
        const double big_x2 = st2 + sx2;
        const double big_y2 = st2 + sy2;
        const double big_xy = std::sqrt(big_x2 * big_y2);
        prefactor = static_cast<double>(cfg.n_e) * w.x * w.y / (pi * pi * big_xy) *
                    std::exp(-target.b0.x * target.b0.x / (2.0 * big_x2) -
                             target.b0.y * target.b0.y / (2.0 * big_y2));
        sigma_sq = big_xy;
    }

    const auto box = momentum_box(state);
    const auto caps = momentum_panels(state, false);
    NdOptions options;
    options.rule = NdRule::nested;
    options.max_initial_panel = {caps[0], caps[1]};
    const Amplitude& amp = cfg.amplitude;
    auto integrand = [&](std::span<const double> p) {
        return amplitude_sq_at(amp, q, p[0], p[1]) *
               std::exp(-2.0 * sx2 * p[0] * p[0] - 2.0 * sy2 * p[1] * p[1]);
    };
    const QuadResult r = integrate_nd(integrand, box, cfg.quad.two_d, options);
    return finish(prefactor * r.value, prefactor * r.err_est, Method::quadrature2d, target, sigma_sq);
}

EventDensity event_density_cat_quadrature(const ScatteringConfig& cfg, const Kinematics& kin)
{
    cfg.validate();
    const BeamState& state = cfg.state;
    if (!state.is_two_packet()) {
        throw Error(ErrorKind::unsupported, "event_density_cat_quadrature needs a cat or pair, got " +
                                                std::string(to_string(state.variant())));
    }
    const TargetProfile& target = cfg.target;
    const MomentumTransfer q = momentum_transfer(kin);
    const double s2 = state.sigma_perp() * state.sigma_perp();
    const double sigma_sq = total_sigma_sq(state, target);
    const PositionFactors pos = position_factors(state, target, sigma_sq);
    const double sign = state.cat_sign();
    const Vec2 r0 = state.r0();

    double prefactor = 2.0 * s2 / pi;
    if (!target.wide_limit) prefactor = static_cast<double>(cfg.n_e) * s2 / (pi * pi * sigma_sq);
    prefactor /= state.cat_normalization();

    const auto box = momentum_box(state);
    const auto caps = momentum_panels(state, state.is_cat());
    NdOptions options;
    options.rule = NdRule::nested;
    options.max_initial_panel = {caps[0], caps[1]};
    const Amplitude& amp = cfg.amplitude;
    auto integrand = [&](std::span<const double> p) {
        const double weight = amplitude_sq_at(amp, q, p[0], p[1]) *
                              std::exp(-2.0 * s2 * (p[0] * p[0] + p[1] * p[1]));
        const double bracket =
            pos.pair + sign * pos.inter * std::cos(2.0 * (r0.x * p[0] + r0.y * p[1]));
        return weight * bracket;
    };
    const QuadResult r = integrate_nd(integrand, box, cfg.quad.two_d, options);
    return finish(prefactor * r.value, prefactor * r.err_est, Method::quadrature2d, target,
                  target.wide_limit ? std::nullopt : std::optional<double>(sigma_sq));
}

ClosedFormTerms closed_form_terms(const MomentumTransfer& q, double sigma_perp, double a, double x)
{
    const double c = a * a / (8.0 * sigma_perp * sigma_perp);
    const double one_plus = 1.0 + c * x;
    ClosedFormTerms t;
    t.x = x;
    t.g = 1.0 + 0.25 * a * a * (q.qz * q.qz + q.qperp.norm2() / one_plus);
    t.s = c * x / one_plus;
    return t;
}

EventDensity event_density_cat_closed(const ScatteringConfig& cfg, const Kinematics& kin)
{
    cfg.validate();
    if (!cfg.amplitude.is_hydrogen()) {
        throw Error(ErrorKind::unsupported, "the closed form exists only for the hydrogen amplitude");
    }
    const BeamState& state = cfg.state;
    if (!state.is_cat() && state.variant() != BeamVariant::gaussian) {
        throw Error(ErrorKind::unsupported, "the closed form covers cats (and the Gaussian as r0 = 0)");
    }
    const TargetProfile& target = cfg.target;
    const MomentumTransfer q = momentum_transfer(kin);
    const double a = cfg.amplitude.bohr_radius();
    const double sigma = state.sigma_perp();
    const double s2 = sigma * sigma;
    const double c = a * a / (8.0 * s2);
    const double sigma_sq = total_sigma_sq(state, target);

    // The Gaussian is the even cat at r0 = 0: bracket 2, normalization 2.
    const bool gaussian = state.variant() == BeamVariant::gaussian;
    const double sign = gaussian ? 1.0 : state.cat_sign();
    const double norm = gaussian ? 2.0 : state.cat_normalization();
    const Vec2 r0 = gaussian ? Vec2{} : state.r0();
    const PositionFactors pos = position_factors(state, target, sigma_sq);
    const double r0_dot_q = dot(r0, q.qperp);
    const double r0_sq = r0.norm2();

    double prefactor = 0.25 * a * a / norm;
    if (!target.wide_limit) prefactor *= static_cast<double>(cfg.n_e) / (2.0 * pi * sigma_sq);

    auto integrand = [&](double x) {
        const ClosedFormTerms t = closed_form_terms(q, sigma, a, x);
        if (!(t.g >= 1.0)) {
            throw Error(ErrorKind::invalid_state, "closed-form exponent g < 1: " + std::to_string(t.g));
        }
        const double one_plus = 1.0 + c * x;
        const double poly = x + x * x + x * x * x / 6.0;
        const double interference =
            std::cos(2.0 * r0_dot_q * t.s) * std::exp(-r0_sq / (2.0 * s2 * one_plus));
        return std::exp(-x * t.g) * poly / one_plus * (pos.pair + sign * pos.inter * interference);
    };

    // e^{-x g} with g >= g_inf bounds the tail; truncate where it drops below eps.
    const QuadratureSpec& spec = cfg.quad.one_d;
    const double eps = std::max(spec.abs_tol / 10.0, 1e-300);
    const double g_inf = 1.0 + 0.25 * a * a * q.qz * q.qz;
    const double x_max = -std::log(eps) / g_inf + 40.0;
    const double cap = std::min(2.0, oscillation_panel_width(std::abs(r0_dot_q) * c));
    const QuadResult r = integrate_1d(integrand, {0.0, x_max}, spec, cap);
    return finish(prefactor * r.value, prefactor * r.err_est, Method::closed_form, target,
                  target.wide_limit ? std::nullopt : std::optional<double>(sigma_sq));
}

EventDensity event_density(const ScatteringConfig& cfg, const Kinematics& kin, MethodChoice choice)
{
    const BeamVariant v = cfg.state.variant();
    const bool gaussian_like = v == BeamVariant::gaussian || v == BeamVariant::anisotropic_gaussian;
    switch (choice) {
    case MethodChoice::general4d: return event_density_general(cfg, kin);
    case MethodChoice::closed_form: return event_density_cat_closed(cfg, kin);
    case MethodChoice::quadrature2d:
        return gaussian_like ? event_density_gaussian(cfg, kin) : event_density_cat_quadrature(cfg, kin);
    case MethodChoice::automatic:
        if (cfg.state.is_cat() && cfg.amplitude.is_hydrogen()) return event_density_cat_closed(cfg, kin);
        return gaussian_like ? event_density_gaussian(cfg, kin) : event_density_cat_quadrature(cfg, kin);
    }
    return event_density_gaussian(cfg, kin);
}

double cross_section(const EventDensity& ed, std::int64_t n_e)
{
    if (ed.normalization == Normalization::cross_section) return ed.value;
    if (!ed.sigma_sq) {
        throw Error(ErrorKind::missing_sigma, "event density carries no Sigma^2 for conversion");
    }
    if (n_e < 1) throw Error(ErrorKind::invalid_state, "n_e must be >= 1");
    return 2.0 * pi * *ed.sigma_sq * ed.value / static_cast<double>(n_e);
}

std::vector<ValidityItem> validity_check(const BeamState& state, const TargetProfile& target, double a)
{
    constexpr double much = 10.0;
    const double sigma = std::min(state.sigma_x(), state.sigma_y());
    std::vector<ValidityItem> out;
    auto add = [&](std::string condition, double margin, double needed, std::string warn) {
        const bool ok = margin >= needed;
        out.push_back({std::move(condition), ok, margin, ok ? std::string{} : std::move(warn)});
    };

    add("a << sigma_z", state.sigma_z() / a, much, "packet shorter than the potential radius");
    add("sigma_z << sigma_perp^2 p_i", sigma * sigma * state.p_i() / state.sigma_z(), much,
        "transverse spreading during the collision is not negligible");
    add("theta_k = 1/(sigma_perp p_i) << 1", sigma * state.p_i(), much,
        "beam divergence is not small");
    if (target.wide_limit) {
        out.push_back({"sigma_t >> a", true, infinity, {}});
    } else {
        add("sigma_t >> a", target.sigma_t / a, much, "target narrower than ~10 Bohr radii");
    }
    if (state.is_cat()) {
        add("r0 >~ sigma_perp", state.r0_magnitude() / state.sigma_perp(), 1.0,
            "asymmetry vanishes: packets overlap (r0 < sigma_perp)");
        add("sigma_perp >~ a", state.sigma_perp() / a, 1.0, "packet narrower than the potential radius");
    }
    return out;
}

}  // namespace catscatter
