#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "catscatter/analysis.hpp"
#include "catscatter/error.hpp"
#include "catscatter/scattering.hpp"

using namespace catscatter;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

ScatteringConfig config(BeamState s, TargetProfile t = TargetProfile::wide())
{
    ScatteringConfig cfg;
    cfg.state = s;
    cfg.target = t;
    return cfg;
}

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::input_error;
}

const Kinematics fig3 = Kinematics::elastic(10.0, 10.0 * degree);

}  // namespace

TEST_CASE("general4d: Gaussian is phi independent")
{
    const auto cfg = config(BeamState::gaussian(2.0), TargetProfile::gaussian(20.0));
    const auto a = event_density_general(cfg, Kinematics::elastic(10.0, 10.0 * degree, 0.0));
    const auto b = event_density_general(cfg, Kinematics::elastic(10.0, 10.0 * degree, 137.0 * degree));
    CHECK(a.method == Method::general4d);
    CHECK(rel(a.value, b.value) < 1e-4);
    CHECK(rel(a.value, event_density_gaussian(cfg, fig3).value) < 1e-3);
}

TEST_CASE("general4d agrees with the 2-D quadratures")
{
    const TargetProfile t = TargetProfile::gaussian(20.0, {1.5, -0.5});
    for (const BeamState& s : {BeamState::even_cat(2.0, 4.0), BeamState::odd_cat(1.0, 2.0, 0.6)}) {
        const auto cfg = config(s, t);
        const Kinematics kin = Kinematics::elastic(10.0, 8.0 * degree, 0.9);
        const auto g4 = event_density_general(cfg, kin);
        const auto q2 = event_density_cat_quadrature(cfg, kin);
        CHECK(rel(g4.value, q2.value) < 1e-3);
        REQUIRE(g4.sigma_sq.has_value());
        CHECK(*g4.sigma_sq == doctest::Approx(400.0 + s.sigma_perp() * s.sigma_perp()));
    }
    CHECK(kind_of([] { event_density_general(config(BeamState::gaussian(2.0)), fig3); }) ==
          ErrorKind::unsupported);
}

TEST_CASE("incoherent pair is the mean of two displaced Gaussians")
{
    const Vec2 b0{2.0, 1.0};
    const BeamState pair = BeamState::incoherent_pair(2.0, 3.0, 0.4);
    const auto cfg = config(pair, TargetProfile::gaussian(20.0, b0));
    const Kinematics kin = Kinematics::elastic(10.0, 12.0 * degree, 0.3);
    auto shifted = [&](Vec2 offset) {
        return event_density_gaussian(config(BeamState::gaussian(2.0), TargetProfile::gaussian(20.0, offset)), kin).value;
    };
    const double mean = 0.5 * (shifted(b0 - pair.r0()) + shifted(b0 + pair.r0()));
    CHECK(rel(event_density_general(cfg, kin).value, mean) < 1e-4);
    CHECK(rel(event_density_cat_quadrature(cfg, kin).value, mean) < 1e-6);
}

TEST_CASE("Gaussian: b0 dependence and flat phi scan")
{
    const double sigma_sq = 400.0 + 4.0;
    const auto on = config(BeamState::gaussian(2.0), TargetProfile::gaussian(20.0));
    const auto off = config(BeamState::gaussian(2.0), TargetProfile::gaussian(20.0, {3.0, 0.0}));
    const double ratio = event_density_gaussian(off, fig3).value / event_density_gaussian(on, fig3).value;
    CHECK(ratio == doctest::Approx(std::exp(-9.0 / (2.0 * sigma_sq))).epsilon(1e-6));

    const double v0 = event_density_gaussian(off, fig3).value;
    for (int k = 1; k < 16; ++k) {
        const double v = event_density_gaussian(off, Kinematics::elastic(10.0, 10.0 * degree, k * std::numbers::pi / 8)).value;
        CHECK(rel(v, v0) < 1e-8);
    }
}

TEST_CASE("Gaussian equals the r0 = 0 even cat")
{
    for (const auto& t : {TargetProfile::wide(), TargetProfile::gaussian(20.0, {1.0, 2.0})}) {
        const double g = event_density_gaussian(config(BeamState::gaussian(2.0), t), fig3).value;
        CHECK(rel(g, event_density_cat_closed(config(BeamState::even_cat(2.0, 0.0), t), fig3).value) < 1e-8);
        CHECK(rel(g, event_density_cat_closed(config(BeamState::gaussian(2.0), t), fig3).value) < 1e-8);
        CHECK(rel(g, event_density_cat_quadrature(config(BeamState::even_cat(2.0, 2e-6), t), fig3).value) < 1e-8);
    }
}

TEST_CASE("closed form agrees with the 2-D quadrature on random parameters")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const double sigma = 1.0 + 3.0 * u(rng);
        const double r0 = sigma * (1.0 + 2.0 * u(rng));
        const double theta = (2.0 + 28.0 * u(rng)) * degree;
        const double phi = 2.0 * std::numbers::pi * u(rng);
        const double phi_r0 = 2.0 * std::numbers::pi * u(rng);
        const bool odd = trial % 2 == 1;
        const BeamState s = odd ? BeamState::odd_cat(sigma, r0, phi_r0) : BeamState::even_cat(sigma, r0, phi_r0);
        const TargetProfile t = trial % 3 == 0 ? TargetProfile::gaussian(15.0, {2.0, -1.0}) : TargetProfile::wide();
        const Kinematics kin = Kinematics::elastic(10.0, theta, phi);
        CAPTURE(trial);
        CHECK(rel(event_density_cat_closed(config(s, t), kin).value,
                  event_density_cat_quadrature(config(s, t), kin).value) < 1e-6);
    }
}

TEST_CASE("spec example: odd cat sigma 2, r0 2 sigma")
{
    const auto cfg = config(BeamState::odd_cat(2.0, 4.0));
    const auto c = event_density_cat_closed(cfg, fig3);
    const auto q = event_density_cat_quadrature(cfg, fig3);
    CHECK(c.method == Method::closed_form);
    CHECK(q.method == Method::quadrature2d);
    CHECK(c.normalization == Normalization::cross_section);
    CHECK(rel(c.value, q.value) < 1e-6);
    CHECK(c.value > 0.0);
}

TEST_CASE("phi periodicity and reflection about phi_r0")
{
    const double phi_r0 = 0.4;
    for (const BeamState& s : {BeamState::even_cat(2.0, 3.0, phi_r0), BeamState::odd_cat(2.0, 2.0, phi_r0)}) {
        const auto cfg = config(s);
        for (double d : {0.1, 0.7, 1.3}) {
            auto at = [&](double phi) { return event_density(cfg, Kinematics::elastic(10.0, 10.0 * degree, phi)).value; };
            CHECK(rel(at(phi_r0 + d), at(phi_r0 + d + std::numbers::pi)) < 1e-8);
            CHECK(rel(at(phi_r0 + d), at(phi_r0 - d)) < 1e-8);
        }
    }
}

TEST_CASE("separation limit")
{
    const auto cfg = config(BeamState::even_cat(2.0, 20.0));
    double lo = infinity, hi = -infinity;
    for (int k = 0; k < 16; ++k) {
        const double v = event_density(cfg, Kinematics::elastic(10.0, 10.0 * degree, k * std::numbers::pi / 16)).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK((hi - lo) / (hi + lo) < 1e-3);
}

TEST_CASE("closed-form terms")
{
    for (double th : {0.0, 0.3, 1.0, 3.1}) {
        const auto q = momentum_transfer(Kinematics::elastic(10.0, th, 0.2));
        for (double x : {0.0, 0.5, 10.0, 1e4}) {
            const auto t = closed_form_terms(q, 2.0, 1.0, x);
            CHECK(t.g >= 1.0);
            CHECK(t.s >= 0.0);
            CHECK(t.s < 1.0);
            CHECK(t.x == x);
        }
    }
    const auto t = closed_form_terms({0.0, {}}, 1.0, 1.0, 8.0);
    CHECK(t.g == 1.0);
    CHECK(t.s == doctest::Approx(0.5));
}

TEST_CASE("cross section")
{
    EventDensity zero;
    zero.sigma_sq = 4.0;
    CHECK(cross_section(zero, 1) == 0.0);
    EventDensity one;
    one.value = 1.0;
    one.sigma_sq = 1.0;
    CHECK(cross_section(one, 1) == doctest::Approx(2.0 * std::numbers::pi));

    auto cfg = config(BeamState::even_cat(2.0, 4.0), TargetProfile::gaussian(20.0));
    const auto single = event_density(cfg, fig3);
    cfg.n_e = 2;
    const auto doubled = event_density(cfg, fig3);
    CHECK(doubled.value == doctest::Approx(2.0 * single.value).epsilon(1e-14));
    CHECK(cross_section(doubled, 2) == doctest::Approx(cross_section(single, 1)).epsilon(1e-14));

    const auto wide = event_density(config(BeamState::even_cat(2.0, 4.0)), fig3);
    CHECK(cross_section(wide, 1) == wide.value);
    CHECK(cross_section(wide, 7) == wide.value);

    EventDensity missing;
    missing.value = 1.0;
    CHECK(kind_of([&] { cross_section(missing, 1); }) == ErrorKind::missing_sigma);
}

TEST_CASE("wide limit matches a very wide finite target in dsigma")
{
    const BeamState s = BeamState::odd_cat(2.0, 2.0);
    const double wide = event_density(config(s), fig3).value;
    const auto finite = event_density(config(s, TargetProfile::gaussian(1e4)), fig3);
    CHECK(rel(cross_section(finite, 1), wide) < 1e-6);
}

TEST_CASE("method dispatch and amplitudes")
{
    CHECK(event_density(config(BeamState::gaussian(2.0)), fig3).method == Method::quadrature2d);
    CHECK(event_density(config(BeamState::odd_cat(2.0, 2.0)), fig3).method == Method::closed_form);
    CHECK(event_density(config(BeamState::incoherent_pair(2.0, 2.0)), fig3).method == Method::quadrature2d);

    auto cfg = config(BeamState::odd_cat(2.0, 2.0));
    cfg.amplitude = Amplitude::custom([](double q) { return hydrogen_amplitude(q); }, "hydrogen-copy");
    CHECK(event_density(cfg, fig3).method == Method::quadrature2d);
    CHECK(kind_of([&] { event_density_cat_closed(cfg, fig3); }) == ErrorKind::unsupported);
    CHECK(rel(event_density(cfg, fig3).value, event_density(config(BeamState::odd_cat(2.0, 2.0)), fig3).value) < 1e-6);

    CHECK(kind_of([] { event_density_gaussian(config(BeamState::odd_cat(2.0, 2.0)), fig3); }) == ErrorKind::unsupported);
}

TEST_CASE("anisotropic Gaussian")
{
    const auto iso = event_density(config(BeamState::gaussian(2.0)), fig3).value;
    const auto round = event_density(config(BeamState::anisotropic_gaussian(2.0, 2.0)), fig3).value;
    CHECK(rel(iso, round) < 1e-10);

    const auto cfg = config(BeamState::anisotropic_gaussian(2.0, 2.3), TargetProfile::gaussian(20.0, {1.0, 2.0}));
    const Kinematics kin = Kinematics::elastic(10.0, 10.0 * degree, 0.5);
    const auto g4 = event_density_general(cfg, kin);
    const auto q2 = event_density(cfg, kin);
    CHECK(rel(g4.value, q2.value) < 1e-3);
    REQUIRE(q2.sigma_sq.has_value());
    CHECK(*q2.sigma_sq == doctest::Approx(std::sqrt((400.0 + 4.0) * (400.0 + 2.3 * 2.3))));
}

TEST_CASE("totals stay nonnegative for states with negative Wigner regions")
{
    for (double r0 : {1.0, 2.0, 6.0}) {
        for (double th : {2.0, 10.0, 30.0, 60.0}) {
            for (const BeamState& s : {BeamState::even_cat(2.0, r0), BeamState::odd_cat(2.0, r0)}) {
                const auto ed = event_density(config(s), Kinematics::elastic(10.0, th * degree, 0.3));
                CHECK(ed.value >= -ed.err_est);
                CHECK(ed.err_est >= 0.0);
            }
        }
    }
}

TEST_CASE("validity report")
{
    const auto items = validity_check(BeamState::gaussian(2.0), TargetProfile::wide());
    REQUIRE(items.size() == 4);
    CHECK(items[0].margin == doctest::Approx(10.0));
    CHECK(items[0].satisfied);
    CHECK(items[1].margin == doctest::Approx(4.0));
    CHECK_FALSE(items[1].satisfied);
    CHECK(items[2].margin == doctest::Approx(20.0));
    CHECK(items[2].satisfied);

    const auto cat = validity_check(BeamState::even_cat(2.0, 0.4), TargetProfile::gaussian(5.0));
    bool warned = false;
    for (const auto& it : cat) {
        if (it.condition == "r0 >~ sigma_perp") {
            warned = !it.satisfied && it.note.find("asymmetry vanishes") != std::string::npos;
        }
        if (it.condition == "sigma_t >> a") CHECK_FALSE(it.satisfied);
    }
    CHECK(warned);
}

TEST_CASE("parallel and serial evaluation agree bit for bit")
{
    auto cfg = config(BeamState::even_cat(2.0, 4.0), TargetProfile::gaussian(20.0, {1.0, 0.0}));
    cfg.execution = Execution::serial;
    const double a = event_density_general(cfg, fig3).value;
    cfg.execution = Execution::parallel;
    CHECK(a == event_density_general(cfg, fig3).value);
}
