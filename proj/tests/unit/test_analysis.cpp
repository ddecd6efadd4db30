#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "catscatter/analysis.hpp"
#include "catscatter/error.hpp"

using namespace catscatter;

namespace {

AsymmetrySpec fig3_spec(BeamState s)
{
    AsymmetrySpec spec;
    spec.cfg.state = s;
    spec.cfg.target = TargetProfile::wide();
    spec.kin_base = Kinematics::elastic(10.0, 10.0 * degree);
    spec.phi_grid_n = 16;
    return spec;
}

std::vector<std::pair<double, double>> series(const std::vector<double>& y)
{
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < y.size(); ++i) out.emplace_back(static_cast<double>(i), y[i]);
    return out;
}

}  // namespace

TEST_CASE("asymmetry vanishes without interference")
{
    for (const BeamState& s : {BeamState::gaussian(2.0), BeamState::incoherent_pair(2.0, 2.0),
                               BeamState::incoherent_pair(2.0, 5.0, 0.8)}) {
        const auto r = azimuthal_asymmetry(fig3_spec(s));
        CHECK(std::abs(r.para_perp) < 1e-8);
        CHECK(std::abs(r.minmax) < 1e-8);
    }
}

TEST_CASE("odd cat at Fig. 3 parameters")
{
    const auto r = azimuthal_asymmetry(fig3_spec(BeamState::odd_cat(2.0, 2.0)));
    CHECK(std::abs(r.A) >= 0.03);
    CHECK(std::abs(r.A) <= 0.2);
    CHECK(r.method == Method::closed_form);
    CHECK(r.phi_scan.size() == 16);
    CHECK(r.phi_scan.front().phi == 0.0);
    for (const auto& s : r.phi_scan) CHECK(s.dnu >= 0.0);
    CHECK(std::abs(r.para_perp) <= r.minmax + 1e-15);
}

TEST_CASE("phi grid without the perpendicular point")
{
    auto spec = fig3_spec(BeamState::even_cat(2.0, 4.0));
    spec.phi_grid_n = 9;
    const auto r = azimuthal_asymmetry(spec);
    CHECK(r.phi_scan.size() == 10);
    CHECK(r.phi_scan.back().phi == doctest::Approx(std::numbers::pi / 2));
    spec.phi_grid_n = 16;
    CHECK(azimuthal_asymmetry(spec).para_perp == doctest::Approx(r.para_perp).epsilon(1e-12));
    spec.phi_grid_n = 4;
    CHECK_THROWS_AS(azimuthal_asymmetry(spec), Error);
}

TEST_CASE("metric consistency and rotation covariance")
{
    for (double r0 : {2.0, 3.0, 5.0}) {
        for (double th : {4.0, 10.0, 25.0}) {
            auto spec = fig3_spec(BeamState::even_cat(2.0, r0));
            spec.kin_base.theta = th * degree;
            const auto base = azimuthal_asymmetry(spec);
            CHECK(std::abs(base.para_perp) <= base.minmax + 1e-15);

            spec.cfg.state = BeamState::even_cat(2.0, r0, 1.1);
            const auto rotated = azimuthal_asymmetry(spec);
            CHECK(rotated.para_perp == doctest::Approx(base.para_perp).epsilon(1e-9));
        }
    }
}

TEST_CASE("sweeps at Fig. 3 parameters")
{
    const auto tmpl = fig3_spec(BeamState::odd_cat(2.0, 2.0));
    const std::vector<double> r0s{2.0, 3.0, 4.0};
    const auto rows = sweep(tmpl, SweepAxis::r0, r0s);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].result.has_value());
        CHECK(rows[i].axis_value == r0s[i]);
        CHECK(std::abs(rows[i].result->A) > 0.005);
    }

    const std::vector<double> sigmas{2.0, 4.0};
    const auto by_sigma = sweep(fig3_spec(BeamState::even_cat(2.0, 4.0)), SweepAxis::sigma_perp, sigmas);
    const double ratio = std::abs(by_sigma[1].result->A) / std::abs(by_sigma[0].result->A);
    CHECK(ratio < 1.0);
    CHECK(ratio > 0.25 / 3.0);
    CHECK(ratio < 0.25 * 3.0);
}

TEST_CASE("sweep records per-point errors and warnings")
{
    auto tmpl = fig3_spec(BeamState::odd_cat(2.0, 2.0));
    const std::vector<double> r0s{2.0, 1e-6, 3.0};
    const auto rows = sweep(tmpl, SweepAxis::r0, r0s);
    CHECK(rows[0].result.has_value());
    CHECK_FALSE(rows[1].result.has_value());
    CHECK(rows[1].error.find("InvalidCatSeparation") != std::string::npos);
    CHECK(rows[2].result.has_value());

    tmpl.kin_base.p_f = 9.0;
    const std::vector<double> thetas{5.0 * degree, 10.0 * degree};
    for (const auto& row : sweep(tmpl, SweepAxis::theta, thetas)) {
        bool kin_warning = false;
        for (const auto& w : row.warnings) kin_warning = kin_warning || w.find("p_f") != std::string::npos;
        CHECK(kin_warning);
    }
    CHECK_THROWS_AS(sweep(tmpl, SweepAxis::r0, std::vector<double>{}), Error);
    CHECK(sweep_axis_from_string("sigma-perp") == SweepAxis::sigma_perp);
    CHECK_THROWS_AS(sweep_axis_from_string("width"), Error);
}

TEST_CASE("sweep: serial and parallel agree bit for bit")
{
    const auto tmpl = fig3_spec(BeamState::even_cat(2.0, 2.0));
    const auto values = linspace(2.0, 6.0, 6);
    const auto a = sweep(tmpl, SweepAxis::r0, values, Execution::serial);
    const auto b = sweep(tmpl, SweepAxis::r0, values, Execution::parallel);
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(a[i].result->A == b[i].result->A);
        CHECK(a[i].result->minmax == b[i].result->minmax);
    }
}

TEST_CASE("oscillation detection")
{
    const auto flat = detect_oscillation(series({0.05, 0.05, 0.05, 0.05, 0.05}));
    CHECK(flat.sign_changes == 0);
    CHECK(flat.is_monotonic);

    const auto hump = detect_oscillation(series({0.01, 0.02, 0.03, 0.02, 0.01}));
    CHECK_FALSE(hump.is_monotonic);
    CHECK(hump.sign_changes == 0);

    const auto wave = detect_oscillation(series({0.1, -0.1, 0.1, -0.1, 0.1, -0.1}));
    CHECK(wave.sign_changes == 5);
    CHECK(wave.difference_sign_changes == 4);

    try {
        detect_oscillation(series({1.0, 2.0, 3.0, 4.0}));
        FAIL("expected TooFewPoints");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::too_few_points);
    }
    const std::vector<std::pair<double, double>> unordered{{0, 1}, {2, 1}, {1, 1}, {3, 1}, {4, 1}};
    CHECK_THROWS_AS(detect_oscillation(unordered), Error);
}

TEST_CASE("anisotropic Gaussian: false asymmetry without oscillation")
{
    auto tmpl = fig3_spec(BeamState::anisotropic_gaussian(2.0, 2.0));
    tmpl.metric = AsymmetryMetric::minmax;
    const auto aspects = linspace(1.0, 1.2, 5);
    const auto rows = sweep(tmpl, SweepAxis::aspect, aspects);
    std::vector<std::pair<double, double>> s;
    for (const auto& row : rows) s.emplace_back(row.axis_value, row.result->A);
    CHECK(detect_oscillation(s).is_monotonic);
    CHECK(std::abs(rows.front().result->A) < 1e-8);
}

TEST_CASE("peak finding")
{
    const auto theta = linspace(1.0 * degree, 45.0 * degree, 60);
    std::vector<double> decreasing;
    for (double t : theta) decreasing.push_back(1.0 / (1.0 + t));
    const auto edge = find_peak(theta, decreasing);
    CHECK(edge.at_edge);
    CHECK(edge.theta_star == theta.front());
    CHECK(edge.grid_index == 0);

    const double centre = 7.3 * degree;
    std::vector<double> parabola;
    for (double t : theta) parabola.push_back(5.0 - (t - centre) * (t - centre));
    const auto p = find_peak(theta, parabola);
    CHECK_FALSE(p.at_edge);
    CHECK(p.theta_star == doctest::Approx(centre).epsilon(1e-10));
    CHECK(p.value_star == doctest::Approx(5.0).epsilon(1e-12));

    std::vector<double> flat(theta.size(), 1.0);
    flat[3] = 1.005;
    try {
        find_peak(theta, flat);
        FAIL("expected FlatDistribution");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::flat_distribution);
    }

    ScatteringConfig cfg;
    CHECK_THROWS_AS(peak_theta(cfg, 30.0, linspace(2.0 * degree, 45.0 * degree, 60)), Error);
    CHECK_THROWS_AS(peak_theta(cfg, 30.0, linspace(1.0 * degree, 45.0 * degree, 20)), Error);
}

TEST_CASE("asymmetry profile peak moves to smaller angles at higher momentum")
{
    ScatteringConfig cfg;
    cfg.state = BeamState::odd_cat(2.0, 2.0);
    const auto grid = linspace(1.0 * degree, 45.0 * degree, 89);
    const auto p10 = peak_theta(cfg, 10.0, grid, ThetaProfile::asymmetry);
    const auto p30 = peak_theta(cfg, 30.0, grid, ThetaProfile::asymmetry);
    CHECK(p30.theta_star < p10.theta_star);
    CHECK(p30.theta_star > 3.0 * degree);
    CHECK(p30.theta_star < 7.0 * degree);
    CHECK_FALSE(p30.at_edge);
}
