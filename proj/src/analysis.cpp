#include "catscatter/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "catscatter/error.hpp"

namespace catscatter {

namespace {

constexpr double tiny = 1e-300;

double contrast(double hi, double lo)
{
    const double sum = hi + lo;
    if (std::abs(hi) < tiny && std::abs(lo) < tiny) {
        throw Error(ErrorKind::degenerate_denominator, "both azimuthal samples vanish");
    }
    return (hi - lo) / sum;
}

ScatteringConfig with_momentum(ScatteringConfig cfg, double p_i)
{
    cfg.state = cfg.state.with_p_i(p_i);
    return cfg;
}

}  // namespace

std::string_view to_string(AsymmetryMetric m)
{
    return m == AsymmetryMetric::para_perp ? "para-perp" : "minmax";
}

AsymmetryResult azimuthal_asymmetry(const AsymmetrySpec& spec, Execution exec)
{
    if (spec.phi_grid_n < 8) {
        throw Error(ErrorKind::invalid_state, "phi_grid_n must be >= 8");
    }
    const double phi_r0 = spec.cfg.state.phi_r0();
    const int n = spec.phi_grid_n;
    const bool grid_has_perp = n % 4 == 0;

    // Grid anchored at phi_r0; append phi_r0 + pi/2 if the grid misses it.
    std::vector<double> phis;
    for (int k = 0; k < n; ++k) phis.push_back(phi_r0 + 2.0 * std::numbers::pi * k / n);
    const long perp_index = grid_has_perp ? n / 4 : n;
    if (!grid_has_perp) phis.push_back(phi_r0 + 0.5 * std::numbers::pi);

    std::vector<Method> methods(phis.size());
    const auto values = indexed_map<double>(static_cast<long>(phis.size()), exec, [&](long i) {
        Kinematics kin = spec.kin_base;
        kin.phi = phis[i];
        const EventDensity ed = event_density(spec.cfg, kin, spec.method);
        methods[i] = ed.method;
        return ed.value;
    });

    AsymmetryResult out;
    out.metric = spec.metric;
    out.theta = spec.kin_base.theta;
    out.method = methods.front();
    for (std::size_t i = 0; i < phis.size(); ++i) out.phi_scan.push_back({phis[i], values[i]});

    const double para = values[0];
    const double perp = values[perp_index];
    out.para_perp = contrast(perp, para);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out.minmax = contrast(*hi, *lo);
    out.A = spec.metric == AsymmetryMetric::para_perp ? out.para_perp : out.minmax;
    return out;
}

std::string_view to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::r0: return "r0";
    case SweepAxis::sigma_perp: return "sigma-perp";
    case SweepAxis::theta: return "theta";
    case SweepAxis::p_i: return "pi";
    case SweepAxis::aspect: return "aspect";
    }
    return "unknown";
}

SweepAxis sweep_axis_from_string(std::string_view name)
{
    for (auto a : {SweepAxis::r0, SweepAxis::sigma_perp, SweepAxis::theta, SweepAxis::p_i,
                   SweepAxis::aspect}) {
        if (name == to_string(a)) return a;
    }
    throw Error(ErrorKind::input_error,
                "unknown sweep axis '" + std::string(name) + "' (expected r0|sigma-perp|theta|pi|aspect)");
}

std::vector<SweepRow> sweep(const AsymmetrySpec& tmpl, SweepAxis axis, std::span<const double> values,
                            Execution exec)
{
    if (values.empty()) throw Error(ErrorKind::invalid_state, "sweep needs at least one value");

    // Points run one per worker; the inner phi scan stays serial.
    return indexed_map<SweepRow>(static_cast<long>(values.size()), exec, [&](long i) {
        SweepRow row;
        row.axis_value = values[i];
        try {
            AsymmetrySpec spec = tmpl;
            switch (axis) {
            case SweepAxis::r0: spec.cfg.state = spec.cfg.state.with_r0(values[i]); break;
            case SweepAxis::sigma_perp:
                spec.cfg.state = spec.cfg.state.with_sigma_perp(values[i]);
                break;
            case SweepAxis::theta: spec.kin_base.theta = values[i]; break;
            case SweepAxis::p_i: {
                const double ratio = spec.kin_base.p_f / spec.kin_base.p_i;
                spec.kin_base.p_i = values[i];
                spec.kin_base.p_f = values[i] * ratio;
                spec.cfg.state = spec.cfg.state.with_p_i(values[i]);
                break;
            }
            case SweepAxis::aspect: spec.cfg.state = spec.cfg.state.with_aspect(values[i]); break;
            }
            spec.kin_base.validate();
            for (auto& w : kinematics_warnings(spec.kin_base)) row.warnings.push_back(std::move(w));
            for (auto& w : beam_warnings(spec.cfg.state)) row.warnings.push_back(std::move(w));
            for (const auto& item : validity_check(spec.cfg.state, spec.cfg.target,
                                                   spec.cfg.amplitude.bohr_radius())) {
                if (!item.satisfied) row.warnings.push_back(item.condition + ": " + item.note);
            }
            row.result = azimuthal_asymmetry(spec, Execution::serial);
            row.result->axis_value = values[i];
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    });
}

OscillationReport detect_oscillation(std::span<const std::pair<double, double>> series)
{
    if (series.size() < 5) {
        throw Error(ErrorKind::too_few_points, "oscillation detection needs >= 5 points, got " +
                                                   std::to_string(series.size()));
    }
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (!(series[i].first > series[i - 1].first)) {
            throw Error(ErrorKind::invalid_state, "abscissae must be strictly increasing");
        }
    }
    auto count_changes = [](const std::vector<double>& v) {
        int changes = 0;
        int last = 0;
        for (double x : v) {
            const int s = (x > 0.0) - (x < 0.0);
            if (s == 0) continue;
            if (last != 0 && s != last) ++changes;
            last = s;
        }
        return changes;
    };

    std::vector<double> a;
    std::vector<double> diffs;
    for (std::size_t i = 0; i < series.size(); ++i) {
        a.push_back(series[i].second);
        if (i > 0) diffs.push_back(series[i].second - series[i - 1].second);
    }
    OscillationReport out;
    out.sign_changes = count_changes(a);
    out.difference_sign_changes = count_changes(diffs);
    out.is_monotonic = out.difference_sign_changes == 0;
    return out;
}

PeakResult find_peak(std::span<const double> theta, std::span<const double> values)
{
    if (theta.size() != values.size() || theta.size() < 3) {
        throw Error(ErrorKind::invalid_state, "peak search needs >= 3 matching samples");
    }
    const auto max_it = std::max_element(values.begin(), values.end());
    const double vmax = *max_it;
    const double vmin = *std::min_element(values.begin(), values.end());
    if (!(vmax > 0.0) || (vmin > 0.0 && vmax / vmin < 1.01)) {
        throw Error(ErrorKind::flat_distribution, "profile varies by less than 1% over the grid");
    }

    PeakResult out;
    out.profile.assign(values.begin(), values.end());
    const std::size_t i = static_cast<std::size_t>(max_it - values.begin());
    out.grid_index = i;
    out.theta_star = theta[i];
    out.value_star = vmax;
    if (i == 0 || i + 1 == values.size()) {
        out.at_edge = true;
        return out;
    }

    // Vertex of the parabola through three (possibly unevenly spaced) points.
    const double x0 = theta[i - 1], x1 = theta[i], x2 = theta[i + 1];
    const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (curvature < 0.0) {
        const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
        if (vertex > x0 && vertex < x2) {
            out.theta_star = vertex;
            out.value_star = y1 + d01 * (vertex - x1) + curvature * (vertex - x0) * (vertex - x1);
        }
    }
    return out;
}

PeakResult peak_theta(const ScatteringConfig& cfg, double p_i, std::span<const double> theta_grid,
                      ThetaProfile profile, Execution exec)
{
    constexpr double slack = 1e-9;
    if (theta_grid.size() < 50 || theta_grid.front() > 1.0 * degree + slack ||
        theta_grid.back() < 45.0 * degree - slack) {
        throw Error(ErrorKind::invalid_state,
                    "theta grid must cover [1 deg, 45 deg] with at least 50 points");
    }
    const ScatteringConfig local = with_momentum(cfg, p_i);
    const double phi_r0 = local.state.phi_r0();

    const auto values = indexed_map<double>(static_cast<long>(theta_grid.size()), exec, [&](long i) {
        const Kinematics kin = Kinematics::elastic(p_i, theta_grid[i], phi_r0);
        if (profile == ThetaProfile::event_density) return event_density(local, kin).value;
        AsymmetrySpec spec;
        spec.cfg = local;
        spec.kin_base = kin;
        spec.phi_grid_n = 8;
        return std::abs(azimuthal_asymmetry(spec, Execution::serial).para_perp);
    });
    return find_peak(theta_grid, values);
}

std::vector<double> linspace(double lo, double hi, int n)
{
    if (n < 2) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace catscatter
