#include "catscatter/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "catscatter/analysis.hpp"
#include "catscatter/beam.hpp"
#include "catscatter/error.hpp"
#include "catscatter/scattering.hpp"

namespace catscatter::cli {

using nlohmann::json;

namespace {

[[noreturn]] void input_error(const std::string& what) { throw Error(ErrorKind::input_error, what); }

double parse_number(const std::string& text, const std::string& field)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) input_error(field + ": trailing characters in '" + text + "'");
        return v;
    } catch (const std::invalid_argument&) {
        input_error(field + ": '" + text + "' is not a number");
    } catch (const std::out_of_range&) {
        input_error(field + ": '" + text + "' is out of range");
    }
}

std::vector<double> parse_values(const std::string& text)
{
    if (text.find(':') != std::string::npos) return GridSpec::parse(text).values();
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, "--values"));
    if (out.empty()) input_error("--values: empty list");
    return out;
}

BeamState build_state(const RunConfig& rc)
{
    const BeamVariant v = beam_variant_from_string(rc.state);
    const double phi_r0 = rc.phi_r0_deg * degree;
    switch (v) {
    case BeamVariant::gaussian: return BeamState::gaussian(rc.sigma_perp, rc.p_i, rc.sigma_z);
    case BeamVariant::even_cat:
        return BeamState::even_cat(rc.sigma_perp, rc.r0, phi_r0, rc.p_i, rc.sigma_z);
    case BeamVariant::odd_cat:
        return BeamState::odd_cat(rc.sigma_perp, rc.r0, phi_r0, rc.p_i, rc.sigma_z);
    case BeamVariant::incoherent_pair:
        return BeamState::incoherent_pair(rc.sigma_perp, rc.r0, phi_r0, rc.p_i, rc.sigma_z);
    case BeamVariant::anisotropic_gaussian:
        return BeamState::anisotropic_gaussian(rc.sigma_x.value_or(rc.sigma_perp),
                                               rc.sigma_y.value_or(rc.sigma_perp), rc.p_i, rc.sigma_z);
    }
    input_error("unknown state");
}

ScatteringConfig build_scattering(const RunConfig& rc)
{
    ScatteringConfig cfg;
    cfg.n_e = rc.n_e;
    cfg.state = build_state(rc);
    cfg.target = rc.wide ? TargetProfile::wide() : TargetProfile::gaussian(rc.sigma_t, {rc.b0x, rc.b0y});
    if (rc.tol) {
        cfg.quad.one_d.rel_tol = *rc.tol;
        cfg.quad.two_d.rel_tol = *rc.tol;
        cfg.quad.four_d.rel_tol = *rc.tol;
    }
    cfg.validate();
    return cfg;
}

MethodChoice method_choice(const std::string& m)
{
    if (m == "auto") return MethodChoice::automatic;
    if (m == "general4d") return MethodChoice::general4d;
    if (m == "quad2d") return MethodChoice::quadrature2d;
    if (m == "closed") return MethodChoice::closed_form;
    input_error("--method: expected auto|general4d|quad2d|closed, got '" + m + "'");
}

AsymmetryMetric metric_choice(const std::string& m)
{
    if (m == "para-perp") return AsymmetryMetric::para_perp;
    if (m == "minmax") return AsymmetryMetric::minmax;
    input_error("--metric: expected para-perp|minmax, got '" + m + "'");
}

std::vector<double> phi_values_deg(const RunConfig& rc)
{
    if (rc.phi_grid > 0) {
        std::vector<double> out;
        for (int k = 0; k < rc.phi_grid; ++k) out.push_back(360.0 * k / rc.phi_grid);
        return out;
    }
    return rc.phi_deg.values();
}

void warn_all(const RunConfig& rc, const ScatteringConfig& cfg, std::ostream& err)
{
    for (const auto& w : beam_warnings(cfg.state)) err << "warning: " << w << '\n';
    for (const auto& w : kinematics_warnings({rc.p_i, rc.p_f, 0.0, 0.0})) err << "warning: " << w << '\n';
    for (const auto& item : validity_check(cfg.state, cfg.target, cfg.amplitude.bohr_radius())) {
        if (!item.satisfied) {
            err << "warning: " << item.condition << " (margin " << std::setprecision(4) << item.margin
                << "): " << item.note << '\n';
        }
    }
}

std::string format_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- subcommands -----------------------------------------------------------

void run_wigner(const RunConfig& rc, std::ostream& out)
{
    const BeamState state = build_state(rc);
    const ScanMode mode = rc.mode == "full" ? ScanMode::full : ScanMode::slice;
    if (rc.mode != "full" && rc.mode != "slice") input_error("--mode: expected slice|full");
    const ScanBox box = standard_scan_box(state);
    if (rc.format == "csv") {
        write_wigner_csv(out, state, box, rc.grid, mode);
        return;
    }
    const NegativityReport rep = negativity_scan(state, box, rc.grid, mode);
    std::ostringstream csv;
    write_wigner_csv(csv, state, box, rc.grid, mode);
    json j;
    j["config"] = rc.to_json();
    j["negativity"] = {{"min_value", rep.min_value},
                       {"min_location", {rep.min_location.r.x, rep.min_location.r.y,
                                         rep.min_location.p.x, rep.min_location.p.y}},
                       {"negative_volume_fraction", rep.negative_volume_fraction},
                       {"grid_points", rep.grid_points}};
    j["grid_csv"] = csv.str();
    out << j.dump(2) << '\n';
}

void run_scatter(const RunConfig& rc, std::ostream& out)
{
    const ScatteringConfig cfg = build_scattering(rc);
    const MethodChoice choice = method_choice(rc.method);
    const auto thetas = rc.theta_deg.values();
    const auto phis = phi_values_deg(rc);

    struct Row {
        double theta_deg, phi_deg, dnu, dsigma, err;
        Method method;
    };
    const long n = static_cast<long>(thetas.size() * phis.size());
    const auto rows = indexed_map<Row>(n, Execution::parallel, [&](long i) {
        const double th = thetas[static_cast<std::size_t>(i) / phis.size()];
        const double ph = phis[static_cast<std::size_t>(i) % phis.size()];
        const Kinematics kin{rc.p_i, rc.p_f, th * degree, ph * degree};
        ScatteringConfig local = cfg;
        local.execution = Execution::serial;
        const EventDensity ed = event_density(local, kin, choice);
        const double dnu = ed.normalization == Normalization::events ? ed.value : std::nan("");
        return Row{th, ph, dnu, cross_section(ed, cfg.n_e), ed.err_est, ed.method};
    });

    if (rc.format == "csv") {
        out << "theta_deg,phi_deg,dnu,dsigma,err_est,method\n";
        for (const Row& r : rows) {
            out << format_number(r.theta_deg) << ',' << format_number(r.phi_deg) << ','
                << format_number(r.dnu) << ',' << format_number(r.dsigma) << ','
                << format_number(r.err) << ',' << to_string(r.method) << '\n';
        }
        return;
    }
    json j;
    j["config"] = rc.to_json();
    j["rows"] = json::array();
    for (const Row& r : rows) {
        j["rows"].push_back({{"theta_deg", r.theta_deg}, {"phi_deg", r.phi_deg},
                             {"dnu", number_or_null(r.dnu)}, {"dsigma", r.dsigma},
                             {"err_est", r.err}, {"method", to_string(r.method)}});
    }
    out << j.dump(2) << '\n';
}

json result_json(const AsymmetryResult& r, double shown_axis, double shown_theta)
{
    json scan = json::array();
    for (const auto& s : r.phi_scan) scan.push_back({s.phi / degree, s.dnu});
    return {{"axis_value", shown_axis}, {"theta_deg", shown_theta}, {"A", r.A},
            {"A_para_perp", r.para_perp}, {"A_minmax", r.minmax}, {"metric", to_string(r.metric)},
            {"method", to_string(r.method)}, {"phi_scan_deg_dnu", scan}};
}

/// `shown` holds the axis values as given on the command line (degrees for theta).
void write_asymmetry_rows(std::ostream& out, const std::vector<SweepRow>& rows, const RunConfig& rc,
                          const std::string& axis_name, const std::vector<double>& shown, bool theta_axis,
                          std::ostream& err)
{
    auto theta_of = [&](std::size_t i) { return theta_axis ? shown[i] : rc.theta_deg.lo; };
    if (rc.format == "csv") {
        out << "axis_value,theta_deg,A,metric\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].result) {
                err << "error at " << axis_name << " = " << format_number(shown[i]) << ": " << rows[i].error << '\n';
                out << format_number(shown[i]) << ',' << format_number(theta_of(i)) << ",nan," << rc.metric << '\n';
                continue;
            }
            out << format_number(shown[i]) << ',' << format_number(theta_of(i)) << ','
                << format_number(rows[i].result->A) << ',' << rc.metric << '\n';
        }
        if (rc.out.empty()) return;
        // The phi-scans behind each row go next to the table.
        std::ofstream scans(rc.out + ".phi.csv", std::ios::binary);
        scans << "axis_value,phi_deg,dnu\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].result) continue;
            for (const PhiSample& s : rows[i].result->phi_scan) {
                scans << format_number(shown[i]) << ',' << format_number(s.phi / degree) << ','
                      << format_number(s.dnu) << '\n';
            }
        }
        return;
    }
    json j;
    j["config"] = rc.to_json();
    j["axis"] = axis_name;
    j["rows"] = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        json jr;
        if (rows[i].result) {
            jr = result_json(*rows[i].result, shown[i], theta_of(i));
        } else {
            jr["axis_value"] = shown[i];
            jr["error"] = rows[i].error;
        }
        jr["warnings"] = rows[i].warnings;
        j["rows"].push_back(jr);
    }
    out << j.dump(2) << '\n';
}

AsymmetrySpec asymmetry_template(const RunConfig& rc)
{
    AsymmetrySpec spec;
    spec.cfg = build_scattering(rc);
    spec.cfg.execution = Execution::serial;
    spec.kin_base = {rc.p_i, rc.p_f, rc.theta_deg.lo * degree, 0.0};
    spec.phi_grid_n = rc.phi_grid > 0 ? rc.phi_grid : 64;
    spec.metric = metric_choice(rc.metric);
    spec.method = method_choice(rc.method);
    return spec;
}

void run_asymmetry(const RunConfig& rc, std::ostream& out, std::ostream& err)
{
    const AsymmetrySpec spec = asymmetry_template(rc);
    const std::vector<double> shown = rc.theta_deg.values();
    std::vector<double> thetas;
    for (double t : shown) thetas.push_back(t * degree);
    const auto rows = sweep(spec, SweepAxis::theta, thetas);
    write_asymmetry_rows(out, rows, rc, "theta_deg", shown, true, err);
}

void run_sweep(const RunConfig& rc, std::ostream& out, std::ostream& err)
{
    const AsymmetrySpec spec = asymmetry_template(rc);
    const SweepAxis axis = sweep_axis_from_string(rc.axis);
    if (rc.values.empty()) input_error("sweep: --values is required");
    const double scale = axis == SweepAxis::theta ? degree : 1.0;
    std::vector<double> values;
    for (double v : rc.values) values.push_back(v * scale);
    const auto rows = sweep(spec, axis, values);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& w : rows[i].warnings) {
            err << "warning at " << rc.axis << " = " << format_number(rc.values[i]) << ": " << w << '\n';
        }
    }
    write_asymmetry_rows(out, rows, rc, rc.axis, rc.values, axis == SweepAxis::theta, err);
}

// ---- validate ------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

double phi_variation(const ScatteringConfig& cfg, double p, double theta, MethodChoice m)
{
    double lo = infinity;
    double hi = -infinity;
    for (int k = 0; k < 16; ++k) {
        const double v = event_density(cfg, Kinematics::elastic(p, theta, k * std::numbers::pi / 8.0), m).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return (hi - lo) / (hi + lo);
}

std::vector<Check> oracle_checks()
{
    std::vector<Check> checks;
    constexpr double inv_pi2 = 1.0 / (std::numbers::pi * std::numbers::pi);
    const PhasePoint origin{};
    {
        const double g = wigner(BeamState::gaussian(2.0), origin);
        const double odd = wigner(BeamState::odd_cat(2.0, 2.0), origin);
        const double even = wigner(BeamState::even_cat(2.0, 6.0), origin);
        const double worst = std::max({std::abs(g - inv_pi2), std::abs(odd + inv_pi2), std::abs(even - inv_pi2)});
        checks.push_back({"wigner origin values (+-1/pi^2)", worst <= 1e-12, "max deviation " + sci(worst)});
    }
    {
        const BeamState cat = BeamState::even_cat(2.0, 4.0);
        const QuadResult r = integrate_wigner(cat, QuadratureSpec::four_d(), Execution::serial);
        checks.push_back({"even-cat wigner normalization (4-D)", std::abs(r.value - 1.0) <= 1e-4,
                          "|I - 1| = " + sci(std::abs(r.value - 1.0))});
    }

    ScatteringConfig cfg;
    cfg.execution = Execution::serial;
    cfg.quad.two_d.rel_tol = 1e-9;
    cfg.quad.one_d.rel_tol = 1e-10;
    {
        double worst = 0.0;
        for (double sigma : {1.0, 2.0, 4.0}) {
            for (double k : {1.0, 2.0, 3.0}) {
                for (double th : {5.0, 10.0, 20.0}) {
                    for (bool odd : {false, true}) {
                        cfg.state = odd ? BeamState::odd_cat(sigma, k * sigma) : BeamState::even_cat(sigma, k * sigma);
                        const Kinematics kin = Kinematics::elastic(10.0, th * degree, 0.3);
                        worst = std::max(worst, rel_diff(event_density_cat_closed(cfg, kin).value,
                                                         event_density_cat_quadrature(cfg, kin).value));
                    }
                }
            }
        }
        checks.push_back({"closed_form vs quadrature2d, 54 points", worst <= 1e-6, "max rel diff " + sci(worst)});
    }
    {
        ScatteringConfig fin = cfg;
        fin.target = TargetProfile::gaussian(20.0, {1.0, 0.5});
        fin.state = BeamState::odd_cat(2.0, 2.0);
        const Kinematics kin = Kinematics::elastic(10.0, 10.0 * degree, 0.4);
        const double d = rel_diff(event_density_general(fin, kin).value, event_density_cat_quadrature(fin, kin).value);
        checks.push_back({"general4d vs quadrature2d (sigma_t = 20a)", d <= 1e-3, "rel diff " + sci(d)});
    }
    {
        ScatteringConfig g = cfg;
        g.state = BeamState::gaussian(2.0);
        g.target = TargetProfile::gaussian(20.0, {3.0, 0.0});
        const double vg = phi_variation(g, 10.0, 10.0 * degree, MethodChoice::quadrature2d);
        checks.push_back({"gaussian phi-independence (off-axis b0)", vg < 1e-6, "variation " + sci(vg)});
        g.state = BeamState::incoherent_pair(2.0, 4.0);
        g.target = TargetProfile::wide();
        const double vm = phi_variation(g, 10.0, 10.0 * degree, MethodChoice::quadrature2d);
        checks.push_back({"mixture phi-independence", vm < 1e-6, "variation " + sci(vm)});
    }
    {
        ScatteringConfig g = cfg;
        g.quad.two_d.rel_tol = 1e-10;
        g.state = BeamState::gaussian(2.0);
        const Kinematics kin = Kinematics::elastic(10.0, 10.0 * degree);
        const double vg = event_density_gaussian(g, kin).value;
        g.state = BeamState::even_cat(2.0, 2e-6);
        const double vc = event_density_cat_closed(g, kin).value;
        const double d = rel_diff(vg, vc);
        checks.push_back({"even cat r0 -> 0 equals gaussian", d <= 1e-8, "rel diff " + sci(d)});
    }
    return checks;
}

int run_validate(const RunConfig& rc, std::ostream& out)
{
    const auto checks = oracle_checks();
    bool all = true;
    std::ostringstream report;
    for (const Check& c : checks) {
        all = all && c.pass;
        report << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    const BeamState state = build_state(rc);
    const TargetProfile target =
        rc.wide ? TargetProfile::wide() : TargetProfile::gaussian(rc.sigma_t, {rc.b0x, rc.b0y});
    report << "validity (" << rc.state << ", sigma_perp " << rc.sigma_perp << ", p_i " << rc.p_i << "):\n";
    for (const auto& item : validity_check(state, target)) {
        report << "  " << (item.satisfied ? "ok   " : "warn ") << item.condition << "  margin "
               << std::setprecision(6) << item.margin;
        if (!item.note.empty()) report << "  (" << item.note << ')';
        report << '\n';
    }
    if (rc.format == "json") {
        json j;
        j["config"] = rc.to_json();
        j["checks"] = json::array();
        for (const Check& c : checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        j["passed"] = all;
        out << j.dump(2) << '\n';
    } else {
        out << report.str();
    }
    return all ? 0 : 2;
}

// ---- plumbing --------------------------------------------------------------

void add_common_options(CLI::App& app, RunConfig& rc, std::string& theta, std::string& phi,
                        std::optional<double>& ev, std::optional<double>& pi, std::optional<double>& pf,
                        std::optional<double>& sigma_t, bool& wide_flag, std::string& config_path)
{
    app.add_option("--state", rc.state, "gaussian|even-cat|odd-cat|mixture|aniso");
    app.add_option("--sigma-perp", rc.sigma_perp, "transverse width [a]");
    app.add_option("--sigma-x", rc.sigma_x, "aniso width along x [a]");
    app.add_option("--sigma-y", rc.sigma_y, "aniso width along y [a]");
    app.add_option("--r0", rc.r0, "half packet separation [a]");
    app.add_option("--phi-r0", rc.phi_r0_deg, "azimuth of r0 [deg]");
    app.add_option("--sigma-z", rc.sigma_z, "longitudinal size [a]");
    app.add_option("--pi", pi, "incident momentum [1/a]");
    app.add_option("--pf", pf, "final momentum [1/a]");
    app.add_option("--ev", ev, "incident kinetic energy [keV]");
    app.add_option("--sigma-t", sigma_t, "finite Gaussian target width [a]");
    app.add_option("--b0x", rc.b0x, "target offset x [a]");
    app.add_option("--b0y", rc.b0y, "target offset y [a]");
    app.add_flag("--wide", wide_flag, "wide-target limit (default)");
    app.add_option("--theta", theta, "polar angle(s) A[:B:N] [deg]");
    app.add_option("--phi", phi, "azimuth(s) A[:B:N] [deg]");
    app.add_option("--phi-grid", rc.phi_grid, "N azimuths over [0, 360)");
    app.add_option("--metric", rc.metric, "para-perp|minmax");
    app.add_option("--method", rc.method, "auto|general4d|quad2d|closed");
    app.add_option("--tol", rc.tol, "relative tolerance for all quadratures");
    app.add_option("--ne", rc.n_e, "number of incident electrons");
    app.add_option("--grid", rc.grid, "wigner grid cells per axis");
    app.add_option("--mode", rc.mode, "wigner scan: slice|full");
    app.add_option("--out", rc.out, "output path (stdout if omitted)");
    app.add_option("--format", rc.format, "csv|json");
    app.add_option("--config", config_path, "re-run from a JSON sidecar");
}

void resolve(RunConfig& rc, const std::string& theta, const std::string& phi, std::optional<double> ev,
             std::optional<double> pi, std::optional<double> pf, std::optional<double> sigma_t, bool wide_flag)
{
    if (ev && pi) input_error("--ev and --pi are mutually exclusive");
    if (ev) rc.p_i = momentum_from_keV(*ev);
    if (pi) rc.p_i = *pi;
    rc.p_f = pf.value_or(rc.p_i);
    if (sigma_t && wide_flag) input_error("--sigma-t and --wide are mutually exclusive");
    if (sigma_t) {
        rc.wide = false;
        rc.sigma_t = *sigma_t;
    }
    if (!theta.empty()) rc.theta_deg = GridSpec::parse(theta);
    if (!phi.empty()) rc.phi_deg = GridSpec::parse(phi);
    if (rc.format != "csv" && rc.format != "json") input_error("--format: expected csv|json");
    if (rc.n_e < 1) input_error("--ne must be >= 1");
    if (rc.phi_grid < 0) input_error("--phi-grid must be >= 0");
}

int dispatch(const RunConfig& rc, std::ostream& out, std::ostream& err)
{
    if (rc.subcommand == "wigner") {
        run_wigner(rc, out);
    } else if (rc.subcommand == "scatter") {
        warn_all(rc, build_scattering(rc), err);
        run_scatter(rc, out);
    } else if (rc.subcommand == "asymmetry") {
        warn_all(rc, build_scattering(rc), err);
        run_asymmetry(rc, out, err);
    } else if (rc.subcommand == "sweep") {
        run_sweep(rc, out, err);
    } else if (rc.subcommand == "validate") {
        return run_validate(rc, out);
    } else {
        input_error("unknown subcommand '" + rc.subcommand + "'");
    }
    return 0;
}

int execute(const RunConfig& rc, std::ostream& out, std::ostream& err)
{
    if (rc.out.empty()) return dispatch(rc, out, err);

    std::ofstream file(rc.out, std::ios::binary);
    if (!file) input_error("--out: cannot open '" + rc.out + "'");
    const int code = dispatch(rc, file, err);
    std::ofstream sidecar(rc.out + ".run.json", std::ios::binary);
    sidecar << rc.to_json().dump(2) << '\n';
    return code;
}

}  // namespace

GridSpec GridSpec::parse(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 1) {
        const double v = parse_number(parts[0], "grid");
        return {v, v, 1};
    }
    if (parts.size() != 3) input_error("grid '" + text + "': expected A or A:B:N");
    GridSpec g{parse_number(parts[0], "grid start"), parse_number(parts[1], "grid end"), 0};
    const double n = parse_number(parts[2], "grid count");
    if (n < 1 || n != std::floor(n)) input_error("grid '" + text + "': N must be a positive integer");
    g.n = static_cast<int>(n);
    return g;
}

std::vector<double> GridSpec::values() const
{
    if (n == 1) return {lo};
    return linspace(lo, hi, n);
}

json RunConfig::to_json() const
{
    json j;
    j["subcommand"] = subcommand;
    j["state"] = state;
    j["sigma_perp"] = sigma_perp;
    j["sigma_x"] = sigma_x ? json(*sigma_x) : json(nullptr);
    j["sigma_y"] = sigma_y ? json(*sigma_y) : json(nullptr);
    j["r0"] = r0;
    j["phi_r0_deg"] = phi_r0_deg;
    j["sigma_z"] = sigma_z;
    j["p_i"] = p_i;
    j["p_f"] = p_f;
    j["wide"] = wide;
    j["sigma_t"] = sigma_t;
    j["b0"] = {b0x, b0y};
    j["theta_deg"] = {{"lo", theta_deg.lo}, {"hi", theta_deg.hi}, {"n", theta_deg.n}};
    j["phi_deg"] = {{"lo", phi_deg.lo}, {"hi", phi_deg.hi}, {"n", phi_deg.n}};
    j["phi_grid"] = phi_grid;
    j["metric"] = metric;
    j["method"] = method;
    j["tol"] = tol ? json(*tol) : json(nullptr);
    j["n_e"] = n_e;
    j["grid"] = grid;
    j["mode"] = mode;
    j["axis"] = axis;
    j["values"] = values;
    j["out"] = out;
    j["format"] = format;
    return j;
}

RunConfig RunConfig::from_json(const json& j)
{
    RunConfig rc;
    auto field = [&](const char* name) -> const json& {
        if (!j.contains(name)) input_error(std::string("config: missing field '") + name + "'");
        return j.at(name);
    };
    auto optional_number = [&](const char* name) -> std::optional<double> {
        const json& v = field(name);
        if (v.is_null()) return std::nullopt;
        return v.get<double>();
    };
    auto grid = [&](const char* name) {
        const json& g = field(name);
        return GridSpec{g.at("lo").get<double>(), g.at("hi").get<double>(), g.at("n").get<int>()};
    };
    try {
        rc.subcommand = field("subcommand").get<std::string>();
        rc.state = field("state").get<std::string>();
        rc.sigma_perp = field("sigma_perp").get<double>();
        rc.sigma_x = optional_number("sigma_x");
        rc.sigma_y = optional_number("sigma_y");
        rc.r0 = field("r0").get<double>();
        rc.phi_r0_deg = field("phi_r0_deg").get<double>();
        rc.sigma_z = field("sigma_z").get<double>();
        rc.p_i = field("p_i").get<double>();
        rc.p_f = field("p_f").get<double>();
        rc.wide = field("wide").get<bool>();
        rc.sigma_t = field("sigma_t").get<double>();
        rc.b0x = field("b0").at(0).get<double>();
        rc.b0y = field("b0").at(1).get<double>();
        rc.theta_deg = grid("theta_deg");
        rc.phi_deg = grid("phi_deg");
        rc.phi_grid = field("phi_grid").get<int>();
        rc.metric = field("metric").get<std::string>();
        rc.method = field("method").get<std::string>();
        rc.tol = optional_number("tol");
        rc.n_e = field("n_e").get<std::int64_t>();
        rc.grid = field("grid").get<int>();
        rc.mode = field("mode").get<std::string>();
        rc.axis = field("axis").get<std::string>();
        rc.values = field("values").get<std::vector<double>>();
        rc.out = field("out").get<std::string>();
        rc.format = field("format").get<std::string>();
    } catch (const json::exception& e) {
        input_error(std::string("config: ") + e.what());
    }
    return rc;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"catscatter: scattering of structured electron wave packets off atoms"};
    app.require_subcommand(1);

    RunConfig rc;
    std::string theta;
    std::string phi;
    std::string values;
    std::optional<double> ev;
    std::optional<double> pi;
    std::optional<double> pf;
    std::optional<double> sigma_t;
    bool wide_flag = false;
    std::string config_path;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"wigner", "export the Wigner function on a phase-space grid"},
        {"scatter", "event density / cross section over a theta x phi grid"},
        {"asymmetry", "azimuthal asymmetry with its phi-scan"},
        {"sweep", "asymmetry sweep along one parameter"},
        {"validate", "three-method oracle comparison and validity report"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common_options(*sub, rc, theta, phi, ev, pi, pf, sigma_t, wide_flag, config_path);
        if (name == "sweep") {
            sub->add_option("--axis", rc.axis, "r0|sigma-perp|theta|pi|aspect");
            sub->add_option("--values", values, "comma list or A:B:N");
        }
    }

    std::vector<const char*> argv{"catscatter"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "input error: " << e.what() << '\n';
        return 1;
    }
    rc.subcommand = app.get_subcommands().front()->get_name();

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) input_error("--config: cannot open '" + config_path + "'");
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                input_error("--config: " + std::string(e.what()));
            }
            const std::string out_override = rc.out;
            const std::string sub = rc.subcommand;
            rc = RunConfig::from_json(j);
            if (rc.subcommand != sub) {
                input_error("--config was written by '" + rc.subcommand + "', not '" + sub + "'");
            }
            if (!out_override.empty()) rc.out = out_override;
        } else {
            if (!values.empty()) rc.values = parse_values(values);
            resolve(rc, theta, phi, ev, pi, pf, sigma_t, wide_flag);
        }
        return execute(rc, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::validation_failure ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace catscatter::cli
