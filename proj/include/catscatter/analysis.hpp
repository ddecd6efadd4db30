#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "catscatter/execution.hpp"
#include "catscatter/scattering.hpp"

namespace catscatter {

enum class AsymmetryMetric {
    para_perp,  // [dnu(phi_r0 + pi/2) - dnu(phi_r0)] / [sum]
    minmax,     // (max - min) / (max + min) over the phi scan
};

std::string_view to_string(AsymmetryMetric m);

struct AsymmetrySpec {
    ScatteringConfig cfg;
    Kinematics kin_base = Kinematics::elastic(10.0, 0.17453292519943295);
    int phi_grid_n = 64;
    AsymmetryMetric metric = AsymmetryMetric::para_perp;
    MethodChoice method = MethodChoice::automatic;
};

struct PhiSample {
    double phi = 0.0;
    double dnu = 0.0;
};

struct AsymmetryResult {
    double A = 0.0;  // the requested metric
    double para_perp = 0.0;
    double minmax = 0.0;
    AsymmetryMetric metric = AsymmetryMetric::para_perp;
    /// phi_grid_n samples starting at phi_r0, then the two para/perp samples
    /// when they are not already on the grid.
    std::vector<PhiSample> phi_scan;
    double theta = 0.0;
    double axis_value = 0.0;
    Method method = Method::closed_form;
};

/// Scans dnu over phi at fixed theta and reduces it to an asymmetry.
/// Both metrics are always computed; `A` holds the one the spec asks for.
AsymmetryResult azimuthal_asymmetry(const AsymmetrySpec& spec, Execution exec = Execution::parallel);

enum class SweepAxis {
    r0,          // |r0| in a
    sigma_perp,  // in a, with r0/sigma_perp held fixed
    theta,       // rad
    p_i,         // 1/a, p_f follows at the template's p_f/p_i ratio
    aspect,      // sigma_y/sigma_x of the anisotropic Gaussian
};

std::string_view to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(std::string_view name);

struct SweepRow {
    double axis_value = 0.0;
    std::optional<AsymmetryResult> result;
    std::string error;
    std::vector<std::string> warnings;
};

/// One independent asymmetry evaluation per value, returned in input order.
/// A failing point records its error in-row and the sweep continues.
std::vector<SweepRow> sweep(const AsymmetrySpec& tmpl, SweepAxis axis, std::span<const double> values,
                            Execution exec = Execution::parallel);

struct OscillationReport {
    int sign_changes = 0;             // strict sign changes of A
    int difference_sign_changes = 0;  // strict sign changes of successive differences
    bool is_monotonic = true;
};

/// Needs at least five points with strictly increasing abscissae.
OscillationReport detect_oscillation(std::span<const std::pair<double, double>> series);

enum class ThetaProfile {
    event_density,  // dnu/dOmega at phi = phi_r0
    asymmetry,      // |A_para_perp| at each theta
};

struct PeakResult {
    double theta_star = 0.0;
    double value_star = 0.0;
    std::size_t grid_index = 0;
    bool at_edge = false;  // maximum on the first or last grid point; no refinement
    std::vector<double> profile;
};

/// Grid argmax refined by a parabola through the maximum and its neighbours.
/// Throws FlatDistribution when max/min < 1.01.
PeakResult find_peak(std::span<const double> theta, std::span<const double> values);

/// Peak of a theta-profile at momentum p_i. The grid must cover [1 deg, 45 deg]
/// with at least 50 points.
PeakResult peak_theta(const ScatteringConfig& cfg, double p_i, std::span<const double> theta_grid,
                      ThetaProfile profile = ThetaProfile::event_density,
                      Execution exec = Execution::parallel);

/// n evenly spaced angles from lo to hi inclusive (radians in, radians out).
std::vector<double> linspace(double lo, double hi, int n);

inline constexpr double degree = 0.017453292519943295;

}  // namespace catscatter
