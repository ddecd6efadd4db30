#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "catscatter/execution.hpp"
#include "catscatter/quadrature.hpp"
#include "catscatter/vec2.hpp"

namespace catscatter {

enum class BeamVariant { gaussian, even_cat, odd_cat, incoherent_pair, anisotropic_gaussian };

std::string_view to_string(BeamVariant v);
BeamVariant beam_variant_from_string(std::string_view name);

/// Odd cats below this |r0|/sigma_perp have a vanishing normalization.
inline constexpr double odd_cat_min_separation = 1e-4;

/// Incident transverse beam preparation, immutable once built.
///
/// All lengths are in units of the Bohr radius a and momenta in 1/a. For the
/// two-packet variants r0 is half the packet separation.
class BeamState {
public:
    static BeamState gaussian(double sigma_perp, double p_i = 10.0, double sigma_z = 10.0);
    static BeamState even_cat(double sigma_perp, double r0, double phi_r0 = 0.0, double p_i = 10.0,
                              double sigma_z = 10.0);
    static BeamState odd_cat(double sigma_perp, double r0, double phi_r0 = 0.0, double p_i = 10.0,
                             double sigma_z = 10.0);
    static BeamState incoherent_pair(double sigma_perp, double r0, double phi_r0 = 0.0,
                                     double p_i = 10.0, double sigma_z = 10.0);
    static BeamState anisotropic_gaussian(double sigma_x, double sigma_y, double p_i = 10.0,
                                          double sigma_z = 10.0);

    BeamVariant variant() const noexcept { return variant_; }
    double sigma_perp() const noexcept { return sigma_perp_; }
    double sigma_x() const noexcept { return sigma_x_; }
    double sigma_y() const noexcept { return sigma_y_; }
    Vec2 r0() const noexcept { return r0_; }
    double r0_magnitude() const noexcept { return r0_.norm(); }
    double phi_r0() const noexcept { return phi_r0_; }
    double sigma_z() const noexcept { return sigma_z_; }
    double p_i() const noexcept { return p_i_; }

    bool is_cat() const noexcept
    {
        return variant_ == BeamVariant::even_cat || variant_ == BeamVariant::odd_cat;
    }
    bool is_two_packet() const noexcept
    {
        return is_cat() || variant_ == BeamVariant::incoherent_pair;
    }

    /// +1 for the even cat, -1 for the odd cat, 0 otherwise.
    int cat_sign() const noexcept;

    /// 1 +- exp(-r0^2 / (2 sigma_perp^2)) for cats, 1 otherwise.
    double cat_normalization() const;

    // Copies with one parameter replaced; the result is re-validated.
    BeamState with_r0(double r0) const;
    BeamState with_sigma_perp(double sigma_perp) const;
    BeamState with_p_i(double p_i) const;
    BeamState with_aspect(double sigma_y_over_sigma_x) const;

private:
    BeamState() = default;
    void validate() const;

    BeamVariant variant_ = BeamVariant::gaussian;
    double sigma_perp_ = 1.0;
    double sigma_x_ = 1.0;
    double sigma_y_ = 1.0;
    Vec2 r0_{};
    double phi_r0_ = 0.0;
    double sigma_z_ = 10.0;
    double p_i_ = 10.0;
};

/// Non-fatal advisories about a state (odd cat with r0 < sigma_perp).
std::vector<std::string> beam_warnings(const BeamState& state);

struct PhasePoint {
    Vec2 r;
    Vec2 p;
};

/// Transverse momentum-space wavefunction of a pure state.
/// Throws NoPureState for the incoherent pair and Unsupported for the
/// anisotropic Gaussian.
std::complex<double> momentum_wavefunction(const BeamState& state, Vec2 p);

/// Wigner function at t = 0, normalized to one over d^2r d^2p.
double wigner(const BeamState& state, const PhasePoint& pt);

/// Wigner function with the interference term dropped and the normalization
/// set to one; for cats this is the incoherent-pair value.
double wigner_without_interference(const BeamState& state, const PhasePoint& pt);

enum class ScanMode { slice, full };

/// Phase-space region scanned for negativity: two position and two momentum axes.
struct ScanBox {
    std::array<Interval, 2> r;
    std::array<Interval, 2> p;
};

/// At least +-(|r0| + 4 sigma) in position and +-4/sigma in momentum per axis.
ScanBox standard_scan_box(const BeamState& state);

/// Box used for integrating W: +-(|r0| + 8 sigma) in position, +-4/sigma in
/// momentum. The standard scan box drops ~1e-4 of the norm in position.
ScanBox truncation_box(const BeamState& state);

/// Integral of W over the truncation box by 4-D cubature; 1 for every variant.
QuadResult integrate_wigner(const BeamState& state, const QuadratureSpec& spec = QuadratureSpec::four_d(),
                            Execution exec = Execution::parallel);

struct NegativityReport {
    double min_value = 0.0;
    PhasePoint min_location{};
    double negative_volume_fraction = 0.0;
    long grid_points = 0;
};

inline constexpr int default_slice_grid = 128;
inline constexpr int default_full_grid = 32;

/// Exhaustive scan of W on grid_n cells per axis, sampled at the grid_n + 1
/// nodes so that a symmetric box contains the origin.
///
/// Slice mode fixes y = p_y = 0 and scans (x, p_x); full mode scans all four
/// axes. Ties in the minimum resolve to the first node in row-major order.
NegativityReport negativity_scan(const BeamState& state, const ScanBox& box, int grid_n,
                                 ScanMode mode = ScanMode::slice,
                                 Execution exec = Execution::parallel);

/// Writes the scanned grid as CSV: `x,px,w` (slice) or `x,y,px,py,w` (full),
/// row-major with the first column varying slowest.
void write_wigner_csv(std::ostream& out, const BeamState& state, const ScanBox& box, int grid_n,
                      ScanMode mode = ScanMode::slice);

inline constexpr double hartree_ev = 27.211386245988;

/// Nonrelativistic kinetic energy p^2/2 in keV for a momentum in 1/a.
double kinetic_energy_keV(double p);

/// Inverse of kinetic_energy_keV.
double momentum_from_keV(double energy_keV);

}  // namespace catscatter
