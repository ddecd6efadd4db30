#include "catscatter/beam.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "catscatter/error.hpp"

namespace catscatter {

namespace {

constexpr double inv_pi2 = 1.0 / (std::numbers::pi * std::numbers::pi);

void require(bool ok, const std::string& what)
{
    if (!ok) throw Error(ErrorKind::invalid_state, what);
}

double gaussian_wigner(double sigma_x, double sigma_y, const PhasePoint& pt)
{
    const double sx2 = sigma_x * sigma_x;
    const double sy2 = sigma_y * sigma_y;
    return inv_pi2 * std::exp(-2.0 * sx2 * pt.p.x * pt.p.x - pt.r.x * pt.r.x / (2.0 * sx2) -
                              2.0 * sy2 * pt.p.y * pt.p.y - pt.r.y * pt.r.y / (2.0 * sy2));
}

// (W1(r - r0, p) + W1(r + r0, p)) / 2 / W1-prefactor, i.e. the classical
// two-packet part of the cat Wigner function written without the cosh so
// large |r0 . r| cannot overflow.
double pair_position_factor(double sigma, Vec2 r0, Vec2 r)
{
    const double s2 = 2.0 * sigma * sigma;
    return 0.5 * (std::exp(-(r - r0).norm2() / s2) + std::exp(-(r + r0).norm2() / s2));
}

}  // namespace

std::string_view to_string(BeamVariant v)
{
    switch (v) {
    case BeamVariant::gaussian: return "gaussian";
    case BeamVariant::even_cat: return "even-cat";
    case BeamVariant::odd_cat: return "odd-cat";
    case BeamVariant::incoherent_pair: return "mixture";
    case BeamVariant::anisotropic_gaussian: return "aniso";
    }
    return "unknown";
}

BeamVariant beam_variant_from_string(std::string_view name)
{
    for (auto v : {BeamVariant::gaussian, BeamVariant::even_cat, BeamVariant::odd_cat,
                   BeamVariant::incoherent_pair, BeamVariant::anisotropic_gaussian}) {
        if (name == to_string(v)) return v;
    }
    throw Error(ErrorKind::input_error, "unknown state '" + std::string(name) +
                                            "' (expected gaussian|even-cat|odd-cat|mixture|aniso)");
}

BeamState BeamState::gaussian(double sigma_perp, double p_i, double sigma_z)
{
    BeamState s;
    s.variant_ = BeamVariant::gaussian;
    s.sigma_perp_ = s.sigma_x_ = s.sigma_y_ = sigma_perp;
    s.p_i_ = p_i;
    s.sigma_z_ = sigma_z;
    s.validate();
    return s;
}

BeamState BeamState::even_cat(double sigma_perp, double r0, double phi_r0, double p_i, double sigma_z)
{
    BeamState s = gaussian(sigma_perp, p_i, sigma_z);
    s.variant_ = BeamVariant::even_cat;
    s.r0_ = Vec2::polar(r0, phi_r0);
    s.phi_r0_ = phi_r0;
    require(r0 >= 0.0, "r0 must be nonnegative");
    s.validate();
    return s;
}

BeamState BeamState::odd_cat(double sigma_perp, double r0, double phi_r0, double p_i, double sigma_z)
{
    BeamState s = even_cat(sigma_perp, r0, phi_r0, p_i, sigma_z);
    s.variant_ = BeamVariant::odd_cat;
    s.validate();
    return s;
}

BeamState BeamState::incoherent_pair(double sigma_perp, double r0, double phi_r0, double p_i,
                                     double sigma_z)
{
    BeamState s = even_cat(sigma_perp, r0, phi_r0, p_i, sigma_z);
    s.variant_ = BeamVariant::incoherent_pair;
    return s;
}

BeamState BeamState::anisotropic_gaussian(double sigma_x, double sigma_y, double p_i, double sigma_z)
{
    BeamState s;
    s.variant_ = BeamVariant::anisotropic_gaussian;
    s.sigma_x_ = sigma_x;
    s.sigma_y_ = sigma_y;
    s.sigma_perp_ = std::sqrt(sigma_x * sigma_y);
    s.p_i_ = p_i;
    s.sigma_z_ = sigma_z;
    s.validate();
    return s;
}

void BeamState::validate() const
{
    require(std::isfinite(sigma_perp_) && sigma_perp_ > 0.0, "sigma_perp must be > 0");
    require(std::isfinite(sigma_x_) && sigma_x_ > 0.0, "sigma_x must be > 0");
    require(std::isfinite(sigma_y_) && sigma_y_ > 0.0, "sigma_y must be > 0");
    require(std::isfinite(sigma_z_) && sigma_z_ > 0.0, "sigma_z must be > 0");
    require(std::isfinite(p_i_) && p_i_ > 0.0, "p_i must be > 0");
    require(std::isfinite(r0_.x) && std::isfinite(r0_.y), "r0 must be finite");
    if (variant_ == BeamVariant::odd_cat && r0_.norm() < odd_cat_min_separation * sigma_perp_) {
        throw Error(ErrorKind::invalid_cat_separation,
                    "odd cat requires |r0| >= 1e-4 sigma_perp, got |r0| = " +
                        std::to_string(r0_.norm()));
    }
}

int BeamState::cat_sign() const noexcept
{
    if (variant_ == BeamVariant::even_cat) return 1;
    if (variant_ == BeamVariant::odd_cat) return -1;
    return 0;
}

double BeamState::cat_normalization() const
{
    const double u = r0_.norm2() / (2.0 * sigma_perp_ * sigma_perp_);
    if (variant_ == BeamVariant::even_cat) return 1.0 + std::exp(-u);
    if (variant_ == BeamVariant::odd_cat) return -std::expm1(-u);
    return 1.0;
}

BeamState BeamState::with_r0(double r0) const
{
    BeamState s = *this;
    s.r0_ = Vec2::polar(r0, phi_r0_);
    require(r0 >= 0.0, "r0 must be nonnegative");
    s.validate();
    return s;
}

BeamState BeamState::with_sigma_perp(double sigma_perp) const
{
    BeamState s = *this;
    if (variant_ == BeamVariant::anisotropic_gaussian) {
        const double scale = sigma_perp / sigma_perp_;
        s.sigma_x_ = sigma_x_ * scale;
        s.sigma_y_ = sigma_y_ * scale;
        s.sigma_perp_ = sigma_perp;
    } else {
        s.sigma_perp_ = s.sigma_x_ = s.sigma_y_ = sigma_perp;
        s.r0_ = (sigma_perp / sigma_perp_) * r0_;
    }
    s.validate();
    return s;
}

BeamState BeamState::with_p_i(double p_i) const
{
    BeamState s = *this;
    s.p_i_ = p_i;
    s.validate();
    return s;
}

BeamState BeamState::with_aspect(double sigma_y_over_sigma_x) const
{
    if (variant_ != BeamVariant::anisotropic_gaussian) {
        throw Error(ErrorKind::unsupported, "aspect applies only to the anisotropic Gaussian");
    }
    return anisotropic_gaussian(sigma_x_, sigma_x_ * sigma_y_over_sigma_x, p_i_, sigma_z_);
}

std::vector<std::string> beam_warnings(const BeamState& state)
{
    std::vector<std::string> out;
    if (state.variant() == BeamVariant::odd_cat && state.r0_magnitude() < state.sigma_perp()) {
        out.push_back("odd cat with r0 < sigma_perp: the two packets stay ~2 sigma_perp apart "
                      "regardless of r0");
    }
    return out;
}

std::complex<double> momentum_wavefunction(const BeamState& state, Vec2 p)
{
    const double s2 = state.sigma_perp() * state.sigma_perp();
    const double single = std::sqrt(2.0 * s2 / std::numbers::pi) * std::exp(-s2 * p.norm2());
    switch (state.variant()) {
    case BeamVariant::gaussian: return single;
    case BeamVariant::even_cat:
    case BeamVariant::odd_cat: {
        const double phase = dot(state.r0(), p);
        const double norm = std::numbers::sqrt2 * std::sqrt(state.cat_normalization());
        // e^{-i r0.p} + e^{i r0.p} = 2 cos, e^{-i r0.p} - e^{i r0.p} = -2i sin
        if (state.variant() == BeamVariant::even_cat) {
            return {single * 2.0 * std::cos(phase) / norm, 0.0};
        }
        return {0.0, -single * 2.0 * std::sin(phase) / norm};
    }
    case BeamVariant::incoherent_pair:
        throw Error(ErrorKind::no_pure_state,
                    "the incoherent pair is a mixed state and has no wavefunction");
    case BeamVariant::anisotropic_gaussian:
        throw Error(ErrorKind::unsupported,
                    "only the Wigner function of the anisotropic Gaussian is implemented");
    }
    return {};
}

double wigner(const BeamState& state, const PhasePoint& pt)
{
    switch (state.variant()) {
    case BeamVariant::gaussian:
    case BeamVariant::anisotropic_gaussian:
        return gaussian_wigner(state.sigma_x(), state.sigma_y(), pt);
    case BeamVariant::incoherent_pair: return wigner_without_interference(state, pt);
    case BeamVariant::even_cat:
    case BeamVariant::odd_cat: {
        const double s = state.sigma_perp();
        const double s2 = s * s;
        const Vec2 r0 = state.r0();
        const double momentum = inv_pi2 * std::exp(-2.0 * s2 * pt.p.norm2());
        const double interference =
            std::exp(-pt.r.norm2() / (2.0 * s2)) * std::cos(2.0 * dot(r0, pt.p));
        const double bracket = pair_position_factor(s, r0, pt.r) + state.cat_sign() * interference;
        return momentum * bracket / state.cat_normalization();
    }
    }
    return 0.0;
}

double wigner_without_interference(const BeamState& state, const PhasePoint& pt)
{
    if (!state.is_two_packet()) return wigner(state, pt);
    const double s = state.sigma_perp();
    return inv_pi2 * std::exp(-2.0 * s * s * pt.p.norm2()) * pair_position_factor(s, state.r0(), pt.r);
}

ScanBox standard_scan_box(const BeamState& state)
{
    const Vec2 r0 = state.r0();
    const double rx = std::abs(r0.x) + 4.0 * state.sigma_x();
    const double ry = std::abs(r0.y) + 4.0 * state.sigma_y();
    const double px = 4.0 / state.sigma_x();
    const double py = 4.0 / state.sigma_y();
    return {{Interval{-rx, rx}, Interval{-ry, ry}}, {Interval{-px, px}, Interval{-py, py}}};
}

ScanBox truncation_box(const BeamState& state)
{
    const Vec2 r0 = state.r0();
    const double rx = std::abs(r0.x) + 8.0 * state.sigma_x();
    const double ry = std::abs(r0.y) + 8.0 * state.sigma_y();
    const double px = 4.0 / state.sigma_x();
    const double py = 4.0 / state.sigma_y();
    return {{Interval{-rx, rx}, Interval{-ry, ry}}, {Interval{-px, px}, Interval{-py, py}}};
}

QuadResult integrate_wigner(const BeamState& state, const QuadratureSpec& spec, Execution exec)
{
    const ScanBox b = truncation_box(state);
    const std::array<Interval, 4> box{b.r[0], b.r[1], b.p[0], b.p[1]};
    NdOptions opt;
    opt.execution = exec;
    opt.max_initial_panel = {state.sigma_x(), state.sigma_y(), oscillation_panel_width(state.r0().x),
                             oscillation_panel_width(state.r0().y)};
    return integrate_nd(
        [&](std::span<const double> v) { return wigner(state, {{v[0], v[1]}, {v[2], v[3]}}); }, box, spec, opt);
}

namespace {

struct Grid {
    int nodes = 0;
    std::array<Interval, 4> axes{};  // x, y, px, py
    int dims = 2;

    double coord(int axis, int i) const
    {
        const Interval& iv = axes[axis];
        if (i == nodes - 1) return iv.hi;
        return iv.lo + (iv.hi - iv.lo) * i / (nodes - 1);
    }

    long size() const
    {
        long n = 1;
        for (int d = 0; d < dims; ++d) n *= nodes;
        return n;
    }

    // Row-major decode with the first axis varying slowest.
    PhasePoint point(long index) const
    {
        std::array<int, 4> idx{};
        for (int d = dims - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(index % nodes);
            index /= nodes;
        }
        if (dims == 2) return {{coord(0, idx[0]), 0.0}, {coord(2, idx[1]), 0.0}};
        return {{coord(0, idx[0]), coord(1, idx[1])}, {coord(2, idx[2]), coord(3, idx[3])}};
    }
};

Grid make_grid(const ScanBox& box, int grid_n, ScanMode mode)
{
    if (grid_n < 16) {
        throw Error(ErrorKind::invalid_state, "negativity scan needs grid_n >= 16 per axis");
    }
    for (const Interval& iv : {box.r[0], box.r[1], box.p[0], box.p[1]}) {
        iv.validate();
        if (iv.is_semi_infinite()) throw Error(ErrorKind::invalid_state, "scan box must be finite");
    }
    Grid g;
    g.nodes = grid_n + 1;
    g.axes = {box.r[0], box.r[1], box.p[0], box.p[1]};
    g.dims = mode == ScanMode::slice ? 2 : 4;
    return g;
}

struct MinAccumulator {
    double value = std::numeric_limits<double>::infinity();
    long index = -1;
    long negatives = 0;

    void add(double w, long i)
    {
        if (w < 0.0) ++negatives;
        if (w < value || (w == value && i < index)) {
            value = w;
            index = i;
        }
    }

    void merge(const MinAccumulator& other)
    {
        negatives += other.negatives;
        if (other.index >= 0 &&
            (other.value < value || (other.value == value && other.index < index))) {
            value = other.value;
            index = other.index;
        }
    }
};

}  // namespace

NegativityReport negativity_scan(const BeamState& state, const ScanBox& box, int grid_n,
                                 ScanMode mode, Execution exec)
{
    const Grid grid = make_grid(box, grid_n, mode);
    const long total = grid.size();
    MinAccumulator acc;

    if (exec == Execution::parallel) {
#pragma omp parallel
        {
            MinAccumulator local;
#pragma omp for schedule(static) nowait
            for (long i = 0; i < total; ++i) local.add(wigner(state, grid.point(i)), i);
#pragma omp critical
            acc.merge(local);
        }
    } else {
        for (long i = 0; i < total; ++i) acc.add(wigner(state, grid.point(i)), i);
    }

    NegativityReport out;
    out.min_value = acc.value;
    out.min_location = grid.point(acc.index);
    out.negative_volume_fraction = static_cast<double>(acc.negatives) / static_cast<double>(total);
    out.grid_points = total;
    return out;
}

void write_wigner_csv(std::ostream& out, const BeamState& state, const ScanBox& box, int grid_n,
                      ScanMode mode)
{
    const Grid grid = make_grid(box, grid_n, mode);
    const long total = grid.size();
    std::vector<double> values(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) values[i] = wigner(state, grid.point(i));

    out << (mode == ScanMode::slice ? "x,px,w\n" : "x,y,px,py,w\n");
    out << std::setprecision(17);
    for (long i = 0; i < total; ++i) {
        const PhasePoint pt = grid.point(i);
        if (mode == ScanMode::slice) {
            out << pt.r.x << ',' << pt.p.x << ',' << values[i] << '\n';
        } else {
            out << pt.r.x << ',' << pt.r.y << ',' << pt.p.x << ',' << pt.p.y << ',' << values[i]
                << '\n';
        }
    }
}

double kinetic_energy_keV(double p)
{
    if (!(p > 0.0)) throw Error(ErrorKind::invalid_state, "momentum must be > 0");
    return 0.5 * p * p * hartree_ev * 1e-3;
}

double momentum_from_keV(double energy_keV)
{
    if (!(energy_keV > 0.0)) throw Error(ErrorKind::invalid_state, "energy must be > 0");
    return std::sqrt(2.0 * energy_keV * 1e3 / hartree_ev);
}

}  // namespace catscatter
