#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "catscatter/execution.hpp"

namespace catscatter {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Integration domain. Only the upper end may be the infinite marker.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    static Interval semi_infinite(double lo) { return {lo, infinity}; }

    bool is_semi_infinite() const noexcept { return hi == infinity; }
    double width() const noexcept { return hi - lo; }

    /// Throws InvalidState unless lo < hi with a finite lower end.
    void validate() const;
};

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-15;
    int max_subdivisions = 2000;
    double min_panel_width = 1e-12;

    static QuadratureSpec one_d() { return {1e-8, 1e-15, 2000, 1e-12}; }
    static QuadratureSpec two_d() { return {1e-6, 0.0, 4000, 1e-12}; }
    static QuadratureSpec four_d() { return {1e-4, 0.0, 500000, 1e-12}; }

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    long evaluations = 0;
};

using Integrand1d = std::function<double(double)>;
using IntegrandNd = std::function<double(std::span<const double>)>;

/// Adaptive Gauss-Kronrod 7/15 quadrature with global error-driven bisection.
///
/// `max_initial_panel` caps the width of the starting panels; pass the
/// oscillation_panel_width() of any cos(2 r0 x) factor so the scheme cannot
/// settle on an aliased estimate. Semi-infinite domains are mapped onto
/// [0, 1) by x = lo + t / (1 - t); the integrand must decay at least
/// exponentially there.
QuadResult integrate_1d(const Integrand1d& f, Interval domain, const QuadratureSpec& spec,
                        double max_initial_panel = infinity);

enum class NdRule {
    automatic,  // nested for 2-D, cubature for 4-D
    nested,     // iterated 1-D Gauss-Kronrod
    cubature,   // Genz-Malik degree 7/5 embedded rule on boxes
};

struct NdOptions {
    NdRule rule = NdRule::automatic;
    /// Per-axis cap on initial panel width; empty means no cap.
    std::vector<double> max_initial_panel;
    Execution execution = Execution::parallel;
};

/// Integrates over a finite box of dimension 2 or 4.
///
/// The result depends only on the inputs: region batches are evaluated in
/// parallel but reduced in a fixed order, so serial and parallel execution
/// give bit-identical values.
QuadResult integrate_nd(const IntegrandNd& f, std::span<const Interval> box,
                        const QuadratureSpec& spec, const NdOptions& options = {});

/// Largest panel width that resolves cos(2 * r0 * x): pi / (8 |r0|).
/// Returns infinity for r0 == 0.
double oscillation_panel_width(double r0_component);

}  // namespace catscatter
