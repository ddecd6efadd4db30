#include "catscatter/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "catscatter/error.hpp"

namespace catscatter {

namespace {

constexpr double epsilon = std::numeric_limits<double>::epsilon();

// Kronrod abscissae; odd indices are the 7-point Gauss nodes. Last is the centre.
constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

double checked(double v, double x)
{
    if (!std::isfinite(v)) {
        throw Error(ErrorKind::non_finite_integrand,
                    "integrand returned " + std::to_string(v) + " at x = " + std::to_string(x));
    }
    return v;
}

struct Panel {
    double lo;
    double hi;
    double value;
    double err;
    double resabs;
};

template <class F>
Panel gauss_kronrod_15(const F& f, double lo, double hi)
{
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = checked(f(centre), centre);

    double res_gauss = fc * gauss_weights[3];
    double res_kronrod = fc * kronrod_weights[7];
    double res_abs = std::abs(res_kronrod);
    std::array<double, 7> lower{};
    std::array<double, 7> upper{};

    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double f1 = checked(f(centre - dx), centre - dx);
        const double f2 = checked(f(centre + dx), centre + dx);
        lower[j] = f1;
        upper[j] = f2;
        res_kronrod += kronrod_weights[j] * (f1 + f2);
        res_abs += kronrod_weights[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) res_gauss += gauss_weights[j / 2] * (f1 + f2);
    }

    const double mean = 0.5 * res_kronrod;
    double res_asc = kronrod_weights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        res_asc += kronrod_weights[j] * (std::abs(lower[j] - mean) + std::abs(upper[j] - mean));
    }

    const double scale = std::abs(half);
    res_abs *= scale;
    res_asc *= scale;
    double err = std::abs((res_kronrod - res_gauss) * half);
    if (res_asc != 0.0 && err != 0.0) {
        err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    }
    if (res_abs > std::numeric_limits<double>::min() / (50.0 * epsilon)) {
        err = std::max(50.0 * epsilon * res_abs, err);
    }
    return {lo, hi, res_kronrod * half, err, res_abs};
}

struct WorstFirst {
    bool operator()(const Panel& a, const Panel& b) const
    {
        if (a.err != b.err) return a.err < b.err;
        return a.lo > b.lo;
    }
};

template <class F>
QuadResult adaptive_gk(const F& f, double lo, double hi, const QuadratureSpec& spec,
                       double max_initial_panel)
{
    std::priority_queue<Panel, std::vector<Panel>, WorstFirst> active;
    std::vector<Panel> frozen;

    int n_initial = 1;
    if (std::isfinite(max_initial_panel) && max_initial_panel > 0.0) {
        n_initial = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_initial_panel)));
    }
    double value = 0.0;
    double err = 0.0;
    double abs_sum = 0.0;
    long evaluations = 0;
    for (int i = 0; i < n_initial; ++i) {
        const double a = lo + (hi - lo) * i / n_initial;
        const double b = (i + 1 == n_initial) ? hi : lo + (hi - lo) * (i + 1) / n_initial;
        Panel p = gauss_kronrod_15(f, a, b);
        value += p.value;
        err += p.err;
        abs_sum += p.resabs;
        evaluations += 15;
        active.push(p);
    }

    int subdivisions = 0;
    for (;;) {
        const double tol = std::max({spec.abs_tol, spec.rel_tol * std::abs(value),
                                     100.0 * epsilon * abs_sum});
        if (err <= tol) break;
        if (active.empty()) {
            throw Error(ErrorKind::non_convergence,
                        "all panels reached min_panel_width with error " + std::to_string(err) +
                            " above tolerance " + std::to_string(tol));
        }
        if (subdivisions >= spec.max_subdivisions) {
            throw Error(ErrorKind::non_convergence,
                        std::to_string(spec.max_subdivisions) + " subdivisions exhausted, error " +
                            std::to_string(err) + " above tolerance " + std::to_string(tol));
        }
        const Panel worst = active.top();
        active.pop();
        if (worst.hi - worst.lo < 2.0 * spec.min_panel_width) {
            frozen.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.lo + worst.hi);
        const Panel left = gauss_kronrod_15(f, worst.lo, mid);
        const Panel right = gauss_kronrod_15(f, mid, worst.hi);
        evaluations += 30;
        ++subdivisions;
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        abs_sum += left.resabs + right.resabs - worst.resabs;
        active.push(left);
        active.push(right);
    }

    // Final reduction in position order so the sum does not depend on heap layout.
    std::vector<Panel> panels = std::move(frozen);
    while (!active.empty()) {
        panels.push_back(active.top());
        active.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    QuadResult out;
    for (const Panel& p : panels) {
        out.value += p.value;
        out.err_est += p.err;
    }
    out.evaluations = evaluations;
    return out;
}

// Genz-Malik degree 7 rule with embedded degree 5 rule.
constexpr double gm_lambda2 = 0.3585685828003180919906451539079374954541;  // sqrt(9/70)
constexpr double gm_lambda4 = 0.9486832980505137995996680633298155601160;  // sqrt(9/10)
constexpr double gm_lambda5 = 0.6882472016116852977216287342936235251269;  // sqrt(9/19)

constexpr int max_dim = 4;
using Point = std::array<double, max_dim>;

struct Region {
    Point centre{};
    Point half{};
    double value = 0.0;
    double err = 0.0;
    int split_axis = 0;
    long id = 0;
};

struct RegionOrder {
    bool operator()(const Region& a, const Region& b) const
    {
        if (a.err != b.err) return a.err < b.err;
        return a.id > b.id;
    }
};

class GenzMalik {
public:
    explicit GenzMalik(int dim) : dim_(dim)
    {
        const double n = dim;
        w1_ = (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0;
        w2_ = 980.0 / 6561.0;
        w3_ = (1820.0 - 400.0 * n) / 19683.0;
        w4_ = 200.0 / 19683.0;
        w5_ = 6859.0 / 19683.0 / static_cast<double>(1 << dim);
        v1_ = (729.0 - 950.0 * n + 50.0 * n * n) / 729.0;
        v2_ = 245.0 / 486.0;
        v3_ = (265.0 - 100.0 * n) / 1458.0;
        v4_ = 25.0 / 729.0;
    }

    int points_per_region() const { return 1 + 4 * dim_ + 2 * dim_ * (dim_ - 1) + (1 << dim_); }

    void evaluate(const IntegrandNd& f, Region& r) const
    {
        Point x = r.centre;
        auto at = [&](const Point& p) {
            return checked(f(std::span<const double>(p.data(), static_cast<std::size_t>(dim_))), p[0]);
        };

        const double f0 = at(x);
        double sum2 = 0.0;
        double sum3 = 0.0;
        double sum4 = 0.0;
        double sum5 = 0.0;
        double best_diff = -1.0;
        int best_axis = 0;

        for (int i = 0; i < dim_; ++i) {
            x[i] = r.centre[i] - gm_lambda2 * r.half[i];
            const double a1 = at(x);
            x[i] = r.centre[i] + gm_lambda2 * r.half[i];
            const double a2 = at(x);
            x[i] = r.centre[i] - gm_lambda4 * r.half[i];
            const double b1 = at(x);
            x[i] = r.centre[i] + gm_lambda4 * r.half[i];
            const double b2 = at(x);
            x[i] = r.centre[i];
            sum2 += a1 + a2;
            sum3 += b1 + b2;
            // Fourth divided difference along axis i picks the split direction.
            const double diff = std::abs(a1 + a2 - 2.0 * f0 - (b1 + b2 - 2.0 * f0) / 7.0);
            const bool similar = std::abs(diff - best_diff) <= 1e-10 * std::max(diff, best_diff);
            if (diff > best_diff && !similar) {
                best_diff = diff;
                best_axis = i;
            } else if (similar && r.half[i] > r.half[best_axis]) {
                best_axis = i;
            }
        }

        for (int i = 0; i < dim_; ++i) {
            for (int j = i + 1; j < dim_; ++j) {
                for (int si = -1; si <= 1; si += 2) {
                    for (int sj = -1; sj <= 1; sj += 2) {
                        x[i] = r.centre[i] + si * gm_lambda4 * r.half[i];
                        x[j] = r.centre[j] + sj * gm_lambda4 * r.half[j];
                        sum4 += at(x);
                    }
                }
                x[i] = r.centre[i];
                x[j] = r.centre[j];
            }
        }

        for (int mask = 0; mask < (1 << dim_); ++mask) {
            for (int i = 0; i < dim_; ++i) {
                const double s = (mask >> i) & 1 ? 1.0 : -1.0;
                x[i] = r.centre[i] + s * gm_lambda5 * r.half[i];
            }
            sum5 += at(x);
        }

        double volume = 1.0;
        for (int i = 0; i < dim_; ++i) volume *= 2.0 * r.half[i];

        const double deg7 = w1_ * f0 + w2_ * sum2 + w3_ * sum3 + w4_ * sum4 + w5_ * sum5;
        const double deg5 = v1_ * f0 + v2_ * sum2 + v3_ * sum3 + v4_ * sum4;
        r.value = volume * deg7;
        r.err = std::abs(volume * (deg7 - deg5));
        r.split_axis = best_axis;
    }

private:
    int dim_;
    double w1_, w2_, w3_, w4_, w5_;
    double v1_, v2_, v3_, v4_;
};

void evaluate_batch(const GenzMalik& rule, const IntegrandNd& f, std::vector<Region>& batch,
                    Execution exec)
{
    const long n = static_cast<long>(batch.size());
    if (exec == Execution::parallel) {
        // Exceptions must not escape an OpenMP region; capture the first by index.
        std::vector<std::exception_ptr> failures(batch.size());
#pragma omp parallel for schedule(dynamic, 4)
        for (long i = 0; i < n; ++i) {
            try {
                rule.evaluate(f, batch[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
        for (const auto& e : failures) {
            if (e) std::rethrow_exception(e);
        }
    } else {
        for (long i = 0; i < n; ++i) rule.evaluate(f, batch[i]);
    }
}

QuadResult cubature(const IntegrandNd& f, std::span<const Interval> box, const QuadratureSpec& spec,
                    const NdOptions& options)
{
    const int dim = static_cast<int>(box.size());
    const GenzMalik rule(dim);

    std::array<int, max_dim> counts{1, 1, 1, 1};
    long n_initial = 1;
    for (int i = 0; i < dim; ++i) {
        if (i < static_cast<int>(options.max_initial_panel.size())) {
            const double cap = options.max_initial_panel[i];
            if (std::isfinite(cap) && cap > 0.0) {
                counts[i] = std::max(1, static_cast<int>(std::ceil(box[i].width() / cap)));
            }
        }
        n_initial *= counts[i];
    }

    std::vector<Region> batch;
    batch.reserve(static_cast<std::size_t>(n_initial));
    long next_id = 0;
    for (long k = 0; k < n_initial; ++k) {
        Region r;
        long rest = k;
        for (int i = 0; i < dim; ++i) {
            const int idx = static_cast<int>(rest % counts[i]);
            rest /= counts[i];
            const double step = box[i].width() / counts[i];
            r.half[i] = 0.5 * step;
            r.centre[i] = box[i].lo + (idx + 0.5) * step;
        }
        r.id = next_id++;
        batch.push_back(r);
    }
    evaluate_batch(rule, f, batch, options.execution);

    std::priority_queue<Region, std::vector<Region>, RegionOrder> active;
    std::vector<Region> frozen;
    double value = 0.0;
    double err = 0.0;
    for (const Region& r : batch) {
        value += r.value;
        err += r.err;
        active.push(r);
    }
    long evaluations = n_initial * rule.points_per_region();

    constexpr int batch_size = 32;
    long subdivisions = 0;
    while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
        if (active.empty()) {
            throw Error(ErrorKind::non_convergence,
                        "all regions reached min_panel_width with error " + std::to_string(err));
        }
        if (subdivisions >= spec.max_subdivisions) {
            throw Error(ErrorKind::non_convergence,
                        std::to_string(spec.max_subdivisions) + " region splits exhausted, error " +
                            std::to_string(err) + ", value " + std::to_string(value));
        }
        batch.clear();
        while (!active.empty() && static_cast<int>(batch.size()) < 2 * batch_size &&
               subdivisions < spec.max_subdivisions) {
            Region worst = active.top();
            active.pop();
            const int axis = worst.split_axis;
            if (2.0 * worst.half[axis] < 2.0 * spec.min_panel_width) {
                frozen.push_back(worst);
                continue;
            }
            value -= worst.value;
            err -= worst.err;
            Region left = worst;
            Region right = worst;
            left.half[axis] = right.half[axis] = 0.5 * worst.half[axis];
            left.centre[axis] = worst.centre[axis] - left.half[axis];
            right.centre[axis] = worst.centre[axis] + right.half[axis];
            left.id = next_id++;
            right.id = next_id++;
            batch.push_back(left);
            batch.push_back(right);
            ++subdivisions;
        }
        evaluate_batch(rule, f, batch, options.execution);
        evaluations += static_cast<long>(batch.size()) * rule.points_per_region();
        for (const Region& r : batch) {
            value += r.value;
            err += r.err;
            active.push(r);
        }
    }

    std::vector<Region> regions = std::move(frozen);
    while (!active.empty()) {
        regions.push_back(active.top());
        active.pop();
    }
    std::sort(regions.begin(), regions.end(),
              [](const Region& a, const Region& b) { return a.id < b.id; });
    QuadResult out;
    for (const Region& r : regions) {
        out.value += r.value;
        out.err_est += r.err;
    }
    out.evaluations = evaluations;
    return out;
}

QuadResult nested(const IntegrandNd& f, std::span<const Interval> box, const QuadratureSpec& spec,
                  const NdOptions& options)
{
    const double outer_cap = options.max_initial_panel.size() > 0 ? options.max_initial_panel[0]
                                                                   : infinity;
    const double inner_cap = options.max_initial_panel.size() > 1 ? options.max_initial_panel[1]
                                                                   : infinity;
    QuadratureSpec inner_spec = spec;
    inner_spec.rel_tol = std::max(spec.rel_tol * 0.1, 10.0 * epsilon);
    inner_spec.abs_tol = spec.abs_tol * 0.1 / box[0].width();

    const Interval outer_domain = box[0];
    const Interval inner_domain = box[1];
    double inner_err_max = 0.0;
    long evaluations = 0;
    auto outer = [&](double x) {
        const QuadResult inner = adaptive_gk(
            [&](double y) {
                const std::array<double, 2> pt{x, y};
                return f(std::span<const double>(pt));
            },
            inner_domain.lo, inner_domain.hi, inner_spec, inner_cap);
        inner_err_max = std::max(inner_err_max, inner.err_est);
        evaluations += inner.evaluations;
        return inner.value;
    };
    QuadResult out = adaptive_gk(outer, outer_domain.lo, outer_domain.hi, spec, outer_cap);
    out.err_est += inner_err_max * outer_domain.width();
    out.evaluations = evaluations;
    return out;
}

}  // namespace

void Interval::validate() const
{
    if (!std::isfinite(lo) || std::isnan(hi) || !(lo < hi) || hi == -infinity) {
        throw Error(ErrorKind::invalid_state, "interval requires finite lo < hi, got [" +
                                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

void QuadratureSpec::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1 || !(min_panel_width >= 0.0)) {
        throw Error(ErrorKind::invalid_state,
                    "quadrature spec requires rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1");
    }
}

QuadResult integrate_1d(const Integrand1d& f, Interval domain, const QuadratureSpec& spec,
                        double max_initial_panel)
{
    domain.validate();
    spec.validate();
    if (!domain.is_semi_infinite()) {
        return adaptive_gk(f, domain.lo, domain.hi, spec, max_initial_panel);
    }
    const double lo = domain.lo;
    auto mapped = [&](double t) {
        const double one_minus = 1.0 - t;
        const double x = lo + t / one_minus;
        const double v = f(x);
        if (v == 0.0) return 0.0;
        return v / (one_minus * one_minus);
    };
    return adaptive_gk(mapped, 0.0, 1.0, spec, infinity);
}

QuadResult integrate_nd(const IntegrandNd& f, std::span<const Interval> box, const QuadratureSpec& spec,
                        const NdOptions& options)
{
    spec.validate();
    const auto dim = box.size();
    if (dim != 2 && dim != 4) {
        throw Error(ErrorKind::unsupported_dimension,
                    "integrate_nd supports dimension 2 or 4, got " + std::to_string(dim));
    }
    for (const Interval& iv : box) {
        iv.validate();
        if (iv.is_semi_infinite()) {
            throw Error(ErrorKind::invalid_state, "integrate_nd requires finite intervals");
        }
    }
    NdRule rule = options.rule;
    if (rule == NdRule::automatic) rule = dim == 2 ? NdRule::nested : NdRule::cubature;
    if (rule == NdRule::nested) {
        if (dim != 2) {
            throw Error(ErrorKind::unsupported_dimension, "nested rule is implemented for 2-D boxes");
        }
        return nested(f, box, spec, options);
    }
    return cubature(f, box, spec, options);
}

double oscillation_panel_width(double r0_component)
{
    if (r0_component == 0.0) return infinity;
    return std::numbers::pi / (8.0 * std::abs(r0_component));
}

}  // namespace catscatter
