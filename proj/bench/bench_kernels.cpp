// Serial vs OpenMP timings of the data-parallel kernels. Each pair must also
// agree bit for bit.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "catscatter/analysis.hpp"
#include "catscatter/beam.hpp"
#include "catscatter/scattering.hpp"

using namespace catscatter;

namespace {

template <class Fn>
double time_best(int reps, Fn&& fn, double& result)
{
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        result = fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

bool report(const char* name, int reps, const std::function<double(Execution)>& kernel)
{
    double serial_value = 0.0;
    double parallel_value = 0.0;
    const double ts = time_best(reps, [&] { return kernel(Execution::serial); }, serial_value);
    const double tp = time_best(reps, [&] { return kernel(Execution::parallel); }, parallel_value);
    const bool same = serial_value == parallel_value;
    std::printf("%-34s %10.4f %10.4f %8.2fx  %s\n", name, ts, tp, ts / tp, same ? "identical" : "MISMATCH");
    return same;
}

}  // namespace

int main()
{
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-34s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

    const BeamState cat = BeamState::even_cat(2.0, 6.0);
    bool ok = true;
    ok &= report("negativity slice 512^2", 3, [&](Execution e) {
        return negativity_scan(cat, standard_scan_box(cat), 512, ScanMode::slice, e).min_value;
    });
    ok &= report("negativity full 32^4", 3, [&](Execution e) {
        return negativity_scan(cat, standard_scan_box(cat), 32, ScanMode::full, e).negative_volume_fraction;
    });
    ok &= report("wigner norm (4-D cubature)", 3, [&](Execution e) {
        return integrate_wigner(BeamState::odd_cat(2.0, 6.0), QuadratureSpec::four_d(), e).value;
    });
    ok &= report("general4d event density", 2, [&](Execution e) {
        ScatteringConfig cfg;
        cfg.state = BeamState::odd_cat(2.0, 4.0);
        cfg.target = TargetProfile::gaussian(20.0);
        cfg.execution = e;
        return event_density_general(cfg, Kinematics::elastic(10.0, 10.0 * degree)).value;
    });
    ok &= report("r0 sweep, 24 points", 2, [&](Execution e) {
        AsymmetrySpec spec;
        spec.cfg.state = BeamState::even_cat(2.0, 4.0);
        const auto values = linspace(2.0, 8.0, 24);
        double sum = 0.0;
        for (const auto& row : sweep(spec, SweepAxis::r0, values, e)) sum += row.result->A;
        return sum;
    });
    return ok ? 0 : 1;
}
