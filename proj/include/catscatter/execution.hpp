#pragma once

#include <exception>
#include <vector>

namespace catscatter {

/// Selects between the OpenMP kernels and their serial reference versions.
/// Both produce bit-identical results; the serial path exists for testing.
enum class Execution { serial, parallel };

/// out[i] = fn(i) for i in [0, n). Each slot is written by exactly one
/// iteration, so the result is independent of scheduling. The first
/// exception by index is rethrown after the loop.
template <class T, class Fn>
std::vector<T> indexed_map(long n, Execution exec, const Fn& fn)
{
    std::vector<T> out(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n));
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < n; ++i) {
            try {
                out[i] = fn(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    } else {
        for (long i = 0; i < n; ++i) {
            try {
                out[i] = fn(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    }
    for (const auto& e : failures) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace catscatter
