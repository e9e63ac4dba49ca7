#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace fwg {

// Results are stored by index, so the output does not depend on the number
// of workers or on scheduling.
template <class T, class F>
std::vector<T> serial_map(std::size_t n, F&& f) {
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
}

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f, int workers = 0) {
    if (workers <= 0) workers = omp_get_max_threads();
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 64) num_threads(workers)
    for (long long i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = f(k);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    // lowest failing index, independent of the worker count
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace fwg
