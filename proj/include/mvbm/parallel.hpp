#pragma once

// Index-parallel loops. Every caller writes results into a slot owned by the
// loop index and reduces afterwards in index order, so output never depends
// on the worker count. serial_for is the reference path used by the tests
// and by workers == 1.

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mvbm {

inline constexpr const char* kWorkersEnv = "MVBM_WORKERS";

/// Worker count from MVBM_WORKERS, else the available parallelism.
inline int default_workers() {
    if (const char* env = std::getenv(kWorkersEnv)) {
        try {
            int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (...) {
        }
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
#endif
}

template <class Body>
void serial_for(std::size_t count, Body&& body) {
    for (std::size_t i = 0; i < count; ++i) body(i);
}

template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
#ifdef _OPENMP
    if (workers > 1 && count > 1) {
        std::vector<std::exception_ptr> errors(count);
        const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (long long i = 0; i < n; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        return;
    }
#endif
    (void)workers;
    serial_for(count, body);
}

/// results[i] = fn(i), computed with up to `workers` threads.
template <class Fn>
auto parallel_map(std::size_t count, int workers, Fn&& fn) {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> results(count);
    parallel_for(count, workers, [&](std::size_t i) { results[i] = fn(i); });
    return results;
}

} // namespace mvbm
