#pragma once

// Index-parallel loops with a serial reference path. Results written by index
// keep the output order independent of scheduling.

#include <cstddef>
#include <exception>
#include <mutex>

namespace oemt {

enum class Exec { serial, parallel };

int max_threads();
void set_threads(int n);

template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr error;
    std::mutex guard;
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace oemt
