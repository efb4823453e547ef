#pragma once

#include <cstddef>
#include <exception>

namespace lerw {

// Runs fn(i) for i in [0, count) across OpenMP threads and rethrows the first
// exception (lowest index) after the loop completes.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    std::exception_ptr first;
    std::size_t first_index = count;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            fn(i);
        } catch (...) {
#pragma omp critical(lerw_parallel_error)
            if (i < first_index) {
                first_index = i;
                first = std::current_exception();
            }
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace lerw
