#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

// Data-parallel kernels for grid sweeps (certification grids, equilibrium
// scans, contour grids). Every parallel kernel has a serial twin with
// identical semantics; results are index-deterministic, so thread count never
// changes output bytes. ROLLKIT_THREADS caps the team size.
namespace rollkit::par {

inline int max_threads() {
#ifdef _OPENMP
    int hw = omp_get_max_threads();
#else
    int hw = 1;
#endif
    if (const char* env = std::getenv("ROLLKIT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) hw = std::min(hw, cap);
    }
    return hw;
}

template <class F>
void fill_serial(std::size_t n, F&& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

template <class F>
void fill_parallel(std::size_t n, F&& fn) {
#ifdef _OPENMP
    const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
#else
    fill_serial(n, fn);
#endif
}

template <class F>
void fill(std::size_t n, F&& fn, bool parallel = true) {
    if (parallel) fill_parallel(n, fn);
    else fill_serial(n, fn);
}

// Max of fn(i) over i in [0, n); returns -inf-free 0 for n == 0.
template <class F>
double max_over_serial(std::size_t n, F&& fn) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, fn(i));
    return worst;
}

template <class F>
double max_over_parallel(std::size_t n, F&& fn) {
#ifdef _OPENMP
    double worst = 0.0;
    const int nt = max_threads();
#pragma omp parallel for schedule(static) reduction(max : worst) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        worst = std::max(worst, fn(static_cast<std::size_t>(i)));
    return worst;
#else
    return max_over_serial(n, fn);
#endif
}

template <class F>
double max_over(std::size_t n, F&& fn, bool parallel = true) {
    return parallel ? max_over_parallel(n, fn) : max_over_serial(n, fn);
}

} // namespace rollkit::par
