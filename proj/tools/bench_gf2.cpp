// Benchmark of the GF(2) elimination kernels: the OpenMP variant against
// the serial reference, across sizes that bracket the dispatch threshold.
#include <chrono>
#include <cstdio>
#include <random>

#include <omp.h>

#include "nilops/gf2.hpp"

using nilops::gf2::BitMatrix;

namespace {

BitMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (rng() & 1)
                m.set(r, c, true);
    return m;
}

template <class F>
double time_ms(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i)
        f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    std::printf("gf2 row reduction, serial vs OpenMP (%d thread(s))\n", omp_get_max_threads());
    std::printf("%8s %6s %12s %12s %8s\n", "size", "reps", "serial ms", "openmp ms", "speedup");
    std::mt19937_64 rng(12345);
    for (std::size_t n : {64u, 128u, 256u, 512u, 1024u, 2048u}) {
        const int reps = n <= 256 ? 20 : (n <= 1024 ? 5 : 2);
        const BitMatrix m = random_matrix(rng, n);
        volatile std::size_t sink = 0;
        const double serial =
            time_ms([&] { sink = sink + nilops::gf2::row_reduce_serial(m).rank; }, reps);
        const double parallel =
            time_ms([&] { sink = sink + nilops::gf2::row_reduce_parallel(m).rank; }, reps);
        // the two kernels must agree before their timings mean anything
        if (!(nilops::gf2::row_reduce_serial(m).reduced == nilops::gf2::row_reduce_parallel(m).reduced)) {
            std::fprintf(stderr, "kernel mismatch at size %zu\n", n);
            return 1;
        }
        std::printf("%8zu %6d %12.3f %12.3f %8.2fx\n", n, reps, serial, parallel,
                    parallel > 0 ? serial / parallel : 0.0);
    }
    return 0;
}
