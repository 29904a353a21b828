// Timing comparison of the replicate loops: serial (OMP_NUM_THREADS=1
// equivalent) versus the OpenMP-parallel path. Results are identical
// either way; only wall time differs.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fdrkit/sim.hpp"

int main(int argc, char** argv) {
    const long reps = argc > 1 ? std::atol(argv[1]) : 100;
    const char* experiments[] = {"table2", "fig6"};

    for (const char* name : experiments) {
        double serial_ms = 0.0, parallel_ms = 0.0;
        double serial_probe = 0.0, parallel_probe = 0.0;
#ifdef _OPENMP
        const int max_threads = omp_get_max_threads();
#else
        const int max_threads = 1;
#endif
        {
#ifdef _OPENMP
            omp_set_num_threads(1);
#endif
            const auto t0 = std::chrono::steady_clock::now();
            const auto rep = fdrkit::run_experiment(name, reps, 42);
            const auto t1 = std::chrono::steady_clock::now();
            serial_ms = std::chrono::duration<double, std::milli>(t1 - t0)
                            .count();
            serial_probe = rep.aggregates.begin()->second.mean;
        }
        {
#ifdef _OPENMP
            omp_set_num_threads(max_threads);
#endif
            const auto t0 = std::chrono::steady_clock::now();
            const auto rep = fdrkit::run_experiment(name, reps, 42);
            const auto t1 = std::chrono::steady_clock::now();
            parallel_ms = std::chrono::duration<double, std::milli>(t1 - t0)
                              .count();
            parallel_probe = rep.aggregates.begin()->second.mean;
        }
        std::printf(
            "%-8s reps=%ld  serial %8.1f ms   parallel(%d threads) %8.1f ms  "
            "speedup %.2fx  agree=%s\n",
            name, reps, serial_ms, max_threads, parallel_ms,
            serial_ms / parallel_ms,
            serial_probe == parallel_probe ? "yes" : "NO");
    }
    return 0;
}
