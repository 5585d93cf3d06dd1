// Times the misranking experiment's OpenMP kernel against the serial
// reference and checks that both produce identical counts.
//
// Usage: bench_experiment [pairs] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "utilrank/montecarlo.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace utilrank;

namespace {

double time_once(ExperimentReport (*run)(const ExperimentConfig&),
                 const ExperimentConfig& config, ExperimentReport& out) {
    const auto start = std::chrono::steady_clock::now();
    out = run(config);
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

bool same_counts(const ExperimentReport& a, const ExperimentReport& b) {
    for (std::size_t i = 0; i < a.metric_estimates.size(); ++i) {
        if (a.metric_estimates[i].misranked != b.metric_estimates[i].misranked) return false;
    }
    for (std::size_t i = 0; i < a.sigma_estimates.size(); ++i) {
        if (a.sigma_estimates[i].misranked != b.sigma_estimates[i].misranked) return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    ExperimentConfig config;
    config.pairs = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200'000;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

    std::printf("pairs=%llu sigmas=%zu metrics=%zu repeats=%d\n",
                static_cast<unsigned long long>(config.pairs), config.sigmas.size(),
                config.metrics.size(), repeats);
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both runs are serial\n");
#endif

    double best_serial = 1e300, best_parallel = 1e300;
    ExperimentReport serial_report, parallel_report;
    for (int r = 0; r < repeats; ++r) {
        const double s = time_once(run_pairwise_experiment_serial, config, serial_report);
        const double p = time_once(run_pairwise_experiment, config, parallel_report);
        if (s < best_serial) best_serial = s;
        if (p < best_parallel) best_parallel = p;
        std::printf("  run %d: serial %.3fs, parallel %.3fs\n", r + 1, s, p);
    }

    if (!same_counts(serial_report, parallel_report)) {
        std::printf("MISMATCH: serial and parallel counts differ\n");
        return 1;
    }
    std::printf("counts identical; best serial %.3fs, best parallel %.3fs, speedup %.2fx\n",
                best_serial, best_parallel, best_serial / best_parallel);
    const double per_pair = best_parallel / static_cast<double>(config.pairs) * 1e6;
    std::printf("parallel cost: %.3f us/pair\n", per_pair);
    return 0;
}
