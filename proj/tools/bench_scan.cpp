// Benchmark: serial reference scan kernel vs the OpenMP one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "dirac/shooting.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double wall_ms(const std::function<void()>& fn)
{
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv)
{
    int points = argc > 1 ? std::atoi(argv[1]) : 400;
    if (points < 2) points = 400;

    dirac::ProblemSpec prob;
    prob.dimension = 5;
    prob.mass = 1.0;
    prob.j = 1.5;
    prob.tau = +1;
    prob.potential = dirac::PotentialModel::hellmann(0.7, 0.5, 0.25);

    dirac::ShootingConfig cfg;

    std::vector<double> energies(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        double t = static_cast<double>(i) / (points - 1);
        energies[static_cast<std::size_t>(i)] = -0.999 + t * 1.998;
    }

    std::vector<double> d_serial, d_parallel;
    std::vector<int> n_serial, n_parallel;

    double ms_serial = wall_ms([&] {
        dirac::scan_kernel_serial(prob, cfg, energies, d_serial, n_serial);
    });
    double ms_parallel = wall_ms([&] {
        dirac::scan_kernel_parallel(prob, cfg, energies, d_parallel, n_parallel);
    });

    double max_diff = 0;
    bool nodes_match = true;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(d_serial[i] - d_parallel[i]));
        nodes_match = nodes_match && (n_serial[i] == n_parallel[i]);
    }

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("scan kernel over %d energies (Hellmann d=5 j=3/2 tau=+1)\n", points);
    std::printf("  serial   : %9.1f ms\n", ms_serial);
    std::printf("  parallel : %9.1f ms  (%d thread(s), speedup %.2fx)\n", ms_parallel, threads,
                ms_serial / ms_parallel);
    std::printf("  agreement: max |D_serial - D_parallel| = %g, node counts %s\n", max_diff,
                nodes_match ? "identical" : "DIFFER");
    return (max_diff == 0.0 && nodes_match) ? 0 : 1;
}
